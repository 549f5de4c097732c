use zakmub_core::sim::{read_rows, run_sweep, run_trial, CSV_HEADER};
use zakmub_core::{GridParams, Scheme, SimConfig};

fn small() -> SimConfig {
    SimConfig {
        grid: GridParams::new(5, 4, 15e3).unwrap(),
        schemes: Scheme::ALL.to_vec(),
        snr_db: vec![0.0, 10.0, 20.0],
        turbo_iters: vec![0, 1, 2],
        trials: 6,
        seed: 31,
        ..SimConfig::default()
    }
}

#[test]
fn identical_seed_identical_csv() {
    let dir = tempfile::tempdir().unwrap();
    let strip = |p: &std::path::Path| -> Vec<String> {
        std::fs::read_to_string(p)
            .unwrap()
            .lines()
            .map(|l| {
                let mut f: Vec<&str> = l.split(',').collect();
                f.remove(13);
                f.join(",")
            })
            .collect()
    };
    let (a, b) = (dir.path().join("a.csv"), dir.path().join("b.csv"));
    run_sweep(&small(), Some(&a)).unwrap();
    run_sweep(&small(), Some(&b)).unwrap();
    assert_eq!(strip(&a), strip(&b));
    assert_eq!(CSV_HEADER[13], "wall_seconds");
}

#[test]
fn seeds_change_results() {
    let mut other = small();
    other.seed += 1;
    assert_ne!(run_trial(&small(), 0).unwrap(), run_trial(&other, 0).unwrap());
}

#[test]
fn ber_is_exact_ratio() {
    let rows = run_sweep(&small(), None).unwrap();
    assert_eq!(rows.len(), 3 * 3 + 3 * 3);
    for r in rows {
        let bits1 = if r.scheme == Scheme::ZakMub { 6 * 40 } else { r.total_bits };
        assert_eq!(r.ber_frame1, r.bit_errors_frame1 as f64 / bits1 as f64);
        assert_eq!(r.ber_overall, (r.bit_errors_frame1 + r.bit_errors_frame2) as f64 / r.total_bits as f64);
        assert!(r.ber_overall <= 1.0);
    }
}

#[test]
fn empty_second_frame_equals_single_frame_baseline() {
    let mut cfg = small();
    cfg.schemes = vec![Scheme::ZakMub, Scheme::ZakMmseSingle];
    cfg.delta = Some(0.0);
    let rows = run_sweep(&cfg, None).unwrap();
    for snr in &cfg.snr_db {
        let single = rows.iter().find(|r| r.scheme == Scheme::ZakMmseSingle && r.snr_db == *snr).unwrap();
        for r in rows.iter().filter(|r| r.scheme == Scheme::ZakMub && r.snr_db == *snr) {
            assert_eq!(r.bit_errors_frame1, single.bit_errors_frame1);
            assert_eq!(r.bit_errors_frame2, 0);
            assert_eq!(r.total_bits, single.total_bits);
        }
    }
}

#[test]
fn interrupted_sweep_resumes() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("r.csv");
    let mut partial = small();
    partial.schemes = vec![Scheme::ZakMub];
    run_sweep(&partial, Some(&path)).unwrap();
    let full = run_sweep(&small(), Some(&path)).unwrap();
    let on_disk = read_rows(&path).unwrap();
    assert_eq!(on_disk.len(), full.len());
    let fresh = run_sweep(&small(), None).unwrap();
    for (a, b) in full.iter().zip(&fresh) {
        assert!(a.same_result(b));
    }
}

#[test]
fn config_file_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("c.toml");
    std::fs::write(&path, small().to_toml_string().unwrap()).unwrap();
    assert_eq!(SimConfig::load(&path).unwrap(), small());
    std::fs::write(&path, "snr_db = [1.0]\n[channel]\nnu_max = 10.0\ncolour = 1\n").unwrap();
    assert!(SimConfig::load(&path).is_err());
}
