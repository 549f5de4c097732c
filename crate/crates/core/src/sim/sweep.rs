//! Monte-Carlo sweeps with CSV output and resume.

use std::collections::{HashMap, HashSet};
use std::fs::{File, OpenOptions};
use std::io::Write;
use std::path::Path;
use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::config::{Scheme, SimConfig};
use super::trial::{Simulator, TrialOutcome};
use crate::error::{Error, Result};

pub const CSV_HEADER: [&str; 15] = [
    "scheme",
    "snr_db",
    "alpha",
    "delta",
    "beta",
    "turbo_iters",
    "trials",
    "bit_errors_frame1",
    "bit_errors_frame2",
    "total_bits",
    "ber_overall",
    "ber_frame1",
    "ber_frame2",
    "wall_seconds",
    "seed",
];

/// One aggregated output line.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResultRow {
    pub scheme: Scheme,
    pub snr_db: f64,
    pub alpha: f64,
    pub delta: f64,
    pub beta: f64,
    pub turbo_iters: usize,
    pub trials: u64,
    pub bit_errors_frame1: u64,
    pub bit_errors_frame2: u64,
    pub total_bits: u64,
    pub ber_overall: f64,
    pub ber_frame1: f64,
    pub ber_frame2: f64,
    pub wall_seconds: f64,
    pub seed: u64,
}

type RowKey = (Scheme, u64, u64, usize);

impl ResultRow {
    fn key(&self) -> RowKey {
        (self.scheme, self.snr_db.to_bits(), self.seed, self.turbo_iters)
    }

    /// Equality ignoring `wall_seconds`.
    pub fn same_result(&self, other: &ResultRow) -> bool {
        let mut a = self.clone();
        a.wall_seconds = other.wall_seconds;
        a == *other
    }
}

fn ratio(num: u64, den: u64) -> f64 {
    if den == 0 {
        0.0
    } else {
        num as f64 / den as f64
    }
}

/// Parameters recorded for a scheme.
fn scheme_params(cfg: &SimConfig, scheme: Scheme) -> (f64, f64, f64) {
    match scheme {
        Scheme::ZakMub => (cfg.alpha(), cfg.delta(), 1.0),
        Scheme::ZakMmseSingle => (1.0, 0.0, 1.0),
        Scheme::OfdmFtn | Scheme::Otfs1Ftn => (1.0, 0.0, cfg.beta()),
    }
}

fn turbo_list(cfg: &SimConfig, scheme: Scheme) -> Vec<usize> {
    if scheme == Scheme::ZakMub {
        cfg.turbo_iters.clone()
    } else {
        vec![0]
    }
}

/// Expected rows of a sweep, in output order, with their SNR index.
fn planned(cfg: &SimConfig) -> Vec<(Scheme, usize, usize)> {
    let mut out = Vec::new();
    for &s in &cfg.schemes {
        for snr in 0..cfg.snr_db.len() {
            for t in turbo_list(cfg, s) {
                out.push((s, snr, t));
            }
        }
    }
    out
}

/// Sums trial outcomes into rows for the given plan entries.
pub fn aggregate(
    cfg: &SimConfig,
    outcomes: &[TrialOutcome],
    plan: &[(Scheme, usize, usize)],
    wall_seconds: f64,
) -> Vec<ResultRow> {
    let mut sums: HashMap<(Scheme, usize, usize), [u64; 4]> = HashMap::new();
    for e in outcomes.iter().flat_map(|o| &o.entries) {
        let s = sums.entry((e.scheme, e.snr_index, e.turbo_iters)).or_default();
        s[0] += e.errors1;
        s[1] += e.errors2;
        s[2] += e.bits1;
        s[3] += e.bits2;
    }
    plan.iter()
        .filter_map(|&(scheme, snr, t)| {
            let [e1, e2, b1, b2] = *sums.get(&(scheme, snr, t))?;
            let (alpha, delta, beta) = scheme_params(cfg, scheme);
            Some(ResultRow {
                scheme,
                snr_db: cfg.snr_db[snr],
                alpha,
                delta,
                beta,
                turbo_iters: t,
                trials: outcomes.len() as u64,
                bit_errors_frame1: e1,
                bit_errors_frame2: e2,
                total_bits: b1 + b2,
                ber_overall: ratio(e1 + e2, b1 + b2),
                ber_frame1: ratio(e1, b1),
                ber_frame2: ratio(e2, b2),
                wall_seconds,
                seed: cfg.seed,
            })
        })
        .collect()
}

/// Reads rows written by [`run_sweep`].
pub fn read_rows(path: &Path) -> Result<Vec<ResultRow>> {
    let mut r = csv::Reader::from_path(path)?;
    let header: Vec<String> = r.headers()?.iter().map(str::to_owned).collect();
    if header != CSV_HEADER {
        return Err(Error::Config(format!("{} has an unexpected header", path.display())));
    }
    let mut rows = Vec::new();
    for row in r.deserialize() {
        rows.push(row?);
    }
    Ok(rows)
}

/// Writes a header and `rows` as CSV.
pub fn write_rows<W: Write>(rows: &[ResultRow], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    for r in rows {
        w.serialize(r)?;
    }
    if rows.is_empty() {
        w.write_record(CSV_HEADER)?;
    }
    w.flush()?;
    Ok(())
}

/// Writes rows as a JSON array.
pub fn write_json(rows: &[ResultRow], path: &Path) -> Result<()> {
    let mut f = File::create(path)?;
    serde_json::to_writer_pretty(&mut f, rows)?;
    writeln!(f)?;
    Ok(())
}

struct CsvSink {
    w: csv::Writer<File>,
}

impl CsvSink {
    fn open(path: &Path) -> Result<Self> {
        let fresh = std::fs::metadata(path).map(|m| m.len() == 0).unwrap_or(true);
        let file = OpenOptions::new().create(true).append(true).open(path)?;
        let mut w = csv::WriterBuilder::new().has_headers(false).from_writer(file);
        if fresh {
            w.write_record(CSV_HEADER)?;
            w.flush()?;
        }
        Ok(CsvSink { w })
    }

    fn push(&mut self, row: &ResultRow) -> Result<()> {
        self.w.serialize(row)?;
        self.w.flush()?;
        Ok(())
    }
}

/// Runs `cfg`, streaming rows to `out` as each channel group completes.
///
/// Rows already present in `out` (same scheme, SNR, seed and turbo count)
/// are kept and not recomputed. Returns every row of the sweep in config
/// order.
pub fn run_sweep(cfg: &SimConfig, out: Option<&Path>) -> Result<Vec<ResultRow>> {
    run_sweep_with(cfg, out, |_| {})
}

/// [`run_sweep`] with a callback per newly computed row.
pub fn run_sweep_with(cfg: &SimConfig, out: Option<&Path>, mut on_row: impl FnMut(&ResultRow)) -> Result<Vec<ResultRow>> {
    let sim = Simulator::new(cfg)?;
    let existing = match out {
        Some(p) if p.exists() && std::fs::metadata(p)?.len() > 0 => read_rows(p)?,
        _ => Vec::new(),
    };
    let done: HashSet<RowKey> = existing.iter().map(ResultRow::key).collect();
    let key = |s: Scheme, snr: usize, t: usize| (s, cfg.snr_db[snr].to_bits(), cfg.seed, t);

    let mut sink = out.map(CsvSink::open).transpose()?;
    let mut fresh = Vec::new();
    for group in sim.channel_groups() {
        let todo: Vec<(Scheme, usize, usize)> = planned(cfg)
            .into_iter()
            .filter(|&(s, snr, t)| group.contains(&s) && !done.contains(&key(s, snr, t)))
            .collect();
        if todo.is_empty() {
            continue;
        }
        let mut schemes: Vec<Scheme> = todo.iter().map(|e| e.0).collect();
        schemes.dedup();
        let mut snrs: Vec<usize> = todo.iter().map(|e| e.1).collect();
        snrs.sort_unstable();
        snrs.dedup();

        let start = Instant::now();
        let outcomes = (0..cfg.trials)
            .into_par_iter()
            .map(|t| sim.run_schemes(t, &schemes, &snrs))
            .collect::<Result<Vec<_>>>()?;
        let rows = aggregate(cfg, &outcomes, &todo, start.elapsed().as_secs_f64());
        for row in &rows {
            if let Some(s) = sink.as_mut() {
                s.push(row)?;
            }
            on_row(row);
        }
        fresh.extend(rows);
    }

    let mut by_key: HashMap<RowKey, ResultRow> = existing.into_iter().map(|r| (r.key(), r)).collect();
    by_key.extend(fresh.into_iter().map(|r| (r.key(), r)));
    Ok(planned(cfg)
        .into_iter()
        .filter_map(|(s, snr, t)| by_key.get(&key(s, snr, t)).cloned())
        .collect())
}
