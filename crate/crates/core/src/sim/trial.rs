//! One Monte-Carlo trial: a channel draw shared by every scheme and SNR.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use super::config::{Scheme, SimConfig};
use crate::c64;
use crate::channel::{sample_paths, ChannelMatrices, Domain, PathProfile};
use crate::error::{Error, Result};
use crate::linalg::mat_vec;
use crate::mub::{build_bases, BasisPair};
use crate::precoder::{qr_precoder, MmseSolver};
use crate::sic::{support_size, transmit, SicReceiver, SuperposedFrame};
use crate::tcm::TcmConfig;

/// Random-stream purposes within a trial.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[repr(u64)]
pub enum Stream {
    Channel = 0,
    Payload1 = 1,
    Payload2 = 2,
    Noise = 3,
}

/// Generator for `(seed, trial, purpose)`: the master seed keys the
/// generator, `4 * trial + purpose` selects the stream.
pub fn trial_rng(seed: u64, trial: u64, purpose: Stream) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(trial * 4 + purpose as u64);
    rng
}

/// Noise variance for a per-symbol SNR in dB; zero at `+inf`.
pub fn noise_variance(snr_db: f64) -> f64 {
    if snr_db == f64::INFINITY {
        0.0
    } else {
        10f64.powf(-snr_db / 10.0)
    }
}

fn random_bits(rng: &mut impl Rng, n: usize) -> Vec<u8> {
    (0..n).map(|_| rng.random::<bool>() as u8).collect()
}

/// `n` samples of `CN(0, 1)`.
pub fn unit_noise(rng: &mut impl Rng, n: usize) -> Vec<c64> {
    let s = std::f64::consts::FRAC_1_SQRT_2;
    (0..n)
        .map(|_| {
            let re: f64 = rng.sample(StandardNormal);
            let im: f64 = rng.sample(StandardNormal);
            c64::new(re * s, im * s)
        })
        .collect()
}

/// Error counts of one scheme at one SNR and turbo count.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct FrameErrors {
    pub scheme: Scheme,
    pub snr_index: usize,
    pub turbo_iters: usize,
    pub errors1: u64,
    pub errors2: u64,
    pub bits1: u64,
    pub bits2: u64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrialOutcome {
    pub trial: u64,
    pub entries: Vec<FrameErrors>,
}

/// State reused across trials.
pub struct Simulator {
    cfg: SimConfig,
    profile: PathProfile,
    bases: BasisPair,
    tcm: TcmConfig,
}

/// `(domain, beta)` of the equivalent channel a scheme sees.
fn channel_kind(cfg: &SimConfig, scheme: Scheme) -> (Domain, f64) {
    if scheme.is_ftn() {
        (scheme.domain(), cfg.beta())
    } else {
        (Domain::Dd, 1.0)
    }
}

impl Simulator {
    pub fn new(cfg: &SimConfig) -> Result<Self> {
        cfg.validate()?;
        Ok(Simulator {
            profile: cfg.channel.path_profile()?,
            bases: build_bases(cfg.grid.mn())?,
            tcm: TcmConfig::default(),
            cfg: cfg.clone(),
        })
    }

    pub fn config(&self) -> &SimConfig {
        &self.cfg
    }

    /// Schemes grouped by the channel matrix they share, in config order.
    pub fn channel_groups(&self) -> Vec<Vec<Scheme>> {
        let mut groups: Vec<((Domain, f64), Vec<Scheme>)> = Vec::new();
        for &s in &self.cfg.schemes {
            let kind = channel_kind(&self.cfg, s);
            match groups.iter_mut().find(|(k, _)| *k == kind) {
                Some((_, v)) => v.push(s),
                None => groups.push((kind, vec![s])),
            }
        }
        groups.into_iter().map(|(_, v)| v).collect()
    }

    /// Runs every configured scheme for one trial.
    pub fn run_trial(&self, trial: u64) -> Result<TrialOutcome> {
        let snrs: Vec<usize> = (0..self.cfg.snr_db.len()).collect();
        self.run_schemes(trial, &self.cfg.schemes, &snrs)
    }

    /// Runs a subset of schemes at a subset of SNR indices.
    pub fn run_schemes(&self, trial: u64, schemes: &[Scheme], snrs: &[usize]) -> Result<TrialOutcome> {
        let cfg = &self.cfg;
        let grid = &cfg.grid;
        let mn = grid.mn();
        let seed = cfg.seed;

        let ch = sample_paths(&self.profile, cfg.channel.nu_max, &mut trial_rng(seed, trial, Stream::Channel))?;
        let payload1 = random_bits(&mut trial_rng(seed, trial, Stream::Payload1), 2 * mn);
        let support = support_size(cfg.delta(), mn);
        let payload2 = random_bits(&mut trial_rng(seed, trial, Stream::Payload2), 2 * support);
        let noise = unit_noise(&mut trial_rng(seed, trial, Stream::Noise), mn);

        let mut kinds: Vec<(Domain, f64)> = Vec::new();
        for &s in schemes {
            let k = channel_kind(cfg, s);
            if !kinds.contains(&k) {
                kinds.push(k);
            }
        }

        let mut entries = Vec::new();
        for (domain, beta) in kinds {
            let group: Vec<Scheme> = schemes.iter().copied().filter(|&s| channel_kind(cfg, s) == (domain, beta)).collect();
            let h = ChannelMatrices::build(&ch, grid, beta, domain)?.h_domain;
            let qr = qr_precoder(h.as_ref())?;

            // noiseless received frames, one per scheme
            let mut tx = Vec::with_capacity(group.len());
            for &s in &group {
                let (alpha, delta, bits2) = if s == Scheme::ZakMub {
                    (cfg.alpha(), cfg.delta(), payload2.as_slice())
                } else {
                    (1.0, 0.0, &[][..])
                };
                let frame = SuperposedFrame::from_bits(&payload1, bits2, alpha, delta, cfg.coding, &self.tcm)?;
                let x = transmit(&frame, qr.q.as_ref(), &self.bases)?;
                tx.push((s, frame.alpha, frame.support, mat_vec(h.as_ref(), &x)?));
            }
            let solver = MmseSolver::new(qr.r)?;

            for &snr_index in snrs {
                let snr_db = *cfg.snr_db.get(snr_index).ok_or_else(|| {
                    Error::InvalidParameter(format!("SNR index {snr_index} out of range"))
                })?;
                let sigma2 = noise_variance(snr_db);
                let sigma = sigma2.sqrt();
                let combiner = solver.at(sigma2)?;
                for (s, alpha, support, hx) in &tx {
                    let y: Vec<c64> = hx.iter().zip(&noise).map(|(a, n)| a + n * sigma).collect();
                    let turbo = if *s == Scheme::ZakMub { cfg.max_turbo() } else { 0 };
                    let rx = SicReceiver {
                        bases: &self.bases,
                        alpha: *alpha,
                        support: *support,
                        coding: cfg.coding,
                        tcm: self.tcm,
                        turbo_iters: turbo,
                    };
                    let result = rx.receive(&y, &combiner)?;
                    let truth2: &[u8] = if *s == Scheme::ZakMub { &payload2 } else { &[] };
                    let counts = result.error_counts(&payload1, truth2);
                    let turbo_list: Vec<usize> = if *s == Scheme::ZakMub { cfg.turbo_iters.clone() } else { vec![0] };
                    for t in turbo_list {
                        let (e1, e2) = counts[t];
                        entries.push(FrameErrors {
                            scheme: *s,
                            snr_index,
                            turbo_iters: t,
                            errors1: e1,
                            errors2: e2,
                            bits1: payload1.len() as u64,
                            bits2: truth2.len() as u64,
                        });
                    }
                }
            }
        }
        Ok(TrialOutcome { trial, entries })
    }
}

/// Runs one trial of `cfg`.
pub fn run_trial(cfg: &SimConfig, trial: u64) -> Result<TrialOutcome> {
    Simulator::new(cfg)?.run_trial(trial)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::GridParams;
    use crate::sic::Coding;

    fn small(schemes: Vec<Scheme>) -> SimConfig {
        SimConfig {
            grid: GridParams::new(4, 3, 15e3).unwrap(),
            schemes,
            snr_db: vec![0.0, 10.0, f64::INFINITY],
            turbo_iters: vec![0, 2],
            trials: 4,
            seed: 11,
            ..SimConfig::default()
        }
    }

    #[test]
    fn streams_are_independent_and_reproducible() {
        let a: u64 = trial_rng(5, 0, Stream::Channel).random();
        let b: u64 = trial_rng(5, 0, Stream::Noise).random();
        let c: u64 = trial_rng(5, 1, Stream::Channel).random();
        let d: u64 = trial_rng(6, 0, Stream::Channel).random();
        assert_eq!(a, trial_rng(5, 0, Stream::Channel).random::<u64>());
        assert!(a != b && a != c && a != d);
    }

    #[test]
    fn noise_statistics() {
        let n = unit_noise(&mut trial_rng(1, 0, Stream::Noise), 20_000);
        let p: f64 = n.iter().map(|z| z.norm_sqr()).sum::<f64>() / n.len() as f64;
        assert!((p - 1.0).abs() < 0.03);
        assert_eq!(noise_variance(10.0), 0.1);
        assert_eq!(noise_variance(f64::INFINITY), 0.0);
    }

    #[test]
    fn trial_is_deterministic() {
        let cfg = small(Scheme::ALL.to_vec());
        let a = run_trial(&cfg, 2).unwrap();
        let b = run_trial(&cfg, 2).unwrap();
        assert_eq!(a, b);
        // zak-mub reports two turbo counts, the others one, per SNR
        assert_eq!(a.entries.len(), 3 * (2 + 1 + 1 + 1));
    }

    #[test]
    fn noiseless_is_error_free() {
        for coding in [Coding::Tcm, Coding::Uncoded] {
            let mut cfg = small(vec![Scheme::ZakMub, Scheme::ZakMmseSingle]);
            cfg.coding = coding;
            let out = run_trial(&cfg, 0).unwrap();
            for e in out.entries.iter().filter(|e| e.snr_index == 2) {
                assert_eq!((e.errors1, e.errors2), (0, 0), "{e:?}");
            }
        }
    }

    #[test]
    fn scheme_subsets_agree() {
        let cfg = small(Scheme::ALL.to_vec());
        let sim = Simulator::new(&cfg).unwrap();
        let all = sim.run_trial(1).unwrap();
        let mut parts = Vec::new();
        for g in sim.channel_groups() {
            parts.extend(sim.run_schemes(1, &g, &[0, 1, 2]).unwrap().entries);
        }
        let mut a = all.entries.clone();
        a.sort_by_key(|e| (e.scheme, e.snr_index, e.turbo_iters));
        parts.sort_by_key(|e| (e.scheme, e.snr_index, e.turbo_iters));
        assert_eq!(a, parts);
        assert_eq!(sim.channel_groups().len(), 3);
    }

    #[test]
    fn empty_support_matches_single_frame() {
        let mut cfg = small(vec![Scheme::ZakMub, Scheme::ZakMmseSingle]);
        cfg.delta = Some(0.0);
        let out = run_trial(&cfg, 3).unwrap();
        for snr_index in 0..3 {
            let single = out
                .entries
                .iter()
                .find(|e| e.scheme == Scheme::ZakMmseSingle && e.snr_index == snr_index)
                .unwrap();
            for e in out.entries.iter().filter(|e| e.scheme == Scheme::ZakMub && e.snr_index == snr_index) {
                assert_eq!(e.errors1, single.errors1);
                assert_eq!(e.bits2, 0);
            }
        }
    }
}
