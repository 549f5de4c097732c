//! Built-in self checks of the building blocks.

use faer::prelude::Solve;
use faer::Side;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::c64;
use crate::channel::{sample_paths, ChannelMatrices, Domain, PathProfile};
use crate::error::{Error, Result};
use crate::grid::{DdFrame, GridParams, TfFrame};
use crate::linalg::{identity_deviation, max_abs_diff, unitarity_deviation};
use crate::mub::{build_bases, verify_mub, BasisPair};
use crate::precoder::{mmse_combiner, qr_precoder};
use crate::rate::{delta_bound, sinr_frames, DfreeMode};
use crate::tcm::TcmConfig;
use crate::transform::{dzt, idzt, itf, tf};
use crate::Mat;

#[derive(Debug, Clone, PartialEq)]
pub struct Check {
    pub name: String,
    /// Measured quantity compared against `tol`.
    pub value: f64,
    pub tol: f64,
    pub passed: bool,
}

impl Check {
    fn at_most(name: &str, value: f64, tol: f64) -> Self {
        Check {
            name: name.into(),
            value,
            tol,
            passed: value <= tol,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct VerifyReport {
    pub checks: Vec<Check>,
}

impl VerifyReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }
}

/// Mutual unbiasedness of a basis pair.
pub fn check_mub(pair: &BasisPair, tol: f64) -> Result<Check> {
    let r = verify_mub(pair, tol)?;
    Ok(Check {
        name: "bases mutually unbiased".into(),
        value: r.max_deviation(),
        tol,
        passed: r.passed(),
    })
}

fn check_transforms() -> Result<Check> {
    let mut worst: f64 = 0.0;
    for (m, n) in [(2, 2), (3, 4), (4, 3)] {
        let g = GridParams::new(m, n, 15e3)?;
        for i in 0..m * n {
            let mut e = vec![c64::new(0.0, 0.0); m * n];
            e[i] = c64::new(1.0, 0.0);
            let dd = dzt(&idzt(&DdFrame::new(e.clone(), &g)?, &g)?, &g)?.data;
            let tfr = tf(&itf(&TfFrame::new(e.clone(), &g)?, &g)?, &g)?.data;
            for back in [dd, tfr] {
                for (a, b) in back.iter().zip(&e) {
                    worst = worst.max((a - b).norm());
                }
            }
        }
    }
    Ok(Check::at_most("transform round trips", worst, 1e-12))
}

fn check_precoder(grid: &GridParams, seed: u64) -> Result<Vec<Check>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let ch = sample_paths(&PathProfile::vehicular_a(), 815.0, &mut rng)?;
    let h = ChannelMatrices::build(&ch, grid, 1.0, Domain::Dd)?.h_domain;
    let qr = qr_precoder(h.as_ref())?;
    let n = h.nrows();
    let recon = qr.r.adjoint() * qr.q.adjoint();
    let scale = crate::linalg::frobenius(h.as_ref());
    let below = (0..n)
        .flat_map(|j| (j + 1..n).map(move |i| (i, j)))
        .map(|(i, j)| qr.r[(i, j)].norm())
        .fold(0.0, f64::max);

    // W H Q = I - sigma^2 (R R^H + sigma^2 I)^{-1} for any channel
    let sigma2 = 1e-6;
    let w = mmse_combiner(qr.r.as_ref(), sigma2)?;
    let link: Mat<c64> = &w * &h * &qr.q;
    let eye = Mat::<c64>::identity(n, n);
    let gram = &qr.r * qr.r.adjoint() + &eye * sigma2;
    let gram_inv = gram
        .llt(Side::Lower)
        .map_err(|e| Error::DegenerateChannel(format!("{e:?}")))?
        .solve(&eye);
    let residual = &link + &gram_inv * sigma2;

    Ok(vec![
        Check::at_most("QR reconstruction", max_abs_diff(recon.as_ref(), h.as_ref()) / scale, 1e-10),
        Check::at_most("Q unitary", unitarity_deviation(qr.q.as_ref()), 1e-10),
        Check::at_most("R upper triangular", below, 1e-10),
        Check::at_most("MMSE link identity", identity_deviation(residual.as_ref()), 1e-6),
        check_link_near_identity(&mut rng)?,
    ])
}

/// `W H Q` on a well-conditioned channel `I + G / (2 sqrt(2n))`.
fn check_link_near_identity(rng: &mut ChaCha8Rng) -> Result<Check> {
    let n = 64;
    let h = Mat::<c64>::from_fn(n, n, |i, j| {
        let re: f64 = rng.sample(StandardNormal);
        let im: f64 = rng.sample(StandardNormal);
        c64::new(re, im) * (0.5 / (2.0 * n as f64).sqrt()) + if i == j { c64::new(1.0, 0.0) } else { c64::new(0.0, 0.0) }
    });
    let qr = qr_precoder(h.as_ref())?;
    let w = mmse_combiner(qr.r.as_ref(), 1e-6)?;
    let link: Mat<c64> = &w * &h * &qr.q;
    Ok(Check::at_most("precoded link near identity", identity_deviation(link.as_ref()), 1e-3))
}

fn check_dfree() -> Check {
    let d2 = TcmConfig::default().dfree_squared();
    Check::at_most("TCM squared free distance is 20", (d2 - 20.0).abs(), 1e-12)
}

fn check_rate_shape() -> Result<Check> {
    let mut violations = 0u32;
    let dfree = 20f64.sqrt();
    let grid: Vec<f64> = (1..20).map(|k| k as f64 / 20.0).collect();
    for &a in &grid {
        for (&d, &d2) in grid.iter().zip(&grid[1..]) {
            let s = |a, d| sinr_frames(a, d, 1e3, 1147, dfree, DfreeMode::AsPrinted).map(|v| v.0);
            if s(a, d2)? >= s(a, d)? {
                violations += 1;
            }
        }
        if delta_bound(a, 2.0, 1e-2)?.raw >= delta_bound((a + 0.01).min(0.999), 2.0, 1e-2)?.raw && a < 0.95 {
            violations += 1;
        }
    }
    Ok(Check::at_most("rate monotonicity", violations as f64, 0.0))
}

/// Runs all checks on `grid`, drawing one random channel from `seed`.
pub fn verify_suite(grid: &GridParams, seed: u64) -> Result<VerifyReport> {
    let bases = build_bases(grid.mn())?;
    let mut checks = vec![check_mub(&bases, 1e-12)?, check_transforms()?];
    checks.extend(check_precoder(grid, seed)?);
    checks.push(check_dfree());
    checks.push(check_rate_shape()?);
    Ok(VerifyReport { checks })
}
