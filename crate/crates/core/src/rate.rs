//! Closed-form SINR and effective-rate analysis of the two-frame scheme.
//!
//! With total power `P = 1`, `P1 = alpha`, `P2 = 1 - alpha` and noise
//! variance `sigma^2 = 1 / snr`:
//!
//! ```text
//! SINR1 = P1 / (sigma^2 + delta P2 / MN)
//! Ps1   = Q(sqrt(2 d SINR1))
//! SINR2 = P2 / (sigma^2 + P1 Ps1 / MN)
//! R_eff = log2(1 + SINR1) + delta log2(1 + SINR2)
//! ```
//!
//! `d` is the free-distance term; see [`DfreeMode`].

use std::io::Write;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Gaussian tail probability `Q(x) = erfc(x / sqrt 2) / 2`.
pub fn q_function(x: f64) -> f64 {
    0.5 * libm::erfc(x / std::f64::consts::SQRT_2)
}

/// How the free distance enters the frame-1 error probability.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum DfreeMode {
    /// `d = d_free`, e.g. `sqrt(20)` substituted literally.
    AsPrinted,
    /// `d = d_free^2`.
    Squared,
}

impl DfreeMode {
    pub fn term(self, dfree: f64) -> f64 {
        match self {
            DfreeMode::AsPrinted => dfree,
            DfreeMode::Squared => dfree * dfree,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RatePoint {
    pub alpha: f64,
    pub delta: f64,
    /// `P / sigma^2`, linear.
    pub snr: f64,
    pub dfree: f64,
    pub mn: usize,
    pub sinr1: f64,
    pub sinr2: f64,
    pub ps1: f64,
    pub r1: f64,
    pub r2: f64,
    pub r_eff: f64,
}

/// `(SINR1, SINR2, Ps1)`.
pub fn sinr_frames(alpha: f64, delta: f64, snr: f64, mn: usize, dfree: f64, mode: DfreeMode) -> Result<(f64, f64, f64)> {
    if !(0.0..=1.0).contains(&alpha) || !(0.0..=1.0).contains(&delta) {
        return Err(Error::InvalidParameter(format!(
            "alpha and delta must lie in [0, 1], got alpha={alpha} delta={delta}"
        )));
    }
    if snr.is_nan() || snr <= 0.0 || mn == 0 {
        return Err(Error::InvalidParameter(format!("snr must be positive and MN nonzero, got {snr}, {mn}")));
    }
    let sigma2 = 1.0 / snr;
    let (p1, p2) = (alpha, 1.0 - alpha);
    let mn = mn as f64;
    let sinr1 = p1 / (sigma2 + delta * p2 / mn);
    let ps1 = q_function((2.0 * mode.term(dfree) * sinr1).sqrt());
    let sinr2 = p2 / (sigma2 + p1 * ps1 / mn);
    Ok((sinr1, sinr2, ps1))
}

impl RatePoint {
    pub fn evaluate(alpha: f64, delta: f64, snr: f64, mn: usize, dfree: f64, mode: DfreeMode) -> Result<Self> {
        let (sinr1, sinr2, ps1) = sinr_frames(alpha, delta, snr, mn, dfree, mode)?;
        let r1 = (1.0 + sinr1).log2();
        let r2 = (1.0 + sinr2).log2();
        Ok(RatePoint {
            alpha,
            delta,
            snr,
            dfree,
            mn,
            sinr1,
            sinr2,
            ps1,
            r1,
            r2,
            r_eff: r1 + delta * r2,
        })
    }
}

/// `R1 + delta R2` for an evaluated point.
pub fn effective_rate(point: &RatePoint) -> f64 {
    (1.0 + point.sinr1).log2() + point.delta * (1.0 + point.sinr2).log2()
}

/// Evaluates every `(alpha, delta)` pair, alpha-major.
pub fn rate_surface(
    alphas: &[f64],
    deltas: &[f64],
    snr: f64,
    mn: usize,
    dfree: f64,
    mode: DfreeMode,
) -> Result<Vec<RatePoint>> {
    let mut out = Vec::with_capacity(alphas.len() * deltas.len());
    for &a in alphas {
        for &d in deltas {
            out.push(RatePoint::evaluate(a, d, snr, mn, dfree, mode)?);
        }
    }
    Ok(out)
}

/// `k / steps` for `k = from..=steps`.
pub fn unit_grid(from: usize, steps: usize) -> Vec<f64> {
    (from..=steps).map(|k| k as f64 / steps as f64).collect()
}

/// Writes `alpha,delta,sinr1,sinr2,ps1,r1,r2,r_eff` rows.
pub fn write_surface_csv<W: Write>(points: &[RatePoint], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["alpha", "delta", "sinr1", "sinr2", "ps1", "r1", "r2", "r_eff"])?;
    for p in points {
        w.write_record([p.alpha, p.delta, p.sinr1, p.sinr2, p.ps1, p.r1, p.r2, p.r_eff].map(|v| v.to_string()))?;
    }
    w.flush()?;
    Ok(())
}

/// Largest admissible sparsity from `E_s >= gamma E_n`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DeltaBound {
    pub raw: f64,
    /// `raw` clamped to `[0, 1]`.
    pub clamped: f64,
}

/// `delta <= (alpha - gamma sigma^2) / (gamma (1 - alpha))`.
pub fn delta_bound(alpha: f64, gamma: f64, sigma2: f64) -> Result<DeltaBound> {
    if gamma.is_nan() || gamma <= 1.0 {
        return Err(Error::InvalidParameter(format!("gamma must exceed 1, got {gamma}")));
    }
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(Error::InvalidParameter(format!("alpha must lie in (0, 1), got {alpha}")));
    }
    if sigma2.is_nan() || sigma2 < 0.0 {
        return Err(Error::InvalidParameter(format!("noise variance must be nonnegative, got {sigma2}")));
    }
    let raw = (alpha - gamma * sigma2) / (gamma * (1.0 - alpha));
    Ok(DeltaBound {
        raw,
        clamped: raw.clamp(0.0, 1.0),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    const DFREE: f64 = 4.472_135_954_999_58; // sqrt(20)

    #[test]
    fn q_function_values() {
        assert_eq!(q_function(0.0), 0.5);
        // reference values of the standard normal tail
        assert!((q_function(1.0) - 0.158_655_253_931_457_05).abs() < 1e-15);
        assert!((q_function(3.0) - 1.349_898_031_630_094_6e-3).abs() < 1e-16);
        assert!((q_function(-1.0) - 0.841_344_746_068_542_9).abs() < 1e-15);
    }

    #[test]
    fn no_second_frame() {
        let (s1, _, _) = sinr_frames(0.7, 0.0, 100.0, 1147, DFREE, DfreeMode::AsPrinted).unwrap();
        assert!((s1 - 70.0).abs() < 1e-9);
    }

    #[test]
    fn nominal_operating_point() {
        let p = RatePoint::evaluate(0.9, 0.25, 1e4, 1147, DFREE, DfreeMode::AsPrinted).unwrap();
        let expect = 0.9 / (1e-4 + 0.25 * 0.1 / 1147.0);
        assert!((p.sinr1 - expect).abs() < 1e-9);
        assert!((p.sinr1 - 7.39e3).abs() < 5.0);
        assert!((p.r1 - 12.85).abs() < 0.01);
        assert!((effective_rate(&p) - p.r_eff).abs() < 1e-12);
    }

    #[test]
    fn zero_sinr_gives_half() {
        let (s1, _, ps1) = sinr_frames(0.0, 0.5, 10.0, 100, DFREE, DfreeMode::Squared).unwrap();
        assert_eq!(s1, 0.0);
        assert_eq!(ps1, 0.5);
    }

    #[test]
    fn unit_sinr_rate() {
        // alpha = 0.5, snr = 2, delta = 0 -> SINR1 = 1
        let p = RatePoint::evaluate(0.5, 0.0, 2.0, 10, DFREE, DfreeMode::AsPrinted).unwrap();
        assert!((p.r_eff - 1.0).abs() < 1e-12);
    }

    #[test]
    fn single_frame_dips() {
        let p = RatePoint::evaluate(1.0, 0.5, 1e4, 1147, DFREE, DfreeMode::AsPrinted).unwrap();
        assert_eq!(p.sinr2, 0.0);
        assert_eq!(p.r_eff, p.r1);
    }

    #[test]
    fn invalid_domain() {
        assert!(sinr_frames(1.1, 0.5, 1.0, 10, DFREE, DfreeMode::AsPrinted).is_err());
        assert!(sinr_frames(0.5, -0.1, 1.0, 10, DFREE, DfreeMode::AsPrinted).is_err());
        assert!(sinr_frames(0.5, 0.5, 0.0, 10, DFREE, DfreeMode::AsPrinted).is_err());
    }

    #[test]
    fn delta_bound_examples() {
        let b = delta_bound(0.5, 4.0, 0.05).unwrap();
        assert!((b.raw - 0.15).abs() < 1e-15);
        let b = delta_bound(0.9, 2.0, 0.01).unwrap();
        assert!((b.raw - 4.4).abs() < 1e-12);
        assert_eq!(b.clamped, 1.0);
        let b = delta_bound(0.6, 3.0, 0.2).unwrap();
        assert!(b.raw.abs() < 1e-15);
        assert!(delta_bound(0.5, 1.0, 0.1).is_err());
        assert!(delta_bound(1.0, 2.0, 0.1).is_err());
    }

    #[test]
    fn monotonicity_by_finite_differences() {
        let grid: Vec<f64> = (1..=50).map(|k| k as f64 / 51.0).collect();
        let h = 1e-6;
        for &a in &grid {
            for &d in &grid {
                let f = |a, d| sinr_frames(a, d, 1e3, 1147, DFREE, DfreeMode::AsPrinted).unwrap();
                let (s1, _, ps) = f(a, d);
                assert!(f(a, d + h).0 < s1);
                assert!(f(a + h, d).0 > s1);
                assert!((0.0..=0.5).contains(&ps));
                // frame 2 loses power as alpha grows for a fixed Ps1
                let s2 = |a: f64| (1.0 - a) / (1e-3 + a * ps / 1147.0);
                assert!(s2(a + h) < s2(a));

                let b = |a, g| delta_bound(a, g, 1e-2).unwrap().raw;
                assert!(b(a + h, 2.0) > b(a, 2.0));
                assert!(b(a, 2.5) < b(a, 2.0));
            }
        }
        // Ps1 falls as SINR1 grows
        let mut last = 0.5;
        for snr in [1.0, 2.0, 5.0, 10.0] {
            let (_, _, ps) = sinr_frames(0.9, 0.25, snr, 1147, DFREE, DfreeMode::AsPrinted).unwrap();
            assert!(ps < last);
            last = ps;
        }
    }

    #[test]
    fn surface_layout_and_csv() {
        let alphas = unit_grid(1, 4);
        let deltas = unit_grid(0, 2);
        let s = rate_surface(&alphas, &deltas, 1e4, 1147, DFREE, DfreeMode::AsPrinted).unwrap();
        assert_eq!(s.len(), 12);
        assert_eq!((s[0].alpha, s[0].delta), (0.25, 0.0));
        assert_eq!((s[1].alpha, s[1].delta), (0.25, 0.5));
        let mut buf = Vec::new();
        write_surface_csv(&s, &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert!(text.starts_with("alpha,delta,sinr1,sinr2,ps1,r1,r2,r_eff\n"));
        assert_eq!(text.lines().count(), 13);
    }
}
