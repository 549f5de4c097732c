//! QR precoding and MMSE combining.
//!
//! With `H^H = Q R`, precoding `x = Q x'` turns `y = H x + n` into
//! `y = R^H x' + n`. The receiver applies `W = (R R^H + sigma^2 I)^{-1} R`,
//! so the end-to-end link is `W H Q = (R R^H + sigma^2 I)^{-1} R R^H`, which
//! tends to the identity as the noise vanishes.

use faer::linalg::solvers::Llt;
use faer::prelude::Solve;
use faer::{MatRef, Side};

use crate::c64;
use crate::error::{check_len, Error, Result};
use crate::linalg::mat_vec;
use crate::Mat;

#[derive(Debug, Clone)]
pub struct QrFactors {
    /// Unitary.
    pub q: Mat<c64>,
    /// Upper triangular with a real nonnegative diagonal.
    pub r: Mat<c64>,
}

/// Factors `H^H = Q R`.
///
/// The phases are fixed so that `R` has a real nonnegative diagonal, which
/// makes the factorization unique for nonsingular `H`.
pub fn qr_precoder(h: MatRef<'_, c64>) -> Result<QrFactors> {
    let n = h.nrows();
    check_len(n, h.ncols())?;
    let qr = h.adjoint().qr();
    let mut q = qr.compute_Q();
    let mut r = qr.R().to_owned();
    for i in 0..n {
        let d = r[(i, i)];
        let mag = d.norm();
        if mag == 0.0 {
            continue;
        }
        let phase = d / mag;
        // Q D and D^H R leave the product unchanged
        for j in i..n {
            r[(i, j)] *= phase.conj();
        }
        r[(i, i)] = c64::new(mag, 0.0);
        for k in 0..n {
            q[(k, i)] *= phase;
        }
    }
    Ok(QrFactors { q, r })
}

fn check_sigma2(sigma2: f64) -> Result<()> {
    if sigma2.is_finite() && sigma2 >= 0.0 {
        Ok(())
    } else {
        Err(Error::InvalidParameter(format!("noise variance must be finite and nonnegative, got {sigma2}")))
    }
}

fn regularized_gram(r: MatRef<'_, c64>, sigma2: f64) -> Mat<c64> {
    let mut g = r * r.adjoint();
    for i in 0..g.nrows() {
        g[(i, i)] += c64::new(sigma2, 0.0);
    }
    g
}

fn factor(g: &Mat<c64>) -> Result<Llt<c64>> {
    g.llt(Side::Lower)
        .map_err(|e| Error::DegenerateChannel(format!("R R^H + sigma^2 I is not positive definite ({e:?})")))
}

/// Explicit `W = (R R^H + sigma^2 I)^{-1} R`.
pub fn mmse_combiner(r: MatRef<'_, c64>, sigma2: f64) -> Result<Mat<c64>> {
    check_len(r.nrows(), r.ncols())?;
    check_sigma2(sigma2)?;
    let llt = factor(&regularized_gram(r, sigma2))?;
    Ok(llt.solve(r))
}

/// `x = Q x'`.
pub fn precode(q: MatRef<'_, c64>, xprime: &[c64]) -> Result<Vec<c64>> {
    mat_vec(q, xprime)
}

/// `y' = W y`.
pub fn combine(w: MatRef<'_, c64>, y: &[c64]) -> Result<Vec<c64>> {
    mat_vec(w, y)
}

/// Anything that maps a received frame to the combined frame `y'`.
pub trait Combiner {
    fn combine(&self, y: &[c64]) -> Result<Vec<c64>>;
}

impl Combiner for Mat<c64> {
    fn combine(&self, y: &[c64]) -> Result<Vec<c64>> {
        combine(self.as_ref(), y)
    }
}

/// Precoder and combiner for one channel at one noise level.
#[derive(Debug, Clone)]
pub struct PrecoderSet {
    pub q: Mat<c64>,
    pub r: Mat<c64>,
    pub w: Mat<c64>,
    pub sigma2: f64,
}

impl PrecoderSet {
    pub fn new(h: MatRef<'_, c64>, sigma2: f64) -> Result<Self> {
        let QrFactors { q, r } = qr_precoder(h)?;
        let w = mmse_combiner(r.as_ref(), sigma2)?;
        Ok(PrecoderSet { q, r, w, sigma2 })
    }
}

impl Combiner for PrecoderSet {
    fn combine(&self, y: &[c64]) -> Result<Vec<c64>> {
        combine(self.w.as_ref(), y)
    }
}

/// Holds `R` and `R R^H` so that combiners for many noise levels cost one
/// Cholesky factorization each, without forming `W`.
#[derive(Debug, Clone)]
pub struct MmseSolver {
    r: Mat<c64>,
    gram: Mat<c64>,
}

impl MmseSolver {
    pub fn new(r: Mat<c64>) -> Result<Self> {
        check_len(r.nrows(), r.ncols())?;
        let gram = r.as_ref() * r.adjoint();
        Ok(MmseSolver { r, gram })
    }

    pub fn r(&self) -> MatRef<'_, c64> {
        self.r.as_ref()
    }

    pub fn at(&self, sigma2: f64) -> Result<MmseCombiner<'_>> {
        check_sigma2(sigma2)?;
        let mut g = self.gram.clone();
        for i in 0..g.nrows() {
            g[(i, i)] += c64::new(sigma2, 0.0);
        }
        Ok(MmseCombiner {
            r: self.r.as_ref(),
            llt: factor(&g)?,
            sigma2,
        })
    }
}

/// Factored MMSE combiner; `combine` computes `(R R^H + sigma^2 I)^{-1} R y`.
pub struct MmseCombiner<'a> {
    r: MatRef<'a, c64>,
    llt: Llt<c64>,
    pub sigma2: f64,
}

impl Combiner for MmseCombiner<'_> {
    fn combine(&self, y: &[c64]) -> Result<Vec<c64>> {
        let ry = mat_vec(self.r, y)?;
        let rhs = MatRef::from_column_major_slice(&ry, ry.len(), 1);
        let out = self.llt.solve(rhs);
        Ok((0..ry.len()).map(|i| out[(i, 0)]).collect())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{frobenius, identity_deviation, max_abs_diff, norm, unitarity_deviation, unitary_dft};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_mat(rng: &mut impl Rng, n: usize) -> Mat<c64> {
        Mat::from_fn(n, n, |_, _| c64::new(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5))
    }

    fn check_factors(h: &Mat<c64>, f: &QrFactors) {
        let n = h.nrows();
        let resid = &f.q * &f.r - h.adjoint();
        assert!(frobenius(resid.as_ref()) <= 1e-8 * frobenius(h.as_ref()).max(1.0));
        assert!(unitarity_deviation(f.q.as_ref()) <= 1e-10);
        for j in 0..n {
            assert!(f.r[(j, j)].im == 0.0 && f.r[(j, j)].re >= 0.0);
            for i in j + 1..n {
                assert!(f.r[(i, j)].norm() <= 1e-10);
            }
        }
    }

    #[test]
    fn identity_factors_trivially() {
        let h = Mat::<c64>::identity(5, 5);
        let f = qr_precoder(h.as_ref()).unwrap();
        assert!(identity_deviation(f.q.as_ref()) < 1e-14);
        assert!(identity_deviation(f.r.as_ref()) < 1e-14);
    }

    #[test]
    fn dft_channel() {
        let h = unitary_dft(4);
        let f = qr_precoder(h.as_ref()).unwrap();
        check_factors(&h, &f);
        assert!(max_abs_diff((&f.q * &f.r).as_ref(), h.adjoint().to_owned().as_ref()) <= 1e-12);
        // a unitary upper-triangular R with positive diagonal is I
        assert!(identity_deviation(f.r.as_ref()) < 1e-12);
    }

    #[test]
    fn random_channels() {
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        for _ in 0..5 {
            let h = random_mat(&mut rng, 16);
            check_factors(&h, &qr_precoder(h.as_ref()).unwrap());
        }
    }

    #[test]
    fn rank_deficient_still_factors() {
        let mut h = Mat::<c64>::zeros(4, 4);
        h[(0, 0)] = c64::new(1.0, 0.0);
        h[(1, 2)] = c64::new(0.0, 2.0);
        let f = qr_precoder(h.as_ref()).unwrap();
        check_factors(&h, &f);
        assert!(mmse_combiner(f.r.as_ref(), 0.0).is_err());
        assert!(mmse_combiner(f.r.as_ref(), 0.1).is_ok());
    }

    #[test]
    fn non_square_rejected() {
        let h = Mat::<c64>::zeros(3, 4);
        assert!(qr_precoder(h.as_ref()).is_err());
    }

    #[test]
    fn mmse_examples() {
        let eye = Mat::<c64>::identity(3, 3);
        let w = mmse_combiner(eye.as_ref(), 0.0).unwrap();
        assert!(identity_deviation(w.as_ref()) < 1e-15);
        let w = mmse_combiner(eye.as_ref(), 1.0).unwrap();
        assert!(max_abs_diff(w.as_ref(), (&eye * 0.5).as_ref()) < 1e-15);

        let mut r = Mat::<c64>::zeros(2, 2);
        r[(0, 0)] = c64::new(2.0, 0.0);
        r[(1, 1)] = c64::new(1.0, 0.0);
        let w = mmse_combiner(r.as_ref(), 0.5).unwrap();
        assert!((w[(0, 0)].re - 2.0 / 4.5).abs() < 1e-15);
        assert!((w[(1, 1)].re - 1.0 / 1.5).abs() < 1e-15);
        assert!(w[(0, 1)].norm() < 1e-15 && w[(1, 0)].norm() < 1e-15);

        assert!(mmse_combiner(r.as_ref(), -1.0).is_err());
        assert!(mmse_combiner(r.as_ref(), f64::NAN).is_err());
    }

    #[test]
    fn precode_is_energy_preserving() {
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        let h = random_mat(&mut rng, 12);
        let f = qr_precoder(h.as_ref()).unwrap();
        let x: Vec<c64> = (0..12).map(|i| c64::new(i as f64, 1.0)).collect();
        assert!((norm(&precode(f.q.as_ref(), &x).unwrap()) - norm(&x)).abs() < 1e-10);
        let eye = Mat::<c64>::identity(12, 12);
        assert_eq!(precode(eye.as_ref(), &x).unwrap(), x);
        assert!(precode(eye.as_ref(), &x[..5]).is_err());
        assert!(combine(eye.as_ref(), &x[..5]).is_err());
    }

    #[test]
    fn link_reduces_to_identity() {
        let mut rng = ChaCha8Rng::seed_from_u64(12);
        let h = &random_mat(&mut rng, 8) + &Mat::<c64>::identity(8, 8) * 2.0;
        let p = PrecoderSet::new(h.as_ref(), 1e-8).unwrap();
        let link = &p.w * &h * &p.q;
        assert!(identity_deviation(link.as_ref()) <= 1e-4);
        let wr = &p.w * p.r.adjoint();
        assert!(max_abs_diff(link.as_ref(), wr.as_ref()) < 1e-10);
    }

    #[test]
    fn link_error_shrinks_with_noise() {
        let mut rng = ChaCha8Rng::seed_from_u64(13);
        let h = &random_mat(&mut rng, 10) + Mat::<c64>::identity(10, 10);
        let f = qr_precoder(h.as_ref()).unwrap();
        let mut last = f64::INFINITY;
        for s2 in [1.0, 1e-1, 1e-2, 1e-3, 1e-4, 1e-6] {
            let w = mmse_combiner(f.r.as_ref(), s2).unwrap();
            let link = &w * &h * &f.q;
            let err = frobenius((link - Mat::<c64>::identity(10, 10)).as_ref());
            assert!(err < last);
            last = err;
        }
    }

    #[test]
    fn factored_combiner_matches_explicit() {
        let mut rng = ChaCha8Rng::seed_from_u64(14);
        let h = random_mat(&mut rng, 20);
        let f = qr_precoder(h.as_ref()).unwrap();
        let solver = MmseSolver::new(f.r.clone()).unwrap();
        let y: Vec<c64> = (0..20).map(|i| c64::new((i as f64).sin(), 0.3)).collect();
        for s2 in [1e-3, 0.1, 2.0] {
            let explicit = mmse_combiner(f.r.as_ref(), s2).unwrap().combine(&y).unwrap();
            let factored = solver.at(s2).unwrap().combine(&y).unwrap();
            for (a, b) in explicit.iter().zip(&factored) {
                assert!((a - b).norm() < 1e-9);
            }
        }
    }
}
