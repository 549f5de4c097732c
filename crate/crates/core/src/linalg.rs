//! Small dense helpers over `faer` matrices.

use std::f64::consts::PI;

use faer::{Col, ColRef, Mat, MatRef};

use crate::c64;
use crate::error::{check_len, Result};

pub fn norm(x: &[c64]) -> f64 {
    x.iter().map(|v| v.norm_sqr()).sum::<f64>().sqrt()
}

/// Unitary `n`-point DFT matrix, `F[r, c] = exp(-j 2 pi r c / n) / sqrt(n)`.
pub fn unitary_dft(n: usize) -> Mat<c64> {
    let scale = 1.0 / (n as f64).sqrt();
    Mat::from_fn(n, n, |r, c| {
        // reduce before scaling so the phase stays exact for large n
        let k = (r * c) % n;
        c64::from_polar(scale, -2.0 * PI * k as f64 / n as f64)
    })
}

/// `a * x`.
pub fn mat_vec(a: MatRef<'_, c64>, x: &[c64]) -> Result<Vec<c64>> {
    check_len(a.ncols(), x.len())?;
    let y: Col<c64> = a * ColRef::from_slice(x);
    Ok(y.iter().copied().collect())
}

/// `a^H * x`.
pub fn adjoint_mat_vec(a: MatRef<'_, c64>, x: &[c64]) -> Result<Vec<c64>> {
    check_len(a.nrows(), x.len())?;
    let y: Col<c64> = a.adjoint() * ColRef::from_slice(x);
    Ok(y.iter().copied().collect())
}

/// Largest entrywise modulus of `a - b`.
pub fn max_abs_diff(a: MatRef<'_, c64>, b: MatRef<'_, c64>) -> f64 {
    assert_eq!((a.nrows(), a.ncols()), (b.nrows(), b.ncols()));
    let mut worst = 0.0f64;
    for j in 0..a.ncols() {
        for i in 0..a.nrows() {
            worst = worst.max((a[(i, j)] - b[(i, j)]).norm());
        }
    }
    worst
}

/// Largest entrywise modulus of `a - I`.
pub fn identity_deviation(a: MatRef<'_, c64>) -> f64 {
    let mut worst = 0.0f64;
    for j in 0..a.ncols() {
        for i in 0..a.nrows() {
            let target = if i == j { 1.0 } else { 0.0 };
            worst = worst.max((a[(i, j)] - c64::new(target, 0.0)).norm());
        }
    }
    worst
}

/// Largest deviation of `a^H a` from the identity.
pub fn unitarity_deviation(a: MatRef<'_, c64>) -> f64 {
    let gram = a.adjoint() * a;
    identity_deviation(gram.as_ref())
}

pub fn frobenius(a: MatRef<'_, c64>) -> f64 {
    let mut acc = 0.0;
    for j in 0..a.ncols() {
        for i in 0..a.nrows() {
            acc += a[(i, j)].norm_sqr();
        }
    }
    acc.sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn dft_is_unitary() {
        for n in [1, 2, 5, 16, 37] {
            assert!(unitarity_deviation(unitary_dft(n).as_ref()) < 1e-12, "n = {n}");
        }
    }

    #[test]
    fn dft_entries() {
        let f = unitary_dft(4);
        assert!((f[(1, 1)] - c64::new(0.0, -0.5)).norm() < 1e-15);
        assert!((f[(2, 3)] - c64::new(-0.5, 0.0)).norm() < 1e-15);
    }

    #[test]
    fn mat_vec_checks_dims() {
        let a = Mat::<c64>::identity(3, 3);
        assert!(mat_vec(a.as_ref(), &[c64::new(1.0, 0.0); 2]).is_err());
        let x = vec![c64::new(1.0, 2.0), c64::new(0.0, -1.0), c64::new(3.0, 0.5)];
        assert_eq!(mat_vec(a.as_ref(), &x).unwrap(), x);
        assert_eq!(adjoint_mat_vec(a.as_ref(), &x).unwrap(), x);
    }
}
