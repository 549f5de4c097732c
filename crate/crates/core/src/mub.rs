//! A pair of mutually unbiased orthonormal bases: the identity and the
//! unitary DFT. Every cross inner product has modulus `1 / sqrt(MN)`, so a
//! frame on one basis looks like a flat floor to a detector matched to the
//! other.

use crate::c64;
use crate::error::{check_len, Error, Result};
use crate::linalg::unitary_dft;
use crate::Mat;

#[derive(Debug, Clone)]
pub struct BasisPair {
    pub s1: Mat<c64>,
    pub s2: Mat<c64>,
}

impl BasisPair {
    pub fn dim(&self) -> usize {
        self.s1.nrows()
    }

    pub fn get(&self, i: usize) -> &Mat<c64> {
        match i {
            0 => &self.s1,
            1 => &self.s2,
            _ => panic!("basis index {i} out of range"),
        }
    }
}

/// `S1 = I`, `S2 = F_MN`.
pub fn build_bases(mn: usize) -> Result<BasisPair> {
    if mn < 2 {
        return Err(Error::InvalidParameter(format!("basis dimension must be at least 2, got {mn}")));
    }
    Ok(BasisPair {
        s1: Mat::identity(mn, mn),
        s2: unitary_dft(mn),
    })
}

/// Worst entrywise deviation of `|S_i^H S_j|` from its target, per pair.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MubReport {
    /// `max | |S1^H S1| - I |`
    pub self1: f64,
    /// `max | |S2^H S2| - I |`
    pub self2: f64,
    /// `max | |S1^H S2| - 1/sqrt(MN) |`
    pub cross: f64,
    pub tol: f64,
}

impl MubReport {
    pub fn max_deviation(&self) -> f64 {
        self.self1.max(self.self2).max(self.cross)
    }

    pub fn passed(&self) -> bool {
        self.max_deviation() <= self.tol
    }
}

fn magnitude_deviation(g: &Mat<c64>, diag: f64, off: f64) -> f64 {
    let mut worst = 0.0f64;
    for j in 0..g.ncols() {
        for i in 0..g.nrows() {
            let target = if i == j { diag } else { off };
            worst = worst.max((g[(i, j)].norm() - target).abs());
        }
    }
    worst
}

/// Checks both bases are orthonormal and mutually unbiased.
pub fn verify_mub(pair: &BasisPair, tol: f64) -> Result<MubReport> {
    let n = pair.s1.nrows();
    for m in [&pair.s1, &pair.s2] {
        check_len(n, m.nrows())?;
        check_len(n, m.ncols())?;
    }
    let flat = 1.0 / (n as f64).sqrt();
    let g11 = pair.s1.adjoint() * &pair.s1;
    let g22 = pair.s2.adjoint() * &pair.s2;
    let g12 = pair.s1.adjoint() * &pair.s2;
    Ok(MubReport {
        self1: magnitude_deviation(&g11, 1.0, 0.0),
        self2: magnitude_deviation(&g22, 1.0, 0.0),
        cross: magnitude_deviation(&g12, flat, flat),
        tol,
    })
}
