//! Gray-mapped unit-energy 4-QAM and nearest-point detection.

use std::f64::consts::FRAC_1_SQRT_2;

use crate::c64;
use crate::error::{Error, Result};

/// 4-QAM alphabet, indexed by `2 * b0 + b1` where `b0` sets the sign of the
/// real part and `b1` the sign of the imaginary part.
pub fn qam4() -> [c64; 4] {
    let a = FRAC_1_SQRT_2;
    [c64::new(a, a), c64::new(a, -a), c64::new(-a, a), c64::new(-a, -a)]
}

/// Maps bit pairs to 4-QAM symbols.
pub fn qam4_map(bits: &[u8]) -> Result<Vec<c64>> {
    if !bits.len().is_multiple_of(2) {
        return Err(Error::OddBitCount(bits.len()));
    }
    let alphabet = qam4();
    Ok(bits
        .chunks_exact(2)
        .map(|p| alphabet[(2 * (p[0] & 1) + (p[1] & 1)) as usize])
        .collect())
}

/// Inverse of [`qam4_map`] for alphabet indices.
pub fn qam4_bits(indices: &[usize]) -> Vec<u8> {
    indices.iter().flat_map(|&i| [(i >> 1) as u8 & 1, i as u8 & 1]).collect()
}

/// Index of the alphabet point minimizing `|z - amp * s|^2`. Ties go to the
/// lowest index.
pub fn nearest(z: c64, amp: f64, alphabet: &[c64]) -> usize {
    let mut best = 0;
    let mut best_d = f64::INFINITY;
    for (i, s) in alphabet.iter().enumerate() {
        let d = (z - s * amp).norm_sqr();
        if d < best_d {
            best = i;
            best_d = d;
        }
    }
    best
}
