//! Superposition transmitter and successive-interference-cancellation
//! receiver.
//!
//! Frame 1 carries `MN` symbols on `S1` with amplitude `sqrt(alpha)`; frame 2
//! carries `ceil(delta * MN)` symbols on `S2` with amplitude
//! `sqrt(1 - alpha)`, occupying the first vector indices. The receiver
//! detects frame 1 first, cancels it, then detects frame 2. Each turbo
//! iteration repeats both steps with the latest estimate of the other frame
//! cancelled.

use faer::MatRef;
use serde::{Deserialize, Serialize};

use crate::c64;
use crate::error::{check_len, Error, Result};
use crate::linalg::{adjoint_mat_vec, mat_vec};
use crate::modulation::{nearest, qam4, qam4_bits, qam4_map};
use crate::mub::BasisPair;
use crate::precoder::Combiner;
use crate::tcm::TcmConfig;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Coding {
    /// Gray-mapped 4-QAM, element-wise detection.
    Uncoded,
    /// Trellis-coded, Viterbi detection.
    Tcm,
}

impl Coding {
    /// Maps `2K` bits to `K` unit-energy symbols.
    pub fn modulate(self, tcm: &TcmConfig, bits: &[u8]) -> Result<Vec<c64>> {
        match self {
            Coding::Uncoded => qam4_map(bits),
            Coding::Tcm => tcm.encode(bits),
        }
    }
}

/// Number of frame-2 symbols, `ceil(delta * MN)`.
pub fn support_size(delta: f64, mn: usize) -> usize {
    // guard against products such as 0.1 * 10 = 1.0000000000000002
    ((delta * mn as f64) - 1e-9).ceil().max(0.0) as usize
}

/// Power fraction actually given to frame 1: all of it when frame 2 is empty.
pub fn effective_alpha(alpha: f64, support: usize) -> f64 {
    if support == 0 {
        1.0
    } else {
        alpha
    }
}

fn check_alpha(alpha: f64) -> Result<()> {
    if alpha > 0.0 && alpha <= 1.0 {
        Ok(())
    } else {
        Err(Error::InvalidParameter(format!("alpha must lie in (0, 1], got {alpha}")))
    }
}

/// Symbols of both frames before precoding.
#[derive(Debug, Clone, PartialEq)]
pub struct SuperposedFrame {
    pub x1: Vec<c64>,
    /// Length `MN`; zero outside the first `support` entries.
    pub x2: Vec<c64>,
    pub support: usize,
    pub alpha: f64,
    pub delta: f64,
}

impl SuperposedFrame {
    pub fn new(x1: Vec<c64>, x2_active: &[c64], alpha: f64, delta: f64) -> Result<Self> {
        check_alpha(alpha)?;
        if !(0.0..=1.0).contains(&delta) {
            return Err(Error::InvalidParameter(format!("delta must lie in [0, 1], got {delta}")));
        }
        let mn = x1.len();
        let support = support_size(delta, mn);
        check_len(support, x2_active.len())?;
        let mut x2 = vec![c64::new(0.0, 0.0); mn];
        x2[..support].copy_from_slice(x2_active);
        Ok(SuperposedFrame {
            x1,
            x2,
            support,
            alpha: effective_alpha(alpha, support),
            delta,
        })
    }

    /// Builds both frames from payload bits (`2 MN` and `2 ceil(delta MN)` bits).
    pub fn from_bits(
        bits1: &[u8],
        bits2: &[u8],
        alpha: f64,
        delta: f64,
        coding: Coding,
        tcm: &TcmConfig,
    ) -> Result<Self> {
        let x1 = coding.modulate(tcm, bits1)?;
        let x2 = coding.modulate(tcm, bits2)?;
        Self::new(x1, &x2, alpha, delta)
    }

    pub fn amplitudes(&self) -> (f64, f64) {
        (self.alpha.sqrt(), (1.0 - self.alpha).sqrt())
    }
}

/// `x = sqrt(alpha) Q S1 x1' + sqrt(1 - alpha) Q S2 x2'`.
pub fn transmit(frame: &SuperposedFrame, q: MatRef<'_, c64>, bases: &BasisPair) -> Result<Vec<c64>> {
    check_alpha(frame.alpha)?;
    let (b1, b2) = frame.amplitudes();
    let mut v = mat_vec(bases.s1.as_ref(), &frame.x1)?;
    if frame.support > 0 {
        let v2 = mat_vec(bases.s2.as_ref(), &frame.x2)?;
        for (a, b) in v.iter_mut().zip(v2) {
            *a = *a * b1 + b * b2;
        }
    } else {
        v.iter_mut().for_each(|a| *a *= b1);
    }
    mat_vec(q, &v)
}

/// `S_i^H y'`.
pub fn matched_filter(yprime: &[c64], basis: MatRef<'_, c64>) -> Result<Vec<c64>> {
    adjoint_mat_vec(basis, yprime)
}

/// Element-wise nearest-point decisions `argmin_s |z[q] - beta s|^2`.
pub fn detect_uncoded(z: &[c64], beta: f64, alphabet: &[c64]) -> Vec<usize> {
    z.iter().map(|&v| nearest(v, beta, alphabet)).collect()
}

/// `y' - beta S_i x_hat`.
pub fn cancel(yprime: &[c64], beta: f64, basis: MatRef<'_, c64>, xhat: &[c64]) -> Result<Vec<c64>> {
    let contrib = mat_vec(basis, xhat)?;
    check_len(yprime.len(), contrib.len())?;
    Ok(yprime.iter().zip(contrib).map(|(y, c)| y - c * beta).collect())
}

/// Decisions for both frames after one detection pass.
#[derive(Debug, Clone, PartialEq)]
pub struct Decisions {
    pub bits1: Vec<u8>,
    pub bits2: Vec<u8>,
    /// Re-modulated estimate of `x1'`.
    pub symbols1: Vec<c64>,
    /// Re-modulated estimate of `x2'`, length `MN`.
    pub symbols2: Vec<c64>,
}

/// Decisions after the initial SIC pass (`passes[0]`) and after every turbo
/// iteration.
#[derive(Debug, Clone, PartialEq)]
pub struct DetectionResult {
    pub passes: Vec<Decisions>,
}

impl DetectionResult {
    pub fn last(&self) -> &Decisions {
        self.passes.last().expect("at least one pass")
    }

    pub fn bits1(&self) -> &[u8] {
        &self.last().bits1
    }

    pub fn bits2(&self) -> &[u8] {
        &self.last().bits2
    }

    /// Bit errors per frame for every pass.
    pub fn error_counts(&self, truth1: &[u8], truth2: &[u8]) -> Vec<(u64, u64)> {
        let count = |a: &[u8], b: &[u8]| a.iter().zip(b).filter(|(x, y)| x != y).count() as u64;
        self.passes
            .iter()
            .map(|d| (count(&d.bits1, truth1), count(&d.bits2, truth2)))
            .collect()
    }
}

/// SIC receiver configuration.
#[derive(Debug, Clone, Copy)]
pub struct SicReceiver<'a> {
    pub bases: &'a BasisPair,
    pub alpha: f64,
    /// Active frame-2 symbols.
    pub support: usize,
    pub coding: Coding,
    pub tcm: TcmConfig,
    pub turbo_iters: usize,
}

impl SicReceiver<'_> {
    fn detect(&self, target: &[c64], basis: MatRef<'_, c64>, beta: f64, len: usize) -> Result<(Vec<u8>, Vec<c64>)> {
        let z = matched_filter(target, basis)?;
        let mn = z.len();
        let mut symbols = vec![c64::new(0.0, 0.0); mn];
        if len == 0 {
            return Ok((Vec::new(), symbols));
        }
        let bits = match self.coding {
            Coding::Uncoded => {
                let alphabet = qam4();
                let idx = detect_uncoded(&z[..len], beta, &alphabet);
                for (s, i) in symbols.iter_mut().zip(&idx) {
                    *s = alphabet[*i];
                }
                qam4_bits(&idx)
            }
            Coding::Tcm => {
                let bits = self.tcm.decode(&z[..len], beta)?;
                symbols[..len].copy_from_slice(&self.tcm.encode(&bits)?);
                bits
            }
        };
        Ok((bits, symbols))
    }

    /// Runs the receiver on an already combined frame `y'`.
    pub fn receive_combined(&self, yprime: &[c64]) -> Result<DetectionResult> {
        let mn = yprime.len();
        check_len(self.bases.dim(), mn)?;
        check_alpha(self.alpha)?;
        if self.support > mn {
            return Err(Error::InvalidParameter(format!("frame-2 support {} exceeds MN = {mn}", self.support)));
        }
        let alpha = effective_alpha(self.alpha, self.support);
        let (b1, b2) = (alpha.sqrt(), (1.0 - alpha).sqrt());
        let s1 = self.bases.s1.as_ref();
        let s2 = self.bases.s2.as_ref();

        let detect2 = |sym1: &[c64]| -> Result<(Vec<u8>, Vec<c64>)> {
            if self.support == 0 {
                return Ok((Vec::new(), vec![c64::new(0.0, 0.0); mn]));
            }
            let ybar = cancel(yprime, b1, s1, sym1)?;
            self.detect(&ybar, s2, b2, self.support)
        };

        let mut passes = Vec::with_capacity(self.turbo_iters + 1);
        let (bits1, symbols1) = self.detect(yprime, s1, b1, mn)?;
        let (bits2, symbols2) = detect2(&symbols1)?;
        passes.push(Decisions {
            bits1,
            bits2,
            symbols1,
            symbols2,
        });
        for _ in 0..self.turbo_iters {
            let prev = passes.last().expect("initial pass");
            let (bits1, symbols1) = if self.support == 0 {
                self.detect(yprime, s1, b1, mn)?
            } else {
                let ybar = cancel(yprime, b2, s2, &prev.symbols2)?;
                self.detect(&ybar, s1, b1, mn)?
            };
            let (bits2, symbols2) = detect2(&symbols1)?;
            passes.push(Decisions {
                bits1,
                bits2,
                symbols1,
                symbols2,
            });
        }
        Ok(DetectionResult { passes })
    }

    /// Combines `y` and runs the receiver.
    pub fn receive(&self, y: &[c64], combiner: &dyn Combiner) -> Result<DetectionResult> {
        let yprime = combiner.combine(y)?;
        self.receive_combined(&yprime)
    }
}

/// Convenience wrapper over [`SicReceiver::receive`] with the default code.
#[allow(clippy::too_many_arguments)]
pub fn sic_receive(
    y: &[c64],
    combiner: &dyn Combiner,
    bases: &BasisPair,
    alpha: f64,
    delta: f64,
    coding: Coding,
    turbo_iters: usize,
) -> Result<DetectionResult> {
    SicReceiver {
        bases,
        alpha,
        support: support_size(delta, y.len()),
        coding,
        tcm: TcmConfig::default(),
        turbo_iters,
    }
    .receive(y, combiner)
}
