//! Doubly-spread multipath channel: random path draws and the time,
//! delay-Doppler and time-frequency channel matrices.
//!
//! The frame is modelled as a circular (mod `MN`) convolution. A path with
//! gain `h`, delay `tau` and Doppler `nu` contributes
//!
//! ```text
//! H_t[a, b] += h * exp(j 2 pi nu a beta T_s) * sinc(beta * d(a, b) - tau / T_s)
//! ```
//!
//! where `d(a, b)` is `a - b` wrapped into `(-MN/2, MN/2]`. With `beta = 1`
//! the transmit pulses sit on the Nyquist grid; `beta < 1` packs them faster
//! than Nyquist and the sinc no longer vanishes at the other symbol instants.

use std::f64::consts::PI;
use std::io::Write;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::c64;
use crate::error::{check_len, Error, Result};
use crate::grid::GridParams;
use crate::transform::{Direction, GridTransform};
use crate::Mat;
use faer::MatRef;

/// Power-delay profile.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PathProfile {
    /// Path delays in seconds.
    pub delays: Vec<f64>,
    /// Relative path powers in dB.
    pub powers_db: Vec<f64>,
}

impl PathProfile {
    pub fn new(delays: Vec<f64>, powers_db: Vec<f64>) -> Result<Self> {
        let p = PathProfile { delays, powers_db };
        p.validate()?;
        Ok(p)
    }

    /// ITU Vehicular-A.
    pub fn vehicular_a() -> Self {
        PathProfile {
            delays: [0.0, 0.31, 0.71, 1.09, 1.73, 2.51].iter().map(|us| us * 1e-6).collect(),
            powers_db: vec![0.0, -1.0, -9.0, -10.0, -15.0, -20.0],
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.delays.is_empty() {
            return Err(Error::EmptyProfile);
        }
        check_len(self.delays.len(), self.powers_db.len())?;
        if self.delays.iter().any(|d| !d.is_finite() || *d < 0.0) {
            return Err(Error::InvalidParameter("path delays must be finite and nonnegative".into()));
        }
        if self.delays.windows(2).any(|w| w[1] < w[0]) {
            return Err(Error::InvalidParameter("path delays must be nondecreasing".into()));
        }
        if self.powers_db.iter().any(|p| !p.is_finite()) {
            return Err(Error::InvalidParameter("path powers must be finite".into()));
        }
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.delays.len()
    }

    pub fn is_empty(&self) -> bool {
        self.delays.is_empty()
    }

    /// Linear path powers normalized to unit sum.
    pub fn normalized_powers(&self) -> Vec<f64> {
        let lin: Vec<f64> = self.powers_db.iter().map(|db| 10f64.powf(db / 10.0)).collect();
        let total: f64 = lin.iter().sum();
        lin.into_iter().map(|p| p / total).collect()
    }
}

/// One draw of path gains and Doppler shifts.
#[derive(Debug, Clone, PartialEq)]
pub struct ChannelRealization {
    pub gains: Vec<c64>,
    /// Seconds.
    pub delays: Vec<f64>,
    /// Hz.
    pub dopplers: Vec<f64>,
}

impl ChannelRealization {
    pub fn num_paths(&self) -> usize {
        self.gains.len()
    }

    /// Single path with the given gain, delay and Doppler.
    pub fn single(gain: c64, delay: f64, doppler: f64) -> Self {
        ChannelRealization {
            gains: vec![gain],
            delays: vec![delay],
            dopplers: vec![doppler],
        }
    }
}

/// Draws a realization: `h_i = sqrt(p_i) exp(j phi_i)` with
/// `phi_i ~ U[0, 2 pi)` and `nu_i = nu_max cos(theta_i)` with
/// `theta_i ~ U[-pi, pi)`. Per path the stream is consumed as `phi`, `theta`.
pub fn sample_paths<R: Rng + ?Sized>(
    profile: &PathProfile,
    nu_max: f64,
    rng: &mut R,
) -> Result<ChannelRealization> {
    profile.validate()?;
    if !(nu_max.is_finite() && nu_max >= 0.0) {
        return Err(Error::InvalidParameter(format!("nu_max must be nonnegative, got {nu_max}")));
    }
    let powers = profile.normalized_powers();
    let mut gains = Vec::with_capacity(powers.len());
    let mut dopplers = Vec::with_capacity(powers.len());
    for p in powers {
        let phi = rng.random_range(0.0..2.0 * PI);
        let theta = rng.random_range(-PI..PI);
        gains.push(c64::from_polar(p.sqrt(), phi));
        dopplers.push(nu_max * theta.cos());
    }
    Ok(ChannelRealization {
        gains,
        delays: profile.delays.clone(),
        dopplers,
    })
}

/// Normalized sinc, exactly zero at nonzero integers.
pub fn sinc(u: f64) -> f64 {
    if u == 0.0 {
        1.0
    } else if u.fract() == 0.0 {
        0.0
    } else {
        (PI * u).sin() / (PI * u)
    }
}

/// `r` wrapped into `(-len/2, len/2]`.
fn wrap_offset(r: usize, len: usize) -> f64 {
    if 2 * r <= len {
        r as f64
    } else {
        r as f64 - len as f64
    }
}

fn check_beta(beta: f64) -> Result<()> {
    if beta > 0.0 && beta <= 1.0 {
        Ok(())
    } else {
        Err(Error::InvalidParameter(format!("compression factor beta must lie in (0, 1], got {beta}")))
    }
}

/// Time-domain channel matrix `H_t(beta)`.
pub fn build_time_channel(ch: &ChannelRealization, grid: &GridParams, beta: f64) -> Result<Mat<c64>> {
    check_beta(beta)?;
    check_len(ch.gains.len(), ch.delays.len())?;
    check_len(ch.gains.len(), ch.dopplers.len())?;
    let mn = grid.mn();
    let ts = grid.sample_period();

    // per path: sinc tap by wrapped offset index, Doppler phasor by row
    let taps: Vec<Vec<f64>> = ch
        .delays
        .iter()
        .map(|tau| (0..mn).map(|r| sinc(beta * wrap_offset(r, mn) - tau / ts)).collect())
        .collect();
    let phasors: Vec<Vec<c64>> = ch
        .gains
        .iter()
        .zip(&ch.dopplers)
        .map(|(h, nu)| {
            (0..mn)
                .map(|a| h * c64::from_polar(1.0, 2.0 * PI * nu * a as f64 * beta * ts))
                .collect()
        })
        .collect();

    Ok(Mat::from_fn(mn, mn, |a, b| {
        let r = (a + mn - b) % mn;
        taps.iter()
            .zip(&phasors)
            .fold(c64::new(0.0, 0.0), |acc, (tap, ph)| acc + ph[a] * tap[r])
    }))
}

/// Domain in which the precoder and detector see the channel.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Domain {
    /// Delay-Doppler, conjugated by `F_N (x) I_M`.
    Dd,
    /// Time-frequency, conjugated by `I_N (x) F_M`.
    Tf,
}

fn apply_columns(a: &mut Mat<c64>, xf: &GridTransform, domain: Domain, dir: Direction) -> Result<()> {
    for j in 0..a.ncols() {
        let col = a.col_as_slice_mut(j);
        match domain {
            Domain::Dd => xf.doppler_axis(col, dir)?,
            Domain::Tf => xf.frequency_axis(col, dir)?,
        }
    }
    Ok(())
}

fn similarity(h: MatRef<'_, c64>, grid: &GridParams, domain: Domain, left: Direction) -> Result<Mat<c64>> {
    let mn = grid.mn();
    check_len(mn, h.nrows())?;
    check_len(mn, h.ncols())?;
    let xf = GridTransform::new(grid);
    // U H U^H = (U (U H)^H)^H
    let mut a = h.to_owned();
    apply_columns(&mut a, &xf, domain, left)?;
    let mut b = a.adjoint().to_owned();
    apply_columns(&mut b, &xf, domain, left)?;
    Ok(b.adjoint().to_owned())
}

/// `U H_t U^H` with `U` the receiver-side transform of `domain`.
pub fn conjugate_channel(h_t: MatRef<'_, c64>, grid: &GridParams, domain: Domain) -> Result<Mat<c64>> {
    similarity(h_t, grid, domain, Direction::Forward)
}

/// Inverse of [`conjugate_channel`].
pub fn deconjugate_channel(h: MatRef<'_, c64>, grid: &GridParams, domain: Domain) -> Result<Mat<c64>> {
    similarity(h, grid, domain, Direction::Inverse)
}

/// A time-domain channel together with its view in the working domain.
#[derive(Debug, Clone)]
pub struct ChannelMatrices {
    pub h_t: Mat<c64>,
    pub h_domain: Mat<c64>,
    pub domain: Domain,
    pub beta: f64,
}

impl ChannelMatrices {
    pub fn build(ch: &ChannelRealization, grid: &GridParams, beta: f64, domain: Domain) -> Result<Self> {
        let h_t = build_time_channel(ch, grid, beta)?;
        let h_domain = conjugate_channel(h_t.as_ref(), grid, domain)?;
        Ok(ChannelMatrices {
            h_t,
            h_domain,
            domain,
            beta,
        })
    }
}

/// Writes `m` as CSV: one line per row, each entry as a `re,im` pair.
pub fn write_matrix_csv<W: Write>(m: MatRef<'_, c64>, out: W) -> Result<()> {
    let mut w = std::io::BufWriter::new(out);
    for i in 0..m.nrows() {
        for j in 0..m.ncols() {
            if j > 0 {
                w.write_all(b",")?;
            }
            let v = m[(i, j)];
            write!(w, "{},{}", v.re, v.im)?;
        }
        w.write_all(b"\n")?;
    }
    w.flush()?;
    Ok(())
}
