//! Unitary transforms between the delay-Doppler, time-frequency and time
//! domains.
//!
//! In matrix form, with unitary DFT matrices:
//!
//! | op     | matrix             |
//! |--------|--------------------|
//! | `idzt` | `F_N^H (x) I_M`    |
//! | `dzt`  | `F_N (x) I_M`      |
//! | `itf`  | `I_N (x) F_M^H`    |
//! | `tf`   | `I_N (x) F_M`      |
//!
//! They are applied with FFTs along the appropriate stride rather than by
//! materializing the Kronecker products.

use std::sync::Arc;

use rustfft::{Fft, FftPlanner};

use crate::c64;
use crate::error::{check_len, Result};
use crate::grid::{DdFrame, GridParams, TfFrame, TimeFrame};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Direction {
    Forward,
    Inverse,
}

/// FFT plans for one grid, reusable across many frames.
pub struct GridTransform {
    m: usize,
    n: usize,
    fwd_m: Arc<dyn Fft<f64>>,
    inv_m: Arc<dyn Fft<f64>>,
    fwd_n: Arc<dyn Fft<f64>>,
    inv_n: Arc<dyn Fft<f64>>,
}

impl std::fmt::Debug for GridTransform {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("GridTransform")
            .field("m", &self.m)
            .field("n", &self.n)
            .finish()
    }
}

impl GridTransform {
    pub fn new(grid: &GridParams) -> Self {
        let mut planner = FftPlanner::new();
        GridTransform {
            m: grid.m,
            n: grid.n,
            fwd_m: planner.plan_fft_forward(grid.m),
            inv_m: planner.plan_fft_inverse(grid.m),
            fwd_n: planner.plan_fft_forward(grid.n),
            inv_n: planner.plan_fft_inverse(grid.n),
        }
    }

    pub fn mn(&self) -> usize {
        self.m * self.n
    }

    /// Applies `F_N (x) I_M` (forward) or `F_N^H (x) I_M` (inverse) in place:
    /// a unitary DFT across the Doppler index for every delay bin.
    pub fn doppler_axis(&self, x: &mut [c64], dir: Direction) -> Result<()> {
        check_len(self.mn(), x.len())?;
        let fft = match dir {
            Direction::Forward => &self.fwd_n,
            Direction::Inverse => &self.inv_n,
        };
        let scale = 1.0 / (self.n as f64).sqrt();
        let mut buf = vec![c64::new(0.0, 0.0); self.n];
        for k in 0..self.m {
            for (l, b) in buf.iter_mut().enumerate() {
                *b = x[k + self.m * l];
            }
            fft.process(&mut buf);
            for (l, b) in buf.iter().enumerate() {
                x[k + self.m * l] = b * scale;
            }
        }
        Ok(())
    }

    /// Applies `I_N (x) F_M` (forward) or `I_N (x) F_M^H` (inverse) in place:
    /// a unitary DFT over each contiguous block of `M` entries.
    pub fn frequency_axis(&self, x: &mut [c64], dir: Direction) -> Result<()> {
        check_len(self.mn(), x.len())?;
        let fft = match dir {
            Direction::Forward => &self.fwd_m,
            Direction::Inverse => &self.inv_m,
        };
        fft.process(x);
        let scale = 1.0 / (self.m as f64).sqrt();
        x.iter_mut().for_each(|v| *v *= scale);
        Ok(())
    }
}

/// Inverse discrete Zak transform, delay-Doppler to time.
pub fn idzt(x: &DdFrame, grid: &GridParams) -> Result<TimeFrame> {
    check_len(grid.mn(), x.len())?;
    let mut data = x.data.clone();
    GridTransform::new(grid).doppler_axis(&mut data, Direction::Inverse)?;
    Ok(TimeFrame { data })
}

/// Discrete Zak transform, time to delay-Doppler. Inverse of [`idzt`].
pub fn dzt(s: &TimeFrame, grid: &GridParams) -> Result<DdFrame> {
    check_len(grid.mn(), s.len())?;
    let mut data = s.data.clone();
    GridTransform::new(grid).doppler_axis(&mut data, Direction::Forward)?;
    Ok(DdFrame { data })
}

/// OFDM modulation, time-frequency to time.
pub fn itf(x: &TfFrame, grid: &GridParams) -> Result<TimeFrame> {
    check_len(grid.mn(), x.len())?;
    let mut data = x.data.clone();
    GridTransform::new(grid).frequency_axis(&mut data, Direction::Inverse)?;
    Ok(TimeFrame { data })
}

/// OFDM demodulation, time to time-frequency. Inverse of [`itf`].
pub fn tf(s: &TimeFrame, grid: &GridParams) -> Result<TfFrame> {
    check_len(grid.mn(), s.len())?;
    let mut data = s.data.clone();
    GridTransform::new(grid).frequency_axis(&mut data, Direction::Forward)?;
    Ok(TfFrame { data })
}
