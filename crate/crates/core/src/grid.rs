//! Delay-Doppler grid bookkeeping and the frame containers that live on it.
//!
//! Frames are flat vectors of length `M * N`. Delay-Doppler frames use the
//! column-major index `q = k + M * l` (delay bin `k`, Doppler bin `l`);
//! time-frequency frames use `q = m + M * n` (frequency bin `m`, time bin `n`).

use serde::{Deserialize, Serialize};

use crate::c64;
use crate::error::{check_len, Error, Result};

/// Grid dimensions and the Doppler period. Everything else is derived.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridParams {
    /// Delay bins.
    pub m: usize,
    /// Doppler bins.
    pub n: usize,
    /// Doppler period in Hz.
    pub nu_p: f64,
}

impl GridParams {
    pub fn new(m: usize, n: usize, nu_p: f64) -> Result<Self> {
        let g = GridParams { m, n, nu_p };
        g.validate()?;
        Ok(g)
    }

    pub fn validate(&self) -> Result<()> {
        if self.m == 0 || self.n == 0 {
            return Err(Error::InvalidParameter(format!(
                "grid dimensions must be positive, got M={} N={}",
                self.m, self.n
            )));
        }
        if !(self.nu_p.is_finite() && self.nu_p > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "Doppler period must be positive, got {}",
                self.nu_p
            )));
        }
        Ok(())
    }

    /// Symbol count `M * N`.
    pub fn mn(&self) -> usize {
        self.m * self.n
    }

    /// Delay period `1 / nu_p` in seconds.
    pub fn tau_p(&self) -> f64 {
        1.0 / self.nu_p
    }

    /// Bandwidth `M * nu_p` in Hz.
    pub fn bandwidth(&self) -> f64 {
        self.m as f64 * self.nu_p
    }

    /// Frame duration `N * tau_p` in seconds.
    pub fn frame_time(&self) -> f64 {
        self.n as f64 * self.tau_p()
    }

    /// Nyquist sample spacing `1 / B` in seconds.
    pub fn sample_period(&self) -> f64 {
        1.0 / self.bandwidth()
    }
}

impl Default for GridParams {
    fn default() -> Self {
        GridParams {
            m: 31,
            n: 37,
            nu_p: 30e3,
        }
    }
}

macro_rules! frame_type {
    ($(#[$meta:meta])* $name:ident) => {
        $(#[$meta])*
        #[derive(Debug, Clone, PartialEq)]
        pub struct $name {
            pub data: Vec<c64>,
        }

        impl $name {
            /// Wraps `data`, checking it has exactly `M * N` entries.
            pub fn new(data: Vec<c64>, grid: &GridParams) -> Result<Self> {
                check_len(grid.mn(), data.len())?;
                Ok($name { data })
            }

            pub fn zeros(grid: &GridParams) -> Self {
                $name {
                    data: vec![c64::new(0.0, 0.0); grid.mn()],
                }
            }

            pub fn len(&self) -> usize {
                self.data.len()
            }

            pub fn is_empty(&self) -> bool {
                self.data.is_empty()
            }

            pub fn norm(&self) -> f64 {
                crate::linalg::norm(&self.data)
            }
        }
    };
}

frame_type!(
    /// A frame of delay-Doppler symbols.
    DdFrame
);
frame_type!(
    /// Baseband time-domain samples.
    TimeFrame
);
frame_type!(
    /// A frame of time-frequency symbols.
    TfFrame
);
