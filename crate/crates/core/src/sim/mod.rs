//! Monte-Carlo link simulation: configuration, trials, sweeps and self checks.

mod config;
mod sweep;
mod trial;
mod verify;

pub use config::{ChannelConfig, Scheme, SimConfig, DEFAULT_ALPHA, DEFAULT_DELTA, DEFAULT_NU_MAX};
pub use sweep::{aggregate, read_rows, run_sweep, run_sweep_with, write_json, write_rows, ResultRow, CSV_HEADER};
pub use trial::{noise_variance, run_trial, trial_rng, unit_noise, FrameErrors, Simulator, Stream, TrialOutcome};
pub use verify::{check_mub, verify_suite, Check, VerifyReport};
