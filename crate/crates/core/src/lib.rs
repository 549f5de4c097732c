//! Link-level simulation of Zak-OTFS with a second information frame
//! superimposed on a mutually unbiased basis.
//!
//! The pipeline is: TCM or 4-QAM payloads, superposition on the basis pair
//! `{I, F}`, QR precoding against the delay-Doppler channel, MMSE combining,
//! and a successive-interference-cancellation receiver with turbo
//! iterations. Faster-than-Nyquist OFDM and OTFS 1.0 baselines share the
//! same precoder and code.

pub mod channel;
pub mod error;
pub mod grid;
pub mod linalg;
pub mod modulation;
pub mod mub;
pub mod precoder;
pub mod rate;
pub mod sic;
pub mod sim;
pub mod tcm;
pub mod transform;

pub use faer::{c64, Mat, MatRef};

pub use channel::{ChannelMatrices, ChannelRealization, Domain, PathProfile};
pub use error::{Error, Result};
pub use grid::{DdFrame, GridParams, TfFrame, TimeFrame};
pub use mub::{BasisPair, MubReport};
pub use precoder::{MmseCombiner, MmseSolver, PrecoderSet, QrFactors};
pub use rate::{DfreeMode, RatePoint};
pub use sic::{Coding, DetectionResult, SuperposedFrame};
pub use sim::{ResultRow, Scheme, SimConfig};
pub use tcm::TcmConfig;
