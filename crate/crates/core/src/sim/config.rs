use std::fmt;
use std::path::Path;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::channel::{Domain, PathProfile};
use crate::error::{Error, Result};
use crate::grid::GridParams;
use crate::sic::Coding;

pub const DEFAULT_ALPHA: f64 = 0.9;
pub const DEFAULT_DELTA: f64 = 0.25;
pub const DEFAULT_NU_MAX: f64 = 815.0;
pub const DEFAULT_TRIALS: u64 = 200;
pub const DEFAULT_TURBO: usize = 2;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Scheme {
    /// Zak-OTFS with a second frame on the DFT basis.
    #[serde(rename = "zak-mub")]
    ZakMub,
    /// Zak-OTFS, one frame of `MN` symbols, QR precoding and MMSE.
    #[serde(rename = "zak-mmse-single")]
    ZakMmseSingle,
    /// Faster-than-Nyquist OFDM.
    #[serde(rename = "ofdm-ftn")]
    OfdmFtn,
    /// Faster-than-Nyquist OTFS 1.0.
    #[serde(rename = "otfs1-ftn")]
    Otfs1Ftn,
}

impl Scheme {
    pub const ALL: [Scheme; 4] = [Scheme::ZakMub, Scheme::ZakMmseSingle, Scheme::OfdmFtn, Scheme::Otfs1Ftn];

    pub fn name(self) -> &'static str {
        match self {
            Scheme::ZakMub => "zak-mub",
            Scheme::ZakMmseSingle => "zak-mmse-single",
            Scheme::OfdmFtn => "ofdm-ftn",
            Scheme::Otfs1Ftn => "otfs1-ftn",
        }
    }

    pub fn is_ftn(self) -> bool {
        matches!(self, Scheme::OfdmFtn | Scheme::Otfs1Ftn)
    }

    pub fn domain(self) -> Domain {
        match self {
            Scheme::OfdmFtn => Domain::Tf,
            _ => Domain::Dd,
        }
    }
}

impl fmt::Display for Scheme {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Scheme {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Scheme::ALL
            .into_iter()
            .find(|sc| sc.name() == s)
            .ok_or_else(|| Error::Config(format!("unknown scheme `{s}`")))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ChannelConfig {
    /// `veh-a` or `custom`.
    #[serde(default = "default_profile")]
    pub profile: String,
    #[serde(default = "default_nu_max")]
    pub nu_max: f64,
    /// Path delays in microseconds, `custom` profile only.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub delays_us: Option<Vec<f64>>,
    /// Relative path powers in dB, `custom` profile only.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub powers_db: Option<Vec<f64>>,
}

fn default_profile() -> String {
    "veh-a".into()
}

fn default_nu_max() -> f64 {
    DEFAULT_NU_MAX
}

impl Default for ChannelConfig {
    fn default() -> Self {
        ChannelConfig {
            profile: default_profile(),
            nu_max: DEFAULT_NU_MAX,
            delays_us: None,
            powers_db: None,
        }
    }
}

impl ChannelConfig {
    pub fn path_profile(&self) -> Result<PathProfile> {
        match self.profile.as_str() {
            "veh-a" => {
                if self.delays_us.is_some() || self.powers_db.is_some() {
                    return Err(Error::Config("explicit paths require profile = \"custom\"".into()));
                }
                Ok(PathProfile::vehicular_a())
            }
            "custom" => match (&self.delays_us, &self.powers_db) {
                (Some(d), Some(p)) => PathProfile::new(d.iter().map(|us| us * 1e-6).collect(), p.clone()),
                _ => Err(Error::Config("custom profile needs delays_us and powers_db".into())),
            },
            other => Err(Error::Config(format!("unknown channel profile `{other}`"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
enum OneOrMany {
    One(usize),
    Many(Vec<usize>),
}

fn turbo_list<'de, D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Vec<usize>, D::Error> {
    Ok(match OneOrMany::deserialize(d)? {
        OneOrMany::One(v) => vec![v],
        OneOrMany::Many(v) => v,
    })
}

fn default_turbo() -> Vec<usize> {
    vec![DEFAULT_TURBO]
}

fn default_trials() -> u64 {
    DEFAULT_TRIALS
}

fn default_schemes() -> Vec<Scheme> {
    vec![Scheme::ZakMub]
}

fn default_coding() -> Coding {
    Coding::Tcm
}

/// A sweep description, loadable from TOML.
///
/// `alpha` and `delta` apply to `zak-mub`, `beta` to the FTN baselines.
/// When `beta` is absent it is derived as `1 / (1 + delta)` so both kinds
/// of scheme carry the same number of symbols per unit time.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SimConfig {
    #[serde(default)]
    pub grid: GridParams,
    #[serde(default)]
    pub channel: ChannelConfig,
    #[serde(default = "default_schemes")]
    pub schemes: Vec<Scheme>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub alpha: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub delta: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub beta: Option<f64>,
    #[serde(default = "default_coding")]
    pub coding: Coding,
    /// Turbo iteration counts to report for `zak-mub`.
    #[serde(default = "default_turbo", deserialize_with = "turbo_list")]
    pub turbo_iters: Vec<usize>,
    pub snr_db: Vec<f64>,
    #[serde(default = "default_trials")]
    pub trials: u64,
    #[serde(default)]
    pub seed: u64,
}

impl Default for SimConfig {
    fn default() -> Self {
        SimConfig {
            grid: GridParams::default(),
            channel: ChannelConfig::default(),
            schemes: default_schemes(),
            alpha: None,
            delta: None,
            beta: None,
            coding: Coding::Tcm,
            turbo_iters: default_turbo(),
            snr_db: vec![20.0, 25.0, 30.0],
            trials: DEFAULT_TRIALS,
            seed: 0,
        }
    }
}

impl SimConfig {
    pub fn from_toml_str(text: &str) -> Result<Self> {
        let cfg: SimConfig = toml::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        Self::from_toml_str(&std::fs::read_to_string(path)?)
    }

    pub fn to_toml_string(&self) -> Result<String> {
        toml::to_string(self).map_err(|e| Error::Config(e.to_string()))
    }

    pub fn alpha(&self) -> f64 {
        self.alpha.unwrap_or(DEFAULT_ALPHA)
    }

    pub fn delta(&self) -> f64 {
        self.delta.unwrap_or(DEFAULT_DELTA)
    }

    /// Compression factor of the FTN baselines.
    pub fn beta(&self) -> f64 {
        self.beta.unwrap_or_else(|| 1.0 / (1.0 + self.delta()))
    }

    pub fn max_turbo(&self) -> usize {
        self.turbo_iters.iter().copied().max().unwrap_or(0)
    }

    pub fn has(&self, scheme: Scheme) -> bool {
        self.schemes.contains(&scheme)
    }

    pub fn validate(&self) -> Result<()> {
        self.grid.validate()?;
        if self.grid.mn() < 2 {
            return Err(Error::Config("grid must hold at least two symbols".into()));
        }
        self.channel.path_profile()?;
        if !(self.channel.nu_max.is_finite() && self.channel.nu_max >= 0.0) {
            return Err(Error::Config(format!("nu_max must be nonnegative, got {}", self.channel.nu_max)));
        }
        if self.schemes.is_empty() {
            return Err(Error::Config("no schemes selected".into()));
        }
        let mut seen = self.schemes.clone();
        seen.sort();
        seen.dedup();
        if seen.len() != self.schemes.len() {
            return Err(Error::Config("duplicate scheme".into()));
        }
        if self.snr_db.is_empty() {
            return Err(Error::Config("no SNR points".into()));
        }
        if self.snr_db.iter().any(|s| s.is_nan() || *s == f64::NEG_INFINITY) {
            return Err(Error::Config("SNR values must be numbers or +inf".into()));
        }
        if self.trials == 0 {
            return Err(Error::Config("trials must be positive".into()));
        }
        if self.turbo_iters.is_empty() {
            return Err(Error::Config("turbo_iters must list at least one count".into()));
        }

        let mub = self.has(Scheme::ZakMub);
        let ftn = self.schemes.iter().any(|s| s.is_ftn());
        if !mub && (self.alpha.is_some() || self.delta.is_some()) && !(ftn && self.beta.is_none()) {
            return Err(Error::Config("alpha/delta apply only to zak-mub".into()));
        }
        if !mub && self.alpha.is_some() {
            return Err(Error::Config("alpha applies only to zak-mub".into()));
        }
        if !ftn && self.beta.is_some() {
            return Err(Error::Config("beta applies only to ofdm-ftn / otfs1-ftn".into()));
        }
        let alpha = self.alpha();
        if !(alpha > 0.0 && alpha <= 1.0) {
            return Err(Error::Config(format!("alpha must lie in (0, 1], got {alpha}")));
        }
        let delta = self.delta();
        if !(0.0..=1.0).contains(&delta) {
            return Err(Error::Config(format!("delta must lie in [0, 1], got {delta}")));
        }
        let beta = self.beta();
        if !(beta > 0.0 && beta <= 1.0) {
            return Err(Error::Config(format!("beta must lie in (0, 1], got {beta}")));
        }
        if mub && ftn && (1.0 / beta - (1.0 + delta)).abs() > 1e-9 {
            return Err(Error::Config(format!(
                "comparing zak-mub with FTN baselines needs 1/beta = 1 + delta, got beta={beta} delta={delta}"
            )));
        }
        Ok(())
    }
}
