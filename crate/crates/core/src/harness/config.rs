//! Experiment configuration and the flat key-value config file format.
//!
//! A config file holds one `key = value` pair per line; `#` starts a
//! comment. Unknown keys are rejected. Every key is optional; the defaults
//! reproduce the reference simulation setup (4 antennas, 3 Gaussian
//! jammers, filter order 12, 164-bit frames with a 40-bit preamble, QPSK at
//! 0.5 Msym/s upsampled by 8 to a 4 MHz receiver, SNR 5 dB, SJR -30 dB,
//! CFO 760 Hz, timing offset drawn from [1, 10] samples, CFO search over
//! [0, 1000) Hz in 5 Hz steps).

use std::fmt;
use std::path::Path;
use std::str::FromStr;

use crate::channel::JammerKind;
use crate::error::{Error, Result};
use crate::stfilter::{CfoGrid, EpsilonMode};

/// Receiver chains the harness can run.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Method {
    /// Joint CFO + spatio-temporal least-squares design.
    Proposed,
    /// Minimum-eigenvector spatial filter followed by conventional sync.
    TwoStage,
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Method::Proposed => write!(f, "proposed"),
            Method::TwoStage => write!(f, "two_stage"),
        }
    }
}

impl FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "proposed" => Ok(Method::Proposed),
            "two_stage" => Ok(Method::TwoStage),
            other => Err(Error::config(
                "methods",
                format!("unknown method `{other}`"),
            )),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub n_antennas: usize,
    pub k_jammers: usize,
    pub l_order: usize,
    pub preamble_bits: usize,
    pub frame_bits: usize,
    pub snr_db: f64,
    pub sjr_db: f64,
    pub cfo_hz: f64,
    /// Inclusive range of timing offsets in samples.
    pub delay_range: (usize, usize),
    pub grid: CfoGrid,
    pub epsilon_mode: EpsilonMode,
    /// One entry per jammer.
    pub jammer_kinds: Vec<JammerKind>,
    pub trials: usize,
    pub seed: u64,
    pub methods: Vec<Method>,
    pub sample_rate_hz: f64,
    pub sps: usize,
    pub rolloff: f64,
    pub filter_length: usize,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        ExperimentConfig {
            n_antennas: 4,
            k_jammers: 3,
            l_order: 12,
            preamble_bits: 40,
            frame_bits: 164,
            snr_db: 5.0,
            sjr_db: -30.0,
            cfo_hz: 760.0,
            delay_range: (1, 10),
            grid: CfoGrid::default(),
            epsilon_mode: EpsilonMode::default(),
            jammer_kinds: vec![JammerKind::Gaussian; 3],
            trials: 100,
            seed: 1,
            methods: vec![Method::Proposed, Method::TwoStage],
            sample_rate_hz: 4e6,
            sps: 8,
            rolloff: 0.5,
            filter_length: 49,
        }
    }
}

impl ExperimentConfig {
    /// Checks the cross-field invariants; every violation names the
    /// offending key.
    pub fn validate(&self) -> Result<()> {
        let bad = |key: &str, msg: String| Err(Error::config(key, msg));
        if self.n_antennas < self.k_jammers + 1 {
            return bad(
                "n_antennas",
                format!(
                    "need at least k_jammers+1 = {} antennas, got {}",
                    self.k_jammers + 1,
                    self.n_antennas
                ),
            );
        }
        if self.l_order == 0 {
            return bad("l_order", "filter order must be >= 1".into());
        }
        if self.preamble_bits < 2 || !self.preamble_bits.is_multiple_of(2) {
            return bad(
                "preamble_bits",
                format!("must be even and >= 2, got {}", self.preamble_bits),
            );
        }
        if self.frame_bits < self.preamble_bits || !self.frame_bits.is_multiple_of(2) {
            return bad(
                "frame_bits",
                format!(
                    "must be even and >= preamble_bits = {}, got {}",
                    self.preamble_bits, self.frame_bits
                ),
            );
        }
        if self.delay_range.0 > self.delay_range.1 {
            return bad(
                "delay_range",
                format!(
                    "bounds out of order: [{}, {}]",
                    self.delay_range.0, self.delay_range.1
                ),
            );
        }
        if self.delay_range.1 >= self.l_order {
            return bad(
                "delay_range",
                format!(
                    "max offset {} must stay below l_order = {}",
                    self.delay_range.1, self.l_order
                ),
            );
        }
        self.grid
            .validate()
            .map_err(|e| Error::config("grid_points", e.to_string()))?;
        if self.jammer_kinds.len() != self.k_jammers {
            return bad(
                "jammer_kinds",
                format!(
                    "got {} kinds for k_jammers = {}",
                    self.jammer_kinds.len(),
                    self.k_jammers
                ),
            );
        }
        if self.trials == 0 {
            return bad("trials", "need at least one trial".into());
        }
        if self.methods.is_empty() {
            return bad("methods", "need at least one method".into());
        }
        if self.sample_rate_hz.is_nan() || self.sample_rate_hz <= 0.0 {
            return bad(
                "sample_rate_hz",
                format!("must be positive, got {}", self.sample_rate_hz),
            );
        }
        if self.sps == 0 {
            return bad("sps", "samples per symbol must be >= 1".into());
        }
        if self.rolloff.is_nan() || self.rolloff <= 0.0 || self.rolloff > 1.0 {
            return bad(
                "rolloff",
                format!("must lie in (0, 1], got {}", self.rolloff),
            );
        }
        if self.filter_length.is_multiple_of(2) || self.filter_length == 0 {
            return bad(
                "filter_length",
                format!("must be odd, got {}", self.filter_length),
            );
        }
        Ok(())
    }
}

fn parse_num<T: FromStr>(key: &str, value: &str) -> Result<T> {
    value
        .trim()
        .parse::<T>()
        .map_err(|_| Error::config(key, format!("cannot parse `{value}`")))
}

fn parse_db(key: &str, value: &str) -> Result<f64> {
    match value.trim() {
        "inf" | "infinity" => Ok(f64::INFINITY),
        v => parse_num::<f64>(key, v),
    }
}

fn parse_jammer_kind(entry: &str) -> Result<JammerKind> {
    let entry = entry.trim();
    if entry == "gaussian" {
        Ok(JammerKind::Gaussian)
    } else if entry == "tone" {
        Ok(JammerKind::Tone { freq_hz: 0.0 })
    } else if let Some(freq) = entry.strip_prefix("tone:") {
        Ok(JammerKind::Tone {
            freq_hz: parse_num("jammer_kinds", freq)?,
        })
    } else {
        Err(Error::config(
            "jammer_kinds",
            format!("unknown jammer kind `{entry}`"),
        ))
    }
}

fn parse_epsilon_mode(value: &str) -> Result<EpsilonMode> {
    let v = value.trim();
    if v == "zero" {
        Ok(EpsilonMode::Zero)
    } else if let Some(x) = v.strip_prefix("absolute:") {
        Ok(EpsilonMode::Absolute(parse_num("epsilon_mode", x)?))
    } else if let Some(x) = v.strip_prefix("relative:") {
        Ok(EpsilonMode::RelativeTrace(parse_num("epsilon_mode", x)?))
    } else {
        Err(Error::config(
            "epsilon_mode",
            format!("expected `zero`, `absolute:<v>`, or `relative:<v>`, got `{v}`"),
        ))
    }
}

fn parse_pair(key: &str, value: &str) -> Result<(usize, usize)> {
    let parts: Vec<&str> = value
        .split(|c: char| c == ',' || c.is_whitespace())
        .filter(|p| !p.is_empty())
        .collect();
    if parts.len() != 2 {
        return Err(Error::config(
            key,
            format!("expected two integers, got `{value}`"),
        ));
    }
    Ok((parse_num(key, parts[0])?, parse_num(key, parts[1])?))
}

/// Parses config text into a validated [`ExperimentConfig`], starting from
/// the defaults. Empty input yields the default configuration.
pub fn parse_config_str(text: &str) -> Result<ExperimentConfig> {
    let mut cfg = ExperimentConfig::default();
    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (key, value) = line.split_once('=').ok_or_else(|| {
            Error::config(
                format!("line {}", lineno + 1),
                format!("expected `key = value`, got `{line}`"),
            )
        })?;
        let key = key.trim();
        let value = value.trim();
        match key {
            "n_antennas" => cfg.n_antennas = parse_num(key, value)?,
            "k_jammers" => {
                cfg.k_jammers = parse_num(key, value)?;
                // keep the default jammer list in sync unless overridden
                if cfg.jammer_kinds.iter().all(|k| *k == JammerKind::Gaussian) {
                    cfg.jammer_kinds = vec![JammerKind::Gaussian; cfg.k_jammers];
                }
            }
            "l_order" => cfg.l_order = parse_num(key, value)?,
            "preamble_bits" => cfg.preamble_bits = parse_num(key, value)?,
            "frame_bits" => cfg.frame_bits = parse_num(key, value)?,
            "snr_db" => cfg.snr_db = parse_db(key, value)?,
            "sjr_db" => cfg.sjr_db = parse_db(key, value)?,
            "cfo_hz" => cfg.cfo_hz = parse_num(key, value)?,
            "delay_range" => cfg.delay_range = parse_pair(key, value)?,
            "grid_min_hz" => cfg.grid.min_hz = parse_num(key, value)?,
            "grid_max_hz" => cfg.grid.max_hz = parse_num(key, value)?,
            "grid_points" => cfg.grid.m = parse_num(key, value)?,
            "epsilon_mode" => cfg.epsilon_mode = parse_epsilon_mode(value)?,
            "jammer_kinds" => {
                cfg.jammer_kinds = value
                    .split(',')
                    .filter(|p| !p.trim().is_empty())
                    .map(parse_jammer_kind)
                    .collect::<Result<Vec<_>>>()?;
            }
            "trials" => cfg.trials = parse_num(key, value)?,
            "seed" => cfg.seed = parse_num(key, value)?,
            "methods" => {
                cfg.methods = value
                    .split(',')
                    .filter(|p| !p.trim().is_empty())
                    .map(Method::from_str)
                    .collect::<Result<Vec<_>>>()?;
            }
            "sample_rate_hz" => cfg.sample_rate_hz = parse_num(key, value)?,
            "sps" => cfg.sps = parse_num(key, value)?,
            "rolloff" => cfg.rolloff = parse_num(key, value)?,
            "filter_length" => cfg.filter_length = parse_num(key, value)?,
            other => {
                return Err(Error::config(
                    other,
                    "unknown configuration key".to_string(),
                ));
            }
        }
    }
    cfg.validate()?;
    Ok(cfg)
}

/// Loads and validates a config file.
pub fn load_config(path: impl AsRef<Path>) -> Result<ExperimentConfig> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_config_str(&text)
}
