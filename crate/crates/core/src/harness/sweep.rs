//! Parameter sweeps: one batch of paired trials per axis value, aggregated
//! into per-method rows.

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};

use super::config::{ExperimentConfig, Method};
use super::trial::{run_trials, TrialResult};

/// Sweepable configuration axes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SweepAxis {
    PreambleBits,
    SjrDb,
    SnrDb,
}

impl fmt::Display for SweepAxis {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SweepAxis::PreambleBits => write!(f, "preamble_bits"),
            SweepAxis::SjrDb => write!(f, "sjr_db"),
            SweepAxis::SnrDb => write!(f, "snr_db"),
        }
    }
}

impl FromStr for SweepAxis {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "preamble_bits" => Ok(SweepAxis::PreambleBits),
            "sjr_db" => Ok(SweepAxis::SjrDb),
            "snr_db" => Ok(SweepAxis::SnrDb),
            other => Err(Error::invalid_argument(format!(
                "unknown sweep axis `{other}`"
            ))),
        }
    }
}

/// Aggregated result for one (axis value, method) cell, with the
/// configuration echoed for provenance.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepRow {
    pub axis: SweepAxis,
    pub value: f64,
    pub method: Method,
    /// Mean of per-trial BER values (sync failures contribute 0.5).
    pub mean_ber: f64,
    /// Standard error of the per-trial BER values.
    pub ber_std_err: f64,
    pub trials: usize,
    pub sync_failures: usize,
    /// Mean absolute CFO error over trials that synchronized.
    pub mean_omega_err_hz: Option<f64>,
    pub n_antennas: usize,
    pub k_jammers: usize,
    pub l_order: usize,
    pub preamble_bits: usize,
    pub frame_bits: usize,
    pub snr_db: f64,
    pub sjr_db: f64,
    pub cfo_hz: f64,
    pub seed: u64,
}

/// Applies one axis value to a copy of the base configuration.
fn configure_point(
    base: &ExperimentConfig,
    axis: SweepAxis,
    value: f64,
) -> Result<ExperimentConfig> {
    let mut cfg = base.clone();
    match axis {
        SweepAxis::PreambleBits => {
            if value < 0.0 || value.fract() != 0.0 {
                return Err(Error::config(
                    "preamble_bits",
                    format!("sweep value must be a nonnegative integer, got {value}"),
                ));
            }
            cfg.preamble_bits = value as usize;
        }
        SweepAxis::SjrDb => cfg.sjr_db = value,
        SweepAxis::SnrDb => cfg.snr_db = value,
    }
    cfg.validate()?;
    Ok(cfg)
}

/// Aggregates the per-trial results of one method at one sweep point.
pub(crate) fn aggregate(
    cfg: &ExperimentConfig,
    axis: SweepAxis,
    value: f64,
    method: Method,
    trials: &[Vec<TrialResult>],
) -> SweepRow {
    let per_method: Vec<&TrialResult> = trials
        .iter()
        .flat_map(|t| t.iter())
        .filter(|r| r.method == method)
        .collect();
    let n = per_method.len();
    let mean_ber = per_method.iter().map(|r| r.ber).sum::<f64>() / n as f64;
    let var = per_method
        .iter()
        .map(|r| (r.ber - mean_ber).powi(2))
        .sum::<f64>()
        / (n.saturating_sub(1)).max(1) as f64;
    let ber_std_err = (var / n as f64).sqrt();
    let sync_failures = per_method.iter().filter(|r| r.sync_failed).count();
    let omega_errs: Vec<f64> = per_method.iter().filter_map(|r| r.omega_err_hz).collect();
    let mean_omega_err_hz = if omega_errs.is_empty() {
        None
    } else {
        Some(omega_errs.iter().sum::<f64>() / omega_errs.len() as f64)
    };
    SweepRow {
        axis,
        value,
        method,
        mean_ber,
        ber_std_err,
        trials: n,
        sync_failures,
        mean_omega_err_hz,
        n_antennas: cfg.n_antennas,
        k_jammers: cfg.k_jammers,
        l_order: cfg.l_order,
        preamble_bits: cfg.preamble_bits,
        frame_bits: cfg.frame_bits,
        snr_db: cfg.snr_db,
        sjr_db: cfg.sjr_db,
        cfo_hz: cfg.cfo_hz,
        seed: cfg.seed,
    }
}

/// Runs `cfg.trials` paired trials at every axis value and aggregates the
/// mean BER per method. Rows appear in (value, method) order.
pub fn run_sweep(cfg: &ExperimentConfig, axis: SweepAxis, values: &[f64]) -> Result<Vec<SweepRow>> {
    if values.is_empty() {
        return Err(Error::invalid_argument(
            "sweep needs at least one axis value",
        ));
    }
    let mut rows = Vec::with_capacity(values.len() * cfg.methods.len());
    for &value in values {
        let point_cfg = configure_point(cfg, axis, value)?;
        let trials = run_trials(&point_cfg)?;
        for &method in &point_cfg.methods {
            rows.push(aggregate(&point_cfg, axis, value, method, &trials));
        }
    }
    Ok(rows)
}
