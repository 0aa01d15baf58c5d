//! One Monte-Carlo trial: a fresh draw of bits, channels, timing offset,
//! jammers, and noise, with every configured receiver run on the identical
//! burst (paired comparison).

use num_complex::Complex64;
use rand::Rng;
use rayon::prelude::*;

use crate::baseline::{two_stage_receive, TwoStageConfig, TwoStageResult};
use crate::channel::{apply_link, draw_channels, JammerSpec, LinkParams, RxBurst};
use crate::error::{Error, Result};
use crate::receiver::{bit_error_rate, matched_filter_downsample, BerReport};
use crate::rng::{derive_seed, rng_from_seed};
use crate::stfilter::{apply_st_filter, cfo_grid_search};
use crate::theory::{recovery_set_deviation, RecoverySetReport};
use crate::waveform::{
    build_frame, qpsk_demodulate, random_bits, rrc_taps, FrameWaveform, ShapingFilter,
};

use super::config::{ExperimentConfig, Method};

/// Outcome of one receiver on one burst. BER is counted over the data bits
/// only (the preamble is known to the receiver).
#[derive(Debug, Clone, PartialEq)]
pub struct TrialResult {
    pub method: Method,
    pub seed: u64,
    pub ber: f64,
    pub bit_errors: usize,
    pub bits_total: usize,
    pub sync_failed: bool,
    /// `|estimated CFO - true CFO|`; absent when synchronization failed.
    pub omega_err_hz: Option<f64>,
    /// Recovery-set deviations of the designed filter against the truth
    /// channels (proposed method only).
    pub recovery: Option<RecoverySetReport>,
}

/// Derives the seed for trial `index` from the master seed.
pub fn trial_seed(master: u64, index: usize) -> u64 {
    derive_seed(master, 0x7431_0000 + index as u64)
}

/// Everything drawn for one trial, before any receiver runs.
#[derive(Debug, Clone)]
pub struct TrialDraw {
    pub filter: ShapingFilter,
    pub frame: FrameWaveform,
    pub burst: RxBurst,
    pub delay: usize,
}

/// Draws the frame, channels, timing offset, jammers, and noise for one
/// trial. Deterministic in `(cfg, trial_seed)`.
pub fn draw_burst(cfg: &ExperimentConfig, trial_seed: u64) -> Result<TrialDraw> {
    cfg.validate()?;

    let filter = rrc_taps(cfg.filter_length, cfg.rolloff, cfg.sps)?;
    let preamble = random_bits(cfg.preamble_bits, derive_seed(trial_seed, 1));
    let data = random_bits(
        cfg.frame_bits - cfg.preamble_bits,
        derive_seed(trial_seed, 2),
    );
    let frame = build_frame(&preamble, &data, &filter)?;

    let chans = draw_channels(cfg.n_antennas, cfg.k_jammers, derive_seed(trial_seed, 3))?;
    let delay = {
        let mut rng = rng_from_seed(derive_seed(trial_seed, 4));
        rng.random_range(cfg.delay_range.0..=cfg.delay_range.1)
    };
    let jammers: Vec<JammerSpec> = cfg
        .jammer_kinds
        .iter()
        .enumerate()
        .map(|(k, &kind)| JammerSpec {
            kind,
            seed: derive_seed(trial_seed, 100 + k as u64),
        })
        .collect();
    let params = LinkParams {
        cfo_hz: cfg.cfo_hz,
        delay_samples: delay,
        snr_db: cfg.snr_db,
        sjr_db: cfg.sjr_db,
        sample_rate_hz: cfg.sample_rate_hz,
        l_order: cfg.l_order,
    };
    let burst = apply_link(
        &frame,
        &chans,
        &params,
        &jammers,
        derive_seed(trial_seed, 5),
    )?;
    Ok(TrialDraw {
        filter,
        frame,
        burst,
        delay,
    })
}

/// Decodes a reconstructed frame waveform and counts data-bit errors.
fn decode_frame(
    signal: &[Complex64],
    filter: &ShapingFilter,
    frame: &FrameWaveform,
) -> Result<BerReport> {
    let n_syms = frame.bits_tx.len() / 2;
    let syms = matched_filter_downsample(signal, filter, 0)?;
    if syms.len() < n_syms {
        return Err(Error::invalid_state(format!(
            "decoded {} symbols, frame carries {n_syms}",
            syms.len()
        )));
    }
    let bits = qpsk_demodulate(&syms[..n_syms]);
    bit_error_rate(
        &frame.bits_tx[frame.preamble_bits..],
        &bits[frame.preamble_bits..],
    )
}

/// Runs every configured method on one freshly drawn burst. Deterministic in
/// `(cfg, trial_seed)`.
pub fn run_trial(cfg: &ExperimentConfig, trial_seed: u64) -> Result<Vec<TrialResult>> {
    let draw = draw_burst(cfg, trial_seed)?;
    cfg.methods
        .iter()
        .map(|&method| match method {
            Method::Proposed => run_proposed(
                cfg,
                trial_seed,
                &draw.filter,
                &draw.frame,
                &draw.burst,
                draw.delay,
            ),
            Method::TwoStage => {
                run_two_stage(cfg, trial_seed, &draw.filter, &draw.frame, &draw.burst)
            }
        })
        .collect()
}

fn run_proposed(
    cfg: &ExperimentConfig,
    seed: u64,
    filter: &ShapingFilter,
    frame: &FrameWaveform,
    burst: &RxBurst,
    delay: usize,
) -> Result<TrialResult> {
    let design = cfo_grid_search(
        burst,
        &frame.preamble_ref,
        frame.preamble_span.start,
        &cfg.grid,
        cfg.l_order,
        cfg.epsilon_mode,
    )?;
    let signal = apply_st_filter(
        burst,
        &design.w_star,
        design.omega_star_hz,
        0..frame.samples.len(),
    )?;
    let ber = decode_frame(&signal, filter, frame)?;

    let recovery = burst
        .truth
        .as_ref()
        .map(|truth| recovery_set_deviation(&design.w_star, &truth.channels, delay))
        .transpose()?;

    Ok(TrialResult {
        method: Method::Proposed,
        seed,
        ber: ber.ber,
        bit_errors: ber.bit_errors,
        bits_total: ber.bits_total,
        sync_failed: false,
        omega_err_hz: Some((design.omega_star_hz - cfg.cfo_hz).abs()),
        recovery,
    })
}

fn run_two_stage(
    cfg: &ExperimentConfig,
    seed: u64,
    filter: &ShapingFilter,
    frame: &FrameWaveform,
    burst: &RxBurst,
) -> Result<TrialResult> {
    let sync_cfg = TwoStageConfig {
        preamble_start: frame.preamble_span.start,
        frame_len: frame.samples.len(),
        max_lag: cfg.l_order,
        min_peak: 0.1,
    };
    let data_bits = cfg.frame_bits - cfg.preamble_bits;
    match two_stage_receive(burst, &frame.preamble_ref, &sync_cfg)? {
        TwoStageResult::Synced { signal, sync } => {
            let ber = decode_frame(&signal, filter, frame)?;
            Ok(TrialResult {
                method: Method::TwoStage,
                seed,
                ber: ber.ber,
                bit_errors: ber.bit_errors,
                bits_total: ber.bits_total,
                sync_failed: false,
                omega_err_hz: Some((sync.cfo_hat_hz - cfg.cfo_hz).abs()),
                recovery: None,
            })
        }
        TwoStageResult::SyncFailed { .. } => {
            let ber = BerReport::sync_failure(data_bits);
            Ok(TrialResult {
                method: Method::TwoStage,
                seed,
                ber: ber.ber,
                bit_errors: ber.bit_errors,
                bits_total: ber.bits_total,
                sync_failed: true,
                omega_err_hz: None,
                recovery: None,
            })
        }
    }
}

/// Runs `cfg.trials` independent trials in parallel worker threads; the
/// result vector is ordered by trial index regardless of scheduling.
pub fn run_trials(cfg: &ExperimentConfig) -> Result<Vec<Vec<TrialResult>>> {
    cfg.validate()?;
    (0..cfg.trials)
        .into_par_iter()
        .map(|i| run_trial(cfg, trial_seed(cfg.seed, i)))
        .collect()
}
