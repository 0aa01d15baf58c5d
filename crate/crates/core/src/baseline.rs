//! Two-stage comparison receiver: spatial filtering with the minimum
//! eigenvector of the receive covariance, then conventional preamble-based
//! synchronization (envelope cross-correlation timing, phase-slope CFO fit,
//! least-squares gain) and correction.
//!
//! The spatial stage avoids the jammer subspace when jammers dominate the
//! covariance, but at moderate signal-to-jamming ratios the desired channel
//! leaks into the dominant subspace and the minimum eigenvector starts
//! suppressing the signal as well.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use std::f64::consts::PI;

use crate::channel::RxBurst;
use crate::error::{Error, Result};

/// Unit-norm spatial combiner.
#[derive(Debug, Clone, PartialEq)]
pub struct SpatialFilter {
    pub u: DVector<Complex64>,
}

/// Synchronization estimates recovered by the two-stage receiver.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SyncEstimate {
    pub tau_hat: usize,
    pub cfo_hat_hz: f64,
    pub gain_hat: Complex64,
}

/// Settings for [`two_stage_receive`].
#[derive(Debug, Clone, Copy)]
pub struct TwoStageConfig {
    /// Burst index where the reference would sit at zero timing offset.
    pub preamble_start: usize,
    /// Number of output samples to reconstruct (the frame length).
    pub frame_len: usize,
    /// Timing offsets 0..=max_lag are searched.
    pub max_lag: usize,
    /// Normalized correlation peaks below this value signal a sync failure.
    pub min_peak: f64,
}

/// Outcome of the two-stage pipeline. A failed timing search is a reportable
/// result, not an error.
#[derive(Debug, Clone)]
pub enum TwoStageResult {
    Synced {
        signal: Vec<Complex64>,
        sync: SyncEstimate,
    },
    SyncFailed {
        peak: f64,
    },
}

/// Sample covariance `R = (1/T) * sum_t y(t) y(t)^H`.
pub fn spatial_covariance(burst: &RxBurst) -> Result<DMatrix<Complex64>> {
    if burst.is_empty() {
        return Err(Error::invalid_argument("burst holds no samples"));
    }
    let n = burst.n_antennas();
    let t_total = burst.len();
    let mut r = DMatrix::<Complex64>::zeros(n, n);
    for t in 0..t_total {
        let col = burst.samples.column(t);
        for i in 0..n {
            for j in 0..n {
                r[(i, j)] += col[i] * col[j].conj();
            }
        }
    }
    r /= Complex64::new(t_total as f64, 0.0);
    Ok(r)
}

/// Unit-norm eigenvector of the smallest eigenvalue of a Hermitian matrix.
///
/// The phase convention makes the output deterministic: the first component
/// with magnitude above 1e-12 is rotated real-positive.
pub fn min_eigenvector(r: &DMatrix<Complex64>) -> Result<SpatialFilter> {
    if r.nrows() != r.ncols() || r.is_empty() {
        return Err(Error::invalid_argument(
            "covariance must be square and nonempty",
        ));
    }
    let mut herm_dev = 0.0f64;
    for i in 0..r.nrows() {
        for j in 0..r.ncols() {
            herm_dev = herm_dev.max((r[(i, j)] - r[(j, i)].conj()).norm());
        }
    }
    if herm_dev > 1e-8 {
        return Err(Error::invalid_argument(format!(
            "matrix is not Hermitian (max deviation {herm_dev:.3e})"
        )));
    }

    let eig = nalgebra::SymmetricEigen::new(r.clone());
    let mut i_min = 0;
    for i in 1..eig.eigenvalues.len() {
        if eig.eigenvalues[i] < eig.eigenvalues[i_min] {
            i_min = i;
        }
    }
    let mut u = eig.eigenvectors.column(i_min).into_owned();
    u /= Complex64::new(u.norm(), 0.0);
    // Rotate the first nonzero component real-positive.
    if let Some(first) = u.iter().find(|c| c.norm() > 1e-12) {
        let phase = first.arg();
        u *= Complex64::from_polar(1.0, -phase);
    }
    Ok(SpatialFilter { u })
}

/// Least-squares estimate of the common per-sample phase increment of `p`,
/// in cycles per sample. A lag-one correlation gives an unambiguous coarse
/// slope; a half-window correlation then refines it with a long lever arm.
fn phase_slope(p: &[Complex64]) -> f64 {
    if p.len() < 2 {
        return 0.0;
    }
    let coarse: Complex64 = p.windows(2).map(|w| w[1] * w[0].conj()).sum();
    let nu0 = coarse.arg() / (2.0 * PI);
    let m = p.len() / 2;
    if m == 0 {
        return nu0;
    }
    let fine: Complex64 = (0..p.len() - m).map(|i| p[i + m] * p[i].conj()).sum();
    let resid = (fine * Complex64::from_polar(1.0, -2.0 * PI * nu0 * m as f64)).arg()
        / (2.0 * PI * m as f64);
    nu0 + resid
}

/// Mean-removed normalized cross-correlation between two real sequences.
fn normalized_correlation(a: &[f64], b: &[f64]) -> f64 {
    debug_assert_eq!(a.len(), b.len());
    let n = a.len() as f64;
    let ma = a.iter().sum::<f64>() / n;
    let mb = b.iter().sum::<f64>() / n;
    let mut num = 0.0;
    let mut na = 0.0;
    let mut nb = 0.0;
    for (x, y) in a.iter().zip(b) {
        let da = x - ma;
        let db = y - mb;
        num += da * db;
        na += da * da;
        nb += db * db;
    }
    if na <= 0.0 || nb <= 0.0 {
        return 0.0;
    }
    num / (na * nb).sqrt()
}

/// Runs the full two-stage pipeline.
///
/// 1. Spatial filter: `z(t) = u^H y(t)` with `u` the minimum eigenvector of
///    the sample covariance.
/// 2. Timing: the lag in `0..=max_lag` maximizing the magnitude of the
///    mean-removed normalized cross-correlation between `|z|` and the
///    reference envelope `|s_ref|` (envelopes are insensitive to the CFO).
/// 3. CFO: phase-slope fit on `p(i) = z(start + tau + i) * conj(s_ref[i])`
///    via the angle of the accumulated lag-one product.
/// 4. Gain: least-squares complex gain of the derotated stream against the
///    reference.
///
/// The output is the corrected stream aligned to transmit-time coordinates,
/// ready for the common matched-filter decoder.
pub fn two_stage_receive(
    burst: &RxBurst,
    s_ref: &[Complex64],
    cfg: &TwoStageConfig,
) -> Result<TwoStageResult> {
    if s_ref.is_empty() {
        return Err(Error::invalid_argument("reference sequence is empty"));
    }
    let p = s_ref.len();
    if cfg.preamble_start + cfg.max_lag + p > burst.len() {
        return Err(Error::invalid_argument(format!(
            "correlation window [{}..{}) exceeds burst length {}",
            cfg.preamble_start,
            cfg.preamble_start + cfg.max_lag + p,
            burst.len()
        )));
    }

    let r = spatial_covariance(burst)?;
    let u = min_eigenvector(&r)?.u;

    let z: Vec<Complex64> = (0..burst.len())
        .map(|t| {
            let col = burst.samples.column(t);
            u.iter()
                .zip(col.iter())
                .map(|(ui, yi)| ui.conj() * yi)
                .sum()
        })
        .collect();

    // Timing via envelope correlation.
    let env_ref: Vec<f64> = s_ref.iter().map(|s| s.norm()).collect();
    let mut best_lag = 0usize;
    let mut best_peak = f64::NEG_INFINITY;
    for lag in 0..=cfg.max_lag {
        let start = cfg.preamble_start + lag;
        let env: Vec<f64> = z[start..start + p].iter().map(|v| v.norm()).collect();
        let c = normalized_correlation(&env, &env_ref).abs();
        if c > best_peak {
            best_peak = c;
            best_lag = lag;
        }
    }
    if best_peak < cfg.min_peak {
        return Ok(TwoStageResult::SyncFailed { peak: best_peak });
    }

    // CFO from the phase slope of the de-modulated preamble product
    // p(i) = z(start + tau + i) * conj(s_ref[i]), whose phase advances by
    // 2*pi*nu per sample.
    let start = cfg.preamble_start + best_lag;
    let prod: Vec<Complex64> = (0..p).map(|i| z[start + i] * s_ref[i].conj()).collect();
    let nu_hat = phase_slope(&prod); // cycles per sample
    let cfo_hat_hz = nu_hat * burst.sample_rate_hz;

    // Least-squares complex gain on the derotated preamble.
    let mut num = Complex64::new(0.0, 0.0);
    let mut den = 0.0;
    for i in 0..p {
        let zc = z[start + i] * Complex64::from_polar(1.0, -2.0 * PI * nu_hat * (start + i) as f64);
        num += zc * s_ref[i].conj();
        den += s_ref[i].norm_sqr();
    }
    let gain_hat = num / den;
    if gain_hat.norm() < 1e-30 {
        return Ok(TwoStageResult::SyncFailed { peak: best_peak });
    }

    // Corrected stream in transmit-time coordinates.
    let inv_gain = Complex64::new(1.0, 0.0) / gain_hat;
    let signal: Vec<Complex64> = (0..cfg.frame_len)
        .map(|t| {
            let idx = t + best_lag;
            if idx < z.len() {
                z[idx] * Complex64::from_polar(1.0, -2.0 * PI * nu_hat * idx as f64) * inv_gain
            } else {
                Complex64::new(0.0, 0.0)
            }
        })
        .collect();

    Ok(TwoStageResult::Synced {
        signal,
        sync: SyncEstimate {
            tau_hat: best_lag,
            cfo_hat_hz,
            gain_hat,
        },
    })
}
