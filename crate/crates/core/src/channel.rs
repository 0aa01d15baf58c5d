//! Received-signal model: narrowband multi-antenna channel with carrier
//! frequency offset, integer timing offset, additive jammers, and AWGN.
//!
//! A burst collects, over integer sample indices `t`,
//!
//! ```text
//! y(t) = e^{j2*pi*(cfo/fs)*t} * h * s(t - tau) + sum_k g_k * i_k(t) + n(t)
//! ```
//!
//! with channel norms rescaled so the signal-to-jamming ratio (in dB) equals
//! `10*log10(|h|^2 / sum_k |g_k|^2)` for unit-power signals, and the noise
//! variance set from the per-antenna average SNR.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::rng::{complex_gaussian, derive_seed, rng_from_seed};
use crate::waveform::FrameWaveform;

/// Threshold on the smallest singular value of the unit-normalized stacked
/// channel matrix below which a draw counts as linearly dependent.
const INDEPENDENCE_TOL: f64 = 1e-9;

/// Legitimate channel `h` and jammer channels `g_1..g_K`.
#[derive(Debug, Clone, PartialEq)]
pub struct ChannelSet {
    pub h: DVector<Complex64>,
    pub g: Vec<DVector<Complex64>>,
}

impl ChannelSet {
    pub fn n(&self) -> usize {
        self.h.len()
    }

    pub fn k(&self) -> usize {
        self.g.len()
    }

    /// Smallest singular value of the stacked `[h g_1 .. g_K]` matrix after
    /// scaling each column to unit norm.
    pub fn min_singular_normalized(&self) -> f64 {
        let n = self.n();
        let cols = self.k() + 1;
        let mut m = DMatrix::<Complex64>::zeros(n, cols);
        m.set_column(0, &self.h.scale(self.h.norm().recip()));
        for (j, g) in self.g.iter().enumerate() {
            m.set_column(j + 1, &g.scale(g.norm().recip()));
        }
        m.singular_values()
            .iter()
            .fold(f64::INFINITY, |a, &b| a.min(b))
    }
}

/// Jammer waveform family. Generated waveforms carry unit average power.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum JammerKind {
    /// I.i.d. circularly-symmetric complex Gaussian samples.
    Gaussian,
    /// Complex exponential at `freq_hz` baseband; 0 Hz models a jammer
    /// sitting exactly on the carrier.
    Tone { freq_hz: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct JammerSpec {
    pub kind: JammerKind,
    pub seed: u64,
}

/// Link impairments and calibration targets.
#[derive(Debug, Clone, PartialEq)]
pub struct LinkParams {
    /// Carrier frequency offset in Hz.
    pub cfo_hz: f64,
    /// Integer timing offset in receiver samples; must stay below the
    /// receive filter order so the filter span covers it.
    pub delay_samples: usize,
    /// Per-antenna average SNR in dB (`inf` disables noise).
    pub snr_db: f64,
    /// Signal-to-jamming ratio in dB (`inf` disables jamming).
    pub sjr_db: f64,
    pub sample_rate_hz: f64,
    /// Receive filter order `L`; the burst is extended by `L` trailing
    /// samples and `delay_samples < L` is enforced.
    pub l_order: usize,
}

/// Ground-truth metadata kept alongside a burst for oracle checks only.
/// Receiver-path operations never consult it.
#[derive(Debug, Clone)]
pub struct BurstTruth {
    /// Channels after SJR rescaling.
    pub channels: ChannelSet,
    pub params: LinkParams,
    /// The clean frame waveform in transmit-time coordinates.
    pub clean_frame: Vec<Complex64>,
}

/// An N x T_total block of received baseband samples (rows = antennas).
#[derive(Debug, Clone)]
pub struct RxBurst {
    pub samples: DMatrix<Complex64>,
    pub sample_rate_hz: f64,
    pub truth: Option<BurstTruth>,
}

impl RxBurst {
    pub fn n_antennas(&self) -> usize {
        self.samples.nrows()
    }

    /// Number of samples per antenna.
    pub fn len(&self) -> usize {
        self.samples.ncols()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.ncols() == 0
    }
}

/// Draws i.i.d. complex Gaussian channels for one legitimate sender and `k`
/// jammers, re-drawing (bounded retries) until the stacked channel matrix is
/// numerically full rank. Requires `n >= k + 1`.
pub fn draw_channels(n: usize, k: usize, seed: u64) -> Result<ChannelSet> {
    if n < k + 1 {
        return Err(Error::invalid_argument(format!(
            "need at least k+1 antennas for k jammers (n = {n}, k = {k})"
        )));
    }
    let mut rng = rng_from_seed(seed);
    for _ in 0..32 {
        let h = DVector::from_fn(n, |_, _| complex_gaussian(&mut rng));
        let g: Vec<_> = (0..k)
            .map(|_| DVector::from_fn(n, |_, _| complex_gaussian(&mut rng)))
            .collect();
        let set = ChannelSet { h, g };
        if set.min_singular_normalized() > INDEPENDENCE_TOL {
            return Ok(set);
        }
    }
    Err(Error::invalid_state(
        "could not draw linearly independent channels after 32 attempts",
    ))
}

/// Generates a unit-average-power jammer waveform of `len` samples.
pub fn make_jammer(spec: &JammerSpec, len: usize, sample_rate_hz: f64) -> Vec<Complex64> {
    match spec.kind {
        JammerKind::Gaussian => {
            let mut rng = rng_from_seed(spec.seed);
            (0..len).map(|_| complex_gaussian(&mut rng)).collect()
        }
        JammerKind::Tone { freq_hz } => {
            let step = 2.0 * PI * freq_hz / sample_rate_hz;
            (0..len)
                .map(|t| Complex64::from_polar(1.0, step * t as f64))
                .collect()
        }
    }
}

/// Mixes a frame through the link model and returns the received burst.
///
/// The burst spans `delay + frame len + l_order` samples. Jammer channels are
/// rescaled (jointly, preserving their relative norms) to hit the target SJR;
/// the noise variance is set so the per-antenna average SNR (signal power
/// averaged over antennas divided by per-antenna noise power) meets the
/// target. Noise is drawn from `seed`, jammer waveforms from their own seeds.
pub fn apply_link(
    frame: &FrameWaveform,
    chans: &ChannelSet,
    params: &LinkParams,
    jammers: &[JammerSpec],
    seed: u64,
) -> Result<RxBurst> {
    if jammers.len() != chans.k() {
        return Err(Error::invalid_argument(format!(
            "got {} jammer specs for {} jammer channels",
            jammers.len(),
            chans.k()
        )));
    }
    if params.l_order == 0 {
        return Err(Error::invalid_argument("filter order must be >= 1"));
    }
    if params.delay_samples >= params.l_order {
        return Err(Error::invalid_argument(format!(
            "timing offset {} must be below the filter order {}",
            params.delay_samples, params.l_order
        )));
    }
    if params.sample_rate_hz.is_nan() || params.sample_rate_hz <= 0.0 {
        return Err(Error::invalid_argument("sample rate must be positive"));
    }

    let n = chans.n();
    let frame_len = frame.samples.len();
    let total = params.delay_samples + frame_len + params.l_order;

    // SJR calibration: scale the jammer set so that
    // 10*log10(|h|^2 / sum|g_k|^2) hits the target.
    let h = chans.h.clone();
    let h_sq = h.norm_squared();
    let g: Vec<DVector<Complex64>> = if chans.k() > 0 {
        let g_sq: f64 = chans.g.iter().map(|g| g.norm_squared()).sum();
        let target = h_sq * 10f64.powf(-params.sjr_db / 10.0);
        let factor = (target / g_sq).sqrt();
        if !factor.is_finite() {
            return Err(Error::invalid_argument(format!(
                "cannot calibrate jammer channels to SJR {} dB",
                params.sjr_db
            )));
        }
        chans.g.iter().map(|g| g.scale(factor)).collect()
    } else {
        Vec::new()
    };

    let mut samples = DMatrix::<Complex64>::zeros(n, total);

    // Legitimate component: CFO ramp indexed by receive time, delayed frame.
    let omega = 2.0 * PI * params.cfo_hz / params.sample_rate_hz;
    for (m, &s) in frame.samples.iter().enumerate() {
        let t = m + params.delay_samples;
        let rot = Complex64::from_polar(1.0, omega * t as f64);
        let v = rot * s;
        for i in 0..n {
            samples[(i, t)] += h[i] * v;
        }
    }

    // Jammers are on for the whole burst.
    for (gk, spec) in g.iter().zip(jammers) {
        let wave = make_jammer(spec, total, params.sample_rate_hz);
        for (t, &w) in wave.iter().enumerate() {
            for i in 0..n {
                samples[(i, t)] += gk[i] * w;
            }
        }
    }

    // AWGN with per-antenna variance sigma^2 = (|h|^2 / N) * P_s / snr.
    if params.snr_db.is_finite() {
        let p_s = frame.samples.iter().map(|s| s.norm_sqr()).sum::<f64>() / frame_len as f64;
        let sigma_sq = (h_sq / n as f64) * p_s * 10f64.powf(-params.snr_db / 10.0);
        let sigma = sigma_sq.sqrt();
        let mut rng = rng_from_seed(derive_seed(seed, 0xAE5));
        for v in samples.iter_mut() {
            *v += complex_gaussian(&mut rng) * sigma;
        }
    }

    Ok(RxBurst {
        samples,
        sample_rate_hz: params.sample_rate_hz,
        truth: Some(BurstTruth {
            channels: ChannelSet { h, g },
            params: params.clone(),
            clean_frame: frame.samples.clone(),
        }),
    })
}

/// Reads the realized SJR (in dB) back from a burst's truth channels.
/// Returns `+inf` for jammer-free bursts.
pub fn measured_sjr(burst: &RxBurst) -> Result<f64> {
    let truth = burst
        .truth
        .as_ref()
        .ok_or_else(|| Error::invalid_state("burst carries no truth metadata"))?;
    if truth.channels.k() == 0 {
        return Ok(f64::INFINITY);
    }
    let h_sq = truth.channels.h.norm_squared();
    let g_sq: f64 = truth.channels.g.iter().map(|g| g.norm_squared()).sum();
    Ok(10.0 * (h_sq / g_sq).log10())
}
