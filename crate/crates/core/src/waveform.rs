//! Transmit-side baseband chain: bit generation, QPSK mapping, root-raised-
//! cosine pulse shaping, and frame/preamble construction.
//!
//! Frames are built from a preamble bit block (known to the receiver) followed
//! by data bits. The shaped preamble segment of the waveform doubles as the
//! receiver's least-squares reference sequence.

use num_complex::Complex64;
use rand::Rng;
use std::f64::consts::{FRAC_1_SQRT_2, PI};
use std::ops::Range;

use crate::error::{Error, Result};
use crate::rng::rng_from_seed;

/// Gray-coded QPSK constellation, indexed by the bit pair `(b0, b1)`:
/// `00 -> (1+j)/sqrt(2)`, `01 -> (1-j)/sqrt(2)`,
/// `10 -> (-1+j)/sqrt(2)`, `11 -> (-1-j)/sqrt(2)`.
fn qpsk_point(b0: u8, b1: u8) -> Complex64 {
    let re = if b0 == 0 {
        FRAC_1_SQRT_2
    } else {
        -FRAC_1_SQRT_2
    };
    let im = if b1 == 0 {
        FRAC_1_SQRT_2
    } else {
        -FRAC_1_SQRT_2
    };
    Complex64::new(re, im)
}

/// A real symmetric FIR pulse-shaping filter with unit energy.
#[derive(Debug, Clone)]
pub struct ShapingFilter {
    /// Impulse response; odd length, symmetric about the center tap.
    pub taps: Vec<f64>,
    /// Samples per symbol (upsampling ratio).
    pub sps: usize,
    /// Excess-bandwidth roll-off factor in (0, 1].
    pub rolloff: f64,
}

impl ShapingFilter {
    pub fn len(&self) -> usize {
        self.taps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.taps.is_empty()
    }

    /// Latency of the symmetric filter in samples: `(len - 1) / 2`.
    pub fn group_delay(&self) -> usize {
        (self.taps.len() - 1) / 2
    }
}

/// A pulse-shaped frame along with the receiver-known reference segment.
#[derive(Debug, Clone)]
pub struct FrameWaveform {
    /// Shaped waveform at the receiver sample rate, including the
    /// convolution tail.
    pub samples: Vec<Complex64>,
    /// The shaped preamble segment: `samples[preamble_span]`.
    pub preamble_ref: Vec<Complex64>,
    /// Index range of `preamble_ref` within `samples`.
    pub preamble_span: Range<usize>,
    /// All transmitted bits, preamble first.
    pub bits_tx: Vec<u8>,
    /// Number of leading bits that form the preamble.
    pub preamble_bits: usize,
    /// Group delay of the shaping filter in samples.
    pub group_delay: usize,
}

fn check_bits(bits: &[u8], what: &str) -> Result<()> {
    if bits.iter().any(|&b| b > 1) {
        return Err(Error::invalid_argument(format!(
            "{what} must contain only 0/1 values"
        )));
    }
    Ok(())
}

/// Deterministic pseudo-random bits for a given seed.
pub fn random_bits(count: usize, seed: u64) -> Vec<u8> {
    let mut rng = rng_from_seed(seed);
    (0..count).map(|_| rng.random::<bool>() as u8).collect()
}

/// Generates a seeded pseudo-random preamble of `t_bits` bits.
///
/// `t_bits` must be even and at least 2 (QPSK consumes bit pairs).
pub fn make_preamble(t_bits: usize, seed: u64) -> Result<Vec<u8>> {
    if t_bits < 2 || !t_bits.is_multiple_of(2) {
        return Err(Error::invalid_argument(format!(
            "preamble length must be even and >= 2, got {t_bits}"
        )));
    }
    Ok(random_bits(t_bits, seed))
}

/// Maps an even-length bit sequence onto Gray-coded QPSK symbols.
pub fn qpsk_modulate(bits: &[u8]) -> Result<Vec<Complex64>> {
    if bits.is_empty() || !bits.len().is_multiple_of(2) {
        return Err(Error::invalid_argument(format!(
            "QPSK needs a nonempty, even-length bit sequence, got {} bits",
            bits.len()
        )));
    }
    check_bits(bits, "bits")?;
    Ok(bits
        .chunks_exact(2)
        .map(|p| qpsk_point(p[0], p[1]))
        .collect())
}

/// Minimum-distance (quadrant) QPSK decisions; inverse of [`qpsk_modulate`]
/// on noiseless constellation points.
pub fn qpsk_demodulate(symbols: &[Complex64]) -> Vec<u8> {
    let mut bits = Vec::with_capacity(symbols.len() * 2);
    for s in symbols {
        bits.push((s.re < 0.0) as u8);
        bits.push((s.im < 0.0) as u8);
    }
    bits
}

/// Root-raised-cosine impulse response with `length` taps (odd), roll-off
/// `rolloff` in (0, 1], and `sps` samples per symbol. The taps are symmetric
/// and normalized to unit energy; removable singularities of the closed form
/// are evaluated by their analytic limits.
pub fn rrc_taps(length: usize, rolloff: f64, sps: usize) -> Result<ShapingFilter> {
    if length.is_multiple_of(2) || length == 0 {
        return Err(Error::invalid_argument(format!(
            "filter length must be odd, got {length}"
        )));
    }
    if !(rolloff > 0.0 && rolloff <= 1.0) {
        return Err(Error::invalid_argument(format!(
            "roll-off must lie in (0, 1], got {rolloff}"
        )));
    }
    if sps == 0 {
        return Err(Error::invalid_argument("samples per symbol must be >= 1"));
    }

    let beta = rolloff;
    let half = (length - 1) as i64 / 2;
    let mut taps = Vec::with_capacity(length);
    for i in 0..length as i64 {
        // Tap time in symbol periods.
        let t = (i - half) as f64 / sps as f64;
        let v = if t.abs() < 1e-12 {
            1.0 - beta + 4.0 * beta / PI
        } else if (t.abs() - 1.0 / (4.0 * beta)).abs() < 1e-9 {
            // Limit at t = +-T/(4*beta).
            (beta / std::f64::consts::SQRT_2)
                * ((1.0 + 2.0 / PI) * (PI / (4.0 * beta)).sin()
                    + (1.0 - 2.0 / PI) * (PI / (4.0 * beta)).cos())
        } else {
            let num =
                (PI * t * (1.0 - beta)).sin() + 4.0 * beta * t * (PI * t * (1.0 + beta)).cos();
            let den = PI * t * (1.0 - (4.0 * beta * t).powi(2));
            num / den
        };
        taps.push(v);
    }

    let energy: f64 = taps.iter().map(|x| x * x).sum();
    let scale = energy.sqrt().recip();
    for tap in &mut taps {
        *tap *= scale;
    }

    Ok(ShapingFilter { taps, sps, rolloff })
}

/// Zero-stuffed upsampling by `filter.sps` followed by convolution with the
/// filter taps. Output length is `symbols.len() * sps + taps.len() - 1`.
pub fn pulse_shape(symbols: &[Complex64], filter: &ShapingFilter) -> Vec<Complex64> {
    let sps = filter.sps;
    let up_len = symbols.len() * sps;
    let out_len = if up_len == 0 {
        0
    } else {
        up_len + filter.len() - 1
    };
    let mut out = vec![Complex64::new(0.0, 0.0); out_len];
    for (si, &sym) in symbols.iter().enumerate() {
        let base = si * sps;
        for (ti, &tap) in filter.taps.iter().enumerate() {
            out[base + ti] += sym * tap;
        }
    }
    out
}

/// Builds a frame from preamble and data bits.
///
/// The whole bit sequence is QPSK-modulated and pulse-shaped; the reference
/// segment is the slice of the shaped waveform covering the preamble symbols,
/// starting at the shaping filter's group delay. With `sps` samples per
/// symbol the reference holds `preamble_bits/2 * sps` samples.
pub fn build_frame(
    preamble_bits: &[u8],
    data_bits: &[u8],
    filter: &ShapingFilter,
) -> Result<FrameWaveform> {
    if preamble_bits.is_empty() || !preamble_bits.len().is_multiple_of(2) {
        return Err(Error::invalid_argument(format!(
            "preamble bit count must be even and nonzero, got {}",
            preamble_bits.len()
        )));
    }
    if !data_bits.len().is_multiple_of(2) {
        return Err(Error::invalid_argument(format!(
            "data bit count must be even, got {}",
            data_bits.len()
        )));
    }

    let mut bits = Vec::with_capacity(preamble_bits.len() + data_bits.len());
    bits.extend_from_slice(preamble_bits);
    bits.extend_from_slice(data_bits);

    let symbols = qpsk_modulate(&bits)?;
    let samples = pulse_shape(&symbols, filter);

    let gd = filter.group_delay();
    let ref_len = preamble_bits.len() / 2 * filter.sps;
    let span = gd..gd + ref_len;
    let preamble_ref = samples[span.clone()].to_vec();

    Ok(FrameWaveform {
        samples,
        preamble_ref,
        preamble_span: span,
        bits_tx: bits,
        preamble_bits: preamble_bits.len(),
        group_delay: gd,
    })
}
