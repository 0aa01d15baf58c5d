//! Executable oracles for the noiseless exact-recovery analysis.
//!
//! The design equation `A_omega w = target` can be rewritten row by row in
//! terms of the inner products `psi_{l,0} = h^H w_l` and
//! `psi_{l,k} = g_k^H w_l`: each row couples shifted/conjugated copies of
//! the signal and jammer sequences, collected into a `T x (K+1)L` matrix.
//! When that matrix has full column rank, the only consistent `psi` is the
//! recovery indicator (1 at the signal tap `tau`, 0 elsewhere), which pins
//! the filter to the exact-cancellation set: `h^H w_tau = 1`,
//! `h^H w_l = 0` for `l != tau`, and `g_k^H w_l = 0` for all `k, l`.
//!
//! This module builds those matrices, checks their numerical rank, measures
//! a filter's deviation from the recovery set, and wraps the whole
//! noiseless construction into a seeded end-to-end verifier.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rand::Rng;
use std::f64::consts::PI;

use crate::channel::{draw_channels, ChannelSet, RxBurst};
use crate::error::{Error, Result};
use crate::rng::{complex_gaussian_vec, derive_seed, rng_from_seed};
use crate::stfilter::{
    apply_st_filter, cfo_grid_search, CfoGrid, EpsilonMode, FilterBank, RANK_RCOND,
};

/// Quantified deviation from the exact-cancellation filter set.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RecoverySetReport {
    /// `|h^H w_tau - 1|`
    pub peak_dev: f64,
    /// `max_{l != tau} |h^H w_l|`
    pub side_dev: f64,
    /// `max_{k,l} |g_k^H w_l|`
    pub jam_dev: f64,
}

impl RecoverySetReport {
    pub fn max_dev(&self) -> f64 {
        self.peak_dev.max(self.side_dev).max(self.jam_dev)
    }

    pub fn within(&self, tol: f64) -> bool {
        self.max_dev() <= tol
    }
}

/// Which of the two row-space matrices to build.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AppendixVariant {
    /// General grid point: the signal column carries the mismatch phase
    /// `e^{j2 pi (omega - cfo)(t+l)}`.
    OffGrid,
    /// `omega` pinned to the true CFO: the signal column loses its ramp.
    OnGrid,
}

#[derive(Debug, Clone)]
pub struct AppendixMatrix {
    /// `t_ref x (K+1) * l_order`, blocks ordered by tap `l`, within each
    /// block the signal column first, then one column per jammer.
    pub matrix: DMatrix<Complex64>,
    pub variant: AppendixVariant,
}

/// Builds the row-space matrix of the design equation over reference times
/// `t_start .. t_start + t_ref`. `s` and `jammers` are full timelines in
/// burst coordinates; the signal column reads `s[t + l - tau]`, so
/// `t_start >= tau` must hold.
#[allow(clippy::too_many_arguments)]
pub fn build_appendix_matrix(
    s: &[Complex64],
    jammers: &[Vec<Complex64>],
    tau: usize,
    delta_f_hz: f64,
    omega_hz: f64,
    sample_rate_hz: f64,
    t_start: usize,
    t_ref: usize,
    l_order: usize,
    variant: AppendixVariant,
) -> Result<AppendixMatrix> {
    if l_order == 0 || t_ref == 0 {
        return Err(Error::invalid_argument("need t_ref >= 1 and L >= 1"));
    }
    if t_start < tau {
        return Err(Error::invalid_argument(format!(
            "reference start {t_start} precedes the timing offset {tau}"
        )));
    }
    let k = jammers.len();
    let need = t_start + t_ref + l_order - 1;
    if s.len() < need - tau + 1 {
        return Err(Error::invalid_argument(format!(
            "signal timeline holds {} samples, need {}",
            s.len(),
            need - tau + 1
        )));
    }
    for (kk, jam) in jammers.iter().enumerate() {
        if jam.len() < need + 1 {
            return Err(Error::invalid_argument(format!(
                "jammer {kk} timeline holds {} samples, need {}",
                jam.len(),
                need + 1
            )));
        }
    }

    let omega_eff = match variant {
        AppendixVariant::OffGrid => omega_hz,
        AppendixVariant::OnGrid => delta_f_hz,
    };
    let two_pi = 2.0 * PI / sample_rate_hz;
    let cols = (k + 1) * l_order;
    let mut m = DMatrix::zeros(t_ref, cols);
    for r in 0..t_ref {
        let t = t_start + r;
        for l in 0..l_order {
            let tl = (t + l) as f64;
            let sig_phase = match variant {
                AppendixVariant::OffGrid => {
                    Complex64::from_polar(1.0, two_pi * (omega_hz - delta_f_hz) * tl)
                }
                AppendixVariant::OnGrid => Complex64::new(1.0, 0.0),
            };
            m[(r, l * (k + 1))] = sig_phase * s[t + l - tau].conj();
            let jam_phase = Complex64::from_polar(1.0, two_pi * omega_eff * tl);
            for (kk, jam) in jammers.iter().enumerate() {
                m[(r, l * (k + 1) + 1 + kk)] = jam_phase * jam[t + l].conj();
            }
        }
    }
    Ok(AppendixMatrix { matrix: m, variant })
}

/// Numerical rank via singular values (threshold `RANK_RCOND * s_max`).
/// When `with_sref` is given, the conjugated reference is prepended as an
/// extra column and the augmented matrix is ranked instead.
pub fn check_rank_condition(
    m: &AppendixMatrix,
    with_sref: Option<&[Complex64]>,
) -> Result<(usize, bool)> {
    let mat = match with_sref {
        None => m.matrix.clone(),
        Some(s_ref) => {
            if s_ref.len() != m.matrix.nrows() {
                return Err(Error::invalid_argument(format!(
                    "reference length {} does not match {} matrix rows",
                    s_ref.len(),
                    m.matrix.nrows()
                )));
            }
            let mut aug = DMatrix::zeros(m.matrix.nrows(), m.matrix.ncols() + 1);
            for (r, s) in s_ref.iter().enumerate() {
                aug[(r, 0)] = s.conj();
            }
            aug.view_mut((0, 1), (m.matrix.nrows(), m.matrix.ncols()))
                .copy_from(&m.matrix);
            aug
        }
    };
    let cols = mat.ncols();
    let sv = mat.singular_values();
    let s_max = sv.iter().fold(0.0f64, |acc, &x| acc.max(x));
    let rank = sv
        .iter()
        .filter(|&&x| x > RANK_RCOND * s_max && x > 0.0)
        .count();
    Ok((rank, rank == cols))
}

/// Measures a filter's deviation from the exact-cancellation set for the
/// given channels and signal tap `tau`.
pub fn recovery_set_deviation(
    w: &FilterBank,
    chans: &ChannelSet,
    tau: usize,
) -> Result<RecoverySetReport> {
    if tau >= w.l_order() {
        return Err(Error::invalid_argument(format!(
            "signal tap {tau} must lie below the filter order {}",
            w.l_order()
        )));
    }
    if chans.n() != w.n() {
        return Err(Error::invalid_argument(format!(
            "channel dimension {} does not match the filter's {}",
            chans.n(),
            w.n()
        )));
    }
    let inner = |v: &DVector<Complex64>, l: usize| -> Complex64 {
        v.iter()
            .zip(w.tap(l).iter())
            .map(|(a, b)| a.conj() * b)
            .sum()
    };
    let mut peak_dev = 0.0;
    let mut side_dev = 0.0f64;
    let mut jam_dev = 0.0f64;
    for l in 0..w.l_order() {
        let hw = inner(&chans.h, l);
        if l == tau {
            peak_dev = (hw - Complex64::new(1.0, 0.0)).norm();
        } else {
            side_dev = side_dev.max(hw.norm());
        }
        for g in &chans.g {
            jam_dev = jam_dev.max(inner(g, l).norm());
        }
    }
    Ok(RecoverySetReport {
        peak_dev,
        side_dev,
        jam_dev,
    })
}

/// Report from one noiseless end-to-end recovery check.
#[derive(Debug, Clone)]
pub struct RecoveryReport {
    pub n: usize,
    pub k: usize,
    pub l_order: usize,
    pub t_ref: usize,
    pub seed: u64,
    pub true_cfo_hz: f64,
    pub tau: usize,
    pub omega_star_hz: f64,
    /// Residual at the true (on-grid) CFO.
    pub residual_at_true: f64,
    /// Smallest residual over all other grid points.
    pub min_residual_elsewhere: f64,
    /// Reference energy `||s_ref||^2` for normalizing the residuals.
    pub ref_energy: f64,
    pub recovery: RecoverySetReport,
    /// Max-abs error between the filter output and the transmitted sequence
    /// over the reference span.
    pub output_max_err: f64,
    /// False when some other grid point also reaches (near) zero residual,
    /// i.e. the instance cannot discriminate the CFO (short reference).
    pub identifiable: bool,
    pub pass: bool,
}

/// Sample rate used by the noiseless verifier. Chosen so that neighboring
/// points of the default grid decohere over the reference span (a few
/// hundred samples): at 10 kHz one 5 Hz step slips a large fraction of a
/// radian across the window.
const VERIFY_SAMPLE_RATE_HZ: f64 = 1e4;

/// Generates a noiseless instance (random channels, random unit-power
/// signals, random on-grid CFO, random `tau < L`), runs the full design at
/// `epsilon = 0`, and checks the exact-recovery conditions: zero residual at
/// the true CFO, recovery-set membership, and exact signal reconstruction.
pub fn verify_exact_recovery(
    n: usize,
    k: usize,
    l_order: usize,
    t_ref: usize,
    seed: u64,
) -> Result<RecoveryReport> {
    if n < k + 1 {
        return Err(Error::invalid_argument(format!(
            "need at least k+1 antennas for k jammers (n = {n}, k = {k})"
        )));
    }
    if l_order == 0 || t_ref == 0 {
        return Err(Error::invalid_argument("need t_ref >= 1 and L >= 1"));
    }

    let chans = draw_channels(n, k, derive_seed(seed, 1))?;
    let mut rng = rng_from_seed(derive_seed(seed, 2));

    let grid = CfoGrid::default();
    let points = grid.points();
    let idx_true = (rng_from_seed(derive_seed(seed, 3)).random::<u64>() as usize) % points.len();
    let cfo = points[idx_true];
    let tau = (rng_from_seed(derive_seed(seed, 4)).random::<u64>() as usize) % l_order;

    let t_start = l_order;
    let total = t_start + t_ref + l_order;
    let fs = VERIFY_SAMPLE_RATE_HZ;

    let s = complex_gaussian_vec(&mut rng, total);
    let jams: Vec<Vec<Complex64>> = (0..k)
        .map(|_| complex_gaussian_vec(&mut rng, total))
        .collect();

    let two_pi_nu = 2.0 * PI * cfo / fs;
    let mut m = DMatrix::zeros(n, total);
    for t in 0..total {
        let sig = if t >= tau {
            s[t - tau]
        } else {
            Complex64::new(0.0, 0.0)
        };
        let rot = Complex64::from_polar(1.0, two_pi_nu * t as f64) * sig;
        for i in 0..n {
            let mut v = chans.h[i] * rot;
            for (kk, jam) in jams.iter().enumerate() {
                v += chans.g[kk][i] * jam[t];
            }
            m[(i, t)] = v;
        }
    }
    let burst = RxBurst {
        samples: m,
        sample_rate_hz: fs,
        truth: None,
    };

    let s_ref = &s[t_start..t_start + t_ref];
    let design = cfo_grid_search(&burst, s_ref, t_start, &grid, l_order, EpsilonMode::Zero)?;

    let ref_energy: f64 = s_ref.iter().map(|v| v.norm_sqr()).sum();
    let residual_at_true = design.residuals[idx_true].1;
    let min_residual_elsewhere = design
        .residuals
        .iter()
        .enumerate()
        .filter(|(i, _)| *i != idx_true)
        .map(|(_, &(_, r))| r)
        .fold(f64::INFINITY, f64::min);

    let recovery = recovery_set_deviation(&design.w_star, &chans, tau)?;
    let out = apply_st_filter(
        &burst,
        &design.w_star,
        design.omega_star_hz,
        t_start..t_start + t_ref,
    )?;
    let output_max_err = out
        .iter()
        .zip(s_ref)
        .map(|(a, b)| (a - b).norm())
        .fold(0.0, f64::max);

    let identifiable = min_residual_elsewhere >= 1e-4 * ref_energy;
    let pass = residual_at_true <= 1e-10 * ref_energy && recovery.within(1e-6);

    Ok(RecoveryReport {
        n,
        k,
        l_order,
        t_ref,
        seed,
        true_cfo_hz: cfo,
        tau,
        omega_star_hz: design.omega_star_hz,
        residual_at_true,
        min_residual_elsewhere,
        ref_energy,
        recovery,
        output_max_err,
        identifiable,
        pass,
    })
}
