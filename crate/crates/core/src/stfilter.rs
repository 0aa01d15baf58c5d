//! CFO-compensated spatio-temporal filter design.
//!
//! The receiver estimates the transmitted signal at time `t` as
//!
//! ```text
//! s_hat(t) = sum_{l=0}^{L-1} e^{-j2*pi*(omega/fs)*(t+l)} * w_l^H * y(t+l)
//! ```
//!
//! and picks the filter bank `{w_l}` by regularized least squares against the
//! known preamble, jointly with a one-dimensional grid search over the CFO
//! candidate `omega`. Stacking the rotated snapshots as rows of a design
//! matrix `A_omega` turns the inner problem into
//! `min_w ||t - A_omega w||^2` where the target `t` is the conjugated
//! reference sequence (the row equation reads
//! `s*(t) = sum_l e^{+j2*pi*nu*(t+l)} y^H(t+l) w_l`).
//!
//! A streaming solver maintains `(eps*I + A^H A)^{-1}` through rank-one
//! updates so the same filter can be computed sample by sample.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rayon::prelude::*;
use std::f64::consts::PI;
use std::ops::Range;

use crate::channel::RxBurst;
use crate::error::{Error, Result};

/// Relative singular-value threshold for rank decisions and pseudo-inverse
/// truncation.
pub const RANK_RCOND: f64 = 1e-10;

#[inline]
fn cis(phase: f64) -> Complex64 {
    Complex64::from_polar(1.0, phase)
}

/// A bank of `l_order` taps, each an `n`-dimensional spatial combiner,
/// stored stacked as `[w_0; w_1; ...; w_{L-1}]`.
#[derive(Debug, Clone, PartialEq)]
pub struct FilterBank {
    coeffs: DVector<Complex64>,
    n: usize,
    l_order: usize,
}

impl FilterBank {
    pub fn zeros(n: usize, l_order: usize) -> Self {
        FilterBank {
            coeffs: DVector::zeros(n * l_order),
            n,
            l_order,
        }
    }

    /// Wraps a stacked coefficient vector; its length must equal `n * l_order`.
    pub fn from_stacked(coeffs: DVector<Complex64>, n: usize, l_order: usize) -> Result<Self> {
        if coeffs.len() != n * l_order {
            return Err(Error::invalid_argument(format!(
                "stacked filter length {} does not match n*L = {}",
                coeffs.len(),
                n * l_order
            )));
        }
        if coeffs
            .iter()
            .any(|c| !c.re.is_finite() || !c.im.is_finite())
        {
            return Err(Error::invalid_argument(
                "filter coefficients must be finite",
            ));
        }
        Ok(FilterBank { coeffs, n, l_order })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn l_order(&self) -> usize {
        self.l_order
    }

    pub fn stacked(&self) -> &DVector<Complex64> {
        &self.coeffs
    }

    /// The `l`-th tap's spatial coefficients.
    pub fn tap(&self, l: usize) -> nalgebra::DVectorView<'_, Complex64> {
        self.coeffs.rows(l * self.n, self.n)
    }
}

/// Uniform CFO candidate lattice: `m` points starting at `min_hz` with
/// spacing `(max_hz - min_hz) / m`. The default search range `[0, 1000)` Hz
/// with `m = 200` yields a 5 Hz raster.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CfoGrid {
    pub min_hz: f64,
    pub max_hz: f64,
    pub m: usize,
}

impl CfoGrid {
    pub fn validate(&self) -> Result<()> {
        if self.m == 0 {
            return Err(Error::invalid_argument("grid needs at least one point"));
        }
        if self.min_hz.is_nan() || self.max_hz.is_nan() || self.min_hz > self.max_hz {
            return Err(Error::invalid_argument(format!(
                "grid bounds out of order: [{}, {}]",
                self.min_hz, self.max_hz
            )));
        }
        Ok(())
    }

    pub fn step_hz(&self) -> f64 {
        (self.max_hz - self.min_hz) / self.m as f64
    }

    pub fn points(&self) -> Vec<f64> {
        let step = self.step_hz();
        (0..self.m).map(|i| self.min_hz + step * i as f64).collect()
    }
}

impl Default for CfoGrid {
    fn default() -> Self {
        CfoGrid {
            min_hz: 0.0,
            max_hz: 1000.0,
            m: 200,
        }
    }
}

/// How the least-squares regularizer is chosen.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum EpsilonMode {
    /// No regularization; the solver falls back to a rank-revealing
    /// pseudo-inverse.
    Zero,
    /// A fixed value.
    Absolute(f64),
    /// `factor` times the mean squared snapshot norm, i.e.
    /// `factor * trace(A^H A) / T`. Keeps the conditioning scale-free.
    RelativeTrace(f64),
}

impl Default for EpsilonMode {
    fn default() -> Self {
        EpsilonMode::RelativeTrace(1e-6)
    }
}

impl EpsilonMode {
    fn resolve(&self, mean_snapshot_sq: f64) -> Result<f64> {
        let eps = match *self {
            EpsilonMode::Zero => 0.0,
            EpsilonMode::Absolute(v) => v,
            EpsilonMode::RelativeTrace(f) => f * mean_snapshot_sq,
        };
        if !eps.is_finite() || eps < 0.0 {
            return Err(Error::invalid_argument(format!(
                "regularizer must be >= 0, got {eps}"
            )));
        }
        Ok(eps)
    }
}

/// Outcome of the joint CFO / filter design.
#[derive(Debug, Clone)]
pub struct DesignResult {
    /// Grid point with the smallest residual (ties go to the lowest
    /// frequency).
    pub omega_star_hz: f64,
    pub w_star: FilterBank,
    /// The full residual curve as `(omega_hz, residual)` pairs.
    pub residuals: Vec<(f64, f64)>,
    /// Resolved regularizer used for every grid point.
    pub epsilon: f64,
}

impl DesignResult {
    /// Residual attained at `omega_star_hz`.
    pub fn min_residual(&self) -> f64 {
        self.residuals
            .iter()
            .map(|&(_, r)| r)
            .fold(f64::INFINITY, f64::min)
    }
}

/// The CFO-rotated stacked snapshot: block `l` is
/// `e^{-j2*pi*(omega/fs)*(t+l)} * y(t+l)`, so that the design-matrix row
/// `snapshot^H` multiplies a stacked filter as
/// `sum_l e^{+j2*pi*nu*(t+l)} y^H(t+l) w_l`.
pub fn stack_snapshot(
    burst: &RxBurst,
    t: usize,
    l_order: usize,
    omega_hz: f64,
) -> Result<DVector<Complex64>> {
    if l_order == 0 {
        return Err(Error::invalid_argument("filter order must be >= 1"));
    }
    if t + l_order > burst.len() {
        return Err(Error::invalid_argument(format!(
            "snapshot at t = {t} with L = {l_order} exceeds burst length {}",
            burst.len()
        )));
    }
    let n = burst.n_antennas();
    let two_pi_nu = 2.0 * PI * omega_hz / burst.sample_rate_hz;
    let mut v = DVector::zeros(n * l_order);
    for l in 0..l_order {
        let rot = cis(-two_pi_nu * (t + l) as f64);
        let col = burst.samples.column(t + l);
        for i in 0..n {
            v[l * n + i] = rot * col[i];
        }
    }
    Ok(v)
}

/// The `t_ref x (N*L)` design matrix whose row `r` is the conjugate
/// transpose of [`stack_snapshot`] at `t = t_start + r`.
pub fn build_design_matrix(
    burst: &RxBurst,
    omega_hz: f64,
    t_start: usize,
    t_ref: usize,
    l_order: usize,
) -> Result<DMatrix<Complex64>> {
    if l_order == 0 || t_ref == 0 {
        return Err(Error::invalid_argument("need t_ref >= 1 and L >= 1"));
    }
    if t_start + t_ref + l_order - 1 > burst.len() {
        return Err(Error::invalid_argument(format!(
            "design window [{t_start}, {}) with L = {l_order} exceeds burst length {}",
            t_start + t_ref,
            burst.len()
        )));
    }
    let n = burst.n_antennas();
    let two_pi_nu = 2.0 * PI * omega_hz / burst.sample_rate_hz;
    let mut a = DMatrix::zeros(t_ref, n * l_order);
    for r in 0..t_ref {
        let t = t_start + r;
        for l in 0..l_order {
            let rot = cis(two_pi_nu * (t + l) as f64);
            let col = burst.samples.column(t + l);
            for i in 0..n {
                a[(r, l * n + i)] = rot * col[i].conj();
            }
        }
    }
    Ok(a)
}

/// Tikhonov-regularized solve through the SVD of `a`:
/// `w = V diag(s/(s^2+eps)) U^H t`. For `eps = 0` singular values below
/// `RANK_RCOND * s_max` are truncated, which yields the minimum-norm
/// least-squares solution.
fn svd_solve(
    a: &DMatrix<Complex64>,
    target: &DVector<Complex64>,
    epsilon: f64,
) -> DVector<Complex64> {
    let svd = a.clone().svd(true, true);
    let u = svd.u.expect("svd requested u");
    let v_t = svd.v_t.expect("svd requested v_t");
    let s = &svd.singular_values;
    let s_max = s.iter().fold(0.0f64, |acc, &x| acc.max(x));
    let mut c = u.ad_mul(target); // r x 1
    for i in 0..s.len() {
        let si = s[i];
        let gain = if epsilon > 0.0 {
            si / (si * si + epsilon)
        } else if si > RANK_RCOND * s_max && si > 0.0 {
            1.0 / si
        } else {
            0.0
        };
        c[i] *= Complex64::new(gain, 0.0);
    }
    v_t.ad_mul(&c).column(0).into_owned()
}

/// Solves `min_w eps*||w||^2 + ||target - a w||^2`.
///
/// For `eps > 0` this is the normal-equations solution
/// `(eps*I + A^H A)^{-1} A^H t` (Cholesky). For `eps = 0` a rank-revealing
/// SVD returns the minimum-norm least-squares solution. The result is the
/// stacked coefficient vector; wrap with [`FilterBank::from_stacked`] when
/// the spatial layout is known.
pub fn regularized_ls(
    a: &DMatrix<Complex64>,
    target: &DVector<Complex64>,
    epsilon: f64,
) -> Result<DVector<Complex64>> {
    if a.nrows() != target.len() {
        return Err(Error::invalid_argument(format!(
            "design matrix has {} rows but the reference holds {} samples",
            a.nrows(),
            target.len()
        )));
    }
    if !epsilon.is_finite() || epsilon < 0.0 {
        return Err(Error::invalid_argument(format!(
            "regularizer must be >= 0, got {epsilon}"
        )));
    }
    if epsilon > 0.0 {
        let mut g = a.ad_mul(a);
        for i in 0..g.nrows() {
            g[(i, i)] += Complex64::new(epsilon, 0.0);
        }
        let b = a.ad_mul(target);
        match nalgebra::Cholesky::new(g) {
            Some(chol) => Ok(chol.solve(&b).column(0).into_owned()),
            // eps > 0 keeps the system positive definite; this path only
            // triggers on pathological scaling.
            None => Ok(svd_solve(a, target, epsilon)),
        }
    } else {
        Ok(svd_solve(a, target, 0.0))
    }
}

/// Squared Euclidean residual `||target - a w||^2`.
pub fn residual(
    a: &DMatrix<Complex64>,
    target: &DVector<Complex64>,
    w: &DVector<Complex64>,
) -> Result<f64> {
    if a.nrows() != target.len() || a.ncols() != w.len() {
        return Err(Error::invalid_argument(format!(
            "dimension mismatch: a is {}x{}, target {}, w {}",
            a.nrows(),
            a.ncols(),
            target.len(),
            w.len()
        )));
    }
    Ok((target - a * w).norm_squared())
}

/// Joint CFO and filter design by grid search.
///
/// For each grid point the regularized least-squares problem is solved
/// against the conjugated reference and the residual recorded; the point
/// with the smallest residual wins (ties go to the lowest frequency).
/// `s_ref` is the known preamble waveform whose first sample sits at burst
/// index `t_start`.
///
/// Internally the Gram matrix is formed once at `omega = 0` and re-phased
/// per grid point (`A_w = P_t A_0 P_l` with diagonal unitary `P_t`, `P_l`,
/// hence `A_w^H A_w = P_l^H (A_0^H A_0) P_l`), which leaves the per-point
/// work at `O((NL)^2)` plus one factorization. Grid points evaluate
/// independently (and in parallel); the result is identical to a sequential
/// scan.
pub fn cfo_grid_search(
    burst: &RxBurst,
    s_ref: &[Complex64],
    t_start: usize,
    grid: &CfoGrid,
    l_order: usize,
    epsilon_mode: EpsilonMode,
) -> Result<DesignResult> {
    grid.validate()?;
    if s_ref.is_empty() {
        return Err(Error::invalid_argument("reference sequence is empty"));
    }
    let t_ref = s_ref.len();
    let n = burst.n_antennas();
    let nl = n * l_order;

    let a0 = build_design_matrix(burst, 0.0, t_start, t_ref, l_order)?;
    let a0_adj = a0.adjoint();
    let target = DVector::from_iterator(t_ref, s_ref.iter().map(|s| s.conj()));

    let g0 = a0.ad_mul(&a0);
    let mean_snapshot_sq = g0.diagonal().iter().map(|d| d.re).sum::<f64>() / t_ref as f64;
    let epsilon = epsilon_mode.resolve(mean_snapshot_sq)?;

    let points = grid.points();
    let fs = burst.sample_rate_hz;

    let eval = |omega_hz: f64| -> f64 {
        let two_pi_nu = 2.0 * PI * omega_hz / fs;
        let phi_l: Vec<Complex64> = (0..l_order).map(|l| cis(two_pi_nu * l as f64)).collect();

        // Gram matrix re-phased to this grid point:
        // G[p,q] = conj(phi_l[lp]) * G0[p,q] * phi_l[lq].
        let mut g = g0.clone();
        for q in 0..nl {
            let pq = phi_l[q / n];
            for p in 0..nl {
                g[(p, q)] *= phi_l[p / n].conj() * pq;
            }
        }

        // b = P_l^H A_0^H (P_t^H target)
        let u = DVector::from_fn(t_ref, |r, _| {
            cis(-two_pi_nu * (t_start + r) as f64) * target[r]
        });
        let mut b = &a0_adj * &u;
        for p in 0..nl {
            b[p] *= phi_l[p / n].conj();
        }

        let w = if epsilon > 0.0 {
            let mut g_reg = g;
            for i in 0..nl {
                g_reg[(i, i)] += Complex64::new(epsilon, 0.0);
            }
            match nalgebra::Cholesky::new(g_reg) {
                Some(chol) => chol.solve(&b).column(0).into_owned(),
                None => {
                    let a = rotate_design(&a0, t_start, two_pi_nu, n);
                    svd_solve(&a, &target, epsilon)
                }
            }
        } else {
            // Pseudo-inverse through the Hermitian eigendecomposition of G.
            let eig = nalgebra::SymmetricEigen::new(g);
            let lambda_max = eig.eigenvalues.iter().fold(0.0f64, |acc, &x| acc.max(x));
            let cut = (RANK_RCOND * RANK_RCOND) * lambda_max;
            let c = eig.eigenvectors.ad_mul(&b);
            let mut w = DVector::zeros(nl);
            for i in 0..nl {
                let lam = eig.eigenvalues[i];
                if lam > cut && lam > 0.0 {
                    w += eig.eigenvectors.column(i) * (c[i] / Complex64::new(lam, 0.0));
                }
            }
            w
        };

        // Residual evaluated directly: ||target - P_t A_0 P_l w||^2.
        let mut y1 = w;
        for p in 0..nl {
            y1[p] *= phi_l[p / n];
        }
        let y2 = &a0 * &y1;
        let mut r = 0.0;
        for t in 0..t_ref {
            let y3 = cis(two_pi_nu * (t_start + t) as f64) * y2[t];
            r += (target[t] - y3).norm_sqr();
        }
        r
    };

    let residuals: Vec<f64> = if points.len() >= 8 {
        points.par_iter().map(|&omega| eval(omega)).collect()
    } else {
        points.iter().map(|&omega| eval(omega)).collect()
    };

    // Lowest-index tie break: only a strictly smaller residual wins.
    let mut i_star = 0;
    for (i, &r) in residuals.iter().enumerate() {
        if r < residuals[i_star] {
            i_star = i;
        }
    }
    let omega_star = points[i_star];

    let a_star = build_design_matrix(burst, omega_star, t_start, t_ref, l_order)?;
    let w = regularized_ls(&a_star, &target, epsilon)?;
    let w_star = FilterBank::from_stacked(w, n, l_order)?;

    Ok(DesignResult {
        omega_star_hz: omega_star,
        w_star,
        residuals: points.into_iter().zip(residuals).collect(),
        epsilon,
    })
}

/// Materializes `P_t A_0 P_l` for one grid point.
fn rotate_design(
    a0: &DMatrix<Complex64>,
    t_start: usize,
    two_pi_nu: f64,
    n: usize,
) -> DMatrix<Complex64> {
    let mut a = a0.clone();
    for p in 0..a.ncols() {
        let lp = p / n;
        for r in 0..a.nrows() {
            a[(r, p)] *= cis(two_pi_nu * (t_start + r + lp) as f64);
        }
    }
    a
}

/// Streaming state for the rank-one update solver: the current
/// `(eps*I + sum_t v_t v_t^H)^{-1}` together with the accumulated
/// right-hand side `sum_t v_t * target_t`.
#[derive(Debug, Clone)]
pub struct StreamState {
    d_inv: DMatrix<Complex64>,
    b: DVector<Complex64>,
    t_seen: usize,
}

impl StreamState {
    /// Starts a stream with `d_inv = (1/eps) * I`; `eps` must be strictly
    /// positive (the streaming recursion has no pseudo-inverse fallback).
    pub fn init(nl: usize, epsilon: f64) -> Result<Self> {
        if nl == 0 {
            return Err(Error::invalid_argument("state dimension must be >= 1"));
        }
        if !epsilon.is_finite() || epsilon <= 0.0 {
            return Err(Error::invalid_argument(format!(
                "streaming regularizer must be > 0, got {epsilon}"
            )));
        }
        Ok(StreamState {
            d_inv: DMatrix::identity(nl, nl) / Complex64::new(epsilon, 0.0),
            b: DVector::zeros(nl),
            t_seen: 0,
        })
    }

    pub fn dim(&self) -> usize {
        self.b.len()
    }

    pub fn t_seen(&self) -> usize {
        self.t_seen
    }

    pub fn d_inv(&self) -> &DMatrix<Complex64> {
        &self.d_inv
    }

    /// Rank-one (Sherman-Morrison) update with one stacked snapshot and the
    /// matching least-squares target entry (the conjugated reference
    /// sample). Costs `O((NL)^2)`.
    pub fn update(&mut self, snapshot: &DVector<Complex64>, target_t: Complex64) -> Result<()> {
        let nl = self.dim();
        if snapshot.len() != nl {
            return Err(Error::invalid_argument(format!(
                "snapshot length {} does not match state dimension {nl}",
                snapshot.len()
            )));
        }
        let u = &self.d_inv * snapshot;
        // v^H D^{-1} v is real for Hermitian D^{-1}.
        let denom = 1.0 + snapshot.dotc(&u).re;
        let scale = denom.recip();
        for q in 0..nl {
            let uq = (u[q] * scale).conj();
            for p in 0..nl {
                self.d_inv[(p, q)] -= u[p] * uq;
            }
        }
        self.b += snapshot * target_t;
        self.t_seen += 1;
        Ok(())
    }

    /// The filter implied by the data seen so far: `d_inv * b`, equal to the
    /// batch [`regularized_ls`] solution on the same snapshots.
    pub fn finalize(&self) -> Result<DVector<Complex64>> {
        if self.t_seen == 0 {
            return Err(Error::invalid_state("stream has seen no samples"));
        }
        Ok(&self.d_inv * &self.b)
    }
}

/// Applies a designed filter over `span`:
/// `s_hat(t) = sum_l e^{-j2*pi*(omega/fs)*(t+l)} w_l^H y(t+l)`.
pub fn apply_st_filter(
    burst: &RxBurst,
    w: &FilterBank,
    omega_hz: f64,
    span: Range<usize>,
) -> Result<Vec<Complex64>> {
    if w.n() != burst.n_antennas() {
        return Err(Error::invalid_argument(format!(
            "filter has {} spatial taps but the burst has {} antennas",
            w.n(),
            burst.n_antennas()
        )));
    }
    if span.is_empty() {
        return Ok(Vec::new());
    }
    if span.end + w.l_order() - 1 > burst.len() {
        return Err(Error::invalid_argument(format!(
            "output span [{}, {}) with L = {} exceeds burst length {}",
            span.start,
            span.end,
            w.l_order(),
            burst.len()
        )));
    }
    let n = w.n();
    let two_pi_nu = 2.0 * PI * omega_hz / burst.sample_rate_hz;
    let mut out = Vec::with_capacity(span.len());
    for t in span {
        let mut acc = Complex64::new(0.0, 0.0);
        for l in 0..w.l_order() {
            let col = burst.samples.column(t + l);
            let mut dot = Complex64::new(0.0, 0.0);
            for i in 0..n {
                dot += w.stacked()[l * n + i].conj() * col[i];
            }
            acc += cis(-two_pi_nu * (t + l) as f64) * dot;
        }
        out.push(acc);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channel::{ChannelSet, RxBurst};
    use crate::rng::{complex_gaussian, complex_gaussian_vec, rng_from_seed};
    use approx::assert_relative_eq;

    /// Noiseless synthetic burst
    /// `y(t) = e^{j2 pi nu t} h s(t - tau) + sum_k g_k i_k(t)`
    /// over a timeline of random unit-power signals.
    struct Synth {
        burst: RxBurst,
        s: Vec<Complex64>,
        chans: ChannelSet,
    }

    fn synth_burst(
        n: usize,
        k: usize,
        total: usize,
        cfo_hz: f64,
        fs: f64,
        tau: usize,
        seed: u64,
    ) -> Synth {
        let mut rng = rng_from_seed(seed);
        let chans = ChannelSet {
            h: DVector::from_fn(n, |_, _| complex_gaussian(&mut rng)),
            g: (0..k)
                .map(|_| DVector::from_fn(n, |_, _| complex_gaussian(&mut rng)))
                .collect(),
        };
        let s = complex_gaussian_vec(&mut rng, total);
        let jams: Vec<Vec<Complex64>> = (0..k)
            .map(|_| complex_gaussian_vec(&mut rng, total))
            .collect();
        let two_pi_nu = 2.0 * PI * cfo_hz / fs;
        let mut m = DMatrix::zeros(n, total);
        for t in 0..total {
            let sig = if t >= tau {
                s[t - tau]
            } else {
                Complex64::new(0.0, 0.0)
            };
            let rot = cis(two_pi_nu * t as f64) * sig;
            for i in 0..n {
                let mut v = chans.h[i] * rot;
                for (kk, jam) in jams.iter().enumerate() {
                    v += chans.g[kk][i] * jam[t];
                }
                m[(i, t)] = v;
            }
        }
        Synth {
            burst: RxBurst {
                samples: m,
                sample_rate_hz: fs,
                truth: None,
            },
            s,
            chans,
        }
    }

    fn single_antenna_burst(y: &[Complex64], fs: f64) -> RxBurst {
        RxBurst {
            samples: DMatrix::from_iterator(1, y.len(), y.iter().copied()),
            sample_rate_hz: fs,
            truth: None,
        }
    }

    #[test]
    fn grid_points_form_a_uniform_lattice() {
        let grid = CfoGrid::default();
        let pts = grid.points();
        assert_eq!(pts.len(), 200);
        assert_eq!(pts[0], 0.0);
        assert_eq!(pts[1], 5.0);
        assert_eq!(pts[152], 760.0); // exactly on the 5 Hz raster
        assert_eq!(pts[199], 995.0);
    }

    #[test]
    fn snapshot_with_zero_cfo_is_plain_stacking() {
        let y: Vec<Complex64> = (0..6)
            .map(|i| Complex64::new(i as f64, -(i as f64)))
            .collect();
        let burst = single_antenna_burst(&y, 4e6);
        let v = stack_snapshot(&burst, 1, 3, 0.0).unwrap();
        for l in 0..3 {
            assert_eq!(v[l], y[1 + l]);
        }
    }

    #[test]
    fn snapshot_rotation_carries_negative_phase() {
        // N = 1, L = 2, y = [1, 1], omega = fs/4: the stacked snapshot is
        // [1, -j] so that the design-matrix row (its conjugate transpose)
        // carries e^{+j pi/2} = +j on the second block, matching the row
        // identity s*(t) = sum_l e^{+j2 pi nu (t+l)} y^H(t+l) w_l.
        let y = vec![Complex64::new(1.0, 0.0), Complex64::new(1.0, 0.0)];
        let burst = single_antenna_burst(&y, 4.0);
        let v = stack_snapshot(&burst, 0, 2, 1.0).unwrap();
        assert!((v[0] - Complex64::new(1.0, 0.0)).norm() < 1e-15);
        assert!((v[1] - Complex64::new(0.0, -1.0)).norm() < 1e-15);
    }

    #[test]
    fn snapshot_inner_product_matches_filter_output_form() {
        // Direct-sum oracle: snapshot^H w equals the conjugate of the filter
        // output sum_l e^{-j2 pi nu (t+l)} w_l^H y(t+l).
        let n = 3;
        let l_order = 4;
        let synth = synth_burst(n, 2, 30, 700.0, 1e4, 1, 5);
        let t = 7usize;
        let omega = 430.0;
        let mut rng = rng_from_seed(9);
        let w = DVector::from_fn(n * l_order, |_, _| complex_gaussian(&mut rng));
        let snap = stack_snapshot(&synth.burst, t, l_order, omega).unwrap();
        let lhs = snap.dotc(&w); // snapshot^H w

        let two_pi_nu = 2.0 * PI * omega / 1e4;
        let mut out = Complex64::new(0.0, 0.0);
        for l in 0..l_order {
            let col = synth.burst.samples.column(t + l);
            let mut dot = Complex64::new(0.0, 0.0);
            for i in 0..n {
                dot += w[l * n + i].conj() * col[i];
            }
            out += cis(-two_pi_nu * (t + l) as f64) * dot;
        }
        assert!((lhs - out.conj()).norm() < 1e-12 * out.norm().max(1.0));
    }

    #[test]
    fn snapshot_bounds_are_checked() {
        let y = vec![Complex64::new(1.0, 0.0); 4];
        let burst = single_antenna_burst(&y, 4.0);
        assert!(stack_snapshot(&burst, 3, 2, 0.0).is_err());
        assert!(stack_snapshot(&burst, 2, 2, 0.0).is_ok());
    }

    #[test]
    fn design_matrix_rows_are_conjugated_snapshots() {
        let synth = synth_burst(2, 1, 25, 500.0, 1e4, 2, 3);
        let a = build_design_matrix(&synth.burst, 500.0, 3, 10, 4).unwrap();
        assert_eq!(a.nrows(), 10);
        assert_eq!(a.ncols(), 8);
        for r in 0..10 {
            let snap = stack_snapshot(&synth.burst, 3 + r, 4, 500.0).unwrap();
            for p in 0..8 {
                assert!((a[(r, p)] - snap[p].conj()).norm() < 1e-14);
            }
        }
    }

    #[test]
    fn design_matrix_degenerate_dims_is_conjugated_sequence() {
        let y: Vec<Complex64> = (0..5).map(|i| Complex64::new(i as f64, 1.0)).collect();
        let burst = single_antenna_burst(&y, 4.0);
        let a = build_design_matrix(&burst, 0.0, 0, 5, 1).unwrap();
        assert_eq!((a.nrows(), a.ncols()), (5, 1));
        for t in 0..5 {
            assert_eq!(a[(t, 0)], y[t].conj());
        }
    }

    #[test]
    fn design_matrix_has_protocol_shape() {
        // T_ref = 160 reference samples, N = 4 antennas, L = 12 taps.
        let synth = synth_burst(4, 3, 200, 760.0, 4e6, 5, 7);
        let a = build_design_matrix(&synth.burst, 760.0, 12, 160, 12).unwrap();
        assert_eq!((a.nrows(), a.ncols()), (160, 48));
    }

    #[test]
    fn regularized_ls_solves_identity_system() {
        let a = DMatrix::identity(2, 2);
        let t = DVector::from_vec(vec![Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0)]);
        let w = regularized_ls(&a, &t, 0.0).unwrap();
        assert!((w[0] - Complex64::new(1.0, 0.0)).norm() < 1e-12);
        assert!(w[1].norm() < 1e-12);
    }

    #[test]
    fn regularized_ls_returns_minimum_norm_solution() {
        let one = Complex64::new(1.0, 0.0);
        let a = DMatrix::from_row_slice(2, 2, &[one, one, one, one]);
        let t = DVector::from_vec(vec![one * 2.0, one * 2.0]);
        let w = regularized_ls(&a, &t, 0.0).unwrap();
        assert!((w[0] - one).norm() < 1e-10, "w = {w:?}");
        assert!((w[1] - one).norm() < 1e-10, "w = {w:?}");
    }

    #[test]
    fn regularized_ls_matches_svd_oracle() {
        // Independent oracle: Tikhonov solution through the SVD of A; the
        // implementation path under test is the Cholesky normal-equations
        // solve.
        let mut rng = rng_from_seed(17);
        let a = DMatrix::from_fn(20, 8, |_, _| complex_gaussian(&mut rng));
        let t = DVector::from_fn(20, |_, _| complex_gaussian(&mut rng));
        let eps = 1e-6;
        let w = regularized_ls(&a, &t, eps).unwrap();

        let svd = a.clone().svd(true, true);
        let u = svd.u.unwrap();
        let v_t = svd.v_t.unwrap();
        let mut c = u.ad_mul(&t);
        for i in 0..svd.singular_values.len() {
            let s = svd.singular_values[i];
            c[i] *= Complex64::new(s / (s * s + eps), 0.0);
        }
        let w_oracle = v_t.ad_mul(&c).column(0).into_owned();
        let rel = (&w - &w_oracle).norm() / w_oracle.norm();
        assert!(rel < 1e-8, "relative error {rel}");
    }

    #[test]
    fn regularized_ls_checks_dimensions_and_epsilon() {
        let a = DMatrix::<Complex64>::identity(3, 3);
        let t = DVector::<Complex64>::zeros(2);
        assert!(regularized_ls(&a, &t, 0.0).is_err());
        let t3 = DVector::<Complex64>::zeros(3);
        assert!(regularized_ls(&a, &t3, -1.0).is_err());
    }

    #[test]
    fn residual_of_exact_solution_vanishes() {
        let mut rng = rng_from_seed(23);
        let a = DMatrix::from_fn(6, 6, |_, _| complex_gaussian(&mut rng));
        let w_true = DVector::from_fn(6, |_, _| complex_gaussian(&mut rng));
        let t = &a * &w_true;
        let r = residual(&a, &t, &w_true).unwrap();
        assert!(r <= 1e-20 * t.norm_squared().max(1.0), "residual {r}");
    }

    #[test]
    fn residual_of_zero_filter_is_target_energy() {
        let mut rng = rng_from_seed(29);
        let a = DMatrix::from_fn(5, 3, |_, _| complex_gaussian(&mut rng));
        let t = DVector::from_fn(5, |_, _| complex_gaussian(&mut rng));
        let w = DVector::zeros(3);
        assert_relative_eq!(
            residual(&a, &t, &w).unwrap(),
            t.norm_squared(),
            epsilon = 1e-12
        );
    }

    #[test]
    fn residual_matches_elementwise_recomputation() {
        let mut rng = rng_from_seed(31);
        let a = DMatrix::from_fn(7, 4, |_, _| complex_gaussian(&mut rng));
        let t = DVector::from_fn(7, |_, _| complex_gaussian(&mut rng));
        let w = DVector::from_fn(4, |_, _| complex_gaussian(&mut rng));
        let mut expect = 0.0;
        for r in 0..7 {
            let mut acc = Complex64::new(0.0, 0.0);
            for c in 0..4 {
                acc += a[(r, c)] * w[c];
            }
            expect += (t[r] - acc).norm_sqr();
        }
        assert_relative_eq!(residual(&a, &t, &w).unwrap(), expect, max_relative = 1e-12);
    }

    /// Shared exact-recovery fixture: noiseless burst, on-grid CFO,
    /// T_ref > (K+1) L.
    fn exact_recovery_design(seed: u64) -> (Synth, DesignResult, usize, f64, usize) {
        let (n, k, l_order) = (3usize, 1usize, 4usize);
        let fs = 1e4;
        let grid = CfoGrid {
            min_hz: 0.0,
            max_hz: 1000.0,
            m: 20,
        }; // 50 Hz raster
        let cfo = 600.0;
        let tau = 2usize;
        let t_start = l_order;
        let t_ref = 24; // > (K+1)L = 8
        let total = t_start + t_ref + l_order;
        let synth = synth_burst(n, k, total, cfo, fs, tau, seed);
        let s_ref: Vec<Complex64> = synth.s[t_start..t_start + t_ref].to_vec();
        let design = cfo_grid_search(
            &synth.burst,
            &s_ref,
            t_start,
            &grid,
            l_order,
            EpsilonMode::Zero,
        )
        .unwrap();
        (synth, design, t_start, cfo, t_ref)
    }

    #[test]
    fn grid_search_recovers_on_grid_cfo_exactly() {
        let (synth, design, t_start, cfo, t_ref) = exact_recovery_design(41);
        assert_eq!(design.omega_star_hz, cfo);
        let energy: f64 = synth.s[t_start..t_start + t_ref]
            .iter()
            .map(|s| s.norm_sqr())
            .sum();
        let at_true = design
            .residuals
            .iter()
            .find(|(o, _)| *o == cfo)
            .map(|&(_, r)| r)
            .unwrap();
        assert!(at_true < 1e-10 * energy, "residual at true CFO: {at_true}");
        // Every other grid point keeps a strictly positive residual.
        for &(o, r) in &design.residuals {
            if o != cfo {
                assert!(
                    r > 1e-6 * energy,
                    "residual at {o} Hz suspiciously small: {r}"
                );
            }
        }
    }

    #[test]
    fn grid_search_finds_760_on_the_default_lattice() {
        // Noiseless burst at the protocol sample rate; 760 Hz lies exactly on
        // the 5 Hz raster of the default grid.
        let (n, k, l_order) = (4usize, 3usize, 12usize);
        let fs = 4e6;
        let tau = 4usize;
        let t_start = l_order;
        let t_ref = 160;
        let total = t_start + t_ref + l_order;
        let synth = synth_burst(n, k, total, 760.0, fs, tau, 43);
        let s_ref: Vec<Complex64> = synth.s[t_start..t_start + t_ref].to_vec();
        let design = cfo_grid_search(
            &synth.burst,
            &s_ref,
            t_start,
            &CfoGrid::default(),
            l_order,
            EpsilonMode::Zero,
        )
        .unwrap();
        assert_eq!(design.omega_star_hz, 760.0);
    }

    #[test]
    fn grid_search_residual_curve_matches_direct_solves() {
        // Guards the re-phased-Gram fast path against the literal per-point
        // construction, for both the regularized and pseudo-inverse branches.
        let synth = synth_burst(2, 1, 40, 300.0, 1e4, 1, 47);
        let t_start = 3usize;
        let t_ref = 20;
        let l_order = 3;
        let s_ref: Vec<Complex64> = synth.s[t_start..t_start + t_ref].to_vec();
        let target = DVector::from_iterator(t_ref, s_ref.iter().map(|s| s.conj()));
        let grid = CfoGrid {
            min_hz: 0.0,
            max_hz: 1000.0,
            m: 11,
        };

        for mode in [EpsilonMode::Zero, EpsilonMode::Absolute(1e-3)] {
            let design =
                cfo_grid_search(&synth.burst, &s_ref, t_start, &grid, l_order, mode).unwrap();
            for &(omega, r_fast) in &design.residuals {
                let a = build_design_matrix(&synth.burst, omega, t_start, t_ref, l_order).unwrap();
                let w = regularized_ls(&a, &target, design.epsilon).unwrap();
                let r_direct = residual(&a, &target, &w).unwrap();
                let scale = target.norm_squared();
                assert!(
                    (r_fast - r_direct).abs() < 1e-9 * scale,
                    "omega {omega}: fast {r_fast} vs direct {r_direct}"
                );
            }
        }
    }

    #[test]
    fn grid_search_on_jammers_only_keeps_large_residual() {
        // Without any legitimate signal the independent reference cannot be
        // explained by the jammer subspace.
        let (n, k, l_order) = (4usize, 3usize, 12usize);
        let fs = 4e6;
        let t_start = l_order;
        let t_ref = 160;
        let total = t_start + t_ref + l_order;
        let mut rng = rng_from_seed(54);
        let chans = ChannelSet {
            h: DVector::zeros(n),
            g: (0..k)
                .map(|_| DVector::from_fn(n, |_, _| complex_gaussian(&mut rng)))
                .collect(),
        };
        let jams: Vec<Vec<Complex64>> = (0..k)
            .map(|_| complex_gaussian_vec(&mut rng, total))
            .collect();
        let mut m = DMatrix::zeros(n, total);
        for t in 0..total {
            for i in 0..n {
                let mut v = Complex64::new(0.0, 0.0);
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
        let s_ref = complex_gaussian_vec(&mut rng, t_ref);
        let energy: f64 = s_ref.iter().map(|s| s.norm_sqr()).sum();
        let design = cfo_grid_search(
            &burst,
            &s_ref,
            t_start,
            &CfoGrid {
                min_hz: 0.0,
                max_hz: 1000.0,
                m: 50,
            },
            l_order,
            EpsilonMode::Zero,
        )
        .unwrap();
        assert!(design.min_residual() > 0.5 * energy);
    }

    #[test]
    fn grid_search_minimum_is_attained_at_omega_star() {
        // Noisy burst: the returned point must sit at the minimum of the
        // tabulated curve, and the curve holds one entry per grid point.
        let mut synth = synth_burst(3, 1, 60, 420.0, 1e4, 2, 49);
        let mut rng = rng_from_seed(50);
        for v in synth.burst.samples.iter_mut() {
            *v += complex_gaussian(&mut rng) * 0.3;
        }
        let s_ref: Vec<Complex64> = synth.s[4..44].to_vec();
        let grid = CfoGrid {
            min_hz: 0.0,
            max_hz: 1000.0,
            m: 40,
        };
        let design =
            cfo_grid_search(&synth.burst, &s_ref, 4, &grid, 4, EpsilonMode::default()).unwrap();
        assert_eq!(design.residuals.len(), 40);
        let at_star = design
            .residuals
            .iter()
            .find(|(o, _)| *o == design.omega_star_hz)
            .map(|&(_, r)| r)
            .unwrap();
        assert_eq!(at_star, design.min_residual());
        for &(_, r) in &design.residuals {
            assert!(at_star <= r);
        }
    }

    #[test]
    fn grid_search_ties_break_to_the_lowest_frequency() {
        // A burst of pure zeros gives the same residual everywhere.
        let burst = single_antenna_burst(&[Complex64::new(0.0, 0.0); 30], 1e4);
        let s_ref = vec![Complex64::new(1.0, 0.0); 10];
        let design = cfo_grid_search(
            &burst,
            &s_ref,
            0,
            &CfoGrid {
                min_hz: 100.0,
                max_hz: 200.0,
                m: 5,
            },
            2,
            EpsilonMode::Absolute(1.0),
        )
        .unwrap();
        assert_eq!(design.omega_star_hz, 100.0);
    }

    #[test]
    fn stream_init_closed_forms() {
        let st = StreamState::init(4, 0.5).unwrap();
        assert_eq!(st.t_seen(), 0);
        for p in 0..4 {
            for q in 0..4 {
                let want = if p == q { 2.0 } else { 0.0 };
                assert_relative_eq!(st.d_inv()[(p, q)].re, want, epsilon = 1e-15);
                assert_relative_eq!(st.d_inv()[(p, q)].im, 0.0, epsilon = 1e-15);
            }
        }
        assert!(StreamState::init(0, 1e-6).is_err());
        assert!(StreamState::init(4, 0.0).is_err());
    }

    #[test]
    fn stream_update_single_basis_vector() {
        let mut st = StreamState::init(3, 1.0).unwrap();
        let mut e1 = DVector::zeros(3);
        e1[0] = Complex64::new(1.0, 0.0);
        st.update(&e1, Complex64::new(0.0, 0.0)).unwrap();
        // (I + e1 e1^H)^{-1} = diag(1/2, 1, 1)
        for p in 0..3 {
            let want = if p == 0 { 0.5 } else { 1.0 };
            assert_relative_eq!(st.d_inv()[(p, p)].re, want, epsilon = 1e-12);
        }
    }

    #[test]
    fn stream_scalar_case_closed_form() {
        let mut st = StreamState::init(1, 1.0).unwrap();
        st.update(
            &DVector::from_vec(vec![Complex64::new(1.0, 0.0)]),
            Complex64::new(1.0, 0.0),
        )
        .unwrap();
        let w = st.finalize().unwrap();
        assert_relative_eq!(w[0].re, 0.5, epsilon = 1e-12);
    }

    #[test]
    fn stream_tracks_the_direct_inverse() {
        let nl = 6;
        let eps = 0.37;
        let mut st = StreamState::init(nl, eps).unwrap();
        let mut rng = rng_from_seed(61);
        let mut d = DMatrix::<Complex64>::identity(nl, nl) * Complex64::new(eps, 0.0);
        for _ in 0..40 {
            let v = DVector::from_fn(nl, |_, _| complex_gaussian(&mut rng));
            for p in 0..nl {
                for q in 0..nl {
                    d[(p, q)] += v[p] * v[q].conj();
                }
            }
            st.update(&v, complex_gaussian(&mut rng)).unwrap();
        }
        let prod = st.d_inv() * &d;
        for p in 0..nl {
            for q in 0..nl {
                let want = if p == q { 1.0 } else { 0.0 };
                assert!(
                    (prod[(p, q)] - Complex64::new(want, 0.0)).norm() < 1e-8,
                    "d_inv*d deviates at ({p},{q}): {}",
                    prod[(p, q)]
                );
            }
        }
        // Hermitian drift stays small.
        for p in 0..nl {
            for q in 0..nl {
                assert!((st.d_inv()[(p, q)] - st.d_inv()[(q, p)].conj()).norm() < 1e-10);
            }
        }
    }

    #[test]
    fn stream_matches_batch_solution() {
        for (n, l_order, t_ref, seed) in [
            (2usize, 4usize, 50usize, 71u64),
            (4, 12, 200, 72),
            (2, 12, 50, 73),
            (4, 4, 200, 74),
        ] {
            let synth = synth_burst(n, 1, t_ref + l_order + 4, 420.0, 1e4, 1, seed);
            let t_start = 2usize;
            let omega = 300.0;
            let s_ref: Vec<Complex64> = synth.s[t_start..t_start + t_ref].to_vec();
            let target = DVector::from_iterator(t_ref, s_ref.iter().map(|s| s.conj()));
            let a = build_design_matrix(&synth.burst, omega, t_start, t_ref, l_order).unwrap();
            let eps = 1e-4;
            let w_batch = regularized_ls(&a, &target, eps).unwrap();

            let mut st = StreamState::init(n * l_order, eps).unwrap();
            for r in 0..t_ref {
                let snap = stack_snapshot(&synth.burst, t_start + r, l_order, omega).unwrap();
                st.update(&snap, target[r]).unwrap();
            }
            let w_stream = st.finalize().unwrap();
            let rel = (&w_stream - &w_batch).norm() / w_batch.norm();
            assert!(
                rel < 1e-8,
                "(n={n}, L={l_order}, T={t_ref}): relative gap {rel}"
            );
        }
    }

    #[test]
    fn stream_finalize_requires_data_and_checked_dims() {
        let st = StreamState::init(3, 1.0).unwrap();
        assert!(st.finalize().is_err());
        let mut st = StreamState::init(3, 1.0).unwrap();
        assert!(st
            .update(&DVector::zeros(2), Complex64::new(0.0, 0.0))
            .is_err());
    }

    /// Analytic member of the recovery set: per tap solve
    /// `[h g_1 .. g_K]^H w_l = c_l` with `c_tau = e_1` and zero otherwise.
    fn construct_recovery_filter(chans: &ChannelSet, l_order: usize, tau: usize) -> FilterBank {
        let n = chans.n();
        let k = chans.k();
        let mut m = DMatrix::zeros(k + 1, n);
        for i in 0..n {
            m[(0, i)] = chans.h[i].conj();
            for kk in 0..k {
                m[(kk + 1, i)] = chans.g[kk][i].conj();
            }
        }
        let mut coeffs = DVector::zeros(n * l_order);
        for l in 0..l_order {
            let mut c = DVector::zeros(k + 1);
            if l == tau {
                c[0] = Complex64::new(1.0, 0.0);
            }
            let w_l = svd_solve(&m, &c, 0.0);
            for i in 0..n {
                coeffs[l * n + i] = w_l[i];
            }
        }
        FilterBank::from_stacked(coeffs, n, l_order).unwrap()
    }

    #[test]
    fn recovery_filter_reproduces_the_signal() {
        // A filter satisfying the exact-cancellation constraints applied at
        // the true CFO returns the transmitted sequence.
        let (n, k, l_order) = (3usize, 1usize, 4usize);
        let fs = 1e4;
        let cfo = 600.0;
        let tau = 2usize;
        let t_start = l_order;
        let t_ref = 24;
        let total = t_start + t_ref + l_order;
        let synth = synth_burst(n, k, total, cfo, fs, tau, 83);
        let w = construct_recovery_filter(&synth.chans, l_order, tau);
        let out = apply_st_filter(&synth.burst, &w, cfo, t_start..t_start + t_ref).unwrap();
        for (r, v) in out.iter().enumerate() {
            let want = synth.s[t_start + r];
            assert!((v - want).norm() < 1e-10, "sample {r}: {v} vs {want}");
        }
    }

    #[test]
    fn designed_filter_output_matches_reference() {
        let (synth, design, t_start, _, t_ref) = exact_recovery_design(89);
        let out = apply_st_filter(
            &synth.burst,
            &design.w_star,
            design.omega_star_hz,
            t_start..t_start + t_ref,
        )
        .unwrap();
        for (r, v) in out.iter().enumerate() {
            let want = synth.s[t_start + r];
            assert!((v - want).norm() < 1e-8, "sample {r}: {v} vs {want}");
        }
    }

    #[test]
    fn zero_filter_gives_zero_output() {
        let synth = synth_burst(2, 0, 20, 100.0, 1e4, 0, 91);
        let w = FilterBank::zeros(2, 3);
        let out = apply_st_filter(&synth.burst, &w, 100.0, 0..10).unwrap();
        assert!(out.iter().all(|v| v.norm() == 0.0));
    }

    #[test]
    fn unit_single_tap_filter_passes_the_signal_through() {
        let y: Vec<Complex64> = (0..8)
            .map(|i| Complex64::new(i as f64, 0.5 * i as f64))
            .collect();
        let burst = single_antenna_burst(&y, 4.0);
        let w = FilterBank::from_stacked(DVector::from_vec(vec![Complex64::new(1.0, 0.0)]), 1, 1)
            .unwrap();
        let out = apply_st_filter(&burst, &w, 0.0, 0..8).unwrap();
        for (v, want) in out.iter().zip(&y) {
            assert!((v - want).norm() < 1e-15);
        }
    }

    #[test]
    fn apply_st_filter_checks_span() {
        let synth = synth_burst(2, 0, 20, 0.0, 1e4, 0, 93);
        let w = FilterBank::zeros(2, 4);
        assert!(apply_st_filter(&synth.burst, &w, 0.0, 0..18).is_err());
        assert!(apply_st_filter(&synth.burst, &w, 0.0, 0..17).is_ok());
    }

    #[test]
    fn grid_search_cost_scales_linearly() {
        // Wall-time proxy for the O(m T N^2 L^2) claim: a 4x sweep in m and
        // in T each stays within 2x of linear growth. Generous bounds keep
        // the check robust to scheduling noise.
        let (n, l_order) = (2usize, 4usize);
        let fs = 1e4;
        let total = 4 + 220 + l_order;
        let synth = synth_burst(n, 1, total, 300.0, fs, 1, 95);

        let time_search = |t_ref: usize, m: usize| -> f64 {
            let s_ref: Vec<Complex64> = synth.s[4..4 + t_ref].to_vec();
            let grid = CfoGrid {
                min_hz: 0.0,
                max_hz: 1000.0,
                m,
            };
            let mut best = f64::INFINITY;
            for _ in 0..3 {
                let t0 = std::time::Instant::now();
                let _ = cfo_grid_search(
                    &synth.burst,
                    &s_ref,
                    4,
                    &grid,
                    l_order,
                    EpsilonMode::Absolute(1e-4),
                )
                .unwrap();
                best = best.min(t0.elapsed().as_secs_f64());
            }
            best
        };

        // Warm up allocators and thread pools.
        let _ = time_search(50, 50);
        let t_m = time_search(50, 50);
        let t_4m = time_search(50, 200);
        assert!(t_4m / t_m < 8.5, "m sweep ratio {}", t_4m / t_m);

        let t_t = time_search(50, 100);
        let t_4t = time_search(200, 100);
        assert!(t_4t / t_t < 8.5, "T sweep ratio {}", t_4t / t_t);
    }
}
