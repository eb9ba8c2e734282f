//! Small-scale structure of the limit process.
//!
//! For symmetric spectra whose truncated second moment varies regularly with
//! index `θ ∈ (0, 2)`, the rescaled chordal process
//! `(M(εt) − M(0)) / sqrt(ε^{2−θ} ℓ(1/ε))` approaches a fractional Brownian
//! motion with Hurst index `1 − θ/2`. This module evaluates the finite-`ε`
//! covariance exactly, compares it with the limit, and estimates Hurst indices
//! from simulated paths.

use std::f64::consts::{PI, TAU};

use nalgebra::DMatrix;
use rand_distr::{Distribution, StandardNormal};
use statrs::function::gamma::gamma;

use crate::regression::fit_log_log;
use crate::rng::{self, Domain};
use crate::sampler::{PathSample, PhaseAssignment, Provenance};
use crate::spectra::{decompose, FourierModel, SpectralMeasure, DEFAULT_PAIR_TOLERANCE};
use crate::sum::{mean_var, sum_f64};
use crate::{Error, Result};

fn check_theta(theta: f64) -> Result<()> {
    if theta > 0.0 && theta < 2.0 {
        Ok(())
    } else {
        Err(Error::invalid(format!("theta must lie in (0, 2), got {theta}")))
    }
}

/// Slowly varying normalization `ℓ`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum SlowlyVarying {
    Constant(f64),
    /// `c · (log x)^p`.
    LogPower { c: f64, p: f64 },
}

impl SlowlyVarying {
    pub fn eval(&self, x: f64) -> f64 {
        match *self {
            SlowlyVarying::Constant(c) => c,
            SlowlyVarying::LogPower { c, p } => c * x.ln().powf(p),
        }
    }
}

impl Default for SlowlyVarying {
    fn default() -> Self {
        SlowlyVarying::Constant(1.0)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct TangentConfig {
    pub theta: f64,
    pub slowly_varying: SlowlyVarying,
    pub epsilon_schedule: Vec<f64>,
    pub t_grid: Vec<f64>,
}

impl TangentConfig {
    pub fn validate(&self) -> Result<()> {
        check_theta(self.theta)?;
        if self.epsilon_schedule.is_empty()
            || self.epsilon_schedule.iter().any(|&e| !(e > 0.0))
            || self.epsilon_schedule.windows(2).any(|w| !(w[1] < w[0]))
        {
            return Err(Error::invalid("epsilon schedule must be positive and strictly decreasing"));
        }
        if self.t_grid.iter().any(|t| !t.is_finite()) {
            return Err(Error::invalid("non-finite t grid"));
        }
        Ok(())
    }
}

/// Parameters of the power-law spectrum: frequencies `≈ k^a`, weights
/// `|f_k|² = A·k^{−(b+1)}/Z` with `Z = Σ_{k≤n} k^{−(b+1)}`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ExampleSpectrumSpec {
    pub a: f64,
    pub b: f64,
    pub amplitude: f64,
    pub n_terms: usize,
    pub seed: u64,
}

impl ExampleSpectrumSpec {
    pub fn validate(&self) -> Result<()> {
        if !(self.a > 0.0) || !(self.b > 0.0 && self.b < 2.0 * self.a) {
            return Err(Error::invalid(format!("need a > 0 and 0 < b < 2a, got a={} b={}", self.a, self.b)));
        }
        if !(self.amplitude > 0.0) || self.n_terms == 0 {
            return Err(Error::invalid("need A > 0 and at least one term"));
        }
        Ok(())
    }

    /// `θ = 2 − b/a`.
    pub fn theta(&self) -> f64 {
        2.0 - self.b / self.a
    }

    fn normalizer(&self) -> f64 {
        sum_f64((1..=self.n_terms).map(|k| (k as f64).powf(-(self.b + 1.0))))
    }

    /// The constant `ℓ` with `E[ξ² 1{|ξ|≤x}] ≈ x^θ ℓ` for this spectrum:
    /// `1/(Z·(2a − b))`.
    pub fn slowly_varying_constant(&self) -> f64 {
        1.0 / (self.normalizer() * (2.0 * self.a - self.b))
    }
}

/// Symmetric model with `n_terms` conjugate pairs.
///
/// Frequencies are `k^a·(1 + δ_k)` with seeded `δ_k ∈ (0, 10⁻³)` to break
/// exact rational relations; arguments of the coefficients are seeded too.
/// The weights sum to `A` over positive frequencies, so `‖f‖² = 2A`.
pub fn generate_example_spectrum(spec: &ExampleSpectrumSpec) -> Result<FourierModel> {
    spec.validate()?;
    let z = spec.normalizer();
    let mut r = rng::stream(spec.seed, Domain::SpectrumShape, 0);
    let mut terms = Vec::with_capacity(2 * spec.n_terms);
    for k in 1..=spec.n_terms {
        let kf = k as f64;
        let delta = 1e-3 * (rng::unit_f64(&mut r) * 0.998 + 0.001);
        let (s, c) = (TAU * rng::unit_f64(&mut r)).sin_cos();
        let lambda = kf.powf(spec.a) * (1.0 + delta);
        let modulus = (spec.amplitude * kf.powf(-(spec.b + 1.0)) / z).sqrt();
        let coeff = num_complex::Complex64::new(c, s) * modulus;
        terms.push((lambda, coeff));
        terms.push((-lambda, coeff.conj()));
    }
    Ok(FourierModel::new(
        format!("example a={} b={} A={} n={}", spec.a, spec.b, spec.amplitude, spec.n_terms),
        terms,
    )?)
}

/// `v(t) = E[1 − cos(ξ t)]`.
pub fn nu_function(measure: &SpectralMeasure, t: f64) -> f64 {
    measure.one_minus_cos_mean(t)
}

/// `C_{f,θ} = πθ‖f‖² / (2Γ(3−θ) sin(πθ/2))`, the limit of the rescaled
/// covariance. The squared norm is what the covariance identity produces.
pub fn c_constant(model: &FourierModel, theta: f64) -> Result<f64> {
    check_theta(theta)?;
    Ok(PI * theta * model.norm_sqr() / (2.0 * gamma(3.0 - theta) * (PI * theta / 2.0).sin()))
}

/// `c·(|t|^{2−θ} + |s|^{2−θ} − |t−s|^{2−θ})`.
pub fn fbm_covariance(theta: f64, c: f64, t: f64, s: f64) -> f64 {
    let e = 2.0 - theta;
    c * (t.abs().powf(e) + s.abs().powf(e) - (t - s).abs().powf(e))
}

fn normalization(theta: f64, ell: &SlowlyVarying, epsilon: f64) -> f64 {
    epsilon.powf(2.0 - theta) * ell.eval(1.0 / epsilon)
}

/// `(M(εt) − M(0)) / sqrt(ε^{2−θ} ℓ(1/ε))` on `t_grid`.
pub fn rescaled_chordal(
    model: &FourierModel,
    phases: &PhaseAssignment,
    theta: f64,
    ell: &SlowlyVarying,
    epsilon: f64,
    t_grid: &[f64],
) -> Result<PathSample> {
    check_theta(theta)?;
    if !(epsilon > 0.0) {
        return Err(Error::invalid("epsilon must be positive"));
    }
    let table = phases.table(model)?;
    let origin = table.eval(0.0);
    let scale = normalization(theta, ell, epsilon).sqrt();
    let values = t_grid
        .iter()
        .map(|&t| if t == 0.0 { 0.0.into() } else { (table.eval(epsilon * t) - origin) / scale })
        .collect();
    let prov = Provenance::for_phases(model, phases)
        .with("epsilon", epsilon)
        .with("theta", theta);
    PathSample::new(t_grid.to_vec(), values, prov)
}

/// `Σ |f_λ|² (1 − cos λx) = ‖f‖² v(x)`.
fn weighted_nu(model: &FourierModel, x: f64) -> f64 {
    sum_f64(model.terms().iter().map(|t| {
        let s = (0.5 * t.lambda * x).sin();
        2.0 * t.coeff.norm_sqr() * s * s
    }))
}

/// Exact `E[T_ε(t) T_ε(s)] = ‖f‖²(v(εt) + v(εs) − v(ε(t−s))) / (ε^{2−θ} ℓ(1/ε))`.
pub fn preasymptotic_covariance(
    model: &FourierModel,
    theta: f64,
    ell: &SlowlyVarying,
    epsilon: f64,
    t: f64,
    s: f64,
) -> f64 {
    (weighted_nu(model, epsilon * t) + weighted_nu(model, epsilon * s) - weighted_nu(model, epsilon * (t - s)))
        / normalization(theta, ell, epsilon)
}

/// Per `ε`, the largest `|preasymptotic − limit|` covariance gap over the
/// `(t, s)` grid. Refuses models with unpaired frequencies or coefficients
/// that are not conjugate-symmetric.
pub fn covariance_convergence_scan(config: &TangentConfig, model: &FourierModel) -> Result<Vec<(f64, f64)>> {
    config.validate()?;
    let d = decompose(model, DEFAULT_PAIR_TOLERANCE)?;
    if !d.residue.is_empty() || d.zero_index.is_some() {
        return Err(Error::invalid("tangent scan needs a spectrum made of ±λ pairs only"));
    }
    if !model.is_conjugate_symmetric(1e-12 * model.parseval_norm()) {
        return Err(Error::invalid("tangent scan needs f(-λ) = conj f(λ)"));
    }
    let c = c_constant(model, config.theta)?;
    Ok(config
        .epsilon_schedule
        .iter()
        .map(|&eps| {
            let gap = config
                .t_grid
                .iter()
                .flat_map(|&t| config.t_grid.iter().map(move |&s| (t, s)))
                .map(|(t, s)| {
                    (preasymptotic_covariance(model, config.theta, &config.slowly_varying, eps, t, s)
                        - fbm_covariance(config.theta, c, t, s))
                    .abs()
                })
                .fold(0.0, f64::max);
            (eps, gap)
        })
        .collect())
}

/// `T(x)·(2−θ) / (θ x² R(x))`, which tends to 1 under regular variation.
pub fn regular_variation_ratio(measure: &SpectralMeasure, theta: f64, x: f64) -> f64 {
    measure.truncated_second_moment(x) * (2.0 - theta) / (theta * x * x * measure.tail_mass(x))
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct HurstEstimate {
    pub h_hat: f64,
    pub ci_low: f64,
    pub ci_high: f64,
}

const HURST_GROUPS: usize = 10;
// two-sided 95% Student quantile with HURST_GROUPS − 1 degrees of freedom
const T_QUANTILE_9: f64 = 2.262;

fn hurst_point(paths: &[PathSample], max_lag: usize) -> Result<f64> {
    let h = paths[0].grid[1] - paths[0].grid[0];
    let mut lags = Vec::with_capacity(max_lag);
    let mut msq = Vec::with_capacity(max_lag);
    for m in 1..=max_lag {
        let vals = paths.iter().flat_map(|p| p.values.windows(m + 1).map(move |w| (w[m] - w[0]).norm_sqr()));
        let count = paths.len() * (paths[0].len() - m);
        lags.push(m as f64 * h);
        msq.push(sum_f64(vals) / count as f64);
    }
    Ok(fit_log_log(&lags, &msq)?.slope / 2.0)
}

/// Hurst index from mean squared increments at lags `h, 2h, …` (up to eight
/// grid steps and half the path), with a batch-means 95% interval over ten
/// groups of paths.
pub fn hurst_estimate(paths: &[PathSample]) -> Result<HurstEstimate> {
    if paths.len() < 100 {
        return Err(Error::invalid(format!("need at least 100 paths, got {}", paths.len())));
    }
    let grid = &paths[0].grid;
    if grid.len() < 3 || paths.iter().any(|p| &p.grid != grid) {
        return Err(Error::invalid("paths must share one grid of at least 3 points"));
    }
    let h = grid[1] - grid[0];
    if grid.windows(2).any(|w| ((w[1] - w[0]) - h).abs() > 1e-9 * h.abs().max(1.0)) {
        return Err(Error::invalid("grid must be uniform"));
    }
    let max_lag = 8.min((grid.len() - 1) / 2).max(2);
    let h_hat = hurst_point(paths, max_lag)?;
    let size = paths.len() / HURST_GROUPS;
    let groups: Vec<f64> = (0..HURST_GROUPS)
        .map(|g| hurst_point(&paths[g * size..(g + 1) * size], max_lag))
        .collect::<Result<_>>()?;
    let (_, var) = mean_var(&groups);
    let half = T_QUANTILE_9 * (var / HURST_GROUPS as f64).sqrt();
    Ok(HurstEstimate {
        h_hat,
        ci_low: h_hat - half,
        ci_high: h_hat + half,
    })
}

/// Fractional Brownian paths with covariance `c(|t|^{2H} + |s|^{2H} − |t−s|^{2H})`
/// on `0, h, …, n·h`, by Cholesky factorization (`n ≤ 512`).
pub fn fbm_paths(hurst: f64, c: f64, n: usize, step: f64, count: usize, seed: u64) -> Result<Vec<PathSample>> {
    if !(hurst > 0.0 && hurst < 1.0) || !(c > 0.0) || !(step > 0.0) {
        return Err(Error::invalid("need H in (0,1), c > 0, step > 0"));
    }
    if n == 0 || n > 512 {
        return Err(Error::invalid("grid size must be in 1..=512"));
    }
    let theta = 2.0 - 2.0 * hurst;
    let cov = DMatrix::from_fn(n, n, |i, j| fbm_covariance(theta, c, (i + 1) as f64 * step, (j + 1) as f64 * step));
    let chol = cov
        .cholesky()
        .ok_or_else(|| Error::DegenerateFit("fBm covariance is not positive definite".into()))?;
    let lower = chol.l();
    let grid: Vec<f64> = (0..=n).map(|j| j as f64 * step).collect();
    (0..count as u64)
        .map(|r| {
            let mut g = rng::stream(seed, Domain::Gaussian, r);
            let z = nalgebra::DVector::from_fn(n, |_, _| StandardNormal.sample(&mut g));
            let x = &lower * z;
            let values = std::iter::once(0.0)
                .chain(x.iter().copied())
                .map(|v| num_complex::Complex64::new(v, 0.0))
                .collect();
            let prov = Provenance {
                label: format!("fbm H={hurst}"),
                seed,
                replica: r,
                truncation: "none".into(),
                extra: Vec::new(),
            };
            PathSample::new(grid.clone(), values, prov)
        })
        .collect()
}

/// Whether `fbm_covariance` admits a Cholesky factor on `grid` (nonzero points).
pub fn fbm_covariance_is_positive_definite(theta: f64, grid: &[f64]) -> bool {
    let pts: Vec<f64> = grid.iter().copied().filter(|&t| t != 0.0).collect();
    let n = pts.len();
    DMatrix::from_fn(n, n, |i, j| fbm_covariance(theta, 1.0, pts[i], pts[j]))
        .cholesky()
        .is_some()
}
