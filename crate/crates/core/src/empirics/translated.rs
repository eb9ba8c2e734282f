use std::sync::Arc;

use num_complex::Complex64;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;

use super::{ks_two_sample, EmpiricalDistribution, TestReport};
use crate::rng::{self, Domain};
use crate::sampler::{sample_phases, PhaseAssignment};
use crate::series::TrigTable;
use crate::spectra::{decompose, FourierModel, SpectrumDecomposition, DEFAULT_PAIR_TOLERANCE};
use crate::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Side {
    /// `V` uniform on `[-L, L]`.
    Two,
    /// `V` uniform on `[0, L]`.
    One,
}

fn deterministic_table(model: &FourierModel) -> Result<TrigTable> {
    let d = Arc::new(decompose(model, DEFAULT_PAIR_TOLERANCE)?);
    PhaseAssignment::ones(d).table(model)
}

/// Rows `(f(V_i + t_j))_j` for `n` uniform shifts `V_i`.
///
/// The `i`-th shift is `L·(2U_i − 1)` (or `L·U_i`) with `U_i` depending only on
/// `(seed, i)`, so schedules over `L` reuse the same uniforms.
pub fn sample_translated(
    model: &FourierModel,
    half_width: f64,
    t_grid: &[f64],
    n: usize,
    seed: u64,
    side: Side,
) -> Result<Vec<Vec<Complex64>>> {
    if !(half_width > 0.0) || !half_width.is_finite() {
        return Err(Error::invalid(format!("L must be positive, got {half_width}")));
    }
    if n == 0 {
        return Err(Error::invalid("need at least one sample"));
    }
    let table = deterministic_table(model)?;
    Ok((0..n)
        .into_par_iter()
        .map(|i| {
            let mut r = rng::stream_at(seed, Domain::Translation, 0, i as u64);
            let u = rng::unit_f64(&mut r);
            let v = match side {
                Side::Two => half_width * (2.0 * u - 1.0),
                Side::One => half_width * u,
            };
            t_grid.iter().map(|&t| table.eval(v + t)).collect()
        })
        .collect())
}

/// Rows `(M_f(t_j))_j` for replicas `0..n`.
pub fn sample_limit(
    model: &FourierModel,
    decomposition: Arc<SpectrumDecomposition>,
    t_grid: &[f64],
    n: usize,
    seed: u64,
) -> Result<Vec<Vec<Complex64>>> {
    (0..n as u64)
        .into_par_iter()
        .map(|r| {
            let table = sample_phases(decomposition.clone(), seed, r).table(model)?;
            Ok(table.eval_many(t_grid))
        })
        .collect()
}

/// Coefficient vectors for linear combinations of the marginals.
///
/// The unit vectors come first; the remaining `total − dim` vectors (at least
/// one) have independent standard complex normal entries scaled to unit norm.
pub fn fidi_panel(dim: usize, total: usize, seed: u64) -> Vec<Vec<Complex64>> {
    let total = total.max(dim + 1);
    let mut panel: Vec<Vec<Complex64>> = (0..dim)
        .map(|j| {
            (0..dim)
                .map(|i| Complex64::new(if i == j { 1.0 } else { 0.0 }, 0.0))
                .collect()
        })
        .collect();
    let mut r = rng::stream(seed, Domain::Panel, 0);
    for _ in dim..total {
        let v: Vec<Complex64> = (0..dim)
            .map(|_| Complex64::new(StandardNormal.sample(&mut r), StandardNormal.sample(&mut r)))
            .collect();
        let norm = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        panel.push(v.into_iter().map(|z| z / norm).collect());
    }
    panel
}

/// KS statistics for every `(L, α, part)`; `part` is 0 for Re and 1 for Im.
#[derive(Clone, Debug)]
pub struct FidiOutcome {
    pub schedule: Vec<f64>,
    pub reports: Vec<TestReport>,
    /// `statistics[alpha][part][l]`.
    pub statistics: Vec<[Vec<f64>; 2]>,
    pub n: usize,
}

impl FidiOutcome {
    /// Reports at the largest `L`.
    pub fn final_reports(&self) -> impl Iterator<Item = &TestReport> {
        let last = self.schedule.len() - 1;
        self.reports
            .iter()
            .enumerate()
            .filter(move |(k, _)| k % self.schedule.len() == last)
            .map(|(_, r)| r)
    }

    /// One trend report per `(α, part)`.
    pub fn trend_reports(&self, min_steps: usize) -> Vec<TestReport> {
        let mut out = Vec::new();
        for (a, parts) in self.statistics.iter().enumerate() {
            for (p, stats) in parts.iter().enumerate() {
                let name = format!("trend alpha={a} {}", if p == 0 { "re" } else { "im" });
                out.push(trend_report(&name, stats, self.n, self.n, min_steps));
            }
        }
        out
    }
}

/// Counts steps of a KS schedule that increase beyond Monte Carlo noise.
///
/// A step passes if `D_next ≤ D_prev + 0.75·sqrt((n+m)/(nm))`; the slack is
/// twice the null standard deviation of a difference of two independent KS
/// statistics. The report's statistic is the number of failing steps and its
/// threshold is `steps − min_steps`.
pub fn trend_report(name: &str, stats: &[f64], n: usize, m: usize, min_steps: usize) -> TestReport {
    let (nf, mf) = (n as f64, m as f64);
    let slack = 0.75 * ((nf + mf) / (nf * mf)).sqrt();
    let steps = stats.len().saturating_sub(1);
    let failing = stats.windows(2).filter(|w| w[1] > w[0] + slack).count();
    TestReport::new(
        name,
        failing as f64,
        steps.saturating_sub(min_steps) as f64,
        n,
        format!("statistics {stats:.4?}"),
    )
}

fn combine(rows: &[Vec<Complex64>], alpha: &[Complex64]) -> Vec<Complex64> {
    rows.iter()
        .map(|row| row.iter().zip(alpha).map(|(x, a)| a * x).sum())
        .collect()
}

/// Compares `Σ α_i f(V + t_i)` with `Σ α_i M_f(t_i)` by two-sample KS tests on
/// the real and imaginary parts, for every `L` in the schedule and every
/// vector of the panel.
pub fn fidi_convergence_test(
    model: &FourierModel,
    l_schedule: &[f64],
    t_points: &[f64],
    panel: &[Vec<Complex64>],
    n: usize,
    seed: u64,
) -> Result<FidiOutcome> {
    if t_points.is_empty() || t_points.len() > 6 {
        return Err(Error::invalid("between 1 and 6 time points are supported"));
    }
    if l_schedule.is_empty() {
        return Err(Error::invalid("empty L schedule"));
    }
    if panel.iter().any(|a| a.len() != t_points.len()) {
        return Err(Error::invalid("panel vectors must match the number of time points"));
    }
    let d = Arc::new(decompose(model, DEFAULT_PAIR_TOLERANCE)?);
    let limit = sample_limit(model, d, t_points, n, seed)?;
    let limit_parts: Vec<[EmpiricalDistribution; 2]> = panel
        .iter()
        .map(|a| {
            let z = combine(&limit, a);
            Ok([
                EmpiricalDistribution::new(z.iter().map(|v| v.re).collect())?,
                EmpiricalDistribution::new(z.iter().map(|v| v.im).collect())?,
            ])
        })
        .collect::<Result<_>>()?;

    let mut statistics: Vec<[Vec<f64>; 2]> = vec![[Vec::new(), Vec::new()]; panel.len()];
    let mut per_alpha: Vec<Vec<TestReport>> = vec![Vec::new(); panel.len()];
    for &l in l_schedule {
        let rows = sample_translated(model, l, t_points, n, seed, Side::Two)?;
        for (k, a) in panel.iter().enumerate() {
            let z = combine(&rows, a);
            for part in 0..2 {
                let vals = z.iter().map(|v| if part == 0 { v.re } else { v.im }).collect();
                let mut r = ks_two_sample(&EmpiricalDistribution::new(vals)?, &limit_parts[k][part]);
                r.test = format!("fidi L={l:e} alpha={k} {}", if part == 0 { "re" } else { "im" });
                statistics[k][part].push(r.statistic);
                per_alpha[k].push(r);
            }
        }
    }
    // order reports as (alpha, part, L)
    let mut reports = Vec::new();
    for rs in per_alpha {
        for part in 0..2 {
            reports.extend(rs.iter().skip(part).step_by(2).cloned());
        }
    }
    Ok(FidiOutcome {
        schedule: l_schedule.to_vec(),
        reports,
        statistics,
        n,
    })
}
