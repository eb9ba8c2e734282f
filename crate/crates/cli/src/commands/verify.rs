use std::sync::Arc;

use anyhow::{bail, Context, Result};
use apstat::empirics::{
    equidistribution_character_test, ergodic_check, fidi_convergence_test, fidi_panel, holder_diagnostic,
    kronecker_weyl_probe, ks_normal, mixing_probe, EmpiricalDistribution, Phi, TestReport, TorusFunction,
};
use apstat::rng::{self, Domain};
use apstat::sampler::{evaluate_uniform, sample_phases};
use apstat::spectra::{
    decompose, estimate_fourier_coefficient, marcinkiewicz_seminorm_numeric, DEFAULT_PAIR_TOLERANCE,
};
use apstat::sum::{mean_var, sum_f64};
use apstat::tangent::{c_constant, covariance_convergence_scan, preasymptotic_covariance, rescaled_chordal};
use apstat::zeta::{
    explicit_truncation_scan, gonek_diagnostic, gonek_report, sieve, strict_decrease_report, zero_counting_check,
    ExplicitKind,
};
use apstat::{Complex64, FourierModel};
use rayon::prelude::*;

use super::explicit::scan_counts;
use super::tangent::{hurst_at, resolved, tangent_model};
use crate::config::{RunConfig, Suite};
use crate::models::{load_table, models_for_suite};
use crate::output::Output;

/// Runs the configured suite, writes `verify_<suite>.csv` and returns whether
/// every report passed.
pub fn run(config: &RunConfig, out: &mut Output) -> Result<bool> {
    let suite = config.verify.suite.context("no suite selected")?;
    let reports = suite_reports(config, suite)?;
    let mut body = format!("# suite: {suite}\n{}\n", TestReport::CSV_HEADER);
    for r in &reports {
        body.push_str(&r.csv_row());
        body.push('\n');
        println!("{r}");
    }
    out.write(&format!("verify_{suite}.csv"), &body)?;
    let passed = reports.iter().filter(|r| r.passed()).count();
    println!("suite {suite}: {passed}/{} passed", reports.len());
    Ok(passed == reports.len())
}

pub fn suite_reports(config: &RunConfig, suite: Suite) -> Result<Vec<TestReport>> {
    match suite {
        Suite::Parseval => per_model(config, parseval),
        Suite::Translation => per_model(config, translation),
        Suite::Onedim => per_model(config, onedim),
        Suite::Fidi => per_model(config, fidi),
        Suite::Ergodic => per_model(config, ergodic),
        Suite::Equidist => per_model(config, equidist),
        Suite::Holder => holder(config),
        Suite::Tangent => tangent(config),
        Suite::Explicit => explicit(config),
        Suite::Zerocount => zerocount(config),
    }
}

type ModelSuite = fn(&RunConfig, &FourierModel, u64) -> Result<Vec<TestReport>>;

/// Runs `f` on each model with its own seed and prefixes report names with
/// the model label.
fn per_model(config: &RunConfig, f: ModelSuite) -> Result<Vec<TestReport>> {
    let mut out = Vec::new();
    for (i, model) in models_for_suite(config)?.iter().enumerate() {
        for mut r in f(config, model, config.seed.wrapping_add(i as u64))? {
            r.test = format!("{} {}", model.label(), r.test);
            out.push(r);
        }
    }
    Ok(out)
}

/// Trapezoid step for mean values of `|f|²` and `f·e^{−iλt}`: frequency
/// differences times the step stay below 2, well short of aliasing at 2π.
fn mean_value_step(model: &FourierModel) -> f64 {
    (1.0 / model.max_abs_frequency()).min(0.1)
}

fn parseval(config: &RunConfig, model: &FourierModel, _seed: u64) -> Result<Vec<TestReport>> {
    let mut direct = 0.0;
    for t in model.terms() {
        direct += t.coeff.re * t.coeff.re + t.coeff.im * t.coeff.im;
    }
    let identity = (model.parseval_norm().powi(2) - direct).abs() / direct.max(1.0);
    let l = config.verify.half_width;
    let numeric = marcinkiewicz_seminorm_numeric(model, l, mean_value_step(model))?;
    Ok(vec![
        TestReport::new("parseval identity", identity, 1e-10, model.len(), ""),
        TestReport::new(
            "mean-square norm",
            (numeric / direct.sqrt() - 1.0).abs(),
            0.05,
            model.len(),
            format!("L={l:e} numeric={numeric:.6e} parseval={:.6e}", direct.sqrt()),
        ),
    ])
}

/// Recovers `f_λ` from the mean value of the translate `f(v + ·)`. The
/// threshold is the leakage bound `Σ_{μ≠λ} |f_μ|·min(1, 1/(L|μ−λ|))` plus
/// 10⁻³ for quadrature.
fn translation(config: &RunConfig, model: &FourierModel, seed: u64) -> Result<Vec<TestReport>> {
    let l = config.verify.half_width;
    let step = mean_value_step(model);
    let mut r = rng::stream(seed, Domain::Models, 1);
    let terms = model.terms();
    let mut out = Vec::new();
    for k in 0..5 {
        let v = 200.0 * rng::unit_f64(&mut r) - 100.0;
        let pick = ((rng::unit_f64(&mut r) * terms.len() as f64) as usize).min(terms.len() - 1);
        let target = terms[pick];
        let est = estimate_fourier_coefficient(&model.translate(v), target.lambda, l, step)?;
        let (s, c) = (target.lambda * v).sin_cos();
        let recovered = est * Complex64::new(c, -s);
        let leakage = sum_f64(
            terms
                .iter()
                .enumerate()
                .filter(|&(i, _)| i != pick)
                .map(|(_, t)| t.coeff.norm() * (1.0 / (l * (t.lambda - target.lambda).abs())).min(1.0)),
        );
        out.push(TestReport::new(
            format!("translated coefficient {k}"),
            (recovered - target.coeff).norm(),
            leakage + 1e-3,
            1,
            format!("lambda={:.6} v={v:.4}", target.lambda),
        ));
    }
    Ok(out)
}

fn onedim(config: &RunConfig, model: &FourierModel, seed: u64) -> Result<Vec<TestReport>> {
    let v = &config.verify;
    let panel = vec![vec![Complex64::new(1.0, 0.0)]];
    let res = fidi_convergence_test(model, &v.schedule, &[0.0], &panel, v.samples, seed)?;
    let mut out: Vec<TestReport> = res.final_reports().cloned().collect();
    // at most one step of the schedule may increase beyond noise
    out.extend(res.trend_reports(v.schedule.len().saturating_sub(2)));
    Ok(out)
}

fn fidi(config: &RunConfig, model: &FourierModel, seed: u64) -> Result<Vec<TestReport>> {
    let v = &config.verify;
    let panel = fidi_panel(3, 5, seed);
    let l = *v.schedule.last().expect("validated");
    let res = fidi_convergence_test(model, &[l], &[0.0, 0.7, 1.9], &panel, v.samples, seed)?;
    Ok(res.final_reports().cloned().collect())
}

fn ergodic(config: &RunConfig, model: &FourierModel, seed: u64) -> Result<Vec<TestReport>> {
    let v = &config.verify;
    let d = Arc::new(decompose(model, DEFAULT_PAIR_TOLERANCE)?);
    let cap = 0.5 * model.parseval_norm();
    let phis = [Phi::Re, Phi::ModulusSquared, Phi::ClippedRe { cap }];
    let mut out = ergodic_check(model, d, &phis, v.horizon, 0.01, seed, 10, v.samples)?;
    let lags: Vec<f64> = (0..=10_000).map(|j| 100.0 + j as f64 * 0.01).collect();
    out.push(mixing_probe(model, &lags)?);
    Ok(out)
}

fn equidist(config: &RunConfig, model: &FourierModel, seed: u64) -> Result<Vec<TestReport>> {
    let v = &config.verify;
    let d = decompose(model, DEFAULT_PAIR_TOLERANCE)?;
    let mut vectors: Vec<Vec<(usize, i64)>> = Vec::new();
    if let Some(&(p, m)) = d.pairs.first() {
        vectors.push(vec![(p, 1), (m, 1)]);
    }
    let mut r = rng::stream(seed, Domain::Models, 2);
    while vectors.len() < 5 {
        let size = 1 + (rng::unit_f64(&mut r) * 3.0) as usize;
        vectors.push(
            (0..size)
                .map(|_| {
                    let idx = ((rng::unit_f64(&mut r) * model.len() as f64) as usize).min(model.len() - 1);
                    (idx, [-2, -1, 1, 2][(rng::unit_f64(&mut r) * 4.0) as usize])
                })
                .collect(),
        );
    }
    let mut out = Vec::new();
    for (j, k) in vectors.iter().enumerate() {
        let t = 0.5 + 0.3 * j as f64;
        let mut rep = equidistribution_character_test(model, k, t, 1e6, v.samples, seed.wrapping_add(j as u64))?;
        rep.test = format!("character {j}");
        out.push(rep);
    }
    let positive: Vec<f64> = model.frequencies().filter(|&l| l > 0.0).take(2).collect();
    if positive.len() == 2 {
        let mut rep = kronecker_weyl_probe(&positive, TorusFunction::ReZ1ConjZ2, v.horizon)?;
        rep.test = "kronecker-weyl orbit average".into();
        out.push(rep);
    }
    Ok(out)
}

/// Hölder diagnostics of a power-law spectrum with index `θ`: the increment
/// second moment scales like `dt^{2−θ}` and paths are Hölder of order
/// `(2−θ)/2`, between ten periods of the top frequency and `0.1`.
fn holder(config: &RunConfig) -> Result<Vec<TestReport>> {
    let (model, _, tc) = tangent_model(config)?;
    let top = model.max_abs_frequency();
    let lo = 10.0 / top;
    if lo * 10.0 > 0.1 {
        bail!("the holder suite needs a top frequency of at least 1000, got {top}");
    }
    let dt_grid: Vec<f64> = (0..10).map(|i| lo * (0.1 / lo).powf(i as f64 / 9.0)).collect();
    let cutoffs: Vec<f64> = (0..7).rev().map(|j| top / 2f64.powi(j)).collect();
    let d = Arc::new(decompose(&model, DEFAULT_PAIR_TOLERANCE)?);
    let paths: Vec<_> = (0..config.tangent.paths as u64)
        .into_par_iter()
        .map(|r| evaluate_uniform(&model, &sample_phases(d.clone(), config.seed, r), 0.0, lo, 257))
        .collect::<apstat::Result<_>>()?;
    let diag = holder_diagnostic(&model, &cutoffs, &dt_grid, Some(&paths))?;
    let slope = 2.0 - tc.theta;
    Ok(diag.reports(slope, slope / 2.0, 0.1))
}

fn tangent(config: &RunConfig) -> Result<Vec<TestReport>> {
    let (model, _, tc) = tangent_model(config)?;
    let d = Arc::new(decompose(&model, DEFAULT_PAIR_TOLERANCE)?);
    let n = config.verify.samples;
    let seed = config.seed;
    let mut out = Vec::new();

    let eps = tc.epsilon_schedule[tc.epsilon_schedule.len() / 2];
    let grid = &tc.t_grid;
    let samples: Vec<Vec<f64>> = (0..n as u64)
        .into_par_iter()
        .map(|r| {
            let p = rescaled_chordal(
                &model,
                &sample_phases(d.clone(), seed, r),
                tc.theta,
                &tc.slowly_varying,
                eps,
                grid,
            )?;
            Ok(p.values.iter().map(|z| z.re).collect())
        })
        .collect::<apstat::Result<_>>()?;
    let mut worst: f64 = 0.0;
    for a in 0..grid.len() {
        for b in a..grid.len() {
            let prod: Vec<f64> = samples.iter().map(|s| s[a] * s[b]).collect();
            let (m, v) = mean_var(&prod);
            let exact = preasymptotic_covariance(&model, tc.theta, &tc.slowly_varying, eps, grid[a], grid[b]);
            worst = worst.max((m - exact).abs() / (v / n as f64).sqrt());
        }
    }
    out.push(TestReport::new(
        "preasymptotic covariance (max gap in SE)",
        worst,
        3.0,
        n,
        format!("eps={eps}"),
    ));

    let scan = covariance_convergence_scan(&tc, &model)?;
    let c = c_constant(&model, tc.theta)?;
    let increases = scan.windows(2).filter(|w| !(w[1].1 < w[0].1)).count();
    out.push(TestReport::new(
        "covariance gap decreasing in epsilon",
        increases as f64,
        0.0,
        scan.len(),
        format!(
            "gaps {:?}",
            scan.iter().map(|g| format!("{:.4e}", g.1)).collect::<Vec<_>>()
        ),
    ));
    let last = scan.last().expect("nonempty schedule").1;
    out.push(TestReport::new(
        "final covariance gap / C",
        last / c,
        0.1,
        grid.len(),
        format!("C={c:.6}"),
    ));

    let eps = *tc.epsilon_schedule.last().expect("nonempty schedule");
    let marginal: Vec<f64> = (0..n as u64)
        .into_par_iter()
        .map(|r| {
            let phases = sample_phases(d.clone(), seed.wrapping_add(1), r);
            Ok(rescaled_chordal(&model, &phases, tc.theta, &tc.slowly_varying, eps, &[1.0])?.values[0].re)
        })
        .collect::<apstat::Result<_>>()?;
    let mut ks = ks_normal(&EmpiricalDistribution::new(marginal)?)?;
    ks.test = format!("normality of the rescaled increment at eps={eps}");
    out.push(ks);

    let eps = tc
        .epsilon_schedule
        .iter()
        .copied()
        .filter(|&e| resolved(&model, e))
        .last()
        .context("no epsilon in the schedule is resolved by the spectrum")?;
    let h = hurst_at(&model, &tc, eps, config.tangent.paths, seed.wrapping_add(2))?;
    let target = 1.0 - tc.theta / 2.0;
    out.push(TestReport::new(
        "hurst estimate",
        (h.h_hat - target).abs(),
        0.1,
        config.tangent.paths,
        format!(
            "eps={eps} H={:.4} target={target:.4} CI=[{:.4}, {:.4}]",
            h.h_hat, h.ci_low, h.ci_high
        ),
    ));
    Ok(out)
}

fn explicit(config: &RunConfig) -> Result<Vec<TestReport>> {
    let kinds: Vec<ExplicitKind> = match config.explicit_kind() {
        Some(k) => vec![k],
        None => ExplicitKind::ALL.to_vec(),
    };
    let table = load_table(&config.zeta, kinds.iter().any(|&k| k != ExplicitKind::Psi))?;
    let horizons = scan_counts(config, table.len())?
        .into_iter()
        .map(|k| table.midpoint_horizon(k))
        .collect::<apstat::Result<Vec<_>>>()?;
    let grid = config.explicit.grid();
    let tables = sieve(config.zeta.sieve_limit)?;
    let mut out = Vec::new();
    for kind in kinds {
        let scan = explicit_truncation_scan(kind, &tables, &table, &horizons, &grid)?;
        out.push(strict_decrease_report(
            &format!("explicit {kind} rms decreasing"),
            &scan,
        ));
        if kind == ExplicitKind::Psi {
            out.push(scan.last().expect("nonempty scan").report(0.5));
        }
    }
    Ok(out)
}

fn zerocount(config: &RunConfig) -> Result<Vec<TestReport>> {
    let table = load_table(&config.zeta, true)?;
    let top = table.max_gamma();
    let start = (1.01 * table.gammas()[0]).max(50f64.min(0.5 * top));
    let x_grid: Vec<f64> = (0..12).map(|i| start * (top / start).powf(i as f64 / 11.0)).collect();
    let mut out = zero_counting_check(&table, &x_grid)?.reports(0.25, 0.3);
    out.push(gonek_report(&gonek_diagnostic(&table, 20)?, 3.0));
    Ok(out)
}
