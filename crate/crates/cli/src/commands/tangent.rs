use std::fmt::Write as _;

use anyhow::Result;
use apstat::sampler::sample_phases;
use apstat::spectra::{decompose, DEFAULT_PAIR_TOLERANCE};
use apstat::tangent::{
    c_constant, covariance_convergence_scan, fbm_covariance, hurst_estimate, preasymptotic_covariance,
    rescaled_chordal, ExampleSpectrumSpec, HurstEstimate, TangentConfig,
};
use apstat::FourierModel;
use rayon::prelude::*;
use std::sync::Arc;

use super::num;
use crate::config::{ExampleParams, ModelSource, RunConfig};
use crate::models::{example_model, load_model};
use crate::output::{gnuplot_script, Output};

/// Points per unit of rescaled time in the Hurst paths.
pub const PATH_POINTS: usize = 64;

/// The tangent-suite model: the configured one, or the 10⁴-pair power-law
/// spectrum.
pub fn tangent_model(config: &RunConfig) -> Result<(FourierModel, Option<ExampleSpectrumSpec>, TangentConfig)> {
    let (model, example) = match &config.model {
        Some(ModelSource::Explicit { .. }) | Some(ModelSource::File { .. }) => {
            let l = load_model(config)?;
            (l.model, l.example)
        }
        Some(ModelSource::Example(p)) => {
            let (m, s) = example_model(p)?;
            (m, Some(s))
        }
        None => {
            let (m, s) = example_model(&ExampleParams::tangent_default())?;
            (m, Some(s))
        }
    };
    let tc = config.tangent_config(example.as_ref())?;
    Ok((model, example, tc))
}

/// Whether the finest lag `ε/PATH_POINTS` of the Hurst paths is resolved by
/// the truncated spectrum, i.e. at least ten periods of the top frequency.
pub fn resolved(model: &FourierModel, eps: f64) -> bool {
    eps / PATH_POINTS as f64 >= 10.0 / model.max_abs_frequency()
}

pub fn hurst_at(model: &FourierModel, tc: &TangentConfig, eps: f64, paths: usize, seed: u64) -> Result<HurstEstimate> {
    let d = Arc::new(decompose(model, DEFAULT_PAIR_TOLERANCE)?);
    let grid: Vec<f64> = (0..=PATH_POINTS).map(|j| j as f64 / PATH_POINTS as f64).collect();
    let samples: Vec<_> = (0..paths as u64)
        .into_par_iter()
        .map(|r| {
            rescaled_chordal(
                model,
                &sample_phases(d.clone(), seed, r),
                tc.theta,
                &tc.slowly_varying,
                eps,
                &grid,
            )
        })
        .collect::<apstat::Result<_>>()?;
    Ok(hurst_estimate(&samples)?)
}

/// Covariance gap to the fractional Brownian limit across the ε schedule,
/// the covariance tables themselves and Hurst estimates per ε.
pub fn run(config: &RunConfig, out: &mut Output) -> Result<()> {
    let (model, _, tc) = tangent_model(config)?;
    let c = c_constant(&model, tc.theta)?;
    let scan = covariance_convergence_scan(&tc, &model)?;

    let mut body = format!(
        "# model: {}\n# theta: {}\n# C: {}\nepsilon,gap,gap_over_c\n",
        model.label(),
        num(tc.theta),
        num(c)
    );
    for &(eps, gap) in &scan {
        let _ = writeln!(body, "{},{},{}", num(eps), num(gap), num(gap / c));
    }
    out.write("tangent_scan.csv", &body)?;

    let mut body = String::from("epsilon,t,s,preasymptotic,limit\n");
    for &eps in &tc.epsilon_schedule {
        for &t in &tc.t_grid {
            for &s in &tc.t_grid {
                let pre = preasymptotic_covariance(&model, tc.theta, &tc.slowly_varying, eps, t, s);
                let _ = writeln!(
                    body,
                    "{},{},{},{},{}",
                    num(eps),
                    num(t),
                    num(s),
                    num(pre),
                    num(fbm_covariance(tc.theta, c, t, s))
                );
            }
        }
    }
    out.write("tangent_covariance.csv", &body)?;

    let mut body = String::from("epsilon,hurst,ci_low,ci_high,resolved\n");
    for (i, &eps) in tc.epsilon_schedule.iter().enumerate() {
        let h = hurst_at(
            &model,
            &tc,
            eps,
            config.tangent.paths,
            config.seed.wrapping_add(i as u64),
        )?;
        let _ = writeln!(
            body,
            "{},{},{},{},{}",
            num(eps),
            num(h.h_hat),
            num(h.ci_low),
            num(h.ci_high),
            resolved(&model, eps)
        );
    }
    out.write("tangent_hurst.csv", &body)?;

    let series = [("tangent_scan.csv".to_string(), "1:3".to_string(), "gap / C".to_string())];
    let mut script = String::from("set logscale xy\n");
    script.push_str(&gnuplot_script(
        "covariance gap to the limit",
        "epsilon",
        "gap / C",
        &series,
    ));
    out.write("tangent.gp", &script)?;
    eprintln!(
        "tangent: theta {}, C {c:.6}, final gap / C {:.4}",
        tc.theta,
        scan.last().map_or(f64::NAN, |g| g.1 / c)
    );
    Ok(())
}
