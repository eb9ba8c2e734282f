use std::fmt::Write as _;

use anyhow::Result;
use apstat::sampler::{evaluate_uniform, exact_covariance, sample_phases};
use apstat::sum::mean_var;
use apstat::Complex64;
use rayon::prelude::*;

use super::num;
use crate::config::RunConfig;
use crate::models::load_model;
use crate::output::{gnuplot_script, Output};

pub const HEADER: &str = "s,exact_re,exact_im,correlation,empirical_re,empirical_im,se";

/// Exact covariance `K(s)` and its Monte Carlo estimate
/// `mean M(s)·conj M(0)` over independent replicas, with standard errors.
pub fn run(config: &RunConfig, out: &mut Output) -> Result<()> {
    let loaded = load_model(config)?;
    let model = &loaded.model;
    let d = loaded.decomposition()?;
    let c = &config.covariance;
    let lags = c.lags();
    let products: Vec<Vec<Complex64>> = (0..c.replicas as u64)
        .into_par_iter()
        .map(|r| {
            let p = evaluate_uniform(model, &sample_phases(d.clone(), config.seed, r), 0.0, c.lag_step, lags)?;
            let origin = p.values[0].conj();
            Ok(p.values.iter().map(|v| v * origin).collect())
        })
        .collect::<apstat::Result<_>>()?;

    let n = c.replicas as f64;
    let k0 = exact_covariance(model, 0.0).re;
    let mut body = format!(
        "# model: {}\n# terms: {}\n# truncation: {}\n# seed: {}\n# replicas: {}\n{HEADER}\n",
        model.label(),
        model.len(),
        model.truncation(),
        config.seed,
        c.replicas
    );
    let mut worst: f64 = 0.0;
    for j in 0..lags {
        let s = j as f64 * c.lag_step;
        let exact = exact_covariance(model, s);
        let (mr, vr) = mean_var(&products.iter().map(|p| p[j].re).collect::<Vec<_>>());
        let (mi, vi) = mean_var(&products.iter().map(|p| p[j].im).collect::<Vec<_>>());
        let se = ((vr + vi) / n).sqrt();
        if se > 0.0 {
            worst = worst.max((Complex64::new(mr, mi) - exact).norm() / se);
        }
        let _ = writeln!(
            body,
            "{},{},{},{},{},{},{}",
            num(s),
            num(exact.re),
            num(exact.im),
            num(exact.re / k0),
            num(mr),
            num(mi),
            num(se)
        );
    }
    out.write("covariance.csv", &body)?;
    let series = [
        (
            "covariance.csv".to_string(),
            "1:4".to_string(),
            "exact correlation".to_string(),
        ),
        (
            "covariance.csv".to_string(),
            format!("1:($5/{})", num(k0)),
            "empirical correlation".to_string(),
        ),
    ];
    let title = format!("correlation function of {}", model.label());
    out.write("covariance.gp", &gnuplot_script(&title, "s", "K(s)/K(0)", &series))?;
    eprintln!(
        "covariance: {lags} lags, {} replicas, K(0) = {k0:.6e}, largest gap {worst:.2} SE",
        c.replicas
    );
    Ok(())
}
