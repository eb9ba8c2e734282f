use anyhow::Result;
use apstat::sampler::{evaluate_uniform, sample_phases};
use apstat::PathSample;
use rayon::prelude::*;

use crate::config::RunConfig;
use crate::models::load_model;
use crate::output::{gnuplot_script, Output};

/// Plotted replicas in the gnuplot script.
const PLOTTED: usize = 8;

/// Realizations of the limit process on a uniform grid, one CSV per replica.
pub fn run(config: &RunConfig, out: &mut Output) -> Result<()> {
    let loaded = load_model(config)?;
    let d = loaded.decomposition()?;
    let s = &config.simulate;
    let points = s.points();
    let paths: Vec<PathSample> = (0..s.replicas as u64)
        .into_par_iter()
        .map(|r| {
            let phases = sample_phases(d.clone(), config.seed, r);
            let mut p = evaluate_uniform(&loaded.model, &phases, s.t_start, s.step, points)?;
            p.provenance = p.provenance.with("terms", loaded.model.len());
            Ok(p)
        })
        .collect::<apstat::Result<_>>()?;

    let mut series = Vec::new();
    let mut max_imag: f64 = 0.0;
    for (r, p) in paths.iter().enumerate() {
        let name = format!("path_{r:04}.csv");
        out.write(&name, &p.to_csv())?;
        max_imag = max_imag.max(p.max_abs_imag());
        if r < PLOTTED {
            series.push((name, "1:2".to_string(), format!("replica {r}")));
        }
    }
    let title = format!("realisations of {}", loaded.model.label());
    out.write("simulate.gp", &gnuplot_script(&title, "t", "Re M(t)", &series))?;
    eprintln!(
        "simulate: {} replica(s) x {points} points, {} terms, max |Im| {max_imag:.3e}",
        paths.len(),
        loaded.model.len()
    );
    Ok(())
}
