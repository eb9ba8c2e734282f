use std::fmt::Write as _;

use anyhow::{ensure, Result};
use apstat::zeta::{
    explicit_formula_check, explicit_remainder, normalized_summatory, sieve, strict_decrease_report, ExplicitKind,
};

use super::num;
use crate::config::RunConfig;
use crate::models::{explicit_model, load_table};
use crate::output::{gnuplot_script, Output};

/// Zero counts of the truncation scan: configured, or 25, 100 and the whole
/// table (those that fit).
pub fn scan_counts(config: &RunConfig, table_len: usize) -> Result<Vec<usize>> {
    let counts = if config.explicit.zero_counts.is_empty() {
        let mut c: Vec<usize> = [25, 100].into_iter().filter(|&k| k < table_len).collect();
        c.push(table_len);
        c
    } else {
        config.explicit.zero_counts.clone()
    };
    ensure!(
        counts.iter().all(|&k| k <= table_len),
        "zero counts {counts:?} exceed the table of {table_len}"
    );
    Ok(counts)
}

/// Sieved normalized summatory function against its truncated expansion on
/// the log grid, plus the RMS gap across truncations.
pub fn run(config: &RunConfig, out: &mut Output) -> Result<()> {
    let kind = config.explicit_kind().unwrap_or(ExplicitKind::Psi);
    let table = load_table(&config.zeta, kind != ExplicitKind::Psi)?;
    let counts = scan_counts(config, table.len())?;
    let grid = config.explicit.grid();
    let tables = sieve(config.zeta.sieve_limit)?;
    let model = explicit_model(kind, &config.zeta, &table)?;
    let check = explicit_formula_check(&tables, &model, &grid)?;

    let oscillating = model.evaluate(&grid)?;
    let rhs = model.expansion(&grid)?;
    let mut body = format!(
        "# kind: {kind}\n# zeros: {}\n# horizon: {}\n# sieve limit: {}\nt,lhs,rhs,gap,oscillating,remainder\n",
        model.zero_count(),
        model.horizon,
        tables.limit()
    );
    for (i, &t) in grid.iter().enumerate() {
        let lhs = normalized_summatory(kind, &tables, t)?;
        let _ = writeln!(
            body,
            "{},{},{},{},{},{}",
            num(t),
            num(lhs),
            num(rhs[i]),
            num(lhs - rhs[i]),
            num(kind.sign() * oscillating[i]),
            num(explicit_remainder(kind, t)?)
        );
    }
    let name = format!("explicit_{kind}.csv");
    out.write(&name, &body)?;

    let mut scan = Vec::new();
    let mut body = String::from("zero_count,horizon,rms_gap,max_gap,baseline_rms_gap\n");
    for &k in &counts {
        let m = apstat::zeta::build_explicit_model(kind, &table, table.midpoint_horizon(k)?)?;
        let c = explicit_formula_check(&tables, &m, &grid)?;
        let _ = writeln!(
            body,
            "{},{},{},{},{}",
            c.zero_count,
            num(c.horizon),
            num(c.rms_gap),
            num(c.max_gap),
            num(c.baseline_rms_gap)
        );
        scan.push(c);
    }
    out.write(&format!("explicit_{kind}_scan.csv"), &body)?;
    let series = [
        (name.clone(), "1:2".to_string(), "sieved".to_string()),
        (name, "1:3".to_string(), format!("{} zeros", model.zero_count())),
    ];
    let title = format!("normalized {kind} summatory function");
    out.write(
        &format!("explicit_{kind}.gp"),
        &gnuplot_script(&title, "t = log x", "value", &series),
    )?;
    eprintln!(
        "explicit {kind}: {} zeros, rms gap {:.4e} (baseline {:.4e}); {}",
        check.zero_count,
        check.rms_gap,
        check.baseline_rms_gap,
        strict_decrease_report("rms decreasing over the scan", &scan)
    );
    Ok(())
}
