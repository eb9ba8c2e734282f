use std::f64::consts::PI;

use super::table::ZeroTable;
use crate::empirics::TestReport;
use crate::sum::sum_f64;
use crate::{Error, Result};

/// Ratios against the zero-counting asymptotics at one grid point.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CountingRow {
    pub x: f64,
    /// `N(x)`, the number of ordinates `≤ x`.
    pub count: usize,
    /// `N(x) / (x log x / 2π)`.
    pub counting_ratio: f64,
    /// `γ_n log n / (2πn)` at `n = N(x)`; NaN when `n < 2`.
    pub growth_ratio: f64,
    /// `Σ_{x<γ≤Γ} |ρ|⁻²` over `H(x) − H(Γ)`, `H(u) = log u/(2πu)`, with `Γ`
    /// the largest ordinate.
    pub tail_ratio: f64,
}

#[derive(Clone, Debug)]
pub struct ZeroCounting {
    pub rows: Vec<CountingRow>,
    pub max_gamma: f64,
}

fn tail_asymptotic(u: f64) -> f64 {
    u.ln() / (2.0 * PI * u)
}

/// Counting, growth and (windowed) inverse-square tail ratios along `x_grid`.
pub fn zero_counting_check(table: &ZeroTable, x_grid: &[f64]) -> Result<ZeroCounting> {
    let top = table.max_gamma();
    if x_grid.is_empty() {
        return Err(Error::invalid("empty x grid"));
    }
    if let Some(x) = x_grid.iter().find(|&&x| !(x > 1.0 && x <= top)) {
        return Err(Error::invalid(format!("x = {x} outside (1, {top}]")));
    }
    if x_grid.windows(2).any(|w| !(w[1] > w[0])) {
        return Err(Error::invalid("x grid must increase"));
    }
    let g = table.gammas();
    // suffix sums of 1/|ρ|², summed from the small terms upward
    let mut tail = vec![0.0; g.len() + 1];
    for k in (0..g.len()).rev() {
        tail[k] = tail[k + 1] + 1.0 / (0.25 + g[k] * g[k]);
    }
    let rows = x_grid
        .iter()
        .map(|&x| {
            let n = table.count_up_to(x);
            let growth_ratio = if n >= 2 {
                let nf = n as f64;
                g[n - 1] * nf.ln() / (2.0 * PI * nf)
            } else {
                f64::NAN
            };
            let window = tail_asymptotic(x) - tail_asymptotic(top);
            CountingRow {
                x,
                count: n,
                counting_ratio: n as f64 / (x * x.ln() / (2.0 * PI)),
                growth_ratio,
                tail_ratio: if window > 0.0 { tail[n] / window } else { f64::NAN },
            }
        })
        .collect();
    Ok(ZeroCounting { rows, max_gamma: top })
}

fn deviation_trend(name: &str, devs: &[f64]) -> TestReport {
    let devs: Vec<f64> = devs.iter().copied().filter(|d| d.is_finite()).collect();
    let steps = devs.len().saturating_sub(1);
    let failing = devs.windows(2).filter(|w| w[1] > w[0]).count();
    TestReport::new(
        name,
        failing as f64,
        (steps / 4) as f64,
        devs.len(),
        format!("deviations {devs:.4?}"),
    )
}

impl ZeroCounting {
    /// The row whose `x` is closest to `x`.
    pub fn row_near(&self, x: f64) -> &CountingRow {
        self.rows
            .iter()
            .min_by(|a, b| (a.x - x).abs().total_cmp(&(b.x - x).abs()))
            .expect("rows are nonempty")
    }

    /// Counting and growth ratios within `tol` of one at the last grid point,
    /// their deviations shrinking along the grid in at least three steps out
    /// of four, and the tail ratio within `tail_tol` of one at half the table
    /// height.
    pub fn reports(&self, tol: f64, tail_tol: f64) -> Vec<TestReport> {
        let last = self.rows.last().expect("rows are nonempty");
        let half = self.row_near(0.5 * self.max_gamma);
        let n = self.rows.len();
        vec![
            TestReport::new(
                "zero-count counting ratio",
                (last.counting_ratio - 1.0).abs(),
                tol,
                last.count,
                format!("x={:.4} ratio={:.4}", last.x, last.counting_ratio),
            ),
            deviation_trend(
                "zero-count counting trend",
                &self.rows.iter().map(|r| (r.counting_ratio - 1.0).abs()).collect::<Vec<_>>(),
            ),
            TestReport::new(
                "zero-count growth ratio",
                (last.growth_ratio - 1.0).abs(),
                tol,
                last.count,
                format!("n={} ratio={:.4}", last.count, last.growth_ratio),
            ),
            deviation_trend(
                "zero-count growth trend",
                &self.rows.iter().map(|r| (r.growth_ratio - 1.0).abs()).collect::<Vec<_>>(),
            ),
            TestReport::new(
                "zero-count tail ratio",
                (half.tail_ratio - 1.0).abs(),
                tail_tol,
                n,
                format!("x={:.4} ratio={:.4}", half.x, half.tail_ratio),
            ),
        ]
    }
}

/// `J(T) = Σ_{|γ|≤T} |ζ′(ρ)|⁻²`, counting `±γ`.
pub fn gonek_sum(table: &ZeroTable, horizon: f64) -> Result<f64> {
    let zp = table.zeta_prime().ok_or(Error::MissingZetaPrime)?;
    let k = table.count_up_to(horizon);
    Ok(2.0 * sum_f64(zp[..k].iter().map(|z| 1.0 / z.norm_sqr())))
}

/// `(T, J(T)/T)` on `points` equally spaced horizons over the upper half of
/// the table, `[Γ/2, Γ]`.
pub fn gonek_diagnostic(table: &ZeroTable, points: usize) -> Result<Vec<(f64, f64)>> {
    if points < 2 {
        return Err(Error::invalid("need at least two horizons"));
    }
    let top = table.max_gamma();
    (0..points)
        .map(|i| {
            let t = 0.5 * top * (1.0 + i as f64 / (points - 1) as f64);
            Ok((t, gonek_sum(table, t)? / t))
        })
        .collect()
}

/// Ratio of the largest to the smallest `J(T)/T` on the diagnostic grid;
/// passes iff at most `factor`.
pub fn gonek_report(diagnostic: &[(f64, f64)], factor: f64) -> TestReport {
    let hi = diagnostic.iter().map(|d| d.1).fold(f64::NEG_INFINITY, f64::max);
    let lo = diagnostic.iter().map(|d| d.1).fold(f64::INFINITY, f64::min);
    TestReport::new(
        "gonek stability",
        hi / lo,
        factor,
        diagnostic.len(),
        format!("J/T in [{lo:.4}, {hi:.4}]"),
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_complex::Complex64;

    #[test]
    fn counts_and_ratios() {
        let t = ZeroTable::from_text("14.134725\n21.022040\n25.010858\n30.424876\n32.935062\n", "z").unwrap();
        let c = zero_counting_check(&t, &[14.234725, 22.0, 32.935062]).unwrap();
        assert_eq!(c.rows[0].count, 1);
        assert!(c.rows[0].growth_ratio.is_nan());
        assert_eq!(c.rows[2].count, 5);
        let x = 32.935062f64;
        assert!((c.rows[2].counting_ratio - 5.0 / (x * x.ln() / (2.0 * PI))).abs() < 1e-12);
        assert!((c.rows[2].growth_ratio - x * 5f64.ln() / (10.0 * PI)).abs() < 1e-12);
        assert!(zero_counting_check(&t, &[40.0]).is_err());
        assert!(zero_counting_check(&t, &[20.0, 15.0]).is_err());
    }

    #[test]
    fn gonek_sums() {
        let t = ZeroTable::from_text("1\n2\n3\n", "z")
            .unwrap()
            .with_zeta_prime(vec![Complex64::new(1.0, 0.0), Complex64::new(0.0, 2.0), Complex64::new(0.5, 0.0)])
            .unwrap();
        assert_eq!(gonek_sum(&t, 0.5).unwrap(), 0.0);
        assert_eq!(gonek_sum(&t, 2.0).unwrap(), 2.5);
        assert_eq!(gonek_sum(&t, 3.0).unwrap(), 10.5);
        let d = gonek_diagnostic(&t, 3).unwrap();
        assert_eq!(d.len(), 3);
        assert_eq!(d[0].0, 1.5);
        assert!(matches!(
            gonek_sum(&ZeroTable::from_text("1\n", "z").unwrap(), 1.0),
            Err(Error::MissingZetaPrime)
        ));
        assert!(gonek_report(&[(1.0, 1.0), (2.0, 2.5)], 3.0).passed());
        assert!(!gonek_report(&[(1.0, 1.0), (2.0, 3.5)], 3.0).passed());
    }
}
