use statrs::function::erf::erf;

use super::TestReport;
use crate::regression::{fit_log_log, LinearFit};
use crate::sampler::{exact_increment_second_moment, PathSample};
use crate::spectra::FourierModel;
use crate::sum::sum_f64;
use crate::{Error, Result};

/// `S(x) = Σ_{|λ|≤x} |f_λ|² log₊^{1+ε}|λ|` for each cutoff.
pub fn hunt_partial_sums(model: &FourierModel, cutoffs: &[f64], epsilon: f64) -> Vec<f64> {
    cutoffs
        .iter()
        .map(|&x| {
            sum_f64(
                model
                    .terms()
                    .iter()
                    .filter(|t| t.lambda.abs() <= x && t.lambda.abs() > 1.0)
                    .map(|t| t.coeff.norm_sqr() * t.lambda.abs().ln().powf(1.0 + epsilon)),
            )
        })
        .collect()
}

/// Log-log fit of `E|M(dt) − M(0)|²` against `dt`.
pub fn increment_slope(model: &FourierModel, dt_grid: &[f64]) -> Result<LinearFit> {
    if dt_grid.iter().any(|&d| !(d > 0.0 && d <= 1.0)) {
        return Err(Error::invalid("dt grid must lie in (0, 1]"));
    }
    let ys: Vec<f64> = dt_grid.iter().map(|&d| exact_increment_second_moment(model, d)).collect();
    fit_log_log(dt_grid, &ys)
}

/// `E max_{i≤n} |Z_i|` for independent standard normals, by quadrature of
/// `∫₀^∞ 1 − erf(x/√2)^n dx`.
fn expected_max_abs_normal(n: usize) -> f64 {
    const STEP: f64 = 0.002;
    sum_f64((0..5000).map(|i| {
        let x = (i as f64 + 0.5) * STEP;
        1.0 - erf(x / std::f64::consts::SQRT_2).powi(n as i32)
    })) * STEP
}

/// Hölder exponent from the scaling of the largest increment.
///
/// For each dyadic lag `δ = 2^j·h` up to an eighth of the path, the path is
/// cut into `N` disjoint blocks of length `δ`; the largest block increment is
/// averaged over paths and divided by the expected maximum of `N` independent
/// `|N(0,1)|` variables. The exponent is the log-log slope of the result in
/// `δ`. Paths must share a uniform grid.
pub fn pathwise_holder_exponent(paths: &[PathSample]) -> Result<f64> {
    let first = paths.first().ok_or_else(|| Error::invalid("no paths"))?;
    let n = first.len();
    if n < 33 {
        return Err(Error::invalid("paths need at least 33 points"));
    }
    if paths.iter().any(|p| p.grid != first.grid) {
        return Err(Error::invalid("paths must share one grid"));
    }
    let h = first.grid[1] - first.grid[0];
    let mut lags = Vec::new();
    let mut scaled = Vec::new();
    let mut m = 1;
    while 8 * m < n {
        let blocks = (n - 1) / m;
        let mean_max = sum_f64(paths.iter().map(|p| {
            (0..blocks)
                .map(|j| (p.values[(j + 1) * m] - p.values[j * m]).norm())
                .fold(0.0, f64::max)
        })) / paths.len() as f64;
        lags.push(m as f64 * h);
        scaled.push(mean_max / expected_max_abs_normal(blocks));
        m *= 2;
    }
    Ok(fit_log_log(&lags, &scaled)?.slope)
}

#[derive(Clone, Debug)]
pub struct HolderDiagnostic {
    pub cutoffs: Vec<f64>,
    pub hunt_sums: Vec<f64>,
    pub increment_fit: LinearFit,
    pub pathwise_exponent: Option<f64>,
}

impl HolderDiagnostic {
    /// Share of the last partial sum added by the final cutoff step; a small
    /// value indicates the sums are levelling off.
    pub fn hunt_final_growth(&self) -> f64 {
        match self.hunt_sums.as_slice() {
            [.., a, b] if *b > 0.0 => (b - a) / b,
            _ => 0.0,
        }
    }

    /// Reports: Hunt sums levelling off (final step under half the total),
    /// increment slope within `tol` of `slope_target`, and the pathwise
    /// exponent within `tol` of `exponent_target` when paths were supplied.
    pub fn reports(&self, slope_target: f64, exponent_target: f64, tol: f64) -> Vec<TestReport> {
        let mut out = vec![
            TestReport::new(
                "holder hunt-growth",
                self.hunt_final_growth(),
                0.5,
                self.cutoffs.len(),
                format!("sums {:.4e}", self.hunt_sums.last().copied().unwrap_or(0.0)),
            ),
            TestReport::new(
                "holder increment-slope",
                (self.increment_fit.slope - slope_target).abs(),
                tol,
                self.increment_fit.n,
                format!("slope={:.4}", self.increment_fit.slope),
            ),
        ];
        if let Some(e) = self.pathwise_exponent {
            out.push(TestReport::new(
                "holder pathwise",
                (e - exponent_target).abs(),
                tol,
                0,
                format!("exponent={e:.4}"),
            ));
        }
        out
    }
}

/// Hunt partial sums (with `ε = 0.1`) over the cutoffs, the increment slope
/// over `dt_grid` and, if paths are given, the pathwise exponent.
pub fn holder_diagnostic(
    model: &FourierModel,
    cutoffs: &[f64],
    dt_grid: &[f64],
    paths: Option<&[PathSample]>,
) -> Result<HolderDiagnostic> {
    if cutoffs.windows(2).any(|w| !(w[1] > w[0])) {
        return Err(Error::invalid("cutoffs must increase"));
    }
    let increment_fit = increment_slope(model, dt_grid)?;
    let pathwise_exponent = paths.map(pathwise_holder_exponent).transpose()?;
    Ok(HolderDiagnostic {
        cutoffs: cutoffs.to_vec(),
        hunt_sums: hunt_partial_sums(model, cutoffs, 0.1),
        increment_fit,
        pathwise_exponent,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tangent::fbm_paths;
    use num_complex::Complex64;

    #[test]
    fn expected_max_of_one_normal() {
        // E|Z| = sqrt(2/π)
        assert!((expected_max_abs_normal(1) - (2.0 / std::f64::consts::PI).sqrt()).abs() < 1e-6);
    }

    #[test]
    fn band_limited_slope_is_two() {
        let m = FourierModel::new(
            "bl",
            [(-3.0, Complex64::new(0.2, 0.1)), (0.5, Complex64::new(1.0, 0.0)), (2.0, Complex64::new(0.0, 0.4))],
        )
        .unwrap();
        let dts: Vec<f64> = (0..10).map(|k| 1e-4 * 2f64.powi(k)).collect();
        let fit = increment_slope(&m, &dts).unwrap();
        assert!((fit.slope - 2.0).abs() < 0.01, "{}", fit.slope);
        assert!(increment_slope(&m, &[0.0, 0.1]).is_err());
    }

    #[test]
    fn hunt_sums_level_off_for_finite_models() {
        let m = FourierModel::new("f", (1..=50).map(|k| (k as f64, Complex64::new(1.0 / k as f64, 0.0)))).unwrap();
        let d = holder_diagnostic(&m, &[10.0, 20.0, 40.0, 80.0, 160.0], &[0.01, 0.1, 0.5, 1.0], None).unwrap();
        assert_eq!(d.hunt_final_growth(), 0.0);
        assert!(d.hunt_sums.windows(2).all(|w| w[1] >= w[0]));
    }

    #[test]
    fn pathwise_estimator_calibrates_on_fbm() {
        for (hurst, lo, hi) in [(0.25, 0.2, 0.3), (0.5, 0.45, 0.55), (0.75, 0.7, 0.8)] {
            let paths = fbm_paths(hurst, 1.0, 512, 1.0 / 512.0, 40, 123).unwrap();
            let e = pathwise_holder_exponent(&paths).unwrap();
            assert!(e > lo && e < hi, "H={hurst}: {e}");
        }
    }
}
