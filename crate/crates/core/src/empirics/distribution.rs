use statrs::distribution::{ContinuousCDF, Normal};

use super::TestReport;
use crate::sum::mean_var;
use crate::{Error, Result};

/// `c(α)` of the asymptotic Kolmogorov distribution at `α = 0.01`.
pub const KS_C_ALPHA_001: f64 = 1.628;

/// Sorted real sample with ECDF queries.
#[derive(Clone, Debug, PartialEq)]
pub struct EmpiricalDistribution {
    sorted: Vec<f64>,
}

impl EmpiricalDistribution {
    pub fn new(mut samples: Vec<f64>) -> Result<Self> {
        if samples.is_empty() {
            return Err(Error::invalid("empirical distribution needs at least one sample"));
        }
        if samples.iter().any(|x| x.is_nan()) {
            return Err(Error::invalid("NaN sample"));
        }
        samples.sort_by(f64::total_cmp);
        Ok(Self { sorted: samples })
    }

    pub fn len(&self) -> usize {
        self.sorted.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sorted.is_empty()
    }

    pub fn samples(&self) -> &[f64] {
        &self.sorted
    }

    /// `F_n(x) = #{x_i ≤ x} / n`.
    pub fn ecdf(&self, x: f64) -> f64 {
        self.sorted.partition_point(|&s| s <= x) as f64 / self.sorted.len() as f64
    }

    pub fn mean_sd(&self) -> (f64, f64) {
        let (m, v) = mean_var(&self.sorted);
        (m, v.sqrt())
    }
}

/// Two-sample Kolmogorov–Smirnov test at `α = 0.01`.
pub fn ks_two_sample(a: &EmpiricalDistribution, b: &EmpiricalDistribution) -> TestReport {
    let (x, y) = (a.samples(), b.samples());
    let (n, m) = (x.len(), y.len());
    let (mut i, mut j) = (0, 0);
    let mut d: f64 = 0.0;
    while i < n && j < m {
        let v = x[i].min(y[j]);
        while i < n && x[i] <= v {
            i += 1;
        }
        while j < m && y[j] <= v {
            j += 1;
        }
        d = d.max((i as f64 / n as f64 - j as f64 / m as f64).abs());
    }
    let (nf, mf) = (n as f64, m as f64);
    TestReport::new(
        "ks2",
        d,
        KS_C_ALPHA_001 * ((nf + mf) / (nf * mf)).sqrt(),
        n.min(m),
        format!("n={n} m={m}"),
    )
}

/// One-sample Kolmogorov–Smirnov test against a continuous CDF.
pub fn ks_one_sample(a: &EmpiricalDistribution, cdf: impl Fn(f64) -> f64) -> TestReport {
    let x = a.samples();
    let n = x.len() as f64;
    let d = x
        .iter()
        .enumerate()
        .map(|(i, &v)| {
            let f = cdf(v);
            (f - i as f64 / n).max((i + 1) as f64 / n - f)
        })
        .fold(0.0, f64::max);
    TestReport::new("ks1", d, KS_C_ALPHA_001 / n.sqrt(), x.len(), "")
}

/// KS distance to the normal law with the sample's own mean and deviation.
pub fn ks_normal(a: &EmpiricalDistribution) -> Result<TestReport> {
    let (mean, sd) = a.mean_sd();
    if !(sd > 0.0) {
        return Err(Error::DegenerateFit("sample has zero spread".into()));
    }
    let normal = Normal::new(mean, sd).map_err(|e| Error::invalid(e.to_string()))?;
    let mut r = ks_one_sample(a, |x| normal.cdf(x));
    r.test = "ks-normal".into();
    r.description = format!("mean={mean:.4e} sd={sd:.4e}");
    Ok(r)
}
