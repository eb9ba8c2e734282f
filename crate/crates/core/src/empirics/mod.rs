//! Monte Carlo checks of convergence, ergodicity and path regularity.

mod distribution;
mod ergodic;
mod holder;
mod translated;

pub use distribution::{ks_normal, ks_one_sample, ks_two_sample, EmpiricalDistribution, KS_C_ALPHA_001};
pub use ergodic::{
    covariance_sup, ensemble_mean, equidistribution_character_test, ergodic_average, ergodic_averages, ergodic_check,
    kronecker_weyl_probe, linear_time_average_sd, mixing_probe, Phi, TorusFunction,
};
pub use holder::{
    holder_diagnostic, hunt_partial_sums, increment_slope, pathwise_holder_exponent, HolderDiagnostic,
};
pub use translated::{
    fidi_convergence_test, fidi_panel, sample_limit, sample_translated, trend_report, FidiOutcome, Side,
};

use std::fmt;

/// Outcome of one check: passes iff `statistic ≤ threshold`.
#[derive(Clone, Debug, PartialEq)]
pub struct TestReport {
    pub test: String,
    pub statistic: f64,
    pub threshold: f64,
    pub n: usize,
    pub description: String,
}

impl TestReport {
    pub fn new(test: impl Into<String>, statistic: f64, threshold: f64, n: usize, description: impl Into<String>) -> Self {
        Self {
            test: test.into(),
            statistic,
            threshold,
            n,
            description: description.into(),
        }
    }

    pub fn passed(&self) -> bool {
        self.statistic <= self.threshold
    }

    pub fn verdict(&self) -> &'static str {
        if self.passed() {
            "pass"
        } else {
            "fail"
        }
    }

    pub const CSV_HEADER: &'static str = "test,statistic,threshold,n,verdict";

    pub fn csv_row(&self) -> String {
        format!(
            "{},{:e},{:e},{},{}",
            self.test.replace(',', ";"),
            self.statistic,
            self.threshold,
            self.n,
            self.verdict()
        )
    }
}

impl fmt::Display for TestReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "[{}] {}: statistic {:.4e} vs threshold {:.4e} (n = {})",
            self.verdict(),
            self.test,
            self.statistic,
            self.threshold,
            self.n
        )?;
        if !self.description.is_empty() {
            write!(f, " {}", self.description)?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn verdict_follows_threshold() {
        let r = TestReport::new("a,b", 0.1, 0.2, 10, "");
        assert!(r.passed());
        assert_eq!(r.csv_row(), "a;b,1e-1,2e-1,10,pass");
        assert!(!TestReport::new("x", 0.3, 0.2, 1, "").passed());
        assert!(!TestReport::new("x", f64::NAN, 0.2, 1, "").passed());
    }
}
