use std::fmt;
use std::str::FromStr;
use std::sync::{Arc, OnceLock};

use num_complex::Complex64;
use rayon::prelude::*;

use super::analytic::{zeta_evaluate, DEFAULT_TERMS, MULTIPLE_ZERO_THRESHOLD};
use super::sieve::{summatory, ArithmeticFunction, ArithmeticTables, Convention};
use super::table::ZeroTable;
use crate::empirics::TestReport;
use crate::sampler::PhaseAssignment;
use crate::spectra::{decompose, FourierModel, Truncation, DEFAULT_PAIR_TOLERANCE};
use crate::sum::sum_f64;
use crate::{Error, Result};

/// Which summatory function an expansion over zeros describes.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum ExplicitKind {
    /// `ψ̂(t) = (ψ̃(e^t) − e^t)e^{−t/2}`, coefficients `1/ρ`.
    Psi,
    /// `M̂(t) = e^{−t/2}M̃(e^t)`, coefficients `1/(ρζ′(ρ))`.
    Mertens,
    /// `L̂(t) = e^{−t/2}L̃(e^t)`, coefficients `ζ(2ρ)/(ρζ′(ρ))`.
    Liouville,
}

impl ExplicitKind {
    pub const ALL: [ExplicitKind; 3] = [ExplicitKind::Psi, ExplicitKind::Mertens, ExplicitKind::Liouville];

    pub fn name(self) -> &'static str {
        match self {
            ExplicitKind::Psi => "psi",
            ExplicitKind::Mertens => "mertens",
            ExplicitKind::Liouville => "liouville",
        }
    }

    fn function(self) -> ArithmeticFunction {
        match self {
            ExplicitKind::Psi => ArithmeticFunction::VonMangoldt,
            ExplicitKind::Mertens => ArithmeticFunction::Moebius,
            ExplicitKind::Liouville => ArithmeticFunction::Liouville,
        }
    }

    /// Sign of the oscillating sum in the expansion.
    pub fn sign(self) -> f64 {
        match self {
            ExplicitKind::Psi => -1.0,
            _ => 1.0,
        }
    }
}

impl fmt::Display for ExplicitKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for ExplicitKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "psi" => Ok(ExplicitKind::Psi),
            "mertens" => Ok(ExplicitKind::Mertens),
            "liouville" => Ok(ExplicitKind::Liouville),
            _ => Err(Error::invalid(format!("unknown explicit-formula kind `{s}`"))),
        }
    }
}

/// Oscillating part of an explicit formula truncated at `|γ| ≤ horizon`.
#[derive(Clone, Debug)]
pub struct ExplicitModel {
    pub kind: ExplicitKind,
    pub model: FourierModel,
    pub horizon: f64,
}

impl ExplicitModel {
    pub fn zero_count(&self) -> usize {
        self.model.len() / 2
    }

    /// Real values of the oscillating sum (all phases equal to one).
    pub fn evaluate(&self, t_grid: &[f64]) -> Result<Vec<f64>> {
        if self.model.is_empty() {
            return Ok(vec![0.0; t_grid.len()]);
        }
        let d = Arc::new(decompose(&self.model, DEFAULT_PAIR_TOLERANCE)?);
        let table = PhaseAssignment::ones(d).table(&self.model)?;
        Ok(t_grid.par_iter().map(|&t| table.eval(t).re).collect())
    }

    /// Right-hand side of the expansion: `±` the oscillating sum plus the
    /// remainder.
    pub fn expansion(&self, t_grid: &[f64]) -> Result<Vec<f64>> {
        let osc = self.evaluate(t_grid)?;
        t_grid
            .iter()
            .zip(osc)
            .map(|(&t, v)| Ok(self.kind.sign() * v + explicit_remainder(self.kind, t)?))
            .collect()
    }
}

/// Builds the expansion over the zeros with `γ ≤ horizon`, as conjugate pairs
/// at `±γ`.
///
/// The Mertens and Liouville kinds need `ζ′` and reject any zero with
/// `|ζ′(ρ)|` below the multiple-zero threshold. A horizon below `γ₁` gives an
/// empty model.
pub fn build_explicit_model(kind: ExplicitKind, table: &ZeroTable, horizon: f64) -> Result<ExplicitModel> {
    if !(horizon <= table.max_gamma()) {
        return Err(Error::invalid(format!(
            "horizon {horizon} beyond the largest ordinate {}",
            table.max_gamma()
        )));
    }
    let k = table.count_up_to(horizon);
    let gammas = &table.gammas()[..k];
    let coeffs: Vec<Complex64> = match kind {
        ExplicitKind::Psi => gammas.iter().map(|&g| Complex64::new(0.5, g).inv()).collect(),
        ExplicitKind::Mertens | ExplicitKind::Liouville => {
            let zp = table.zeta_prime().ok_or(Error::MissingZetaPrime)?;
            gammas
                .par_iter()
                .zip(&zp[..k])
                .map(|(&g, &d)| {
                    if d.norm() < MULTIPLE_ZERO_THRESHOLD {
                        return Err(Error::SuspectedMultipleZero {
                            gamma: g,
                            modulus: d.norm(),
                        });
                    }
                    let base = (Complex64::new(0.5, g) * d).inv();
                    Ok(match kind {
                        ExplicitKind::Liouville => zeta_evaluate(Complex64::new(1.0, 2.0 * g), DEFAULT_TERMS)? * base,
                        _ => base,
                    })
                })
                .collect::<Result<_>>()?
        }
    };
    let terms = gammas
        .iter()
        .zip(&coeffs)
        .flat_map(|(&g, &c)| [(g, c), (-g, c.conj())]);
    let model = FourierModel::new(format!("{kind}_ap"), terms)?.with_truncation(Truncation::Horizon(horizon));
    Ok(ExplicitModel { kind, model, horizon })
}

fn odd_zeta_values() -> &'static [f64] {
    static CACHE: OnceLock<Vec<f64>> = OnceLock::new();
    // ζ(2n+1) for n = 1..=64; beyond that ζ(2n+1) = 1 to double precision
    CACHE.get_or_init(|| {
        (1..=64)
            .map(|n| zeta_evaluate(Complex64::new(2.0 * n as f64 + 1.0, 0.0), DEFAULT_TERMS).unwrap().re)
            .collect()
    })
}

/// Terms `(−1)^{n−1}(2π)^{2n}e^{−(2n+1/2)t}/((2n)!·n·ζ(2n+1))` of the
/// trivial-zero series, stopping after the terms have peaked and the next one
/// is below `10⁻¹⁴`.
fn trivial_zero_terms(t: f64) -> Vec<f64> {
    let zetas = odd_zeta_values();
    let log_two_pi = (2.0 * std::f64::consts::PI).ln();
    let mut out = Vec::new();
    let mut log_fact = 0.0; // ln (2n)!
    for n in 1usize.. {
        let m = 2 * n;
        log_fact += ((m - 1) as f64).ln() + (m as f64).ln();
        let z = zetas.get(n - 1).copied().unwrap_or(1.0);
        let mag = (m as f64 * log_two_pi - (m as f64 + 0.5) * t - log_fact).exp() / (n as f64 * z);
        let past_peak = m as f64 > 2.0 * std::f64::consts::PI * (-t).exp();
        if past_peak && mag < 1e-14 {
            break;
        }
        out.push(if n % 2 == 1 { mag } else { -mag });
    }
    out
}

/// Non-oscillating remainder of the expansion at `t > 0`.
///
/// `ψ`: `−log(2π)e^{−t/2} − (e^{−t/2}/2)log(1 − e^{−2t})`, using
/// `ζ′(0)/ζ(0) = log 2π`. `M`: `−2e^{−t/2}` plus the trivial-zero series.
/// `L`: the constant `1/ζ(1/2)`; the decaying part is taken as zero.
pub fn explicit_remainder(kind: ExplicitKind, t: f64) -> Result<f64> {
    if !(t > 0.0) || !t.is_finite() {
        return Err(Error::Domain(format!("remainder needs t > 0, got {t}")));
    }
    let damp = (-0.5 * t).exp();
    Ok(match kind {
        ExplicitKind::Psi => {
            -(2.0 * std::f64::consts::PI).ln() * damp - 0.5 * damp * (-(-2.0 * t).exp()).ln_1p()
        }
        ExplicitKind::Mertens => -2.0 * damp + sum_f64(trivial_zero_terms(t)),
        ExplicitKind::Liouville => liouville_constant(),
    })
}

/// `1/ζ(1/2)`.
pub fn liouville_constant() -> f64 {
    1.0 / zeta_evaluate(Complex64::new(0.5, 0.0), DEFAULT_TERMS).unwrap().re
}

/// The normalized summatory function `ψ̂`, `M̂` or `L̂` at `t`, from sieved
/// data under the midpoint convention.
pub fn normalized_summatory(kind: ExplicitKind, tables: &ArithmeticTables, t: f64) -> Result<f64> {
    let x = t.exp();
    let s = summatory(tables, kind.function(), x, Convention::Midpoint)?;
    let damp = (-0.5 * t).exp();
    Ok(match kind {
        ExplicitKind::Psi => (s - x) * damp,
        _ => s * damp,
    })
}

/// Gap between the sieved normalized summatory function and its truncated
/// expansion over a grid.
#[derive(Clone, Debug, PartialEq)]
pub struct ExplicitCheck {
    pub kind: ExplicitKind,
    pub horizon: f64,
    pub zero_count: usize,
    pub rms_gap: f64,
    pub max_gap: f64,
    /// RMS gap with no zeros at all (remainder only).
    pub baseline_rms_gap: f64,
    pub grid_len: usize,
}

impl ExplicitCheck {
    /// Passes iff the RMS gap is at most `threshold`.
    pub fn report(&self, threshold: f64) -> TestReport {
        TestReport::new(
            format!("explicit {} rms", self.kind),
            self.rms_gap,
            threshold,
            self.grid_len,
            format!(
                "T={:.6} zeros={} max={:.4e} baseline={:.4e}",
                self.horizon, self.zero_count, self.max_gap, self.baseline_rms_gap
            ),
        )
    }
}

fn rms(xs: &[f64]) -> f64 {
    (sum_f64(xs.iter().map(|x| x * x)) / xs.len() as f64).sqrt()
}

/// Compares the sieved left-hand side with the expansion on `t_grid`.
pub fn explicit_formula_check(
    tables: &ArithmeticTables,
    model: &ExplicitModel,
    t_grid: &[f64],
) -> Result<ExplicitCheck> {
    if t_grid.is_empty() {
        return Err(Error::invalid("empty t grid"));
    }
    let t_max = t_grid.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if t_max.exp() > tables.limit() as f64 {
        return Err(Error::Domain(format!(
            "e^{t_max} exceeds the sieve limit {}",
            tables.limit()
        )));
    }
    let lhs: Vec<f64> = t_grid
        .iter()
        .map(|&t| normalized_summatory(model.kind, tables, t))
        .collect::<Result<_>>()?;
    let rhs = model.expansion(t_grid)?;
    let baseline: Vec<f64> = t_grid
        .iter()
        .zip(&lhs)
        .map(|(&t, l)| Ok(l - explicit_remainder(model.kind, t)?))
        .collect::<Result<_>>()?;
    let gaps: Vec<f64> = lhs.iter().zip(&rhs).map(|(l, r)| l - r).collect();
    Ok(ExplicitCheck {
        kind: model.kind,
        horizon: model.horizon,
        zero_count: model.zero_count(),
        rms_gap: rms(&gaps),
        max_gap: gaps.iter().fold(0.0, |m, g| m.max(g.abs())),
        baseline_rms_gap: rms(&baseline),
        grid_len: t_grid.len(),
    })
}

/// Runs [`explicit_formula_check`] for each horizon, in the given order.
pub fn explicit_truncation_scan(
    kind: ExplicitKind,
    tables: &ArithmeticTables,
    table: &ZeroTable,
    horizons: &[f64],
    t_grid: &[f64],
) -> Result<Vec<ExplicitCheck>> {
    horizons
        .iter()
        .map(|&h| explicit_formula_check(tables, &build_explicit_model(kind, table, h)?, t_grid))
        .collect()
}

/// Counts scan steps where the RMS gap fails to decrease strictly; passes iff
/// there are none.
pub fn strict_decrease_report(name: &str, checks: &[ExplicitCheck]) -> TestReport {
    let failing = checks.windows(2).filter(|w| !(w[1].rms_gap < w[0].rms_gap)).count();
    let gaps: Vec<f64> = checks.iter().map(|c| c.rms_gap).collect();
    TestReport::new(
        name,
        failing as f64,
        0.0,
        checks.len(),
        format!("rms gaps {gaps:.4?}"),
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::zeta::sieve::sieve;

    fn small_table() -> ZeroTable {
        ZeroTable::from_text(
            "14.134725141734693790\n21.022039638771554993\n25.010857580145688763\n",
            "t",
        )
        .unwrap()
    }

    #[test]
    fn psi_model_with_one_zero() {
        let t = small_table();
        let m = build_explicit_model(ExplicitKind::Psi, &t, 15.0).unwrap();
        assert_eq!(m.zero_count(), 1);
        let c = m.model.coefficient_at(t.gammas()[0]).unwrap();
        assert!((c.norm() - 1.0 / (0.25 + t.gammas()[0].powi(2)).sqrt()).abs() < 1e-15);
        assert!(m.model.is_conjugate_symmetric(0.0));
        assert_eq!(build_explicit_model(ExplicitKind::Psi, &t, 10.0).unwrap().zero_count(), 0);
        assert!(build_explicit_model(ExplicitKind::Psi, &t, 30.0).is_err());
    }

    #[test]
    fn mertens_needs_nonvanishing_derivatives() {
        let t = small_table();
        assert!(matches!(
            build_explicit_model(ExplicitKind::Mertens, &t, 25.0),
            Err(Error::MissingZetaPrime)
        ));
        let flagged = t
            .clone()
            .with_zeta_prime(vec![Complex64::new(1.0, 0.0), Complex64::new(1e-8, 0.0), Complex64::new(1.0, 0.0)])
            .unwrap();
        assert!(matches!(
            build_explicit_model(ExplicitKind::Mertens, &flagged, 25.0),
            Err(Error::SuspectedMultipleZero { .. })
        ));
        assert!(build_explicit_model(ExplicitKind::Mertens, &flagged, 15.0).is_ok());
    }

    #[test]
    fn evaluation_is_real_sum_of_pairs() {
        let t = small_table().with_computed_zeta_prime(1e-5).unwrap();
        for kind in ExplicitKind::ALL {
            let m = build_explicit_model(kind, &t, t.max_gamma()).unwrap();
            let grid = [0.3, 1.7, 4.0];
            let v = m.evaluate(&grid).unwrap();
            for (x, &s) in v.iter().zip(&grid) {
                let direct = m.model.eval(s);
                assert!((x - direct.re).abs() < 1e-12 && direct.im.abs() < 1e-12);
            }
        }
    }

    #[test]
    fn remainders() {
        assert!(explicit_remainder(ExplicitKind::Psi, 20.0).unwrap().abs() < 1e-4);
        assert!(explicit_remainder(ExplicitKind::Psi, 0.0).is_err());
        assert!(explicit_remainder(ExplicitKind::Mertens, -1.0).is_err());
        let c = explicit_remainder(ExplicitKind::Liouville, 3.0).unwrap();
        assert!((c + 0.68477).abs() < 1e-5, "{c}");
        assert!((c * -1.4603545088095868 - 1.0).abs() < 1e-12);
    }

    #[test]
    fn trivial_zero_series_decays_factorially() {
        // at x = e the eleventh term is below 10⁻¹⁴, so ten terms are kept
        let terms = trivial_zero_terms(1.0);
        assert_eq!(terms.len(), 10);
        assert!(terms[0] > 0.0 && terms[1] < 0.0);
        // the first term in closed form
        let z3 = 1.2020569031595942;
        let first = (2.0 * std::f64::consts::PI).powi(2) * (-2.5f64).exp() / (2.0 * z3);
        assert!((terms[0] - first).abs() < 1e-14);
        // small t: terms grow before decaying
        assert!(trivial_zero_terms(0.01).len() > 10);
    }

    #[test]
    fn check_rejects_grid_beyond_sieve() {
        let tables = sieve(1000).unwrap();
        let table = small_table();
        let m = build_explicit_model(ExplicitKind::Psi, &table, table.max_gamma()).unwrap();
        assert!(matches!(
            explicit_formula_check(&tables, &m, &[1.0, 7.0]),
            Err(Error::Domain(_))
        ));
        let c = explicit_formula_check(&tables, &m, &[1.0, 2.0, 6.5]).unwrap();
        assert_eq!(c.zero_count, 3);
        assert!(c.max_gap >= c.rms_gap);
    }

    #[test]
    fn strict_decrease() {
        let mk = |g| ExplicitCheck {
            kind: ExplicitKind::Psi,
            horizon: 0.0,
            zero_count: 0,
            rms_gap: g,
            max_gap: g,
            baseline_rms_gap: 1.0,
            grid_len: 1,
        };
        assert!(strict_decrease_report("d", &[mk(0.5), mk(0.3), mk(0.2)]).passed());
        assert!(!strict_decrease_report("d", &[mk(0.5), mk(0.5), mk(0.2)]).passed());
    }
}
