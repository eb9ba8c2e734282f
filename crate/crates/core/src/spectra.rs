//! Truncated Fourier data of almost-periodic functions.
//!
//! A [`FourierModel`] is the computational stand-in for an element of the
//! Besicovitch space: finitely many distinct frequencies with nonzero complex
//! amplitudes. Its mean-square (Marcinkiewicz) norm is the `ℓ²` norm of the
//! amplitudes, inner products pair up shared frequencies, and translation
//! rotates each amplitude by `e^{iλv}` without touching the spectrum.

use std::fmt;
use std::fs;
use std::path::Path;

use num_complex::Complex64;

use crate::regression::{fit_log_log, LinearFit};
use crate::series::TrigTable;
use crate::sum::{sum_complex, sum_f64, Cascade};
use crate::{Error, Result};

pub const FORMAT_HEADER: &str = "# apstat-fourier v1";

/// Relative tolerance for matching `λ` with `-λ`.
pub const DEFAULT_PAIR_TOLERANCE: f64 = 1e-9;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Term {
    pub lambda: f64,
    pub coeff: Complex64,
}

/// How a model was cut down from an infinite expansion.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Truncation {
    /// First `n` terms of some enumeration.
    Terms(usize),
    /// All frequencies with `|λ| ≤ T`.
    Horizon(f64),
}

impl fmt::Display for Truncation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Truncation::Terms(n) => write!(f, "terms {n}"),
            Truncation::Horizon(t) => write!(f, "horizon {t}"),
        }
    }
}

impl std::str::FromStr for Truncation {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let mut it = s.split_whitespace();
        let bad = || Error::invalid(format!("bad truncation `{s}`"));
        let kind = it.next().ok_or_else(bad)?;
        let value = it.next().ok_or_else(bad)?;
        match kind {
            "terms" => Ok(Truncation::Terms(value.parse().map_err(|_| bad())?)),
            "horizon" => Ok(Truncation::Horizon(value.parse().map_err(|_| bad())?)),
            _ => Err(bad()),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct FourierModel {
    terms: Vec<Term>,
    label: String,
    truncation: Truncation,
}

impl FourierModel {
    /// Builds a model, sorting by frequency and dropping zero amplitudes.
    ///
    /// Fails on non-finite input or a repeated frequency.
    pub fn new(label: impl Into<String>, terms: impl IntoIterator<Item = (f64, Complex64)>) -> Result<Self> {
        let mut terms: Vec<Term> = terms
            .into_iter()
            .map(|(lambda, coeff)| Term { lambda, coeff })
            .collect();
        if let Some(t) = terms
            .iter()
            .find(|t| !t.lambda.is_finite() || !t.coeff.re.is_finite() || !t.coeff.im.is_finite())
        {
            return Err(Error::invalid(format!("non-finite term at frequency {}", t.lambda)));
        }
        terms.retain(|t| t.coeff != Complex64::new(0.0, 0.0));
        terms.sort_by(|a, b| a.lambda.total_cmp(&b.lambda));
        if let Some(w) = terms.windows(2).find(|w| w[0].lambda == w[1].lambda) {
            return Err(Error::DuplicateFrequency(w[0].lambda));
        }
        let n = terms.len();
        Ok(Self {
            terms,
            label: label.into(),
            truncation: Truncation::Terms(n),
        })
    }

    pub fn with_truncation(mut self, truncation: Truncation) -> Self {
        self.truncation = truncation;
        self
    }

    pub fn with_label(mut self, label: impl Into<String>) -> Self {
        self.label = label.into();
        self
    }

    pub fn terms(&self) -> &[Term] {
        &self.terms
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn truncation(&self) -> Truncation {
        self.truncation
    }

    pub fn frequencies(&self) -> impl Iterator<Item = f64> + '_ {
        self.terms.iter().map(|t| t.lambda)
    }

    pub fn max_abs_frequency(&self) -> f64 {
        self.terms.iter().map(|t| t.lambda.abs()).fold(0.0, f64::max)
    }

    /// Amplitude at an exact frequency, if present.
    pub fn coefficient_at(&self, lambda: f64) -> Option<Complex64> {
        self.terms
            .binary_search_by(|t| t.lambda.total_cmp(&lambda))
            .ok()
            .map(|i| self.terms[i].coeff)
    }

    pub fn scaled(&self, c: Complex64) -> Result<Self> {
        Ok(Self::new(self.label.clone(), self.terms.iter().map(|t| (t.lambda, t.coeff * c)))?
            .with_truncation(self.truncation))
    }

    /// `f_{-λ} = conj(f_λ)` for every term, within `tol` in modulus.
    pub fn is_conjugate_symmetric(&self, tol: f64) -> bool {
        self.terms.iter().all(|t| match self.coefficient_at(-t.lambda) {
            Some(c) => (c - t.coeff.conj()).norm() <= tol,
            None => false,
        })
    }

    /// Direct evaluation of the trigonometric polynomial.
    pub fn eval(&self, t: f64) -> Complex64 {
        sum_complex(self.terms.iter().map(|term| {
            let (s, c) = (term.lambda * t).sin_cos();
            term.coeff * Complex64::new(c, s)
        }))
    }

    /// `‖f‖ = (Σ |f_λ|²)^{1/2}`.
    pub fn parseval_norm(&self) -> f64 {
        self.norm_sqr().sqrt()
    }

    pub fn norm_sqr(&self) -> f64 {
        sum_f64(self.terms.iter().map(|t| t.coeff.norm_sqr()))
    }

    /// `Σ_λ f_λ · conj(g_λ)` over shared frequencies.
    pub fn inner_product(&self, other: &FourierModel) -> Complex64 {
        let (a, b) = (&self.terms, &other.terms);
        let (mut i, mut j) = (0, 0);
        let mut acc = Cascade::new();
        while i < a.len() && j < b.len() {
            match a[i].lambda.total_cmp(&b[j].lambda) {
                std::cmp::Ordering::Less => i += 1,
                std::cmp::Ordering::Greater => j += 1,
                std::cmp::Ordering::Equal => {
                    acc.push(a[i].coeff * b[j].coeff.conj());
                    i += 1;
                    j += 1;
                }
            }
        }
        acc.total()
    }

    /// The model of `t ↦ f(t + v)`: amplitudes rotated by `e^{iλv}`.
    pub fn translate(&self, v: f64) -> FourierModel {
        let terms = self
            .terms
            .iter()
            .map(|t| {
                let (s, c) = (t.lambda * v).sin_cos();
                Term {
                    lambda: t.lambda,
                    coeff: t.coeff * Complex64::new(c, s),
                }
            })
            .collect();
        FourierModel {
            terms,
            label: self.label.clone(),
            truncation: self.truncation,
        }
    }

    pub(crate) fn trig_table(&self) -> TrigTable {
        TrigTable::from_singles(self.terms.iter().map(|t| (t.lambda, t.coeff)))
    }

    /// Serializes to the `apstat-fourier v1` text format.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        out.push_str(FORMAT_HEADER);
        out.push('\n');
        out.push_str(&format!("# label: {}\n", self.label));
        out.push_str(&format!("# truncation: {}\n", self.truncation));
        for t in &self.terms {
            out.push_str(&format!("{:.16e} {:.16e} {:.16e}\n", t.lambda, t.coeff.re, t.coeff.im));
        }
        out
    }

    pub fn from_text(text: &str, origin: &str) -> Result<Self> {
        let parse_err = |line: usize, message: String| Error::Parse {
            path: origin.to_string(),
            line,
            message,
        };
        let mut lines = text.lines().enumerate();
        match lines.next() {
            Some((_, h)) if h.trim_end() == FORMAT_HEADER => {}
            _ => return Err(parse_err(1, format!("expected header `{FORMAT_HEADER}`"))),
        }
        let mut label = String::new();
        let mut truncation = None;
        let mut terms = Vec::new();
        let mut last = f64::NEG_INFINITY;
        for (idx, raw) in lines {
            let lineno = idx + 1;
            let line = raw.trim();
            if line.is_empty() {
                continue;
            }
            if let Some(comment) = line.strip_prefix('#') {
                let comment = comment.trim();
                if let Some(l) = comment.strip_prefix("label:") {
                    label = l.trim().to_string();
                } else if let Some(tr) = comment.strip_prefix("truncation:") {
                    truncation = Some(tr.trim().parse().map_err(|e: Error| parse_err(lineno, e.to_string()))?);
                }
                continue;
            }
            let fields: Vec<&str> = line.split_whitespace().collect();
            if fields.len() != 3 {
                return Err(parse_err(lineno, format!("expected 3 fields, found {}", fields.len())));
            }
            let mut vals = [0.0; 3];
            for (v, f) in vals.iter_mut().zip(&fields) {
                *v = f
                    .parse()
                    .map_err(|_| parse_err(lineno, format!("cannot parse `{f}` as a number")))?;
            }
            if vals[0] <= last {
                return Err(parse_err(lineno, "frequencies must be strictly increasing".into()));
            }
            last = vals[0];
            terms.push((vals[0], Complex64::new(vals[1], vals[2])));
        }
        let model = FourierModel::new(label, terms)?;
        Ok(match truncation {
            Some(t) => model.with_truncation(t),
            None => model,
        })
    }

    pub fn read(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::from_text(&text, &path.display().to_string())
    }
}

/// `min(0.01, 0.1 / max|λ|)`: ten points per fastest oscillation.
pub fn default_quadrature_step(model: &FourierModel) -> f64 {
    let m = model.max_abs_frequency();
    if m > 0.0 {
        (0.1 / m).min(0.01)
    } else {
        0.01
    }
}

fn check_quadrature(half_width: f64, step: f64) -> Result<()> {
    if !(half_width > 0.0) || !half_width.is_finite() {
        return Err(Error::invalid(format!("window half-width must be positive, got {half_width}")));
    }
    if !(step > 0.0) || step >= half_width {
        return Err(Error::InvalidQuadrature { step, half_width });
    }
    Ok(())
}

/// Trapezoid mean of `g` over `[-L, L]`, `g` given as a trigonometric table.
fn window_mean<F>(table: &TrigTable, half_width: f64, step: f64, map: F) -> Complex64
where
    F: Fn(Complex64) -> Complex64,
{
    let intervals = (2.0 * half_width / step).ceil() as usize;
    let h = 2.0 * half_width / intervals as f64;
    let mut acc = Cascade::new();
    table.for_each_uniform(-half_width, h, intervals + 1, |j, v| {
        let w = if j == 0 || j == intervals { 0.5 } else { 1.0 };
        acc.push(map(v) * w);
    });
    acc.total() * h / (2.0 * half_width)
}

/// `((1/2L) ∫_{-L}^{L} |f|²)^{1/2}` by the trapezoid rule.
pub fn marcinkiewicz_seminorm_numeric(model: &FourierModel, half_width: f64, step: f64) -> Result<f64> {
    check_quadrature(half_width, step)?;
    let mean = window_mean(&model.trig_table(), half_width, step, |v| Complex64::new(v.norm_sqr(), 0.0));
    Ok(mean.re.max(0.0).sqrt())
}

/// Window mean of `f(t)·e^{-iat}` over `[-L, L]`.
pub fn estimate_fourier_coefficient(model: &FourierModel, a: f64, half_width: f64, step: f64) -> Result<Complex64> {
    check_quadrature(half_width, step)?;
    let shifted = TrigTable::from_singles(model.terms().iter().map(|t| (t.lambda - a, t.coeff)));
    Ok(window_mean(&shifted, half_width, step, |v| v))
}

/// Partition of the spectrum into `±λ` pairs, unpaired frequencies and zero.
#[derive(Clone, Debug, PartialEq)]
pub struct SpectrumDecomposition {
    /// `(index of λ, index of -λ)` with `λ > 0`, in increasing `λ`.
    pub pairs: Vec<(usize, usize)>,
    /// Indices of frequencies with no negative partner.
    pub residue: Vec<usize>,
    pub zero_index: Option<usize>,
    /// Number of terms in the model this decomposition was built from.
    pub term_count: usize,
    /// Rational independence of the pair and residue frequencies is assumed,
    /// never checked; reports carry this flag.
    pub independence_asserted: bool,
}

impl SpectrumDecomposition {
    /// Number of independent phases (one per pair and per residue term).
    pub fn phase_count(&self) -> usize {
        self.pairs.len() + self.residue.len()
    }
}

/// Greedy matching of `λ > 0` with `-λ` within `pair_tolerance·|λ|`.
pub fn decompose(model: &FourierModel, pair_tolerance: f64) -> Result<SpectrumDecomposition> {
    if !(pair_tolerance >= 0.0) {
        return Err(Error::invalid("pair tolerance must be nonnegative"));
    }
    let terms = model.terms();
    let mut used = vec![false; terms.len()];
    let mut zero_index = None;
    for (i, t) in terms.iter().enumerate() {
        if t.lambda.abs() <= pair_tolerance {
            if zero_index.is_some() {
                return Err(Error::AmbiguousPairing {
                    lambda: t.lambda,
                    candidates: 2,
                });
            }
            zero_index = Some(i);
            used[i] = true;
        }
    }
    let mut pairs = Vec::new();
    for (i, t) in terms.iter().enumerate() {
        if used[i] || t.lambda <= 0.0 {
            continue;
        }
        let tol = pair_tolerance * t.lambda;
        let target = -t.lambda;
        let lo = terms.partition_point(|u| u.lambda < target - tol);
        let hi = terms.partition_point(|u| u.lambda <= target + tol);
        let candidates: Vec<usize> = (lo..hi).filter(|&j| !used[j]).collect();
        match candidates.len() {
            0 => {}
            1 => {
                used[i] = true;
                used[candidates[0]] = true;
                pairs.push((i, candidates[0]));
            }
            n => {
                return Err(Error::AmbiguousPairing {
                    lambda: t.lambda,
                    candidates: n,
                })
            }
        }
    }
    let residue = (0..terms.len()).filter(|&i| !used[i]).collect();
    Ok(SpectrumDecomposition {
        pairs,
        residue,
        zero_index,
        term_count: terms.len(),
        independence_asserted: true,
    })
}

/// Law of a random frequency `ξ` with `P{ξ = λ} = |f_λ|² / ‖f‖²`.
#[derive(Clone, Debug, PartialEq)]
pub struct SpectralMeasure {
    atoms: Vec<(f64, f64)>,
    // sorted |λ| with prefix sums of λ²·m and suffix sums of m
    by_abs: Vec<f64>,
    second_moment_prefix: Vec<f64>,
    tail_suffix: Vec<f64>,
}

impl SpectralMeasure {
    pub fn from_atoms(atoms: Vec<(f64, f64)>) -> Result<Self> {
        if atoms.is_empty() {
            return Err(Error::EmptyModel);
        }
        if atoms.iter().any(|&(l, m)| !l.is_finite() || !(m > 0.0)) {
            return Err(Error::invalid("atoms need finite locations and positive masses"));
        }
        let mut sorted = atoms.clone();
        sorted.sort_by(|a, b| a.0.abs().total_cmp(&b.0.abs()));
        let by_abs: Vec<f64> = sorted.iter().map(|a| a.0.abs()).collect();
        let mut second_moment_prefix = Vec::with_capacity(sorted.len());
        let mut acc = Cascade::new();
        for &(l, m) in &sorted {
            acc.push(l * l * m);
            second_moment_prefix.push(acc.total());
        }
        let mut tail_suffix = vec![0.0; sorted.len()];
        let mut acc = Cascade::new();
        for (k, &(_, m)) in sorted.iter().enumerate().rev() {
            acc.push(m);
            tail_suffix[k] = acc.total();
        }
        let mut atoms = atoms;
        atoms.sort_by(|a, b| a.0.total_cmp(&b.0));
        Ok(Self {
            atoms,
            by_abs,
            second_moment_prefix,
            tail_suffix,
        })
    }

    pub fn atoms(&self) -> &[(f64, f64)] {
        &self.atoms
    }

    pub fn total_mass(&self) -> f64 {
        sum_f64(self.atoms.iter().map(|a| a.1))
    }

    /// `T(x) = E[ξ² 1{|ξ| ≤ x}]`.
    pub fn truncated_second_moment(&self, x: f64) -> f64 {
        let k = self.by_abs.partition_point(|&a| a <= x);
        if k == 0 {
            0.0
        } else {
            self.second_moment_prefix[k - 1]
        }
    }

    /// `R(x) = P{|ξ| > x}`.
    pub fn tail_mass(&self, x: f64) -> f64 {
        let k = self.by_abs.partition_point(|&a| a <= x);
        if k == self.by_abs.len() {
            0.0
        } else {
            self.tail_suffix[k]
        }
    }

    /// `E[ξ²]`.
    pub fn second_moment(&self) -> f64 {
        *self.second_moment_prefix.last().unwrap_or(&0.0)
    }

    /// Largest single atom mass among `|λ| > x`.
    pub fn max_atom_beyond(&self, x: f64) -> f64 {
        self.atoms
            .iter()
            .filter(|a| a.0.abs() > x)
            .map(|a| a.1)
            .fold(0.0, f64::max)
    }

    /// `E[1 - cos(ξ t)]`, evaluated as `Σ m·2 sin²(λt/2)`.
    pub fn one_minus_cos_mean(&self, t: f64) -> f64 {
        sum_f64(self.atoms.iter().map(|&(l, m)| {
            let s = (0.5 * l * t).sin();
            2.0 * m * s * s
        }))
    }
}

pub fn spectral_measure(model: &FourierModel) -> Result<SpectralMeasure> {
    if model.is_empty() {
        return Err(Error::EmptyModel);
    }
    let total = model.norm_sqr();
    SpectralMeasure::from_atoms(model.terms().iter().map(|t| (t.lambda, t.coeff.norm_sqr() / total)).collect())
}

#[derive(Clone, Copy, Debug)]
pub struct ScalingFit {
    /// Growth exponent of `T(x)`.
    pub alpha_hat: f64,
    /// Decay exponent of `R(x)` (positive for a decaying tail).
    pub beta_hat: f64,
    /// Regular-variation index estimate; the slope of `log T`.
    pub theta_hat: f64,
    pub second_moment_fit: LinearFit,
    pub tail_fit: LinearFit,
}

/// Log-log least-squares slopes of `T(x)` and `R(x)` over `x_grid`.
pub fn fit_scaling_exponents(measure: &SpectralMeasure, x_grid: &[f64]) -> Result<ScalingFit> {
    if x_grid.len() < 4 {
        return Err(Error::DegenerateFit("need at least 4 grid points".into()));
    }
    if x_grid.windows(2).any(|w| !(w[1] > w[0])) || x_grid[0] <= 0.0 {
        return Err(Error::invalid("grid must be positive and strictly increasing"));
    }
    let ts: Vec<f64> = x_grid.iter().map(|&x| measure.truncated_second_moment(x)).collect();
    let rs: Vec<f64> = x_grid.iter().map(|&x| measure.tail_mass(x)).collect();
    if ts.windows(2).all(|w| w[0] == w[1]) {
        return Err(Error::DegenerateFit("T(x) is constant over the grid".into()));
    }
    if ts.iter().chain(&rs).any(|&v| v <= 0.0) {
        return Err(Error::DegenerateFit("grid leaves the support of the measure".into()));
    }
    let second_moment_fit = fit_log_log(x_grid, &ts)?;
    let tail_fit = fit_log_log(x_grid, &rs)?;
    Ok(ScalingFit {
        alpha_hat: second_moment_fit.slope,
        beta_hat: -tail_fit.slope,
        theta_hat: second_moment_fit.slope,
        second_moment_fit,
        tail_fit,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use std::f64::consts::PI;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn construction_sorts_and_drops_zeros() {
        let m = FourierModel::new("x", [(2.0, c(1.0, 0.0)), (-1.0, c(0.0, 0.0)), (1.0, c(0.5, 0.5))]).unwrap();
        assert_eq!(m.len(), 2);
        assert_eq!(m.terms()[0].lambda, 1.0);
        assert!(matches!(
            FourierModel::new("x", [(1.0, c(1.0, 0.0)), (1.0, c(2.0, 0.0))]),
            Err(Error::DuplicateFrequency(_))
        ));
        assert!(FourierModel::new("x", [(f64::NAN, c(1.0, 0.0))]).is_err());
    }

    #[test]
    fn parseval_examples() {
        let m = FourierModel::new("e1", [(1.0, c(1.0, 0.0))]).unwrap();
        assert_eq!(m.parseval_norm(), 1.0);
        let m = FourierModel::new("cos", [(1.0, c(2.0, 0.0)), (-1.0, c(2.0, 0.0))]).unwrap();
        assert!((m.parseval_norm() - 8f64.sqrt()).abs() < 1e-15);
    }

    #[test]
    fn marcinkiewicz_examples() {
        let one = FourierModel::new("1", [(0.0, c(1.0, 0.0))]).unwrap();
        assert!((marcinkiewicz_seminorm_numeric(&one, 3.0, 0.01).unwrap() - 1.0).abs() < 1e-12);
        let e1 = FourierModel::new("e1", [(1.0, c(1.0, 0.0))]).unwrap();
        let v = marcinkiewicz_seminorm_numeric(&e1, 1000.0, 0.01).unwrap();
        assert!((v - 1.0).abs() < 0.05);
        let two = FourierModel::new("two", [(1.0, c(1.0, 0.0)), (PI, c(1.0, 0.0))]).unwrap();
        let v = marcinkiewicz_seminorm_numeric(&two, 2000.0, default_quadrature_step(&two)).unwrap();
        assert!((v - 2f64.sqrt()).abs() < 0.05, "{v}");
    }

    #[test]
    fn quadrature_rejects_bad_step() {
        let e1 = FourierModel::new("e1", [(1.0, c(1.0, 0.0))]).unwrap();
        assert!(matches!(
            marcinkiewicz_seminorm_numeric(&e1, 1.0, 1.0),
            Err(Error::InvalidQuadrature { .. })
        ));
        assert!(marcinkiewicz_seminorm_numeric(&e1, 1.0, 0.0).is_err());
        assert!(marcinkiewicz_seminorm_numeric(&e1, -1.0, 0.1).is_err());
    }

    #[test]
    fn seminorm_error_shrinks_with_window() {
        // frequency gaps >= 0.5
        let m = FourierModel::new(
            "gap",
            [(-2.0, c(0.3, 0.1)), (-0.5, c(1.0, -0.2)), (0.7, c(0.4, 0.4)), (1.9, c(-0.8, 0.0))],
        )
        .unwrap();
        let exact = m.parseval_norm();
        let errs: Vec<f64> = [1e2, 1e3, 1e4]
            .iter()
            .map(|&l| (marcinkiewicz_seminorm_numeric(&m, l, default_quadrature_step(&m)).unwrap() - exact).abs())
            .collect();
        assert!(errs[0] > errs[1] && errs[1] > errs[2], "{errs:?}");
    }

    #[test]
    fn coefficient_estimates() {
        let m = FourierModel::new("3e2", [(2.0, c(3.0, 0.0))]).unwrap();
        let step = default_quadrature_step(&m);
        let on = estimate_fourier_coefficient(&m, 2.0, 500.0, step).unwrap();
        assert!((on - c(3.0, 0.0)).norm() < 0.02);
        let off = estimate_fourier_coefficient(&m, 5.0, 500.0, step).unwrap();
        assert!(off.norm() < 0.01);
        let zero_free = FourierModel::new("z", [(-1.0, c(1.0, 0.0)), (1.5, c(0.0, 2.0))]).unwrap();
        let mean = estimate_fourier_coefficient(&zero_free, 0.0, 1000.0, 0.01).unwrap();
        assert!(mean.norm() < 0.01);
    }

    #[test]
    fn inner_product_examples() {
        let f = FourierModel::new("f", [(1.0, c(1.0, 0.0)), (2.0, c(2.0, 0.0))]).unwrap();
        let g = FourierModel::new("g", [(2.0, c(3.0, 0.0))]).unwrap();
        assert_eq!(f.inner_product(&g), c(6.0, 0.0));
        assert!((f.inner_product(&f).re - f.parseval_norm().powi(2)).abs() < 1e-14);
        let h = FourierModel::new("h", [(5.0, c(1.0, 0.0))]).unwrap();
        assert_eq!(f.inner_product(&h), c(0.0, 0.0));
    }

    #[test]
    fn translate_examples() {
        let f = FourierModel::new("f", [(1.0, c(1.0, 0.0))]).unwrap();
        assert_eq!(f.translate(0.0), f);
        let g = f.translate(PI);
        assert!((g.terms()[0].coeff - c(-1.0, 0.0)).norm() < 1e-15);
    }

    #[test]
    fn decompose_examples() {
        let m = FourierModel::new("s", [-2.0, -1.0, 1.0, 2.0].map(|l| (l, c(1.0, 0.0)))).unwrap();
        let d = decompose(&m, DEFAULT_PAIR_TOLERANCE).unwrap();
        assert_eq!(d.pairs, vec![(2, 1), (3, 0)]);
        assert!(d.residue.is_empty() && d.zero_index.is_none());

        let m = FourierModel::new("r", [1.0, 2.0].map(|l| (l, c(1.0, 0.0)))).unwrap();
        let d = decompose(&m, DEFAULT_PAIR_TOLERANCE).unwrap();
        assert!(d.pairs.is_empty());
        assert_eq!(d.residue, vec![0, 1]);

        let m = FourierModel::new("z", [-1.0, 0.0, 1.0, 3.0].map(|l| (l, c(1.0, 0.0)))).unwrap();
        let d = decompose(&m, DEFAULT_PAIR_TOLERANCE).unwrap();
        assert_eq!(d.zero_index, Some(1));
        assert_eq!(d.pairs, vec![(2, 0)]);
        assert_eq!(d.residue, vec![3]);
    }

    #[test]
    fn decompose_flags_ambiguity() {
        let m = FourierModel::new("a", [(-1.0 - 1e-12, c(1.0, 0.0)), (-1.0, c(1.0, 0.0)), (1.0, c(1.0, 0.0))]).unwrap();
        assert!(matches!(
            decompose(&m, 1e-9),
            Err(Error::AmbiguousPairing { candidates: 2, .. })
        ));
    }

    #[test]
    fn spectral_measure_examples() {
        let single = FourierModel::new("s", [(3.0, c(0.0, 2.0))]).unwrap();
        let mu = spectral_measure(&single).unwrap();
        assert_eq!(mu.atoms(), &[(3.0, 1.0)]);
        let two = FourierModel::new("t", [(1.0, c(1.0, 0.0)), (2.0, c(1.0, 0.0))]).unwrap();
        let mu = spectral_measure(&two).unwrap();
        assert_eq!(mu.atoms(), &[(1.0, 0.5), (2.0, 0.5)]);
        let empty = FourierModel::new("e", []).unwrap();
        assert!(matches!(spectral_measure(&empty), Err(Error::EmptyModel)));
    }

    #[test]
    fn truncated_moment_and_tail() {
        let m = FourierModel::new(
            "m",
            [(-2.0, c(1.0, 0.0)), (0.0, c(1.0, 0.0)), (1.0, c(1.0, 0.0)), (4.0, c(1.0, 0.0))],
        )
        .unwrap();
        let mu = spectral_measure(&m).unwrap();
        // beyond the support
        assert!((mu.truncated_second_moment(10.0) - (4.0 + 0.0 + 1.0 + 16.0) / 4.0).abs() < 1e-15);
        assert_eq!(mu.tail_mass(10.0), 0.0);
        // at zero
        assert_eq!(mu.truncated_second_moment(0.0), 0.0);
        assert!((mu.tail_mass(0.0) - 0.75).abs() < 1e-15);
        // right-continuity at an atom
        assert!((mu.truncated_second_moment(2.0) - 5.0 / 4.0).abs() < 1e-15);
        assert!((mu.tail_mass(2.0) - 0.25).abs() < 1e-15);
    }

    #[test]
    fn geometric_measure_has_exponent_one() {
        // atoms at 2^j with mass ∝ 2^{-j}: T(x) grows linearly
        let atoms: Vec<(f64, f64)> = (0..40).map(|j| (2f64.powi(j), 2f64.powi(-j))).collect();
        let total: f64 = atoms.iter().map(|a| a.1).sum();
        let atoms = atoms.into_iter().map(|(l, m)| (l, m / total)).collect();
        let mu = SpectralMeasure::from_atoms(atoms).unwrap();
        let grid: Vec<f64> = (0..30).map(|k| 10f64.powf(1.0 + 0.2 * k as f64)).collect();
        let fit = fit_scaling_exponents(&mu, &grid).unwrap();
        assert!((fit.theta_hat - 1.0).abs() < 0.1, "{}", fit.theta_hat);
        assert!((fit.beta_hat - 1.0).abs() < 0.1, "{}", fit.beta_hat);
    }

    #[test]
    fn scaling_fit_errors() {
        let mu = SpectralMeasure::from_atoms(vec![(5.0, 1.0)]).unwrap();
        assert!(matches!(
            fit_scaling_exponents(&mu, &[1.0, 2.0, 3.0, 4.0]),
            Err(Error::DegenerateFit(_))
        ));
        assert!(fit_scaling_exponents(&mu, &[1.0, 2.0, 3.0]).is_err());
    }

    #[test]
    fn text_round_trip_and_errors() {
        let m = FourierModel::new("demo", [(-1.25, c(0.1, -0.3)), (0.5, c(1.0 / 3.0, 2.0))])
            .unwrap()
            .with_truncation(Truncation::Horizon(12.5));
        let back = FourierModel::from_text(&m.to_text(), "mem").unwrap();
        assert_eq!(back, m);
        assert!(FourierModel::from_text("1 2 3\n", "mem").is_err());
        let unsorted = format!("{FORMAT_HEADER}\n2 1 0\n1 1 0\n");
        match FourierModel::from_text(&unsorted, "mem") {
            Err(Error::Parse { line, .. }) => assert_eq!(line, 3),
            other => panic!("{other:?}"),
        }
    }

    fn arb_model() -> impl Strategy<Value = FourierModel> {
        prop::collection::btree_map(-1000i32..1000, (-2.0f64..2.0, -2.0f64..2.0), 1..40).prop_map(|m| {
            FourierModel::new("arb", m.into_iter().map(|(k, (re, im))| (k as f64 * 0.037, c(re, im)))).unwrap()
        })
    }

    proptest! {
        #[test]
        fn cauchy_schwarz(f in arb_model(), g in arb_model()) {
            prop_assert!(f.inner_product(&g).norm() <= f.parseval_norm() * g.parseval_norm() * (1.0 + 1e-12));
        }

        #[test]
        fn translation_keeps_spectrum_and_norm(f in arb_model(), v in -1e4f64..1e4) {
            let g = f.translate(v);
            prop_assert!(f.frequencies().eq(g.frequencies()));
            prop_assert!((f.parseval_norm() - g.parseval_norm()).abs() <= 1e-12 * f.parseval_norm());
        }

        #[test]
        fn measure_functions_are_monotone(f in arb_model(), xs in prop::collection::vec(0.0f64..40.0, 2..20)) {
            let mu = spectral_measure(&f).unwrap();
            prop_assert!((mu.total_mass() - 1.0).abs() < 1e-12);
            let mut xs = xs;
            xs.sort_by(f64::total_cmp);
            for w in xs.windows(2) {
                prop_assert!(mu.truncated_second_moment(w[0]) <= mu.truncated_second_moment(w[1]));
                prop_assert!(mu.tail_mass(w[0]) >= mu.tail_mass(w[1]));
            }
            prop_assert!((mu.truncated_second_moment(1e9) - mu.second_moment()).abs() < 1e-12 * mu.second_moment().max(1.0));
        }
    }
}
