//! Realizations of the limit process `M_f = Σ V_λ f_λ e^{iλt}`.
//!
//! Phases are uniform on the unit circle, independent across `±λ` pairs and
//! unpaired frequencies; the negative member of a pair receives the conjugate
//! phase and frequency zero receives `1`.

use std::f64::consts::TAU;
use std::fmt::Write as _;
use std::fs;
use std::path::Path;
use std::sync::Arc;

use num_complex::Complex64;
use rand::RngCore;

use crate::rng::{self, Domain};
use crate::series::{PairTerm, TrigTable};
use crate::spectra::{FourierModel, SpectrumDecomposition};
use crate::sum::{sum_complex, sum_f64};
use crate::{Error, Result};

const ONE: Complex64 = Complex64::new(1.0, 0.0);

#[derive(Clone, Debug, PartialEq)]
pub struct PhaseAssignment {
    decomposition: Arc<SpectrumDecomposition>,
    /// Phase of the positive member of each pair.
    pub pair_phases: Vec<Complex64>,
    pub residue_phases: Vec<Complex64>,
    pub seed: u64,
    pub replica: u64,
}

impl PhaseAssignment {
    /// Every phase equal to `1`; evaluation then reproduces `f` itself.
    pub fn ones(decomposition: Arc<SpectrumDecomposition>) -> Self {
        Self {
            pair_phases: vec![ONE; decomposition.pairs.len()],
            residue_phases: vec![ONE; decomposition.residue.len()],
            decomposition,
            seed: 0,
            replica: 0,
        }
    }

    pub fn decomposition(&self) -> &SpectrumDecomposition {
        &self.decomposition
    }

    /// Phase attached to term `index` of the model.
    pub fn phase_of(&self, index: usize) -> Option<Complex64> {
        let d = &self.decomposition;
        if d.zero_index == Some(index) {
            return Some(ONE);
        }
        for (k, &(p, m)) in d.pairs.iter().enumerate() {
            if p == index {
                return Some(self.pair_phases[k]);
            }
            if m == index {
                return Some(self.pair_phases[k].conj());
            }
        }
        d.residue
            .iter()
            .position(|&r| r == index)
            .map(|k| self.residue_phases[k])
    }

    /// Trigonometric table of the realization, after checking alignment.
    pub(crate) fn table(&self, model: &FourierModel) -> Result<TrigTable> {
        let d = &self.decomposition;
        let terms = model.terms();
        if d.term_count != terms.len() {
            return Err(Error::MisalignedPhases(format!(
                "decomposition covers {} terms, model has {}",
                d.term_count,
                terms.len()
            )));
        }
        if self.pair_phases.len() != d.pairs.len() || self.residue_phases.len() != d.residue.len() {
            return Err(Error::MisalignedPhases("phase count differs from decomposition".into()));
        }
        let mut pairs = Vec::with_capacity(d.pairs.len());
        for (&(p, m), &u) in d.pairs.iter().zip(&self.pair_phases) {
            let (tp, tm) = match (terms.get(p), terms.get(m)) {
                (Some(a), Some(b)) => (a, b),
                _ => return Err(Error::MisalignedPhases("pair index out of range".into())),
            };
            if !(tp.lambda > 0.0) || (tp.lambda + tm.lambda).abs() > 1e-6 * tp.lambda {
                return Err(Error::MisalignedPhases(format!("pair at {} is not a ±λ pair", tp.lambda)));
            }
            pairs.push(PairTerm {
                lambda: tp.lambda,
                plus: u * tp.coeff,
                minus: u.conj() * tm.coeff,
                symmetric: tm.coeff == tp.coeff.conj(),
            });
        }
        let mut singles = Vec::with_capacity(d.residue.len());
        for (&r, &u) in d.residue.iter().zip(&self.residue_phases) {
            let t = terms
                .get(r)
                .ok_or_else(|| Error::MisalignedPhases("residue index out of range".into()))?;
            singles.push((t.lambda, u * t.coeff));
        }
        let constant = match d.zero_index {
            Some(z) => {
                terms
                    .get(z)
                    .ok_or_else(|| Error::MisalignedPhases("zero index out of range".into()))?
                    .coeff
            }
            None => Complex64::new(0.0, 0.0),
        };
        Ok(TrigTable {
            pairs,
            singles,
            constant,
        })
    }
}

#[inline]
pub(crate) fn uniform_phase(rng: &mut impl RngCore) -> Complex64 {
    let (s, c) = (TAU * rng::unit_f64(rng)).sin_cos();
    Complex64::new(c, s)
}

/// Draws one phase per pair and per unpaired frequency.
///
/// The phase of a pair or unpaired term is the draw at the ordinal of its
/// model index (the positive member for pairs), so it depends only on
/// `(seed, replica, index)`.
pub fn sample_phases(decomposition: Arc<SpectrumDecomposition>, seed: u64, replica: u64) -> PhaseAssignment {
    let mut stream = rng::stream(seed, Domain::Phases, replica);
    let by_index: Vec<Complex64> = (0..decomposition.term_count)
        .map(|_| uniform_phase(&mut stream))
        .collect();
    PhaseAssignment {
        pair_phases: decomposition.pairs.iter().map(|&(p, _)| by_index[p]).collect(),
        residue_phases: decomposition.residue.iter().map(|&r| by_index[r]).collect(),
        decomposition,
        seed,
        replica,
    }
}

/// Where a path came from; written as `#` comments ahead of the CSV data.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct Provenance {
    pub label: String,
    pub seed: u64,
    pub replica: u64,
    pub truncation: String,
    pub extra: Vec<(String, String)>,
}

impl Provenance {
    pub fn for_phases(model: &FourierModel, phases: &PhaseAssignment) -> Self {
        Self {
            label: model.label().to_string(),
            seed: phases.seed,
            replica: phases.replica,
            truncation: model.truncation().to_string(),
            extra: Vec::new(),
        }
    }

    pub fn with(mut self, key: impl Into<String>, value: impl ToString) -> Self {
        self.extra.push((key.into(), value.to_string()));
        self
    }

    pub fn comment_lines(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "# model: {}", self.label);
        let _ = writeln!(out, "# seed: {}", self.seed);
        let _ = writeln!(out, "# replica: {}", self.replica);
        let _ = writeln!(out, "# truncation: {}", self.truncation);
        for (k, v) in &self.extra {
            let _ = writeln!(out, "# {k}: {v}");
        }
        out
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct PathSample {
    pub grid: Vec<f64>,
    pub values: Vec<Complex64>,
    pub provenance: Provenance,
}

impl PathSample {
    pub fn new(grid: Vec<f64>, values: Vec<Complex64>, provenance: Provenance) -> Result<Self> {
        if grid.len() != values.len() {
            return Err(Error::invalid(format!(
                "grid has {} points but {} values",
                grid.len(),
                values.len()
            )));
        }
        if grid.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(Error::invalid("grid must be strictly increasing"));
        }
        Ok(Self {
            grid,
            values,
            provenance,
        })
    }

    pub fn len(&self) -> usize {
        self.grid.len()
    }

    pub fn is_empty(&self) -> bool {
        self.grid.is_empty()
    }

    pub fn max_abs_imag(&self) -> f64 {
        self.values.iter().map(|v| v.im.abs()).fold(0.0, f64::max)
    }

    /// CSV with provenance comments; floats use shortest round-trip form.
    pub fn to_csv(&self) -> String {
        let mut out = self.provenance.comment_lines();
        out.push_str("t,re,im\n");
        for (t, v) in self.grid.iter().zip(&self.values) {
            let _ = writeln!(out, "{t:e},{:e},{:e}", v.re, v.im);
        }
        out
    }

    pub fn from_csv(text: &str, origin: &str) -> Result<Self> {
        let err = |line: usize, message: String| Error::Parse {
            path: origin.to_string(),
            line,
            message,
        };
        let mut prov = Provenance::default();
        let mut grid = Vec::new();
        let mut values = Vec::new();
        let mut header_seen = false;
        for (idx, raw) in text.lines().enumerate() {
            let line = raw.trim();
            let lineno = idx + 1;
            if line.is_empty() {
                continue;
            }
            if let Some(c) = line.strip_prefix('#') {
                if let Some((k, v)) = c.split_once(':') {
                    let (k, v) = (k.trim(), v.trim());
                    match k {
                        "model" => prov.label = v.to_string(),
                        "seed" => prov.seed = v.parse().map_err(|_| err(lineno, format!("bad seed `{v}`")))?,
                        "replica" => {
                            prov.replica = v.parse().map_err(|_| err(lineno, format!("bad replica `{v}`")))?
                        }
                        "truncation" => prov.truncation = v.to_string(),
                        _ => prov.extra.push((k.to_string(), v.to_string())),
                    }
                }
                continue;
            }
            if !header_seen {
                if line != "t,re,im" {
                    return Err(err(lineno, "expected header `t,re,im`".into()));
                }
                header_seen = true;
                continue;
            }
            let f: Vec<&str> = line.split(',').collect();
            if f.len() != 3 {
                return Err(err(lineno, format!("expected 3 fields, found {}", f.len())));
            }
            let num = |s: &str| s.trim().parse::<f64>().map_err(|_| err(lineno, format!("bad number `{s}`")));
            grid.push(num(f[0])?);
            values.push(Complex64::new(num(f[1])?, num(f[2])?));
        }
        Self::new(grid, values, prov)
    }

    pub fn read(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::from_csv(&text, &path.display().to_string())
    }
}

/// Evaluates one realization on an arbitrary grid.
pub fn evaluate(model: &FourierModel, phases: &PhaseAssignment, grid: &[f64]) -> Result<PathSample> {
    let table = phases.table(model)?;
    PathSample::new(grid.to_vec(), table.eval_many(grid), Provenance::for_phases(model, phases))
}

/// Evaluates on `t0 + j·h`, `j = 0..count`, using the rotation recurrence.
pub fn evaluate_uniform(
    model: &FourierModel,
    phases: &PhaseAssignment,
    t0: f64,
    h: f64,
    count: usize,
) -> Result<PathSample> {
    if !(h > 0.0) {
        return Err(Error::invalid("grid step must be positive"));
    }
    let table = phases.table(model)?;
    let grid = (0..count).map(|j| t0 + j as f64 * h).collect();
    PathSample::new(grid, table.eval_uniform(t0, h, count), Provenance::for_phases(model, phases))
}

/// `K(s) = E[M(s)·conj(M(0))] = Σ |f_λ|² e^{iλs}`.
pub fn exact_covariance(model: &FourierModel, s: f64) -> Complex64 {
    sum_complex(model.terms().iter().map(|t| {
        let (sn, cs) = (t.lambda * s).sin_cos();
        Complex64::new(cs, sn) * t.coeff.norm_sqr()
    }))
}

/// `E[M(s)·M(0)]`.
///
/// Each pair contributes `f_λ f_{-λ} (e^{iλs} + e^{-iλs})`: the phase
/// products `u·ū` survive for both orderings of the pair. Unpaired
/// frequencies contribute nothing and frequency zero contributes `f_0²`.
pub fn exact_pseudocovariance(model: &FourierModel, decomposition: &SpectrumDecomposition, s: f64) -> Complex64 {
    let terms = model.terms();
    let pairs = decomposition.pairs.iter().map(|&(p, m)| {
        let lambda = terms[p].lambda;
        terms[p].coeff * terms[m].coeff * (2.0 * (lambda * s).cos())
    });
    let zero = decomposition.zero_index.map(|z| terms[z].coeff * terms[z].coeff);
    sum_complex(pairs.chain(zero))
}

/// `E|M(t) − M(0)|² = Σ |f_λ|² |e^{iλt} − 1|²`.
pub fn exact_increment_second_moment(model: &FourierModel, t: f64) -> f64 {
    sum_f64(model.terms().iter().map(|term| {
        let s = (0.5 * term.lambda * t).sin();
        4.0 * term.coeff.norm_sqr() * s * s
    }))
}
