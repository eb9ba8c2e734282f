use std::fs;
use std::path::Path;

use num_complex::Complex64;
use rayon::prelude::*;

use super::analytic::zeta_prime_on_line;
use crate::{Error, Result};

/// Ordinates are matched to `ζ′` rows within this distance.
pub const ORDINATE_MATCH_TOLERANCE: f64 = 1e-6;

pub const ZETA_PRIME_HEADER: &str = "gamma,re,im";

/// Positive ordinates `γ₁ < γ₂ < …` of zeros `1/2 + iγ`, optionally with
/// `ζ′(1/2 + iγ_k)`.
#[derive(Clone, Debug, PartialEq)]
pub struct ZeroTable {
    gammas: Vec<f64>,
    zeta_prime: Option<Vec<Complex64>>,
    source: String,
}

fn parse_err(origin: &str, line: usize, message: impl Into<String>) -> Error {
    Error::Parse {
        path: origin.to_string(),
        line,
        message: message.into(),
    }
}

fn read_text(path: &Path) -> Result<String> {
    fs::read_to_string(path).map_err(|e| Error::io(path, e))
}

fn content_lines(text: &str) -> impl Iterator<Item = (usize, &str)> {
    text.lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'))
}

impl ZeroTable {
    pub fn new(gammas: Vec<f64>, source: impl Into<String>) -> Result<Self> {
        if gammas.is_empty() {
            return Err(Error::invalid("zero table is empty"));
        }
        if let Some(g) = gammas.iter().find(|g| !(g.is_finite() && **g > 0.0)) {
            return Err(Error::invalid(format!("ordinate {g} is not a positive number")));
        }
        if let Some(w) = gammas.windows(2).find(|w| !(w[1] > w[0])) {
            return Err(Error::invalid(format!("ordinates not increasing at {} -> {}", w[0], w[1])));
        }
        Ok(Self {
            gammas,
            zeta_prime: None,
            source: source.into(),
        })
    }

    /// One ordinate per line; blank lines and `#` comments are skipped.
    pub fn from_text(text: &str, origin: &str) -> Result<Self> {
        let mut gammas: Vec<f64> = Vec::new();
        for (line, l) in content_lines(text) {
            let g: f64 = l
                .parse()
                .map_err(|_| parse_err(origin, line, format!("cannot parse `{l}` as a number")))?;
            if !(g.is_finite() && g > 0.0) {
                return Err(parse_err(origin, line, format!("ordinate {g} is not positive")));
            }
            if let Some(&prev) = gammas.last() {
                if !(g > prev) {
                    return Err(parse_err(origin, line, format!("ordinate {g} does not exceed {prev}")));
                }
            }
            gammas.push(g);
        }
        if gammas.is_empty() {
            return Err(parse_err(origin, 0, "no ordinates"));
        }
        Self::new(gammas, origin)
    }

    pub fn read(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        Self::from_text(&read_text(path)?, &path.display().to_string())
    }

    /// Attaches `ζ′` values; every entry must be finite and nonzero.
    pub fn with_zeta_prime(mut self, values: Vec<Complex64>) -> Result<Self> {
        if values.len() != self.gammas.len() {
            return Err(Error::invalid(format!(
                "{} zeta' values for {} ordinates",
                values.len(),
                self.gammas.len()
            )));
        }
        if let Some((g, _)) = self
            .gammas
            .iter()
            .zip(&values)
            .find(|(_, z)| !(z.re.is_finite() && z.im.is_finite()) || **z == Complex64::new(0.0, 0.0))
        {
            return Err(Error::invalid(format!("zeta' at {g} is zero or not finite")));
        }
        self.zeta_prime = Some(values);
        Ok(self)
    }

    /// Attaches `ζ′` from `gamma,re,im` CSV text. Rows are matched to
    /// ordinates within [`ORDINATE_MATCH_TOLERANCE`]; surplus rows are ignored
    /// but every ordinate needs a row.
    pub fn with_zeta_prime_csv(self, text: &str, origin: &str) -> Result<Self> {
        let mut rows: Vec<(f64, Complex64)> = Vec::new();
        for (line, l) in content_lines(text) {
            if l.replace(' ', "") == ZETA_PRIME_HEADER {
                continue;
            }
            let fields: Vec<&str> = l.split(',').map(str::trim).collect();
            if fields.len() != 3 {
                return Err(parse_err(origin, line, "expected `gamma,re,im`"));
            }
            let num = |s: &str| {
                s.parse::<f64>()
                    .map_err(|_| parse_err(origin, line, format!("cannot parse `{s}` as a number")))
            };
            let (g, re, im) = (num(fields[0])?, num(fields[1])?, num(fields[2])?);
            if let Some(&(prev, _)) = rows.last() {
                if !(g > prev) {
                    return Err(parse_err(origin, line, format!("ordinate {g} does not exceed {prev}")));
                }
            }
            if re == 0.0 && im == 0.0 {
                return Err(parse_err(origin, line, "zeta' value is zero"));
            }
            rows.push((g, Complex64::new(re, im)));
        }
        let mut values = Vec::with_capacity(self.gammas.len());
        for &g in &self.gammas {
            let i = rows.partition_point(|r| r.0 < g - ORDINATE_MATCH_TOLERANCE);
            match rows.get(i) {
                Some(&(h, z)) if (h - g).abs() <= ORDINATE_MATCH_TOLERANCE => values.push(z),
                _ => return Err(parse_err(origin, 0, format!("no zeta' row for ordinate {g}"))),
            }
        }
        self.with_zeta_prime(values)
    }

    pub fn read_zeta_prime(self, path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = read_text(path)?;
        self.with_zeta_prime_csv(&text, &path.display().to_string())
    }

    /// Fills `ζ′` by central differences of step `h`; fails on a suspected
    /// multiple zero.
    pub fn with_computed_zeta_prime(self, h: f64) -> Result<Self> {
        let values = self
            .gammas
            .par_iter()
            .map(|&g| zeta_prime_on_line(g, h))
            .collect::<Result<Vec<_>>>()?;
        self.with_zeta_prime(values)
    }

    pub fn gammas(&self) -> &[f64] {
        &self.gammas
    }

    pub fn zeta_prime(&self) -> Option<&[Complex64]> {
        self.zeta_prime.as_deref()
    }

    pub fn source(&self) -> &str {
        &self.source
    }

    pub fn len(&self) -> usize {
        self.gammas.len()
    }

    pub fn is_empty(&self) -> bool {
        self.gammas.is_empty()
    }

    pub fn max_gamma(&self) -> f64 {
        *self.gammas.last().expect("tables are nonempty")
    }

    /// Number of ordinates `≤ x`.
    pub fn count_up_to(&self, x: f64) -> usize {
        self.gammas.partition_point(|&g| g <= x)
    }

    /// Horizon between the `k`-th and `(k+1)`-th ordinate (1-based), or the
    /// last ordinate itself for `k = len`. Truncating there keeps exactly `k`
    /// zeros without cutting at an ordinate.
    pub fn midpoint_horizon(&self, k: usize) -> Result<f64> {
        match k {
            0 => Err(Error::invalid("k must be at least 1")),
            k if k < self.len() => Ok(0.5 * (self.gammas[k - 1] + self.gammas[k])),
            k if k == self.len() => Ok(self.gammas[k - 1]),
            _ => Err(Error::invalid(format!("table has only {} ordinates", self.len()))),
        }
    }

    /// The ordinates `≤ horizon` (with their `ζ′` values).
    pub fn truncate(&self, horizon: f64) -> Result<Self> {
        let k = self.count_up_to(horizon);
        if k == 0 {
            return Err(Error::invalid(format!("no ordinate below {horizon}")));
        }
        Ok(Self {
            gammas: self.gammas[..k].to_vec(),
            zeta_prime: self.zeta_prime.as_ref().map(|z| z[..k].to_vec()),
            source: self.source.clone(),
        })
    }

    /// Canonical text form: one shortest round-trip ordinate per line.
    pub fn to_text(&self) -> String {
        let mut out = String::with_capacity(self.len() * 20);
        for g in &self.gammas {
            out.push_str(&format!("{g}\n"));
        }
        out
    }

    /// Canonical `gamma,re,im` CSV, if `ζ′` is present.
    pub fn zeta_prime_csv(&self) -> Option<String> {
        let z = self.zeta_prime.as_ref()?;
        let mut out = format!("{ZETA_PRIME_HEADER}\n");
        for (g, v) in self.gammas.iter().zip(z) {
            out.push_str(&format!("{g},{},{}\n", v.re, v.im));
        }
        Some(out)
    }
}

/// Reads a zero table from a text file.
pub fn ingest_zeros(path: impl AsRef<Path>) -> Result<ZeroTable> {
    ZeroTable::read(path)
}
