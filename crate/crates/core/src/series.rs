//! Evaluation engine for finite trigonometric sums.
//!
//! A [`TrigTable`] holds `±λ` pairs (summed jointly), unpaired terms and a
//! constant. Pairs flagged `symmetric` have `minus == conj(plus)` and
//! contribute the exactly real value `2·Re(plus·e^{iλt})`.

use num_complex::Complex64;

use crate::sum::Cascade;

// Uniform-grid evaluation rotates each term by e^{iλh} per step and
// recomputes it from scratch every RESYNC steps.
const RESYNC: usize = 256;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PairTerm {
    pub lambda: f64,
    pub plus: Complex64,
    pub minus: Complex64,
    pub symmetric: bool,
}

impl PairTerm {
    #[inline]
    fn value(&self, z: Complex64) -> Complex64 {
        let a = self.plus * z;
        if self.symmetric {
            Complex64::new(2.0 * a.re, 0.0)
        } else {
            a + self.minus * z.conj()
        }
    }
}

#[derive(Clone, Debug, Default)]
pub struct TrigTable {
    pub pairs: Vec<PairTerm>,
    pub singles: Vec<(f64, Complex64)>,
    pub constant: Complex64,
}

#[inline]
fn cis(x: f64) -> Complex64 {
    let (s, c) = x.sin_cos();
    Complex64::new(c, s)
}

impl TrigTable {
    /// Every term unpaired; used where realness does not matter.
    pub fn from_singles(terms: impl IntoIterator<Item = (f64, Complex64)>) -> Self {
        Self {
            pairs: Vec::new(),
            singles: terms.into_iter().collect(),
            constant: Complex64::new(0.0, 0.0),
        }
    }

    pub fn len(&self) -> usize {
        self.pairs.len() + self.singles.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty() && self.singles.is_empty()
    }

    pub fn eval(&self, t: f64) -> Complex64 {
        let mut acc = Cascade::new();
        for p in &self.pairs {
            acc.push(p.value(cis(p.lambda * t)));
        }
        for &(lambda, c) in &self.singles {
            acc.push(c * cis(lambda * t));
        }
        acc.push(self.constant);
        acc.total()
    }

    pub fn eval_many(&self, ts: &[f64]) -> Vec<Complex64> {
        ts.iter().map(|&t| self.eval(t)).collect()
    }

    /// Calls `f(j, value)` for `t = t0 + j·h`, `j = 0..count`.
    pub fn for_each_uniform(&self, t0: f64, h: f64, count: usize, mut f: impl FnMut(usize, Complex64)) {
        let rot_p: Vec<Complex64> = self.pairs.iter().map(|p| cis(p.lambda * h)).collect();
        let rot_s: Vec<Complex64> = self.singles.iter().map(|s| cis(s.0 * h)).collect();
        let mut zp = vec![Complex64::new(1.0, 0.0); self.pairs.len()];
        let mut zs = vec![Complex64::new(1.0, 0.0); self.singles.len()];
        for j in 0..count {
            if j % RESYNC == 0 {
                let t = t0 + j as f64 * h;
                for (z, p) in zp.iter_mut().zip(&self.pairs) {
                    *z = cis(p.lambda * t);
                }
                for (z, s) in zs.iter_mut().zip(&self.singles) {
                    *z = cis(s.0 * t);
                }
            }
            let mut acc = Cascade::new();
            for (z, p) in zp.iter().zip(&self.pairs) {
                acc.push(p.value(*z));
            }
            for (z, s) in zs.iter().zip(&self.singles) {
                acc.push(s.1 * *z);
            }
            acc.push(self.constant);
            f(j, acc.total());
            for (z, r) in zp.iter_mut().zip(&rot_p) {
                *z *= *r;
            }
            for (z, r) in zs.iter_mut().zip(&rot_s) {
                *z *= *r;
            }
        }
    }

    pub fn eval_uniform(&self, t0: f64, h: f64, count: usize) -> Vec<Complex64> {
        let mut out = Vec::with_capacity(count);
        self.for_each_uniform(t0, h, count, |_, v| out.push(v));
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn table() -> TrigTable {
        TrigTable {
            pairs: vec![
                PairTerm {
                    lambda: 1.3,
                    plus: Complex64::new(0.4, -0.2),
                    minus: Complex64::new(0.4, 0.2),
                    symmetric: true,
                },
                PairTerm {
                    lambda: 2.9,
                    plus: Complex64::new(0.1, 0.7),
                    minus: Complex64::new(-0.3, 0.05),
                    symmetric: false,
                },
            ],
            singles: vec![(-0.77, Complex64::new(1.0, 1.0)), (5.5, Complex64::new(0.0, -0.5))],
            constant: Complex64::new(0.25, 0.0),
        }
    }

    fn direct(t: f64) -> Complex64 {
        let tb = table();
        let mut v = tb.constant;
        for p in &tb.pairs {
            v += p.plus * cis(p.lambda * t) + p.minus * cis(-p.lambda * t);
        }
        for s in &tb.singles {
            v += s.1 * cis(s.0 * t);
        }
        v
    }

    #[test]
    fn eval_matches_direct_sum() {
        let tb = table();
        for k in 0..50 {
            let t = -10.0 + 0.413 * k as f64;
            assert!((tb.eval(t) - direct(t)).norm() < 1e-13);
        }
    }

    #[test]
    fn uniform_recurrence_matches_pointwise() {
        let tb = table();
        let (t0, h, n) = (-3.0, 0.0137, 3000);
        let fast = tb.eval_uniform(t0, h, n);
        for (j, v) in fast.iter().enumerate() {
            let t = t0 + j as f64 * h;
            assert!((v - tb.eval(t)).norm() < 1e-12, "j={j}");
        }
    }

    #[test]
    fn symmetric_pair_is_exactly_real() {
        let tb = TrigTable {
            pairs: vec![table().pairs[0]],
            ..Default::default()
        };
        for k in 0..100 {
            assert_eq!(tb.eval(k as f64 * 0.37).im, 0.0);
        }
    }
}
