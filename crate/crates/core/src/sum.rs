//! Pairwise (cascade) summation.
//!
//! Terms are added naively in blocks of [`BLOCK`] and the block totals are
//! merged like a binary counter, so the rounding error grows as
//! `O(log n)` rather than `O(n)` while memory stays `O(log n)`.

use std::ops::Add;

use num_complex::Complex64;

const BLOCK: usize = 32;

/// Streaming cascade accumulator.
#[derive(Clone, Debug)]
pub struct Cascade<T> {
    block: T,
    in_block: usize,
    // levels[i] holds the sum of 2^i blocks, if occupied
    levels: Vec<Option<T>>,
}

impl<T: Copy + Default + Add<Output = T>> Default for Cascade<T> {
    fn default() -> Self {
        Self::new()
    }
}

impl<T: Copy + Default + Add<Output = T>> Cascade<T> {
    pub fn new() -> Self {
        Self {
            block: T::default(),
            in_block: 0,
            levels: Vec::new(),
        }
    }

    #[inline]
    pub fn push(&mut self, x: T) {
        self.block = self.block + x;
        self.in_block += 1;
        if self.in_block == BLOCK {
            let full = std::mem::take(&mut self.block);
            self.in_block = 0;
            self.carry(full);
        }
    }

    fn carry(&mut self, mut value: T) {
        for slot in self.levels.iter_mut() {
            match slot.take() {
                Some(prev) => value = prev + value,
                None => {
                    *slot = Some(value);
                    return;
                }
            }
        }
        self.levels.push(Some(value));
    }

    pub fn total(&self) -> T {
        // smallest partial sums first
        let mut acc = self.block;
        for v in self.levels.iter().flatten() {
            acc = acc + *v;
        }
        acc
    }
}

pub fn cascade_sum<T, I>(iter: I) -> T
where
    T: Copy + Default + Add<Output = T>,
    I: IntoIterator<Item = T>,
{
    let mut c = Cascade::new();
    for x in iter {
        c.push(x);
    }
    c.total()
}

pub fn sum_f64<I: IntoIterator<Item = f64>>(iter: I) -> f64 {
    cascade_sum(iter)
}

pub fn sum_complex<I: IntoIterator<Item = Complex64>>(iter: I) -> Complex64 {
    cascade_sum(iter)
}

/// Mean and unbiased sample variance, both cascade summed.
pub fn mean_var(xs: &[f64]) -> (f64, f64) {
    let n = xs.len();
    if n == 0 {
        return (f64::NAN, f64::NAN);
    }
    let mean = sum_f64(xs.iter().copied()) / n as f64;
    if n == 1 {
        return (mean, 0.0);
    }
    let ss = sum_f64(xs.iter().map(|x| (x - mean) * (x - mean)));
    (mean, ss / (n - 1) as f64)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn matches_exact_integer_sums() {
        for n in [0usize, 1, 31, 32, 33, 1000, 4097] {
            let s = sum_f64((1..=n).map(|k| k as f64));
            assert_eq!(s, (n * (n + 1) / 2) as f64);
        }
    }

    #[test]
    fn beats_naive_on_ill_conditioned_sum() {
        let n = 1_000_000;
        let xs: Vec<f64> = (0..n).map(|_| 0.1).collect();
        let naive: f64 = xs.iter().sum();
        let cascade = sum_f64(xs.iter().copied());
        let exact = 100_000.0;
        assert!((cascade - exact).abs() < (naive - exact).abs());
        assert!((cascade - exact).abs() < 1e-8);
    }

    #[test]
    fn complex_sum() {
        let s = sum_complex((0..100).map(|k| Complex64::new(k as f64, -(k as f64))));
        assert_eq!(s, Complex64::new(4950.0, -4950.0));
    }
}
