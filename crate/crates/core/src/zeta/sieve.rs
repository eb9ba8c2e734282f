use std::fmt;
use std::str::FromStr;

use crate::{Error, Result};

/// The three arithmetic functions whose summatory functions are tracked.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum ArithmeticFunction {
    /// `Λ(n)`, summing to Chebyshev's `ψ(x)`.
    VonMangoldt,
    /// `μ(n)`, summing to Mertens' `M(x)`.
    Moebius,
    /// `λ(n)`, summing to `L(x)`.
    Liouville,
}

/// Value assigned to a summatory function at a jump.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum Convention {
    /// Average of the left and right limits.
    #[default]
    Midpoint,
    /// `Σ_{n<x}`.
    Left,
    /// `Σ_{n≤x}`.
    Right,
}

impl fmt::Display for Convention {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Convention::Midpoint => "midpoint",
            Convention::Left => "left",
            Convention::Right => "right",
        })
    }
}

impl FromStr for Convention {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "midpoint" => Ok(Convention::Midpoint),
            "left" => Ok(Convention::Left),
            "right" => Ok(Convention::Right),
            _ => Err(Error::invalid(format!("unknown convention `{s}`"))),
        }
    }
}

/// `Λ`, `μ`, `λ` on `1..=N` with their prefix sums.
#[derive(Clone, Debug)]
pub struct ArithmeticTables {
    limit: usize,
    // all vectors are indexed by n; slot 0 is a placeholder
    vonmangoldt: Vec<f64>,
    moebius: Vec<i8>,
    liouville: Vec<i8>,
    psi: Vec<f64>,
    mertens: Vec<i64>,
    liouville_sum: Vec<i64>,
}

/// Linear sieve over `1..=limit`.
pub fn sieve(limit: usize) -> Result<ArithmeticTables> {
    if limit == 0 {
        return Err(Error::invalid("sieve limit must be at least 1"));
    }
    let n1 = limit + 1;
    let mut spf = vec![0u32; n1];
    let mut primes: Vec<u32> = Vec::new();
    let mut vonmangoldt = vec![0.0; n1];
    let mut moebius = vec![0i8; n1];
    let mut liouville = vec![0i8; n1];
    moebius[1] = 1;
    liouville[1] = 1;
    for n in 2..n1 {
        if spf[n] == 0 {
            spf[n] = n as u32;
            primes.push(n as u32);
        }
        let p = spf[n] as usize;
        let m = n / p;
        vonmangoldt[n] = if m == 1 || (spf[m] as usize == p && vonmangoldt[m] > 0.0) {
            (p as f64).ln()
        } else {
            0.0
        };
        moebius[n] = if m % p == 0 { 0 } else { -moebius[m] };
        liouville[n] = -liouville[m];
        for &q in &primes {
            let q = q as usize;
            if q > p || q * n >= n1 {
                break;
            }
            spf[q * n] = q as u32;
        }
    }

    let mut psi = vec![0.0; n1];
    let (mut s, mut comp) = (0.0f64, 0.0f64);
    for n in 1..n1 {
        let x = vonmangoldt[n];
        let t = s + x;
        comp += if s.abs() >= x.abs() { (s - t) + x } else { (x - t) + s };
        s = t;
        psi[n] = s + comp;
    }
    let mut mertens = vec![0i64; n1];
    let mut liouville_sum = vec![0i64; n1];
    for n in 1..n1 {
        mertens[n] = mertens[n - 1] + moebius[n] as i64;
        liouville_sum[n] = liouville_sum[n - 1] + liouville[n] as i64;
    }
    Ok(ArithmeticTables {
        limit,
        vonmangoldt,
        moebius,
        liouville,
        psi,
        mertens,
        liouville_sum,
    })
}

impl ArithmeticTables {
    pub fn limit(&self) -> usize {
        self.limit
    }

    fn check(&self, n: usize) {
        assert!(n >= 1 && n <= self.limit, "n = {n} outside 1..={}", self.limit);
    }

    /// `Λ(n)`; panics outside `1..=N`.
    pub fn vonmangoldt(&self, n: usize) -> f64 {
        self.check(n);
        self.vonmangoldt[n]
    }

    pub fn moebius(&self, n: usize) -> i8 {
        self.check(n);
        self.moebius[n]
    }

    pub fn liouville(&self, n: usize) -> i8 {
        self.check(n);
        self.liouville[n]
    }

    /// `Σ_{m≤n} f(m)` for integer `n ≤ N` (0 at `n = 0`).
    pub fn prefix(&self, function: ArithmeticFunction, n: usize) -> f64 {
        assert!(n <= self.limit, "n = {n} beyond {}", self.limit);
        match function {
            ArithmeticFunction::VonMangoldt => self.psi[n],
            ArithmeticFunction::Moebius => self.mertens[n] as f64,
            ArithmeticFunction::Liouville => self.liouville_sum[n] as f64,
        }
    }

    fn value(&self, function: ArithmeticFunction, n: usize) -> f64 {
        match function {
            ArithmeticFunction::VonMangoldt => self.vonmangoldt[n],
            ArithmeticFunction::Moebius => self.moebius[n] as f64,
            ArithmeticFunction::Liouville => self.liouville[n] as f64,
        }
    }
}

/// Summatory function `Σ_{n≤x} f(n)` at real `x`, with jumps at integers
/// resolved by `convention`.
pub fn summatory(
    tables: &ArithmeticTables,
    function: ArithmeticFunction,
    x: f64,
    convention: Convention,
) -> Result<f64> {
    if !x.is_finite() || x > tables.limit as f64 {
        return Err(Error::Domain(format!("x = {x} beyond sieve limit {}", tables.limit)));
    }
    if x < 1.0 {
        return Ok(0.0);
    }
    let k = x.floor() as usize;
    let right = tables.prefix(function, k);
    if x != k as f64 {
        return Ok(right);
    }
    let jump = tables.value(function, k);
    Ok(match convention {
        Convention::Right => right,
        Convention::Left => right - jump,
        Convention::Midpoint => right - 0.5 * jump,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn factorize(mut n: usize) -> Vec<(usize, u32)> {
        let mut out = Vec::new();
        let mut p = 2;
        while p * p <= n {
            let mut e = 0;
            while n % p == 0 {
                n /= p;
                e += 1;
            }
            if e > 0 {
                out.push((p, e));
            }
            p += 1;
        }
        if n > 1 {
            out.push((n, 1));
        }
        out
    }

    fn mu_by_division(n: usize) -> i64 {
        let f = factorize(n);
        match f.iter().any(|&(_, e)| e > 1) {
            true => 0,
            false if f.len() % 2 == 0 => 1,
            false => -1,
        }
    }

    #[test]
    fn sieve_matches_trial_division() {
        let t = sieve(10_000).unwrap();
        for n in 1..=10_000 {
            let f = factorize(n);
            let lam = if f.len() == 1 { (f[0].0 as f64).ln() } else { 0.0 };
            let mu = mu_by_division(n) as i8;
            let omega: u32 = f.iter().map(|&(_, e)| e).sum();
            let liou = if omega % 2 == 0 { 1 } else { -1 };
            assert_eq!(t.vonmangoldt(n), lam, "n={n}");
            assert_eq!(t.moebius(n), mu, "n={n}");
            assert_eq!(t.liouville(n), liou, "n={n}");
        }
    }

    #[test]
    fn divisor_sum_identities() {
        let t = sieve(10_000).unwrap();
        let mut mu_sum = vec![0i64; 10_001];
        let mut lam_sum = vec![0.0f64; 10_001];
        for d in 1..=10_000 {
            for n in (d..=10_000).step_by(d) {
                mu_sum[n] += t.moebius(d) as i64;
                lam_sum[n] += t.vonmangoldt(d);
            }
        }
        for n in 1..=10_000 {
            assert_eq!(mu_sum[n], (n == 1) as i64);
            assert!((lam_sum[n] - (n as f64).ln()).abs() < 1e-10);
        }
    }

    #[test]
    fn small_values() {
        let t = sieve(100).unwrap();
        assert_eq!(t.vonmangoldt(8), 2f64.ln());
        assert_eq!(t.vonmangoldt(6), 0.0);
        let mu: Vec<i8> = (1..=10).map(|n| t.moebius(n)).collect();
        assert_eq!(mu, [1, -1, -1, 0, -1, 1, -1, 0, 0, 1]);
        let r = Convention::Right;
        assert_eq!(summatory(&t, ArithmeticFunction::Moebius, 10.0, r).unwrap(), -1.0);
        let m33: i64 = (1..=33).map(mu_by_division).sum();
        assert_eq!(m33, -3);
        assert_eq!(summatory(&t, ArithmeticFunction::Moebius, 33.0, r).unwrap(), -3.0);
        assert_eq!(summatory(&t, ArithmeticFunction::Liouville, 10.0, r).unwrap(), 0.0);
        let psi10 = 3.0 * 2f64.ln() + 2.0 * 3f64.ln() + 5f64.ln() + 7f64.ln();
        assert!((summatory(&t, ArithmeticFunction::VonMangoldt, 10.0, r).unwrap() - psi10).abs() < 1e-12);
        assert!((psi10 - 7.8320).abs() < 1e-4);
    }

    #[test]
    fn conventions_at_jumps() {
        let t = sieve(10).unwrap();
        let f = ArithmeticFunction::VonMangoldt;
        assert_eq!(summatory(&t, f, 1.5, Convention::Midpoint).unwrap(), 0.0);
        assert_eq!(summatory(&t, f, 2.0, Convention::Midpoint).unwrap(), 2f64.ln() / 2.0);
        assert_eq!(summatory(&t, f, 2.0, Convention::Left).unwrap(), 0.0);
        assert_eq!(summatory(&t, f, 2.0, Convention::Right).unwrap(), 2f64.ln());
        assert_eq!(summatory(&t, f, 0.5, Convention::Right).unwrap(), 0.0);
        assert!(summatory(&t, f, 10.5, Convention::Right).is_err());
        assert!(sieve(0).is_err());
    }

    #[test]
    fn chebyshev_function_grows_like_x() {
        let t = sieve(1_000_000).unwrap();
        let r = t.prefix(ArithmeticFunction::VonMangoldt, 1_000_000) / 1e6;
        assert!((0.9..=1.1).contains(&r), "{r}");
    }

    proptest! {
        #[test]
        fn liouville_is_completely_multiplicative(a in 1usize..300, b in 1usize..300) {
            let t = sieve(90_000).unwrap();
            prop_assert_eq!(t.liouville(a * b), t.liouville(a) * t.liouville(b));
            if a > 1 && b > 1 && t.moebius(a) != 0 && t.moebius(b) != 0 && gcd(a, b) == 1 {
                prop_assert_eq!(t.moebius(a * b), t.moebius(a) * t.moebius(b));
            }
        }

        #[test]
        fn midpoint_lies_between_left_and_right(x in 1.0f64..500.0, k in 1usize..500) {
            let t = sieve(500).unwrap();
            for x in [x, k as f64] {
                for f in [ArithmeticFunction::VonMangoldt, ArithmeticFunction::Moebius, ArithmeticFunction::Liouville] {
                    let l = summatory(&t, f, x, Convention::Left).unwrap();
                    let r = summatory(&t, f, x, Convention::Right).unwrap();
                    let m = summatory(&t, f, x, Convention::Midpoint).unwrap();
                    prop_assert!((m - 0.5 * (l + r)).abs() < 1e-12);
                }
            }
        }
    }

    fn gcd(a: usize, b: usize) -> usize {
        if b == 0 { a } else { gcd(b, a % b) }
    }
}
