use num_complex::Complex64;

use crate::sum::Cascade;
use crate::{Error, Result};

/// Default minimum number of explicitly summed terms.
pub const DEFAULT_TERMS: usize = 30;

/// Default step of the central difference for `ζ′`.
pub const DEFAULT_DERIVATIVE_STEP: f64 = 1e-5;

/// `|ζ′(ρ)|` below this value marks a possibly multiple zero.
pub const MULTIPLE_ZERO_THRESHOLD: f64 = 1e-6;

/// Largest `|Im s|` accepted by [`zeta_evaluate`].
pub const MAX_HEIGHT: f64 = 1e4;

// B_2, B_4, ..., B_24
const BERNOULLI: [f64; 12] = [
    1.0 / 6.0,
    -1.0 / 30.0,
    1.0 / 42.0,
    -1.0 / 30.0,
    5.0 / 66.0,
    -691.0 / 2730.0,
    7.0 / 6.0,
    -3617.0 / 510.0,
    43867.0 / 798.0,
    -174611.0 / 330.0,
    854513.0 / 138.0,
    -236364091.0 / 2730.0,
];

/// `ζ(s)` by Euler–Maclaurin summation with twelve Bernoulli corrections.
///
/// At least `terms` terms are summed directly, and never fewer than
/// `|Im s|/2 + 20`, which keeps the correction series convergent. Valid for
/// `Re s > −1` and `|Im s| ≤ 10⁴`.
pub fn zeta_evaluate(s: Complex64, terms: usize) -> Result<Complex64> {
    if !(s.re.is_finite() && s.im.is_finite()) || s.re <= -1.0 || s.im.abs() > MAX_HEIGHT {
        return Err(Error::Domain(format!("s = {s}")));
    }
    let one = Complex64::new(1.0, 0.0);
    if s == one {
        return Err(Error::Pole);
    }
    let n = terms.max((s.im.abs() / 2.0).ceil() as usize + 20);
    let nf = n as f64;
    let power = |k: f64| (-s * k.ln()).exp();

    let mut acc = Cascade::new();
    for k in 1..n {
        acc.push(power(k as f64));
    }
    let n_pow = power(nf);
    acc.push(n_pow * nf / (s - one));
    acc.push(n_pow * 0.5);

    // u_k = s(s+1)…(s+2k−2) N^{−s−2k+1} / (2k)!
    let mut u = s * n_pow / (2.0 * nf);
    for (k, b) in BERNOULLI.iter().enumerate() {
        acc.push(u * *b);
        let k = (k + 1) as f64;
        u = u * (s + (2.0 * k - 1.0)) * (s + 2.0 * k) / ((2.0 * k + 1.0) * (2.0 * k + 2.0) * nf * nf);
    }
    Ok(acc.total())
}

/// `ζ′(1/2 + iγ)` by a central difference of step `h` along the imaginary
/// direction.
pub fn zeta_prime_on_line(gamma: f64, h: f64) -> Result<Complex64> {
    if !(h > 0.0) || !h.is_finite() {
        return Err(Error::invalid(format!("difference step must be positive, got {h}")));
    }
    let s = Complex64::new(0.5, gamma);
    let dh = Complex64::new(0.0, h);
    let d = (zeta_evaluate(s + dh, DEFAULT_TERMS)? - zeta_evaluate(s - dh, DEFAULT_TERMS)?) / (2.0 * dh);
    if d.norm() < MULTIPLE_ZERO_THRESHOLD {
        return Err(Error::SuspectedMultipleZero {
            gamma,
            modulus: d.norm(),
        });
    }
    Ok(d)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn real(x: f64) -> Complex64 {
        Complex64::new(x, 0.0)
    }

    #[test]
    fn zeta_two() {
        let z = zeta_evaluate(real(2.0), DEFAULT_TERMS).unwrap();
        assert!((z.re - PI * PI / 6.0).abs() < 1e-12 && z.im == 0.0);
    }

    #[test]
    fn zeta_three_matches_direct_series() {
        // direct sum to 10⁶ plus the tail ∫_{N}^∞ x^{−3} dx − N^{−3}/2 ± O(N^{−4})
        let n = 1_000_000u64;
        let mut acc = Cascade::new();
        for k in (1..=n).rev() {
            acc.push((k as f64).powi(-3));
        }
        let nf = n as f64;
        let oracle = acc.total() + 0.5 / (nf * nf) - 0.5 / nf.powi(3);
        let z = zeta_evaluate(real(3.0), DEFAULT_TERMS).unwrap();
        assert!((z.re - oracle).abs() < 1e-15, "{} vs {oracle}", z.re);
    }

    #[test]
    fn zeta_half_and_negative_half() {
        let z = zeta_evaluate(real(0.5), DEFAULT_TERMS).unwrap();
        assert!((z.re + 1.4603545088095868).abs() < 1e-12);
        // ζ(−1/2) = −ζ(3/2)/(4π)
        let a = zeta_evaluate(real(-0.5), DEFAULT_TERMS).unwrap();
        let b = zeta_evaluate(real(1.5), DEFAULT_TERMS).unwrap();
        assert!((a.re + b.re / (4.0 * PI)).abs() < 1e-12);
    }

    #[test]
    fn first_zero_residual() {
        let z = zeta_evaluate(Complex64::new(0.5, 14.134725), DEFAULT_TERMS).unwrap();
        assert!(z.norm() < 1e-4, "{z}");
        let z = zeta_evaluate(Complex64::new(0.5, 14.134725141734693790), DEFAULT_TERMS).unwrap();
        assert!(z.norm() < 1e-12, "{z}");
    }

    #[test]
    fn functional_equation_high_on_the_line() {
        // |ζ(1/2 + it)| = |ζ(1/2 − it)| and ζ(s̄) = conj ζ(s)
        let s = Complex64::new(0.3, 5000.0);
        let a = zeta_evaluate(s, 10).unwrap();
        let b = zeta_evaluate(s.conj(), 10).unwrap();
        assert!((a - b.conj()).norm() < 1e-10 * a.norm().max(1.0));
        // more terms agree with the minimum
        let c = zeta_evaluate(s, 4000).unwrap();
        assert!((a - c).norm() < 1e-9 * a.norm().max(1.0), "{a} {c}");
    }

    #[test]
    fn domain_and_pole() {
        assert!(matches!(zeta_evaluate(real(1.0), 10), Err(Error::Pole)));
        assert!(matches!(zeta_evaluate(real(-1.5), 10), Err(Error::Domain(_))));
        assert!(matches!(zeta_evaluate(Complex64::new(0.5, 2e4), 10), Err(Error::Domain(_))));
        assert!(zeta_evaluate(real(1.0 + 1e-9), 10).unwrap().re > 1e8);
    }

    #[test]
    fn derivative_at_first_zero() {
        let g = 14.134725141734693790;
        let d = zeta_prime_on_line(g, DEFAULT_DERIVATIVE_STEP).unwrap();
        assert!(d.norm() > 0.5 && d.norm() < 1.5);
        let half = zeta_prime_on_line(g, DEFAULT_DERIVATIVE_STEP / 2.0).unwrap();
        assert!((d - half).norm() < 1e-4 * d.norm());
        assert!(zeta_prime_on_line(g, 0.0).is_err());
        assert!(zeta_prime_on_line(g, -1.0).is_err());
    }
}
