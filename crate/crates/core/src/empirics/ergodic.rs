use std::f64::consts::TAU;
use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use num_complex::Complex64;
use rayon::prelude::*;

use super::TestReport;
use crate::rng::{self, Domain};
use crate::sampler::{exact_covariance, sample_phases, PhaseAssignment};
use crate::spectra::{FourierModel, SpectrumDecomposition};
use crate::sum::{mean_var, sum_complex, sum_f64, Cascade};
use crate::{Error, Result};

/// Test functions applied to process values.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Phi {
    One,
    Re,
    Im,
    Modulus,
    ModulusSquared,
    /// `min(|z|^p, cap)`.
    ClippedPower { p: f64, cap: f64 },
    /// `Re z` clamped to `[-cap, cap]`.
    ClippedRe { cap: f64 },
    /// `cos(freq · Re z)`.
    CosRe { freq: f64 },
}

impl Phi {
    #[inline]
    pub fn eval(&self, z: Complex64) -> f64 {
        match *self {
            Phi::One => 1.0,
            Phi::Re => z.re,
            Phi::Im => z.im,
            Phi::Modulus => z.norm(),
            Phi::ModulusSquared => z.norm_sqr(),
            Phi::ClippedPower { p, cap } => z.norm().powf(p).min(cap),
            Phi::ClippedRe { cap } => z.re.clamp(-cap, cap),
            Phi::CosRe { freq } => (freq * z.re).cos(),
        }
    }

    fn is_linear(&self) -> bool {
        matches!(self, Phi::Re | Phi::Im)
    }
}

impl fmt::Display for Phi {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Phi::One => write!(f, "one"),
            Phi::Re => write!(f, "re"),
            Phi::Im => write!(f, "im"),
            Phi::Modulus => write!(f, "abs"),
            Phi::ModulusSquared => write!(f, "abs2"),
            Phi::ClippedPower { p, cap } => write!(f, "clipped-power:{p}:{cap}"),
            Phi::ClippedRe { cap } => write!(f, "clipped-re:{cap}"),
            Phi::CosRe { freq } => write!(f, "cos-re:{freq}"),
        }
    }
}

impl FromStr for Phi {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let unknown = || Error::UnknownFunction(s.to_string());
        let mut parts = s.split(':');
        let name = parts.next().unwrap_or_default();
        let args: Vec<f64> = parts
            .map(|a| a.parse::<f64>().map_err(|_| unknown()))
            .collect::<Result<_>>()?;
        let phi = match (name, args.as_slice()) {
            ("one", []) => Phi::One,
            ("re", []) => Phi::Re,
            ("im", []) => Phi::Im,
            ("abs", []) => Phi::Modulus,
            ("abs2", []) => Phi::ModulusSquared,
            ("clipped-power", &[p, cap]) if p > 0.0 && cap > 0.0 => Phi::ClippedPower { p, cap },
            ("clipped-re", &[cap]) if cap > 0.0 => Phi::ClippedRe { cap },
            ("cos-re", &[freq]) if freq.is_finite() => Phi::CosRe { freq },
            _ => return Err(unknown()),
        };
        Ok(phi)
    }
}

fn check_window(horizon: f64, step: f64) -> Result<usize> {
    if !(horizon > 0.0) || !horizon.is_finite() {
        return Err(Error::invalid(format!("T must be positive, got {horizon}")));
    }
    if !(step > 0.0) || step >= horizon {
        return Err(Error::InvalidQuadrature {
            step,
            half_width: horizon,
        });
    }
    Ok((horizon / step).ceil() as usize)
}

/// Trapezoid time averages `(1/T)∫₀ᵀ φ(M(t)) dt` of one realization, one per
/// entry of `phis`, computed in a single pass over the path.
pub fn ergodic_averages(
    model: &FourierModel,
    phases: &PhaseAssignment,
    horizon: f64,
    step: f64,
    phis: &[Phi],
) -> Result<Vec<f64>> {
    let intervals = check_window(horizon, step)?;
    let h = horizon / intervals as f64;
    let table = phases.table(model)?;
    let mut acc: Vec<Cascade<f64>> = vec![Cascade::new(); phis.len()];
    table.for_each_uniform(0.0, h, intervals + 1, |j, z| {
        let w = if j == 0 || j == intervals { 0.5 } else { 1.0 };
        for (a, phi) in acc.iter_mut().zip(phis) {
            a.push(w * phi.eval(z));
        }
    });
    Ok(acc.iter().map(|a| a.total() * h / horizon).collect())
}

pub fn ergodic_average(model: &FourierModel, phases: &PhaseAssignment, horizon: f64, step: f64, phi: Phi) -> Result<f64> {
    Ok(ergodic_averages(model, phases, horizon, step, &[phi])?[0])
}

/// Mean of `φ(M(0))` over replicas `first..first + n`, with its standard error.
pub fn ensemble_mean(
    model: &FourierModel,
    decomposition: Arc<SpectrumDecomposition>,
    phi: Phi,
    n: usize,
    seed: u64,
    first: u64,
) -> Result<(f64, f64)> {
    if n < 2 {
        return Err(Error::invalid("ensemble needs at least two replicas"));
    }
    let vals: Vec<f64> = (first..first + n as u64)
        .into_par_iter()
        .map(|r| Ok(phi.eval(sample_phases(decomposition.clone(), seed, r).table(model)?.eval(0.0))))
        .collect::<Result<_>>()?;
    let (m, v) = mean_var(&vals);
    Ok((m, (v / n as f64).sqrt()))
}

/// `(1/T)∫₀ᵀ e^{iλt} dt`.
fn window_transform(lambda: f64, horizon: f64) -> Complex64 {
    let x = lambda * horizon;
    if x.abs() < 1e-8 {
        return Complex64::new(1.0, 0.5 * x);
    }
    let (s, c) = x.sin_cos();
    Complex64::new(s / x, (1.0 - c) / x)
}

/// Exact standard deviation of the time average of `Re M` (or `Im M`) over
/// `[0, T]`, from the covariance of the phases.
pub fn linear_time_average_sd(
    model: &FourierModel,
    decomposition: &SpectrumDecomposition,
    horizon: f64,
    imaginary: bool,
) -> f64 {
    let terms = model.terms();
    let pairs = decomposition.pairs.iter().map(|&(p, m)| {
        let a = terms[p].coeff * window_transform(terms[p].lambda, horizon);
        let b = terms[m].coeff * window_transform(terms[m].lambda, horizon);
        let w = if imaginary { a - b.conj() } else { a + b.conj() };
        0.5 * w.norm_sqr()
    });
    let residue = decomposition.residue.iter().map(|&r| {
        let a = terms[r].coeff * window_transform(terms[r].lambda, horizon);
        0.5 * a.norm_sqr()
    });
    sum_f64(pairs.chain(residue)).sqrt()
}

/// Compares single-path time averages with ensemble means.
///
/// The path is replica 0 of `seed`. For `Re` and `Im` the ensemble mean and the
/// time-average variance are exact; otherwise the ensemble mean uses
/// `ensemble_n` further replicas and the time-average spread is the sample
/// deviation over `path_replicas` independent paths. Each report passes when
/// the difference is within three combined standard errors.
#[allow(clippy::too_many_arguments)]
pub fn ergodic_check(
    model: &FourierModel,
    decomposition: Arc<SpectrumDecomposition>,
    phis: &[Phi],
    horizon: f64,
    step: f64,
    seed: u64,
    path_replicas: usize,
    ensemble_n: usize,
) -> Result<Vec<TestReport>> {
    let needs_replicas = phis.iter().any(|p| !p.is_linear() && *p != Phi::One);
    let reps = if needs_replicas { path_replicas.max(2) } else { 1 };
    let averages: Vec<Vec<f64>> = (0..reps as u64)
        .into_par_iter()
        .map(|r| {
            let phases = sample_phases(decomposition.clone(), seed, r);
            ergodic_averages(model, &phases, horizon, step, phis)
        })
        .collect::<Result<_>>()?;
    let constant = decomposition
        .zero_index
        .map(|z| model.terms()[z].coeff)
        .unwrap_or_default();
    let mut reports = Vec::new();
    for (k, phi) in phis.iter().enumerate() {
        let observed = averages[0][k];
        let (expected, se) = match phi {
            Phi::One => (1.0, 0.0),
            Phi::Re => (constant.re, linear_time_average_sd(model, &decomposition, horizon, false)),
            Phi::Im => (constant.im, linear_time_average_sd(model, &decomposition, horizon, true)),
            _ => {
                let (m, se_e) = ensemble_mean(model, decomposition.clone(), *phi, ensemble_n, seed, reps as u64)?;
                let spread: Vec<f64> = averages.iter().map(|a| a[k]).collect();
                let (_, v) = mean_var(&spread);
                (m, (v + se_e * se_e).sqrt())
            }
        };
        reports.push(TestReport::new(
            format!("ergodic {phi}"),
            (observed - expected).abs(),
            3.0 * se + 1e-12 * (1.0 + expected.abs()),
            ((horizon / step).ceil()) as usize,
            format!("time={observed:.6e} ensemble={expected:.6e} se={se:.3e}"),
        ));
    }
    Ok(reports)
}

/// `max |K(s)|` over the lag grid.
pub fn covariance_sup(model: &FourierModel, lag_grid: &[f64]) -> f64 {
    lag_grid
        .iter()
        .map(|&s| exact_covariance(model, s).norm())
        .fold(0.0, f64::max)
}

/// Checks that the covariance does not decay: the largest `|K|` on the lag
/// grid must reach half the largest single weight `|f_λ|²`. The statistic is
/// required/achieved and passes at ratio `≤ 1`.
pub fn mixing_probe(model: &FourierModel, lag_grid: &[f64]) -> Result<TestReport> {
    if model.is_empty() {
        return Err(Error::EmptyModel);
    }
    if lag_grid.is_empty() {
        return Err(Error::invalid("empty lag grid"));
    }
    let achieved = covariance_sup(model, lag_grid);
    let required = 0.5 * model.terms().iter().map(|t| t.coeff.norm_sqr()).fold(0.0, f64::max);
    Ok(TestReport::new(
        "mixing",
        required / achieved,
        1.0,
        lag_grid.len(),
        format!("sup|K|={achieved:.6e} required={required:.6e}"),
    ))
}

fn sinc(x: f64) -> f64 {
    if x.abs() < 1e-8 {
        1.0 - x * x / 6.0
    } else {
        x.sin() / x
    }
}

/// Empirical mean of `e^{itU}·Π_j e^{iλ_j k_j L U}` with `U` uniform on
/// `[-1, 1]`, against `1{Σ λ_j k_j = 0}·sin(t)/t`, tolerance `4/√n`.
///
/// `k` is sparse: `(term index, integer multiplicity)`.
pub fn equidistribution_character_test(
    model: &FourierModel,
    k: &[(usize, i64)],
    t: f64,
    half_width: f64,
    n: usize,
    seed: u64,
) -> Result<TestReport> {
    if n == 0 || !(half_width > 0.0) {
        return Err(Error::invalid("need n ≥ 1 and L > 0"));
    }
    let terms = model.terms();
    let mut freqs = Vec::with_capacity(k.len());
    for &(i, m) in k {
        let term = terms
            .get(i)
            .ok_or_else(|| Error::invalid(format!("term index {i} out of range")))?;
        if m != 0 {
            freqs.push(term.lambda * m as f64);
        }
    }
    let resonance = sum_f64(freqs.iter().copied());
    let scale = sum_f64(freqs.iter().map(|f| f.abs()));
    let resonant = resonance.abs() <= 1e-12 * scale.max(1.0);
    let target = if resonant { sinc(t) } else { 0.0 };

    let mut r = rng::stream(seed, Domain::Equidistribution, 0);
    let draws: Vec<f64> = (0..n).map(|_| 2.0 * rng::unit_f64(&mut r) - 1.0).collect();
    let values = draws.par_iter().map(|&u| {
        let v = half_width * u;
        let mut z = cis(t * u);
        for &f in &freqs {
            z *= cis(f * v);
        }
        z
    });
    let mean = sum_complex(values.collect::<Vec<_>>()) / n as f64;
    let exact = sinc(t + half_width * resonance);
    Ok(TestReport::new(
        "equidistribution",
        (mean - target).norm(),
        4.0 / (n as f64).sqrt(),
        n,
        format!("mean={mean:.5} target={target:.5} exact-at-L={exact:.5} sum(lambda*k)={resonance:.3e}"),
    ))
}

#[inline]
fn cis(x: f64) -> Complex64 {
    let (s, c) = x.sin_cos();
    Complex64::new(c, s)
}

/// Trigonometric polynomials on the torus `𝕋ⁿ`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum TorusFunction {
    One,
    /// `Re z₁`.
    Re1,
    /// `Π Re z_j`.
    ProductRe,
    /// `Re(z₁·conj z₂)`.
    ReZ1ConjZ2,
    /// `Σ Re z_j`.
    ReSum,
}

impl FromStr for TorusFunction {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Ok(match s {
            "one" => Self::One,
            "re1" => Self::Re1,
            "prod-re" => Self::ProductRe,
            "re-z1-conj-z2" => Self::ReZ1ConjZ2,
            "re-sum" => Self::ReSum,
            _ => return Err(Error::UnknownFunction(s.to_string())),
        })
    }
}

impl TorusFunction {
    /// Fourier modes `(k, ĥ_k)` in dimension `dim`.
    pub fn modes(&self, dim: usize) -> Result<Vec<(Vec<i32>, f64)>> {
        let unit = |j: usize, s: i32| {
            let mut k = vec![0; dim];
            k[j] = s;
            k
        };
        Ok(match self {
            Self::One => vec![(vec![0; dim], 1.0)],
            Self::Re1 => vec![(unit(0, 1), 0.5), (unit(0, -1), 0.5)],
            Self::ProductRe => (0..1u32 << dim)
                .map(|mask| {
                    let k = (0..dim).map(|j| if mask >> j & 1 == 1 { 1 } else { -1 }).collect();
                    (k, 0.5f64.powi(dim as i32))
                })
                .collect(),
            Self::ReZ1ConjZ2 => {
                if dim < 2 {
                    return Err(Error::invalid("re-z1-conj-z2 needs two frequencies"));
                }
                let mut a = vec![0; dim];
                a[0] = 1;
                a[1] = -1;
                let b = a.iter().map(|x| -x).collect();
                vec![(a, 0.5), (b, 0.5)]
            }
            Self::ReSum => (0..dim).flat_map(|j| [(unit(j, 1), 0.5), (unit(j, -1), 0.5)]).collect(),
        })
    }
}

fn eval_modes(modes: &[(Vec<i32>, f64)], angles: &[f64]) -> f64 {
    sum_f64(modes.iter().map(|(k, c)| {
        let phase: f64 = k.iter().zip(angles).map(|(&kj, &a)| kj as f64 * a).sum();
        c * phase.cos()
    }))
}

/// Orbit average of `h(e^{iλ₁t}, …, e^{iλₙt})` over `[0, T]` against the
/// torus integral (product rule with 16 nodes per axis, exact for these
/// polynomials). The tolerance sums `|ĥ_k|·min(1, 2/(T|k·λ|))` over nonzero
/// modes plus a trapezoid error bound.
pub fn kronecker_weyl_probe(frequencies: &[f64], h: TorusFunction, horizon: f64) -> Result<TestReport> {
    let dim = frequencies.len();
    if dim == 0 || dim > 4 {
        return Err(Error::invalid("between 1 and 4 frequencies are supported"));
    }
    let modes = h.modes(dim)?;
    let max_rate = modes
        .iter()
        .map(|(k, _)| k.iter().zip(frequencies).map(|(&kj, l)| kj as f64 * l).sum::<f64>().abs())
        .fold(0.0, f64::max);
    let step = if max_rate > 0.0 { (0.05 / max_rate).min(0.01) } else { 0.01 };
    let intervals = check_window(horizon, step)?;
    let dt = horizon / intervals as f64;

    let mut acc = Cascade::new();
    let mut angles = vec![0.0; dim];
    for j in 0..=intervals {
        let t = j as f64 * dt;
        for (a, l) in angles.iter_mut().zip(frequencies) {
            *a = l * t;
        }
        let w = if j == 0 || j == intervals { 0.5 } else { 1.0 };
        acc.push(w * eval_modes(&modes, &angles));
    }
    let orbit = acc.total() * dt / horizon;

    const NODES: usize = 16;
    let total = NODES.pow(dim as u32);
    let torus = sum_f64((0..total).map(|mut idx| {
        let mut ang = vec![0.0; dim];
        for a in ang.iter_mut() {
            *a = TAU * (idx % NODES) as f64 / NODES as f64;
            idx /= NODES;
        }
        eval_modes(&modes, &ang)
    })) / total as f64;

    let tolerance = sum_f64(modes.iter().filter(|(k, _)| k.iter().any(|&x| x != 0)).map(|(k, c)| {
        let omega = k.iter().zip(frequencies).map(|(&kj, l)| kj as f64 * l).sum::<f64>().abs();
        let window = if omega > 0.0 { (2.0 / (horizon * omega)).min(1.0) } else { 1.0 };
        c.abs() * (window + omega * omega * dt * dt / 12.0)
    })) + 1e-12;
    Ok(TestReport::new(
        "kronecker-weyl",
        (orbit - torus).abs(),
        tolerance,
        intervals + 1,
        format!("orbit={orbit:.6e} torus={torus:.6e}"),
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectra::{decompose, DEFAULT_PAIR_TOLERANCE};

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn sym() -> FourierModel {
        let base = [(0.37, c(0.5, 0.2)), (1.13, c(-0.3, 0.4)), (2.71, c(0.2, 0.0))];
        FourierModel::new("sym", base.iter().flat_map(|&(l, f)| [(l, f), (-l, f.conj())])).unwrap()
    }

    fn dec(m: &FourierModel) -> Arc<SpectrumDecomposition> {
        Arc::new(decompose(m, DEFAULT_PAIR_TOLERANCE).unwrap())
    }

    #[test]
    fn registry_round_trips() {
        for id in ["one", "re", "im", "abs", "abs2", "clipped-power:1.5:4", "clipped-re:1", "cos-re:2"] {
            let phi: Phi = id.parse().unwrap();
            assert_eq!(phi.to_string(), id);
        }
        assert!(matches!("sin".parse::<Phi>(), Err(Error::UnknownFunction(_))));
        assert!("clipped-re".parse::<Phi>().is_err());
    }

    #[test]
    fn constant_phi_averages_to_one() {
        let m = sym();
        let p = sample_phases(dec(&m), 1, 0);
        assert!((ergodic_average(&m, &p, 50.0, 0.01, Phi::One).unwrap() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn modulus_squared_average_approaches_variance() {
        let m = sym();
        let p = sample_phases(dec(&m), 2, 0);
        let avg = ergodic_average(&m, &p, 1e4, 0.01, Phi::ModulusSquared).unwrap();
        assert!((avg / m.norm_sqr() - 1.0).abs() < 0.05, "{avg}");
    }

    #[test]
    fn linear_sd_matches_replicas() {
        let m = FourierModel::new("nc", [(-0.8, c(0.3, 0.2)), (0.5, c(0.4, -0.1)), (0.8, c(0.1, 0.5))]).unwrap();
        let d = dec(&m);
        let horizon = 20.0;
        let avgs: Vec<Complex64> = (0..4000)
            .map(|r| {
                let p = sample_phases(d.clone(), 3, r);
                let v = ergodic_averages(&m, &p, horizon, 0.01, &[Phi::Re, Phi::Im]).unwrap();
                c(v[0], v[1])
            })
            .collect();
        let re: Vec<f64> = avgs.iter().map(|z| z.re).collect();
        let im: Vec<f64> = avgs.iter().map(|z| z.im).collect();
        for (vals, imaginary) in [(re, false), (im, true)] {
            let sd = mean_var(&vals).1.sqrt();
            let exact = linear_time_average_sd(&m, &d, horizon, imaginary);
            assert!((sd / exact - 1.0).abs() < 0.06, "{sd} vs {exact}");
        }
    }

    #[test]
    fn ergodic_check_passes_on_symmetric_model() {
        let m = sym();
        let phis = [Phi::Re, Phi::ModulusSquared, Phi::ClippedRe { cap: 0.5 }];
        let reports = ergodic_check(&m, dec(&m), &phis, 2000.0, 0.02, 5, 8, 4000).unwrap();
        for r in &reports {
            assert!(r.passed(), "{r}");
        }
    }

    #[test]
    fn mixing_probe_examples() {
        let pair = FourierModel::new("p", [(-1.0, c(1.0, 0.0)), (1.0, c(1.0, 0.0))]).unwrap();
        let grid: Vec<f64> = (0..=400).map(|k| 50.0 + k as f64 * 0.01).collect();
        assert!((covariance_sup(&pair, &grid) - 2.0).abs() < 1e-3);
        assert!(mixing_probe(&pair, &grid).unwrap().passed());
        let empty = FourierModel::new("e", []).unwrap();
        assert!(matches!(mixing_probe(&empty, &grid), Err(Error::EmptyModel)));
    }

    #[test]
    fn character_means() {
        let m = FourierModel::new("k", [(-1.0, c(1.0, 0.0)), (1.0, c(1.0, 0.0)), (2f64.sqrt(), c(1.0, 0.0))]).unwrap();
        let n = 100_000;
        let r = equidistribution_character_test(&m, &[], 0.0, 1e6, n, 1).unwrap();
        assert!(r.passed() && r.statistic < 1e-12, "{r}");
        let r = equidistribution_character_test(&m, &[(2, 1)], 0.0, 1e6, n, 2).unwrap();
        assert!(r.passed(), "{r}");
        let r = equidistribution_character_test(&m, &[(0, 1), (1, 1)], 1.0, 1e6, n, 3).unwrap();
        assert!(r.passed(), "{r}");
        assert!(equidistribution_character_test(&m, &[(9, 1)], 1.0, 1e6, n, 3).is_err());
    }

    #[test]
    fn kronecker_weyl_examples() {
        let r = kronecker_weyl_probe(&[1.0], TorusFunction::Re1, 1e3).unwrap();
        assert!(r.passed(), "{r}");
        let r = kronecker_weyl_probe(&[1.0], TorusFunction::One, 10.0).unwrap();
        assert!(r.statistic < 1e-12);
        let r = kronecker_weyl_probe(&[1.0, 2f64.sqrt()], TorusFunction::ReZ1ConjZ2, 1e4).unwrap();
        assert!(r.passed() && r.statistic < 0.02, "{r}");
        assert!(kronecker_weyl_probe(&[1.0], TorusFunction::ReZ1ConjZ2, 1e4).is_err());
        assert!("cubic".parse::<TorusFunction>().is_err());
    }

    #[test]
    fn torus_modes_are_exact() {
        let modes = TorusFunction::ProductRe.modes(2).unwrap();
        let (a, b) = (0.3f64, 1.7f64);
        assert!((eval_modes(&modes, &[a, b]) - a.cos() * b.cos()).abs() < 1e-15);
    }
}
