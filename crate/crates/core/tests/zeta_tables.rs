//! Checks against the bundled table of the first 1000 zero ordinates.

use std::path::PathBuf;
use std::sync::OnceLock;

use apstat::spectra::{decompose, estimate_fourier_coefficient, spectral_measure, DEFAULT_PAIR_TOLERANCE};
use apstat::zeta::*;
use apstat::Complex64;

fn data(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../data").join(name)
}

fn table() -> &'static ZeroTable {
    static T: OnceLock<ZeroTable> = OnceLock::new();
    T.get_or_init(|| {
        ingest_zeros(data("zeta_zeros_1000.txt"))
            .unwrap()
            .read_zeta_prime(data("zeta_prime_1000.csv"))
            .unwrap()
    })
}

fn tables() -> &'static ArithmeticTables {
    static T: OnceLock<ArithmeticTables> = OnceLock::new();
    T.get_or_init(|| sieve(1_000_000).unwrap())
}

fn log_grid(n: usize) -> Vec<f64> {
    let hi = 1000f64.ln();
    (0..n).map(|i| 1.0 + (hi - 1.0) * i as f64 / (n - 1) as f64).collect()
}

#[test]
fn ingested_table_basics() {
    let t = table();
    assert_eq!(t.len(), 1000);
    assert!((t.gammas()[0] - 14.134725).abs() < 1e-6);
    assert_eq!(t.count_up_to(100.0), 29);
    let residual = zeta_evaluate(Complex64::new(0.5, t.gammas()[0]), DEFAULT_TERMS).unwrap();
    assert!(residual.norm() < 1e-10);
    // every tabulated ordinate is a zero of the evaluator
    for &g in t.gammas().iter().step_by(97) {
        assert!(zeta_evaluate(Complex64::new(0.5, g), DEFAULT_TERMS).unwrap().norm() < 1e-8, "{g}");
    }
}

#[test]
fn derivative_companion_agrees_with_differences() {
    let t = table();
    for k in [0, 10, 500, 999] {
        let g = t.gammas()[k];
        let d = zeta_prime_on_line(g, DEFAULT_DERIVATIVE_STEP).unwrap();
        let z = t.zeta_prime().unwrap()[k];
        assert!((d - z).norm() < 1e-6 * z.norm().max(1.0), "k={k}: {d} vs {z}");
    }
}

#[test]
fn psi_model_norm_matches_direct_loop() {
    let t = table();
    let h = t.midpoint_horizon(100).unwrap();
    let m = build_explicit_model(ExplicitKind::Psi, t, h).unwrap();
    assert_eq!(m.zero_count(), 100);
    let mut direct = 0.0;
    for &g in &t.gammas()[..100] {
        direct += 2.0 / (0.25 + g * g);
    }
    assert!((m.model.norm_sqr() - direct).abs() < 1e-14);

    let d = decompose(&m.model, DEFAULT_PAIR_TOLERANCE).unwrap();
    assert_eq!(d.pairs.len(), 100);
    assert!(d.residue.is_empty() && d.zero_index.is_none());

    let mu = spectral_measure(&m.model).unwrap();
    for (k, &g) in t.gammas()[..100].iter().enumerate().step_by(11) {
        let mass = mu.atoms().iter().find(|a| a.0 == g).unwrap().1;
        assert!((mass - 1.0 / ((0.25 + g * g) * direct)).abs() < 1e-14, "k={k}");
    }
}

#[test]
fn expansions_are_real_on_the_line() {
    let t = table();
    let grid: Vec<f64> = (0..500).map(|i| i as f64 * 0.37).collect();
    for kind in ExplicitKind::ALL {
        let m = build_explicit_model(kind, t, t.midpoint_horizon(200).unwrap()).unwrap();
        for &s in &grid {
            assert!(m.model.eval(s).im.abs() < 1e-10);
        }
    }
}

#[test]
fn mean_value_recovers_coefficients() {
    let t = table();
    let m = build_explicit_model(ExplicitKind::Psi, t, t.midpoint_horizon(50).unwrap()).unwrap();
    for k in [0, 3, 20] {
        let g = t.gammas()[k];
        let est = estimate_fourier_coefficient(&m.model, g, 1e3, 0.01).unwrap();
        let exact = Complex64::new(0.5, g).inv();
        assert!((est - exact).norm() < 1e-2, "k={k}: {est} vs {exact}");
    }
}

#[test]
fn psi_expansion_improves_with_more_zeros() {
    let grid: Vec<f64> = {
        let lo = 2f64.ln() + 0.1;
        let hi = 1000f64.ln();
        (0..1500).map(|i| lo + (hi - lo) * i as f64 / 1499.0).collect()
    };
    let t = table();
    let h10 = t.midpoint_horizon(10).unwrap();
    let h100 = t.midpoint_horizon(100).unwrap();
    let s = explicit_truncation_scan(ExplicitKind::Psi, tables(), t, &[h10, h100], &grid).unwrap();
    assert!(s[1].rms_gap < 0.5, "{:?}", s[1]);
    assert!(s[1].rms_gap < s[0].rms_gap);
    // without zeros the gap is the size of the normalized function itself
    assert!(s[1].baseline_rms_gap > 2.0 * s[1].rms_gap);
}

#[test]
fn mertens_expansion_trend() {
    let t = table();
    let hs: Vec<f64> = [25, 50, 100].iter().map(|&k| t.midpoint_horizon(k).unwrap()).collect();
    let s = explicit_truncation_scan(ExplicitKind::Mertens, tables(), t, &hs, &log_grid(1500)).unwrap();
    let r = strict_decrease_report("mertens trend", &s);
    assert!(r.passed(), "{r}");
}

#[test]
fn zero_counting_at_small_heights() {
    let t = table();
    let c = zero_counting_check(t, &[t.gammas()[0] + 0.1, 100.0]).unwrap();
    assert_eq!(c.rows[0].count, 1);
    assert_eq!(c.rows[1].count, 29);
    let expected = 29.0 / (100.0 * 100f64.ln() / (2.0 * std::f64::consts::PI));
    assert!((c.rows[1].counting_ratio - expected).abs() < 1e-12);
}

#[test]
fn tail_ratio_at_half_height() {
    let t = table();
    let half = 0.5 * t.max_gamma();
    let c = zero_counting_check(t, &[half]).unwrap();
    assert!((c.rows[0].tail_ratio - 1.0).abs() < 0.3, "{:?}", c.rows[0]);
}

#[test]
fn gonek_sum_is_monotone() {
    let t = table();
    assert_eq!(gonek_sum(t, 10.0).unwrap(), 0.0);
    let mut prev = 0.0;
    for k in (1..=1000).step_by(37) {
        let j = gonek_sum(t, t.gammas()[k - 1]).unwrap();
        assert!(j >= prev);
        prev = j;
    }
}

#[test]
fn canonical_table_round_trips() {
    let t = table();
    let back = ZeroTable::from_text(&t.to_text(), t.source())
        .unwrap()
        .with_zeta_prime_csv(&t.zeta_prime_csv().unwrap(), "zp")
        .unwrap();
    assert_eq!(&back, t);
}
