use std::hint::black_box;
use std::sync::Arc;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};

use apstat::empirics::{ks_two_sample, EmpiricalDistribution};
use apstat::sampler::{evaluate_uniform, exact_covariance, sample_phases};
use apstat::series::TrigTable;
use apstat::spectra::{decompose, DEFAULT_PAIR_TOLERANCE};
use apstat::tangent::{generate_example_spectrum, ExampleSpectrumSpec};
use apstat::zeta::{sieve, zeta_evaluate, DEFAULT_TERMS};
use apstat::{Complex64, FourierModel};

fn example(n_terms: usize) -> FourierModel {
    generate_example_spectrum(&ExampleSpectrumSpec {
        a: 1.0,
        b: 1.0,
        amplitude: 0.5,
        n_terms,
        seed: 38,
    })
    .unwrap()
}

fn sieves(c: &mut Criterion) {
    let mut g = c.benchmark_group("sieve");
    g.sample_size(10);
    for n in [100_000usize, 1_000_000] {
        g.bench_with_input(BenchmarkId::from_parameter(n), &n, |b, &n| b.iter(|| sieve(black_box(n)).unwrap()));
    }
    g.finish();
}

fn zeta(c: &mut Criterion) {
    let mut g = c.benchmark_group("zeta_evaluate");
    for height in [14.13, 1000.0, 5000.0] {
        let s = Complex64::new(0.5, height);
        g.bench_with_input(BenchmarkId::from_parameter(height), &s, |b, &s| {
            b.iter(|| zeta_evaluate(black_box(s), DEFAULT_TERMS).unwrap())
        });
    }
    g.finish();
}

fn trig_table(c: &mut Criterion) {
    let model = example(1000);
    let table = TrigTable::from_singles(model.terms().iter().map(|t| (t.lambda, t.coeff)));
    let mut g = c.benchmark_group("trig_table");
    g.bench_function("eval 2000 terms", |b| b.iter(|| table.eval(black_box(12.345))));
    g.bench_function("eval_uniform 2000 terms x 1000 points", |b| {
        b.iter(|| table.eval_uniform(black_box(0.0), 0.01, 1000))
    });
    g.finish();
}

fn sampling(c: &mut Criterion) {
    let model = example(1000);
    let d = Arc::new(decompose(&model, DEFAULT_PAIR_TOLERANCE).unwrap());
    let mut g = c.benchmark_group("sampler");
    g.bench_function("sample_phases 1000 pairs", |b| {
        let mut r = 0u64;
        b.iter(|| {
            r += 1;
            sample_phases(d.clone(), 1, r)
        })
    });
    let phases = sample_phases(d.clone(), 1, 0);
    g.bench_function("evaluate_uniform 1000 pairs x 1001 points", |b| {
        b.iter(|| evaluate_uniform(&model, &phases, 0.0, 0.01, 1001).unwrap())
    });
    g.bench_function("exact_covariance 1000 pairs", |b| {
        b.iter(|| exact_covariance(&model, black_box(3.7)))
    });
    g.finish();
}

fn ks(c: &mut Criterion) {
    let xs: Vec<f64> = (0..20_000).map(|i| ((i as f64) * 0.618_033_988_75).fract()).collect();
    let ys: Vec<f64> = (0..20_000).map(|i| ((i as f64) * 0.414_213_562_37).fract()).collect();
    let a = EmpiricalDistribution::new(xs).unwrap();
    let b = EmpiricalDistribution::new(ys).unwrap();
    c.bench_function("ks_two_sample 20000", |bench| bench.iter(|| ks_two_sample(&a, &b)));
}

criterion_group!(benches, sieves, zeta, trig_table, sampling, ks);
criterion_main!(benches);
