use std::sync::Arc;

use anyhow::{Context, Result};
use apstat::rng::{self, Domain};
use apstat::spectra::{decompose, DEFAULT_PAIR_TOLERANCE};
use apstat::tangent::{generate_example_spectrum, ExampleSpectrumSpec};
use apstat::zeta::{build_explicit_model, ingest_zeros, ExplicitKind, ExplicitModel, ZeroTable};
use apstat::{Complex64, FourierModel, SpectrumDecomposition};
use rand_distr::{Distribution, StandardNormal};

use crate::config::{ExampleParams, ModelSource, RunConfig, ZetaConfig};

pub struct Loaded {
    pub model: FourierModel,
    pub example: Option<ExampleSpectrumSpec>,
}

impl Loaded {
    pub fn decomposition(&self) -> Result<Arc<SpectrumDecomposition>> {
        Ok(Arc::new(decompose(&self.model, DEFAULT_PAIR_TOLERANCE)?))
    }
}

/// Reads the zero table; `ζ′` comes from the companion file when given and is
/// otherwise computed if `need_prime`.
pub fn load_table(z: &ZetaConfig, need_prime: bool) -> Result<ZeroTable> {
    let path = z.zeros.as_ref().context("no zeros file configured")?;
    let table = ingest_zeros(path)?;
    Ok(match &z.zeta_prime {
        Some(p) => table.read_zeta_prime(p)?,
        None if need_prime => table.with_computed_zeta_prime(z.derivative_step)?,
        None => table,
    })
}

/// Truncation horizon: explicit `T`, else the midpoint after `zero_count`
/// zeros, else the whole table.
pub fn horizon(z: &ZetaConfig, table: &ZeroTable) -> Result<f64> {
    Ok(match (z.truncation, z.zero_count) {
        (Some(t), _) => t,
        (None, Some(k)) => table
            .midpoint_horizon(k)
            .with_context(|| format!("zero_count {k} with a table of {}", table.len()))?,
        (None, None) => table.max_gamma(),
    })
}

pub fn explicit_model(kind: ExplicitKind, z: &ZetaConfig, table: &ZeroTable) -> Result<ExplicitModel> {
    Ok(build_explicit_model(kind, table, horizon(z, table)?)?)
}

pub fn example_model(p: &ExampleParams) -> Result<(FourierModel, ExampleSpectrumSpec)> {
    let spec = p.spec();
    Ok((generate_example_spectrum(&spec)?, spec))
}

pub fn load_model(config: &RunConfig) -> Result<Loaded> {
    match config.model.as_ref().context("no model configured")? {
        ModelSource::File { path } => Ok(Loaded {
            model: FourierModel::read(path)?,
            example: None,
        }),
        ModelSource::Example(p) => {
            let (model, spec) = example_model(p)?;
            Ok(Loaded {
                model,
                example: Some(spec),
            })
        }
        ModelSource::Explicit { kind } => {
            let kind = ExplicitKind::from(*kind);
            let table = load_table(&config.zeta, kind != ExplicitKind::Psi)?;
            Ok(Loaded {
                model: explicit_model(kind, &config.zeta, &table)?.model,
                example: None,
            })
        }
    }
}

/// Conjugate-symmetric model with `pairs` frequencies in `(0.1, 3)` and
/// standard complex normal coefficients scaled to unit total mass on average.
pub fn random_pair_model(pairs: usize, seed: u64) -> FourierModel {
    let mut r = rng::stream(seed, Domain::Models, 0);
    let scale = (2.0 * pairs as f64).sqrt();
    let terms: Vec<(f64, Complex64)> = (0..pairs)
        .flat_map(|_| {
            let lambda = 0.1 + 2.9 * rng::unit_f64(&mut r);
            let c = Complex64::new(StandardNormal.sample(&mut r), StandardNormal.sample(&mut r)) / scale;
            [(lambda, c), (-lambda, c.conj())]
        })
        .collect();
    FourierModel::new(format!("random {pairs} pairs"), terms).expect("distinct frequencies")
}

/// Models checked when no model is configured: a random 20-pair model and a
/// 200-pair power-law spectrum.
pub fn bundled_models() -> Result<Vec<FourierModel>> {
    let example = ExampleParams {
        n_terms: 200,
        ..ExampleParams::default()
    };
    Ok(vec![random_pair_model(20, 1), example_model(&example)?.0])
}

/// The configured model, or the bundled ones.
pub fn models_for_suite(config: &RunConfig) -> Result<Vec<FourierModel>> {
    match config.model {
        Some(_) => Ok(vec![load_model(config)?.model]),
        None => bundled_models(),
    }
}
