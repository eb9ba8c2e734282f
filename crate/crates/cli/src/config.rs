//! Run configuration: a TOML file merged with command-line overrides and
//! validated before any computation starts.

use std::fmt;
use std::path::{Path, PathBuf};

use anyhow::{bail, ensure, Context, Result};
use apstat::tangent::{ExampleSpectrumSpec, SlowlyVarying, TangentConfig};
use apstat::zeta::ExplicitKind;
use clap::ValueEnum;
use serde::{Deserialize, Serialize};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Deserialize, Serialize, ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum CommandName {
    Simulate,
    Covariance,
    Verify,
    Ingest,
    Tangent,
    Explicit,
}

impl fmt::Display for CommandName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.to_possible_value().expect("no skipped variants").get_name())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Deserialize, Serialize, ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Kind {
    Psi,
    Mertens,
    Liouville,
}

impl From<Kind> for ExplicitKind {
    fn from(k: Kind) -> Self {
        match k {
            Kind::Psi => ExplicitKind::Psi,
            Kind::Mertens => ExplicitKind::Mertens,
            Kind::Liouville => ExplicitKind::Liouville,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Deserialize, Serialize, ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Suite {
    Parseval,
    Translation,
    Onedim,
    Fidi,
    Ergodic,
    Equidist,
    Holder,
    Tangent,
    Explicit,
    Zerocount,
}

impl fmt::Display for Suite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.to_possible_value().expect("no skipped variants").get_name())
    }
}

impl Suite {
    fn needs_zeros(self) -> bool {
        matches!(self, Suite::Explicit | Suite::Zerocount)
    }
}

/// Power-law spectrum parameters.
#[derive(Clone, Debug, PartialEq, Deserialize, Serialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExampleParams {
    pub a: f64,
    pub b: f64,
    pub amplitude: f64,
    pub n_terms: usize,
    pub spectrum_seed: u64,
}

impl Default for ExampleParams {
    fn default() -> Self {
        Self {
            a: 1.0,
            b: 1.0,
            amplitude: 0.5,
            n_terms: 1000,
            spectrum_seed: 38,
        }
    }
}

impl ExampleParams {
    /// Default spectrum of the tangent and Hölder runs, long enough that the
    /// Hurst paths at `ε = 0.1` are resolved.
    pub fn tangent_default() -> Self {
        Self {
            n_terms: 10_000,
            ..Self::default()
        }
    }

    pub fn spec(&self) -> ExampleSpectrumSpec {
        ExampleSpectrumSpec {
            a: self.a,
            b: self.b,
            amplitude: self.amplitude,
            n_terms: self.n_terms,
            seed: self.spectrum_seed,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Deserialize, Serialize)]
#[serde(tag = "source", rename_all = "lowercase", deny_unknown_fields)]
pub enum ModelSource {
    /// A model in the Fourier text format.
    File {
        path: PathBuf,
    },
    Example(ExampleParams),
    /// Oscillating part of an explicit formula; zeros come from `[zeta]`.
    Explicit {
        kind: Kind,
    },
}

#[derive(Clone, Debug, PartialEq, Deserialize, Serialize)]
#[serde(default, deny_unknown_fields)]
pub struct ZetaConfig {
    pub zeros: Option<PathBuf>,
    pub zeta_prime: Option<PathBuf>,
    /// Keep zeros with `γ ≤ truncation`.
    pub truncation: Option<f64>,
    /// Keep the first `zero_count` zeros (midpoint horizon).
    pub zero_count: Option<usize>,
    pub sieve_limit: usize,
    /// Step for numerical `ζ′` when no companion file is given.
    pub derivative_step: f64,
}

impl Default for ZetaConfig {
    fn default() -> Self {
        Self {
            zeros: None,
            zeta_prime: None,
            truncation: None,
            zero_count: None,
            sieve_limit: 1_000_000,
            derivative_step: apstat::zeta::DEFAULT_DERIVATIVE_STEP,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Deserialize, Serialize)]
#[serde(default, deny_unknown_fields)]
pub struct SimulateConfig {
    pub replicas: usize,
    pub t_start: f64,
    pub t_end: f64,
    pub step: f64,
}

impl Default for SimulateConfig {
    fn default() -> Self {
        Self {
            replicas: 1,
            t_start: 0.0,
            t_end: 10.0,
            step: 0.01,
        }
    }
}

impl SimulateConfig {
    pub fn points(&self) -> usize {
        ((self.t_end - self.t_start) / self.step).round() as usize + 1
    }
}

#[derive(Clone, Debug, PartialEq, Deserialize, Serialize)]
#[serde(default, deny_unknown_fields)]
pub struct CovarianceConfig {
    /// Paths for the empirical estimate.
    pub replicas: usize,
    pub lag_max: f64,
    pub lag_step: f64,
}

impl Default for CovarianceConfig {
    fn default() -> Self {
        Self {
            replicas: 1000,
            lag_max: 10.0,
            lag_step: 0.01,
        }
    }
}

impl CovarianceConfig {
    pub fn lags(&self) -> usize {
        (self.lag_max / self.lag_step).round() as usize + 1
    }
}

#[derive(Clone, Debug, PartialEq, Deserialize, Serialize)]
#[serde(default, deny_unknown_fields)]
pub struct VerifyConfig {
    pub suite: Option<Suite>,
    /// Monte Carlo sample size per distributional test.
    pub samples: usize,
    /// Half-width of the mean-value windows.
    pub half_width: f64,
    /// Translation windows `L` for the convergence suites.
    pub schedule: Vec<f64>,
    /// Time horizon of the ergodic averages.
    pub horizon: f64,
}

impl Default for VerifyConfig {
    fn default() -> Self {
        Self {
            suite: None,
            samples: 5000,
            half_width: 1e3,
            schedule: vec![1e2, 1e3, 1e4, 1e5],
            horizon: 1e3,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Deserialize, Serialize)]
#[serde(default, deny_unknown_fields)]
pub struct TangentSection {
    /// Index `θ`; taken from the example spectrum when unset.
    pub theta: Option<f64>,
    /// Constant slowly varying normalization; from the example spectrum when unset.
    pub ell: Option<f64>,
    pub epsilon_schedule: Vec<f64>,
    pub t_grid: Vec<f64>,
    /// Paths for the Hurst and Hölder estimates.
    pub paths: usize,
}

impl Default for TangentSection {
    fn default() -> Self {
        Self {
            theta: None,
            ell: None,
            epsilon_schedule: vec![1e-1, 1e-2, 1e-3],
            t_grid: vec![0.25, 0.5, 0.75, 1.0],
            paths: 200,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Deserialize, Serialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExplicitSection {
    /// Log-scale grid `t = log x`.
    pub t_start: f64,
    pub t_end: f64,
    pub points: usize,
    /// Zero counts of the truncation scan; empty means 25, 100 and the whole table.
    pub zero_counts: Vec<usize>,
}

impl Default for ExplicitSection {
    fn default() -> Self {
        Self {
            t_start: 1.0,
            t_end: 1000f64.ln(),
            points: 2000,
            zero_counts: Vec::new(),
        }
    }
}

impl ExplicitSection {
    pub fn grid(&self) -> Vec<f64> {
        let n = self.points;
        (0..n)
            .map(|i| self.t_start + (self.t_end - self.t_start) * i as f64 / (n - 1) as f64)
            .collect()
    }
}

#[derive(Clone, Debug, Default, PartialEq, Deserialize, Serialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub command: Option<CommandName>,
    pub seed: u64,
    pub out: Option<PathBuf>,
    pub threads: Option<usize>,
    pub model: Option<ModelSource>,
    pub zeta: ZetaConfig,
    pub simulate: SimulateConfig,
    pub covariance: CovarianceConfig,
    pub verify: VerifyConfig,
    pub tangent: TangentSection,
    pub explicit: ExplicitSection,
}

pub const DEFAULT_OUT: &str = "apstat-out";

impl RunConfig {
    pub fn read(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).with_context(|| format!("reading config {}", path.display()))?;
        Self::parse(&text).with_context(|| format!("in config {}", path.display()))
    }

    pub fn parse(text: &str) -> Result<Self> {
        Ok(toml::from_str(text)?)
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("config serializes")
    }

    pub fn out_dir(&self) -> PathBuf {
        self.out.clone().unwrap_or_else(|| PathBuf::from(DEFAULT_OUT))
    }

    pub fn explicit_kind(&self) -> Option<ExplicitKind> {
        match &self.model {
            Some(ModelSource::Explicit { kind }) => Some((*kind).into()),
            _ => None,
        }
    }

    /// Index and normalization of the tangent suites: explicit values win,
    /// otherwise they come from the example spectrum.
    pub fn tangent_config(&self, example: Option<&ExampleSpectrumSpec>) -> Result<TangentConfig> {
        let theta = match (self.tangent.theta, example) {
            (Some(t), _) => t,
            (None, Some(e)) => e.theta(),
            (None, None) => {
                bail!("tangent.theta is required unless the model is an example spectrum")
            }
        };
        let ell = match (self.tangent.ell, example) {
            (Some(l), _) => l,
            (None, Some(e)) => e.slowly_varying_constant(),
            (None, None) => {
                bail!("tangent.ell is required unless the model is an example spectrum")
            }
        };
        let config = TangentConfig {
            theta,
            slowly_varying: SlowlyVarying::Constant(ell),
            epsilon_schedule: self.tangent.epsilon_schedule.clone(),
            t_grid: self.tangent.t_grid.clone(),
        };
        config.validate()?;
        Ok(config)
    }

    /// Checks paths and numeric ranges that `command` relies on.
    pub fn validate(&self, command: CommandName) -> Result<()> {
        if let Some(t) = self.threads {
            ensure!(t >= 1, "threads must be at least 1");
        }
        let exists = |p: &Path, what: &str| -> Result<()> {
            ensure!(p.is_file(), "{what} {} does not exist", p.display());
            Ok(())
        };
        let z = &self.zeta;
        if let Some(p) = &z.zeros {
            exists(p, "zeros file")?;
        }
        if let Some(p) = &z.zeta_prime {
            exists(p, "zeta' file")?;
            ensure!(z.zeros.is_some(), "zeta.zeta_prime needs zeta.zeros");
        }
        if let Some(t) = z.truncation {
            ensure!(t.is_finite() && t > 0.0, "zeta.truncation must be positive, got {t}");
        }
        if let Some(k) = z.zero_count {
            ensure!(k >= 1, "zeta.zero_count must be at least 1");
        }
        ensure!(
            z.truncation.is_none() || z.zero_count.is_none(),
            "set at most one of zeta.truncation and zeta.zero_count"
        );
        ensure!(z.sieve_limit >= 2, "zeta.sieve_limit must be at least 2");
        ensure!(
            z.derivative_step.is_finite() && z.derivative_step > 0.0,
            "zeta.derivative_step must be positive"
        );
        match &self.model {
            Some(ModelSource::File { path }) => exists(path, "model file")?,
            Some(ModelSource::Example(p)) => p.spec().validate()?,
            Some(ModelSource::Explicit { .. }) => {
                ensure!(
                    z.zeros.is_some(),
                    "an explicit-formula model needs zeta.zeros (or --zeros)"
                )
            }
            None => {}
        }

        let positive = |x: f64, name: &str| -> Result<()> {
            ensure!(x.is_finite() && x > 0.0, "{name} must be positive, got {x}");
            Ok(())
        };
        match command {
            CommandName::Simulate => {
                let s = &self.simulate;
                ensure!(s.replicas >= 1, "simulate.replicas must be at least 1");
                positive(s.step, "simulate.step")?;
                ensure!(
                    s.t_start.is_finite() && s.t_end.is_finite() && s.t_end > s.t_start,
                    "simulate needs t_start < t_end"
                );
                ensure!(s.points() <= 10_000_000, "simulate grid has too many points");
                self.require_model()?;
            }
            CommandName::Covariance => {
                let c = &self.covariance;
                ensure!(c.replicas >= 2, "covariance.replicas must be at least 2");
                positive(c.lag_step, "covariance.lag_step")?;
                positive(c.lag_max, "covariance.lag_max")?;
                ensure!(c.lags() <= 1_000_000, "covariance lag grid has too many points");
                self.require_model()?;
            }
            CommandName::Verify => {
                let v = &self.verify;
                let suite = v.suite.context("no suite selected (verify.suite or --suite)")?;
                ensure!(v.samples >= 100, "verify.samples must be at least 100");
                positive(v.half_width, "verify.half_width")?;
                positive(v.horizon, "verify.horizon")?;
                ensure!(
                    !v.schedule.is_empty()
                        && v.schedule.iter().all(|l| l.is_finite() && *l > 0.0)
                        && v.schedule.windows(2).all(|w| w[1] > w[0]),
                    "verify.schedule must be positive and increasing"
                );
                if suite.needs_zeros() {
                    ensure!(z.zeros.is_some(), "suite {suite} needs zeta.zeros (or --zeros)");
                }
                if matches!(suite, Suite::Explicit) {
                    self.validate_explicit()?;
                }
                if matches!(suite, Suite::Holder | Suite::Tangent) {
                    self.validate_tangent()?;
                }
            }
            CommandName::Ingest => {
                ensure!(z.zeros.is_some(), "ingest needs zeta.zeros (or --zeros)");
            }
            CommandName::Tangent => self.validate_tangent()?,
            CommandName::Explicit => {
                ensure!(z.zeros.is_some(), "explicit needs zeta.zeros (or --zeros)");
                ensure!(
                    matches!(self.model, None | Some(ModelSource::Explicit { .. })),
                    "explicit works on explicit-formula models only"
                );
                self.validate_explicit()?;
            }
        }
        Ok(())
    }

    fn require_model(&self) -> Result<()> {
        ensure!(
            self.model.is_some(),
            "no model configured ([model] section, --model or --kind)"
        );
        Ok(())
    }

    fn validate_explicit(&self) -> Result<()> {
        let e = &self.explicit;
        ensure!(e.points >= 2, "explicit.points must be at least 2");
        ensure!(
            e.t_start.is_finite() && e.t_start > 0.0 && e.t_end > e.t_start,
            "explicit grid needs 0 < t_start < t_end"
        );
        ensure!(
            e.t_end.exp() <= self.zeta.sieve_limit as f64,
            "explicit.t_end = {} reaches beyond the sieve limit {}",
            e.t_end,
            self.zeta.sieve_limit
        );
        ensure!(
            e.zero_counts.iter().all(|&k| k >= 1),
            "explicit.zero_counts must be positive"
        );
        Ok(())
    }

    fn validate_tangent(&self) -> Result<()> {
        let t = &self.tangent;
        ensure!(t.paths >= 100, "tangent.paths must be at least 100");
        ensure!(!t.t_grid.is_empty(), "tangent.t_grid is empty");
        let example = match &self.model {
            Some(ModelSource::Example(p)) => Some(p.spec()),
            None => Some(ExampleParams::tangent_default().spec()),
            _ => None,
        };
        self.tangent_config(example.as_ref())?;
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_round_trip_through_toml() {
        let mut c = RunConfig {
            model: Some(ModelSource::Example(ExampleParams::default())),
            ..RunConfig::default()
        };
        c.zeta.truncation = Some(236.5);
        let back = RunConfig::parse(&c.to_toml()).unwrap();
        assert_eq!(back, c);
    }

    #[test]
    fn unknown_keys_are_rejected() {
        assert!(RunConfig::parse("sed = 3\n").is_err());
        assert!(RunConfig::parse("[simulate]\nreplica = 3\n").is_err());
        assert!(RunConfig::parse("[model]\nsource = \"explicit\"\nkind = \"psi\"\nhorizon = 3\n").is_err());
        assert!(RunConfig::parse("[model]\nsource = \"explicit\"\nkind = \"zeta\"\n").is_err());
    }

    #[test]
    fn parses_sections() {
        let c = RunConfig::parse(
            "command = \"simulate\"\nseed = 7\n[model]\nsource = \"example\"\nn_terms = 50\n[simulate]\nreplicas = 3\n",
        )
        .unwrap();
        assert_eq!(c.command, Some(CommandName::Simulate));
        assert_eq!(c.seed, 7);
        match c.model {
            Some(ModelSource::Example(p)) => assert_eq!((p.n_terms, p.a), (50, 1.0)),
            other => panic!("{other:?}"),
        }
        assert_eq!(c.simulate.replicas, 3);
        assert_eq!(c.simulate.points(), 1001);
    }

    #[test]
    fn validation_fails_early() {
        let mut c = RunConfig {
            model: Some(ModelSource::Example(ExampleParams::default())),
            ..RunConfig::default()
        };
        c.simulate.replicas = 0;
        let e = c.validate(CommandName::Simulate).unwrap_err();
        assert!(e.to_string().contains("replicas"), "{e}");
        c.simulate.replicas = 1;
        c.validate(CommandName::Simulate).unwrap();
        c.zeta.zeros = Some(PathBuf::from("/nonexistent/zeros.txt"));
        assert!(c.validate(CommandName::Simulate).is_err());
        let c = RunConfig::default();
        assert!(c.validate(CommandName::Verify).is_err());
        assert!(c.validate(CommandName::Ingest).is_err());
    }
}
