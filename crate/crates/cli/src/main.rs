//! `apstat`: simulation, covariance, verification and explicit-formula runs
//! driven by one TOML config per run.

mod commands;
mod config;
mod models;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Parser, Subcommand};

use config::{CommandName, Kind, ModelSource, RunConfig, Suite};
use output::Output;

#[derive(Parser, Debug)]
#[command(
    name = "apstat",
    version,
    about = "Random almost-periodic processes and zeta explicit formulas"
)]
struct Cli {
    /// TOML run configuration; flags override its values.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Output directory.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Worker threads (defaults to all cores).
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// Zero ordinates, one per line.
    #[arg(long, global = true)]
    zeros: Option<PathBuf>,
    /// `gamma,re,im` companion with zeta' at the zeros.
    #[arg(long = "zeta-prime", global = true)]
    zeta_prime: Option<PathBuf>,
    /// Keep zeros with ordinate at most T.
    #[arg(long, global = true, value_name = "T")]
    truncation: Option<f64>,
    #[arg(long = "sieve-limit", global = true, value_name = "N")]
    sieve_limit: Option<usize>,
    #[command(subcommand)]
    command: Option<Command>,
}

#[derive(clap::Args, Debug, Default)]
struct ModelArgs {
    /// Model file in the Fourier text format.
    #[arg(long, conflicts_with = "kind")]
    model: Option<PathBuf>,
    /// Explicit-formula model over the zeros.
    #[arg(long, value_enum)]
    kind: Option<Kind>,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Sample paths of the limit process.
    Simulate {
        #[command(flatten)]
        model: ModelArgs,
        #[arg(long)]
        replicas: Option<usize>,
    },
    /// Exact and empirical covariance.
    Covariance {
        #[command(flatten)]
        model: ModelArgs,
        #[arg(long)]
        replicas: Option<usize>,
    },
    /// Run a verification suite; exits with status 1 if any check fails.
    Verify {
        #[command(flatten)]
        model: ModelArgs,
        #[arg(long, value_enum)]
        suite: Option<Suite>,
    },
    /// Validate and canonicalize a zero table and its zeta' companion.
    Ingest,
    /// Convergence to the fractional Brownian tangent process.
    Tangent {
        #[command(flatten)]
        model: ModelArgs,
    },
    /// Sieved summatory functions against their expansions over zeros.
    Explicit {
        #[arg(long, value_enum)]
        kind: Option<Kind>,
    },
}

impl Command {
    fn name(&self) -> CommandName {
        match self {
            Command::Simulate { .. } => CommandName::Simulate,
            Command::Covariance { .. } => CommandName::Covariance,
            Command::Verify { .. } => CommandName::Verify,
            Command::Ingest => CommandName::Ingest,
            Command::Tangent { .. } => CommandName::Tangent,
            Command::Explicit { .. } => CommandName::Explicit,
        }
    }
}

fn apply_model(config: &mut RunConfig, args: &ModelArgs) {
    if let Some(path) = &args.model {
        config.model = Some(ModelSource::File { path: path.clone() });
    }
    if let Some(kind) = args.kind {
        config.model = Some(ModelSource::Explicit { kind });
    }
}

/// The effective configuration: file values overridden by flags.
fn effective_config(cli: &Cli) -> Result<(RunConfig, CommandName)> {
    let mut config = match &cli.config {
        Some(path) => RunConfig::read(path)?,
        None => RunConfig::default(),
    };
    let command = match (&cli.command, config.command) {
        (Some(c), Some(from_file)) if c.name() != from_file => {
            bail!("config is for `{from_file}` but `{}` was requested", c.name())
        }
        (Some(c), _) => c.name(),
        (None, Some(from_file)) => from_file,
        (None, None) => bail!("no command given (subcommand or `command` in the config)"),
    };
    config.command = Some(command);
    if let Some(seed) = cli.seed {
        config.seed = seed;
    }
    if let Some(out) = &cli.out {
        config.out = Some(out.clone());
    }
    if let Some(t) = cli.threads {
        config.threads = Some(t);
    }
    let z = &mut config.zeta;
    if let Some(p) = &cli.zeros {
        z.zeros = Some(p.clone());
    }
    if let Some(p) = &cli.zeta_prime {
        z.zeta_prime = Some(p.clone());
    }
    if let Some(t) = cli.truncation {
        z.truncation = Some(t);
        z.zero_count = None;
    }
    if let Some(n) = cli.sieve_limit {
        z.sieve_limit = n;
    }
    match &cli.command {
        Some(Command::Simulate { model, replicas }) => {
            apply_model(&mut config, model);
            if let Some(r) = replicas {
                config.simulate.replicas = *r;
            }
        }
        Some(Command::Covariance { model, replicas }) => {
            apply_model(&mut config, model);
            if let Some(r) = replicas {
                config.covariance.replicas = *r;
            }
        }
        Some(Command::Verify { model, suite }) => {
            apply_model(&mut config, model);
            if let Some(s) = suite {
                config.verify.suite = Some(*s);
            }
        }
        Some(Command::Tangent { model }) => apply_model(&mut config, model),
        Some(Command::Explicit { kind: Some(kind) }) => {
            config.model = Some(ModelSource::Explicit { kind: *kind });
        }
        _ => {}
    }
    Ok((config, command))
}

/// `Ok(false)` when a verification suite ran but some check failed.
fn run(cli: &Cli) -> Result<bool> {
    let (config, command) = effective_config(cli)?;
    config.validate(command)?;
    if let Some(t) = config.threads {
        rayon::ThreadPoolBuilder::new()
            .num_threads(t)
            .build_global()
            .context("configuring the thread pool")?;
    }
    let mut out = Output::create(&config, command)?;
    let passed = match command {
        CommandName::Simulate => commands::simulate::run(&config, &mut out).map(|_| true),
        CommandName::Covariance => commands::covariance::run(&config, &mut out).map(|_| true),
        CommandName::Verify => commands::verify::run(&config, &mut out),
        CommandName::Ingest => commands::ingest::run(&config, &mut out).map(|_| true),
        CommandName::Tangent => commands::tangent::run(&config, &mut out).map(|_| true),
        CommandName::Explicit => commands::explicit::run(&config, &mut out).map(|_| true),
    }?;
    for p in out.written() {
        eprintln!("wrote {}", p.display());
    }
    Ok(passed)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
