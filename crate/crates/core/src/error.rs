use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("model has no terms")]
    EmptyModel,

    #[error("duplicate frequency {0}")]
    DuplicateFrequency(f64),

    #[error("ambiguous pairing for frequency {lambda}: {candidates} candidates within tolerance")]
    AmbiguousPairing { lambda: f64, candidates: usize },

    #[error("phase assignment does not match model ({0})")]
    MisalignedPhases(String),

    #[error("invalid quadrature: step {step} must lie in (0, {half_width})")]
    InvalidQuadrature { step: f64, half_width: f64 },

    #[error("degenerate fit: {0}")]
    DegenerateFit(String),

    #[error("unknown function id `{0}`")]
    UnknownFunction(String),

    #[error("zeta has a pole at s = 1")]
    Pole,

    #[error("argument {0} outside the validated domain")]
    Domain(String),

    #[error("zeta' at gamma = {gamma} is {modulus:e}; possible multiple zero")]
    SuspectedMultipleZero { gamma: f64, modulus: f64 },

    #[error("zeta' values are not available for this table")]
    MissingZetaPrime,

    #[error("{path}:{line}: {message}")]
    Parse {
        path: String,
        line: usize,
        message: String,
    },

    #[error("io error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidArgument(msg.into())
    }

    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}
