use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("{what} = {value} is outside [0, 1]")]
    Domain { what: &'static str, value: f64 },

    #[error("density bound rho = {0} must be at least 1")]
    DensityBound(f64),

    #[error("malformed spec `{spec}`: {reason}")]
    Spec { spec: String, reason: String },

    #[error("invalid distribution: {0}")]
    InvalidDistribution(String),

    #[error("invalid strategy: {0}")]
    InvalidStrategy(String),

    #[error("value is zero with probability one; bidding zero is optimal and the minimax regret is 0")]
    DegenerateZeroValue,

    #[error("value distribution has an atom of mass {0} at zero; strip it before solving")]
    AtomAtZero(f64),

    #[error("solver failure at step {step}: {reason}")]
    SolverFailure { step: usize, reason: String },

    #[error("quantile strategy is not strictly increasing")]
    NonStrictStrategy,

    #[error("closed-form shading regret does not apply: {0}")]
    Precondition(String),

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("{path}: {source}")]
    Csv {
        path: PathBuf,
        #[source]
        source: csv::Error,
    },
}

impl Error {
    pub(crate) fn spec(spec: impl Into<String>, reason: impl Into<String>) -> Self {
        Error::Spec {
            spec: spec.into(),
            reason: reason.into(),
        }
    }

    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    pub(crate) fn csv(path: impl Into<PathBuf>, source: csv::Error) -> Self {
        Error::Csv {
            path: path.into(),
            source,
        }
    }

    /// Process exit code used by the command-line front end.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::SolverFailure { .. } | Error::NonStrictStrategy => 3,
            _ => 2,
        }
    }
}

pub(crate) fn check_unit(what: &'static str, value: f64) -> Result<f64> {
    if (0.0..=1.0).contains(&value) {
        Ok(value)
    } else {
        Err(Error::Domain { what, value })
    }
}
