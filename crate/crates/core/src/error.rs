use std::path::PathBuf;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("empty input: {0}")]
    EmptyInput(&'static str),

    #[error("unsupported combination: regularizer {reg} with constraint {cons}")]
    Unsupported { reg: String, cons: String },

    #[error("point violates the feasible set by {violation:e}")]
    Infeasible { violation: f64 },

    #[error("problem has no minimizer: {0}")]
    Unbounded(String),

    #[error("reference solver did not converge after {iterations} iterations (residual {residual:e})")]
    NoConvergence { iterations: usize, residual: f64 },

    #[error("config error at line {line}: {reason}")]
    Config { line: usize, reason: String },

    #[error("config error: {0}")]
    Validation(String),

    #[error("every replication failed")]
    AllFailed,

    #[error("unknown verify suite `{name}`; valid suites: {valid}")]
    UnknownSuite { name: String, valid: String },

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("{path}: {reason}")]
    Format { path: PathBuf, reason: String },
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    /// Process exit status used by the command-line tool.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Config { .. } | Error::Validation(_) | Error::InvalidParameter { .. } | Error::Unsupported { .. } | Error::UnknownSuite { .. } => 2,
            Error::Io { .. } | Error::Format { .. } => 4,
            _ => 1,
        }
    }

    pub(crate) fn param(name: &'static str, reason: impl Into<String>) -> Self {
        Error::InvalidParameter { name, reason: reason.into() }
    }

    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io { path: path.into(), source }
    }
}
