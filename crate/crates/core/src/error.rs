use std::path::PathBuf;

use thiserror::Error;

/// Errors raised anywhere in the simulator.
#[derive(Debug, Error)]
pub enum Error {
    /// An input lies outside the domain an operation accepts.
    #[error("domain error: {0}")]
    Domain(String),

    /// Architecture or config text that is not syntactically valid.
    #[error("parse error at line {line}, column {column}: {message}")]
    Parse {
        line: usize,
        column: usize,
        message: String,
    },

    /// Syntactically valid input that violates the documented schema.
    #[error("schema error in `{field}`: {message}")]
    Schema { field: String, message: String },

    /// Tensor or matrix shapes that do not line up.
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    /// A Fock space larger than the configured cap.
    #[error("Fock dimension {dimension} exceeds the cap of {cap}")]
    Capacity { dimension: usize, cap: usize },

    /// A numerical routine that failed to reach its tolerance.
    #[error("convergence failure: {0}")]
    Convergence(String),

    #[error("config error: {0}")]
    Config(String),

    #[error("I/O error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }

    pub(crate) fn schema(field: impl Into<String>, msg: impl Into<String>) -> Self {
        Error::Schema {
            field: field.into(),
            message: msg.into(),
        }
    }

    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}
