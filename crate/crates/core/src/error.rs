use std::path::PathBuf;

use thiserror::Error;

/// Errors produced by the ELMVIS core.
#[derive(Debug, Error)]
pub enum ElmvisError {
    /// Bad shapes, indices or parameter values supplied by the caller.
    #[error("invalid argument: {0}")]
    Argument(String),

    /// A numerical routine received non-finite data or failed to converge.
    #[error("numeric failure: {0}")]
    Numeric(String),

    /// The optimizer was asked for an operation its current state cannot support.
    #[error("invalid state: {0}")]
    State(String),

    /// Input data is well-formed but unusable (e.g. a zero row that cannot be normalized).
    #[error("data error: {0}")]
    Data(String),

    /// The requested problem size exceeds what an exact routine supports.
    #[error("capability exceeded: {0}")]
    Capability(String),

    #[error("parse error in {path}: line {line}, column {column}: {message}")]
    Parse {
        path: PathBuf,
        line: usize,
        column: usize,
        message: String,
    },

    #[error("i/o error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

pub type Result<T, E = ElmvisError> = std::result::Result<T, E>;

pub(crate) fn arg_err<T>(msg: impl Into<String>) -> Result<T> {
    Err(ElmvisError::Argument(msg.into()))
}
