use std::path::PathBuf;

use thiserror::Error;

/// Errors raised by the toolkit.
#[derive(Debug, Error)]
pub enum Error {
    /// A vector or table entry does not have the dimension the instance declares.
    #[error("dimension mismatch: expected {expected}, found {found}")]
    Dimension { expected: usize, found: usize },

    /// A point is outside the carrier, or a map sent a point outside it.
    #[error("domain error: {0}")]
    Domain(String),

    /// Constants or instance parameters outside their admissible range.
    #[error("configuration error: {0}")]
    Config(String),

    /// The requested operation is not available for this instance or class.
    #[error("unsupported: {0}")]
    Unsupported(String),

    #[error("I/O error at {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn config(msg: impl Into<String>) -> Self {
        Error::Config(msg.into())
    }

    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }
}
