use std::path::PathBuf;

use thiserror::Error;

/// Errors produced by the estimation, risk and verification routines.
#[derive(Debug, Error)]
pub enum Error {
    /// An argument lies outside the range where the operation is defined.
    #[error("domain error: {0}")]
    Domain(String),

    /// Input data could not be used (too short, non-finite, malformed).
    #[error("invalid input: {0}")]
    Input(String),

    #[error("i/o error on {path}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("csv error: {0}")]
    Csv(#[from] csv::Error),

    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }

    pub(crate) fn input(msg: impl Into<String>) -> Self {
        Error::Input(msg.into())
    }

    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
