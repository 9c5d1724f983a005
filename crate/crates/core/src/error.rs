//! Error type shared by all modules.

use std::path::PathBuf;

/// Crate-wide error type.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    /// Underlying I/O failure, annotated with the path involved.
    #[error("i/o error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    /// A field failed to parse (non-numeric where a number was expected, etc.).
    #[error("parse error at {path}:{line}: {msg}")]
    Parse {
        path: PathBuf,
        line: usize,
        msg: String,
    },

    /// Structurally invalid file contents (wrong column count, bad header,
    /// dimension mismatch), naming the offending line.
    #[error("format error at {path}:{line}: {msg}")]
    Format {
        path: PathBuf,
        line: usize,
        msg: String,
    },

    /// A reference (utt id, model id, household id) does not resolve.
    #[error("referential integrity violation: {0}")]
    Integrity(String),

    /// Invalid argument or state for an operation.
    #[error("domain error: {0}")]
    Domain(String),

    /// Parameter estimation failed (insufficient or degenerate data).
    #[error("estimation error: {0}")]
    Estimation(String),

    /// Inconsistent configuration of a back-end or algorithm.
    #[error("configuration error: {0}")]
    Config(String),

    /// Numerical failure (singular matrix, non-finite intermediate).
    #[error("numerical error: {0}")]
    Numerical(String),
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    pub(crate) fn parse(path: impl Into<PathBuf>, line: usize, msg: impl Into<String>) -> Self {
        Error::Parse {
            path: path.into(),
            line,
            msg: msg.into(),
        }
    }

    pub(crate) fn format(path: impl Into<PathBuf>, line: usize, msg: impl Into<String>) -> Self {
        Error::Format {
            path: path.into(),
            line,
            msg: msg.into(),
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
