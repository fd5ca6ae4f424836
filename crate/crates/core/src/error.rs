use std::path::PathBuf;

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    /// A field left its admissible range (e.g. nonpositive absolute temperature).
    #[error("invalid state in field `{field}`: {reason}")]
    InvalidState { field: &'static str, reason: String },

    /// A sub-step could not be completed; the caller may retry with a smaller dt.
    #[error("step {step} failed in field `{field}`: {reason}")]
    StepFailure {
        step: u64,
        field: &'static str,
        reason: String,
    },

    #[error("grid mismatch: {0}")]
    GridMismatch(String),

    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error("parse error on line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error("invalid value for `{key}`: {msg}")]
    Validation { key: String, msg: String },

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl Error {
    pub(crate) fn invalid_state(field: &'static str, reason: impl Into<String>) -> Self {
        Error::InvalidState {
            field,
            reason: reason.into(),
        }
    }

    pub(crate) fn validation(key: impl Into<String>, msg: impl Into<String>) -> Self {
        Error::Validation {
            key: key.into(),
            msg: msg.into(),
        }
    }

    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}
