use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    /// A parameter lies outside the domain its operation accepts.
    #[error("parameter `{name}` out of domain: {reason}")]
    Domain { name: &'static str, reason: String },

    #[error("dimension mismatch: expected {expected}, got {actual}")]
    DimensionMismatch { expected: usize, actual: usize },

    #[error("index {index} out of range for length {len}")]
    IndexOutOfRange { index: usize, len: usize },

    #[error("noise gain is positive but no random stream was supplied")]
    MissingRng,

    #[error("averaging window [{t0}, {t_end}] is empty or exceeds trajectory of {len} states")]
    EmptyWindow { t0: usize, t_end: usize, len: usize },

    #[error("activity is undefined at step 0")]
    ActivityAtStepZero,

    #[error("state entry must be -1 or +1, found {0}")]
    InvalidSpin(i64),

    #[error("invalid link ({row}, {col}, {sign}): {reason}")]
    InvalidLink {
        row: usize,
        col: usize,
        sign: i64,
        reason: &'static str,
    },

    #[error("sweep cell (x = {x}, d = {d}) failed: {source}")]
    Cell {
        x: f64,
        d: f64,
        #[source]
        source: Box<Error>,
    },

    #[error("invalid config key `{key}`: {reason}")]
    Config { key: String, reason: String },

    #[error("i/o error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn domain(name: &'static str, reason: impl Into<String>) -> Self {
        Error::Domain {
            name,
            reason: reason.into(),
        }
    }

    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}
