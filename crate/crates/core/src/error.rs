use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("input {0} contains no rows")]
    EmptyInput(String),

    #[error("row {row}: {msg}")]
    Parse { row: usize, msg: String },

    #[error("need at least {needed} data points, got {got}")]
    InsufficientData { needed: usize, got: usize },

    #[error("slice [{start}, {end}) out of bounds for series of length {len}")]
    Bounds { start: usize, end: usize, len: usize },

    #[error("degenerate volume: average volume {av}, current-block volume {cav}")]
    DegenerateVolume { av: f64, cav: f64 },

    #[error("non-finite value in {0}")]
    NonFinite(&'static str),

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}
