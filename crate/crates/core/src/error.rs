use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("lattice index {index:?} out of range for n = {n}")]
    Index { index: [usize; 3], n: usize },

    #[error("invalid grid: {0}")]
    Grid(String),

    #[error("domain error: {0}")]
    Domain(String),

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("grid mismatch: fields live on different lattices")]
    GridMismatch,

    #[error("radius {radius} is below the lattice resolution limit {limit}")]
    InsufficientResolution { radius: f64, limit: f64 },

    #[error(
        "decay character is ill-defined: log-log fit residual {residual:.4} exceeds {threshold}"
    )]
    IllDefinedCharacter { residual: f64, threshold: f64 },

    #[error("estimated decay character {r_star:.4} is at or below the lower limit -3/2")]
    BelowLowerLimit { r_star: f64 },

    #[error("insufficient data: {0}")]
    InsufficientData(String),

    #[error("non-finite values detected at t = {time}")]
    BlowUp { time: f64 },

    #[error("Picard iteration is not contracting (distances {distances:?})")]
    NonContraction { distances: Vec<f64> },

    #[error("config error in `{field}`: {message}")]
    Config { field: String, message: String },

    #[error("I/O error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("JSON error in {path}: {source}")]
    Json {
        path: PathBuf,
        #[source]
        source: serde_json::Error,
    },

    #[error("CSV error in {path}: {source}")]
    Csv {
        path: PathBuf,
        #[source]
        source: csv::Error,
    },
}

impl Error {
    pub(crate) fn config(field: impl Into<String>, message: impl Into<String>) -> Self {
        Error::Config {
            field: field.into(),
            message: message.into(),
        }
    }

    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}
