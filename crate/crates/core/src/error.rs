use std::path::PathBuf;

use thiserror::Error;

use crate::domain::ComponentId;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("geometry error: {0}")]
    Geometry(String),

    #[error("adjacency error: {0}")]
    Adjacency(String),

    #[error("field error on {comp}: {msg}")]
    Field { comp: ComponentId, msg: String },

    #[error("invalid parameter: {0}")]
    Parameter(String),

    #[error("assembly error in {comp}, triangle {triangle}, term `{term}`: non-finite contribution")]
    Assembly {
        comp: ComponentId,
        triangle: usize,
        term: &'static str,
    },

    #[error("index ({row}, {col}) out of range for dimension {dim}")]
    IndexOutOfRange { row: usize, col: usize, dim: usize },

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("matrix is singular to working precision at pivot {pivot}")]
    Singular { pivot: usize },

    #[error("configuration error: {0}")]
    Config(String),

    #[error("check failed: {0}")]
    Check(String),

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("json: {0}")]
    Json(#[from] serde_json::Error),

    #[error("csv: {0}")]
    Csv(#[from] csv::Error),
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}
