use std::path::PathBuf;

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("cannot read {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("csv error: {0}")]
    Csv(#[from] csv::Error),

    #[error("target column `{0}` not found")]
    MissingTarget(String),

    #[error("row {row}, column `{column}`: cannot parse `{value}`")]
    Unparseable {
        row: usize,
        column: String,
        value: String,
    },

    #[error("row {row} has {found} fields, expected {expected}")]
    RaggedRow {
        row: usize,
        found: usize,
        expected: usize,
    },

    #[error("target is constant")]
    ConstantTarget,

    #[error("binary response needs both classes present")]
    SingleClass,

    #[error("invalid dataset: {0}")]
    InvalidDataset(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("dimension mismatch: expected {expected}, got {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("learner {learner} does not support a {response} response")]
    UnsupportedResponse {
        learner: &'static str,
        response: &'static str,
    },

    #[error("fit failed: {0}")]
    FitFailed(String),

    #[error("unknown dataset `{0}`")]
    UnknownDataset(String),

    #[error("tuning failed: every evaluation returned a non-finite loss")]
    TuningFailed,

    #[error("json error: {0}")]
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
