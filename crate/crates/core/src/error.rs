use std::path::PathBuf;

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("i/o error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("csv error: {0}")]
    Csv(#[from] csv::Error),

    #[error("missing value at row {row}, column `{column}`")]
    MissingValue { row: usize, column: String },

    #[error("cannot parse `{value}` at row {row}, column `{column}` as a number")]
    Unparseable {
        row: usize,
        column: String,
        value: String,
    },

    #[error("unknown column `{0}`")]
    UnknownColumn(String),

    #[error("duplicate id `{0}`")]
    DuplicateId(String),

    #[error("dataset needs at least 2 points, got {0}")]
    TooFewPoints(usize),

    #[error("population must be strictly positive, got {value} for `{id}`")]
    NonPositivePopulation { id: String, value: f64 },

    #[error("non-finite value in {0}")]
    NonFinite(&'static str),

    #[error("areas {i} and {j} share the same location; jitter or merge them before computing gravity weights")]
    CoincidentAreas { i: usize, j: usize },

    #[error("cluster {0} has zero total membership weight")]
    DegenerateCluster(usize),

    #[error("constant context series: standard deviation is zero")]
    ConstantSeries,

    #[error("context value {value} on line {line} is outside (0, 1]")]
    ContextOutOfRange { line: usize, value: f64 },

    #[error("cannot parse context value `{value}` on line {line}")]
    ContextUnparseable { line: usize, value: String },

    #[error("shape mismatch: {0}")]
    Shape(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    pub(crate) fn param(msg: impl Into<String>) -> Self {
        Error::InvalidParameter(msg.into())
    }
}
