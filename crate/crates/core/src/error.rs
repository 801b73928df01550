use std::path::PathBuf;

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid rating scale: {0}")]
    InvalidScale(String),

    #[error("empty sample")]
    EmptySample,

    #[error("rating {value} at index {index} is outside 1..={m}")]
    RatingOutOfRange { index: usize, value: i64, m: usize },

    #[error("category {category} is outside 1..={m}")]
    CategoryOutOfRange { category: usize, m: usize },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("observed category {category} has zero probability under the model")]
    ZeroProbability { category: usize },

    #[error("degenerate sample: {0}")]
    DegenerateSample(String),

    #[error("likelihood ratio statistic {0} is negative; the larger model fit did not converge")]
    NegativeLrStatistic(f64),

    #[error("observed information is not positive definite (boundary or ill-conditioned fit)")]
    IllConditionedInformation,

    #[error("{0} profile carries no hesitancy; use membership-based weights")]
    MissingHesitancy(&'static str),

    #[error("weights undefined; use uniform")]
    WeightsUndefined,

    #[error("invalid weights: {0}")]
    InvalidWeights(String),

    #[error("length mismatch: expected {expected}, found {found}")]
    LengthMismatch { expected: usize, found: usize },

    #[error("no complete rows to aggregate")]
    EmptyRows,

    #[error("no data rows")]
    NoDataRows,

    #[error("malformed cell at row {row}, column {column}: {value:?}")]
    MalformedCell { row: usize, column: usize, value: String },

    #[error("cell at row {row}, column {column} ({item}) holds {value}, outside 1..={m}")]
    CellOutOfRange {
        row: usize,
        column: usize,
        item: String,
        value: i64,
        m: usize,
    },

    #[error("csv: {0}")]
    Csv(#[from] csv::Error),

    #[error("{path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },

    #[error("config: {0}")]
    Config(String),
}
