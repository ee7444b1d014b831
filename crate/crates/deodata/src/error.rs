use std::io;

use thiserror::Error;

/// Errors produced by ingestion, derivation, prediction, and the harness.
#[derive(Debug, Error)]
pub enum Error {
    #[error("empty input: {0}")]
    EmptyInput(&'static str),

    /// A CSV record whose field count differs from the first record.
    /// `row` is the 1-based record number within the file (a header counts).
    #[error("row {row}: expected {expected} fields, found {found}")]
    RaggedRow {
        row: usize,
        expected: usize,
        found: usize,
    },

    #[error("target column {index} out of range for {width} columns")]
    TargetOutOfRange { index: usize, width: usize },

    #[error("query has {found} values but the dataset has {expected} attributes")]
    ArityMismatch { expected: usize, found: usize },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("outcome {outcome:?} has {available} images, need at least {required}")]
    InsufficientImages {
        outcome: String,
        available: usize,
        required: usize,
    },

    #[error("unknown algorithm id {0:?}")]
    UnknownAlgorithm(String),

    #[error("unknown impurity measure {0:?} (expected \"entropy\", \"gini\", or \"energy\")")]
    UnknownMeasure(String),

    #[error("malformed result file: {0}")]
    MalformedResult(String),

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Io(#[from] io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
