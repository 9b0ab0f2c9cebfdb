use thiserror::Error;

use crate::model::FeasibilityReport;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid instance: {0}")]
    InvalidInstance(String),

    #[error("unknown location id {id} (metric has {size} locations)")]
    UnknownLocation { id: usize, size: usize },

    #[error("infeasible assignment: {0}")]
    Infeasible(FeasibilityReport),

    #[error("domain error: {0}")]
    Domain(String),

    #[error("perfect matching needs an even vertex count, got {0}")]
    OddCardinality(usize),

    #[error("bad parameter: {0}")]
    Parameter(String),

    #[error("input too large: {0}")]
    TooLarge(String),

    #[error("budget exceeded: {0}")]
    BudgetExceeded(String),

    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error("unsupported format version `{0}`")]
    Version(String),

    #[error("internal error: {0}")]
    Internal(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
