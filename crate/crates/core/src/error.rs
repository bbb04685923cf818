use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error("group {0} has no receivers")]
    EmptyGroup(usize),
    #[error("CU link on channel {0} is blocked (zero gain)")]
    BlockedCuLink(usize),
    #[error("logarithm of a non-positive quantity on channel {0}")]
    NonPositiveLog(usize),
    #[error("path-loss exponent must exceed 2 for the outage model, got {0}")]
    OutageExponent(f64),
    #[error("non-finite weight at ({row}, {col})")]
    NonFiniteWeight { row: usize, col: usize },
    #[error("{0}")]
    InvalidInput(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
