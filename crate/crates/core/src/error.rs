use thiserror::Error;

/// Errors raised by the simulation and oracle routines.
#[derive(Debug, Error)]
pub enum Error {
    #[error("tree size must be at least 1")]
    EmptyTree,

    #[error("probability {0} is outside the open interval (0, 1)")]
    InvalidProbability(f64),

    #[error("n = {n} exceeds the enumeration cap of {cap}")]
    EnumerationCap { n: usize, cap: usize },

    #[error("marks cover {marks} vertices but the tree has {vertices}")]
    MarksMismatch { marks: usize, vertices: usize },

    #[error("invalid census: {0}")]
    InvalidCensus(String),

    #[error("partition was not derived from the given tree and marks: {0}")]
    MismatchedPartition(String),

    #[error("no stop condition given (need t_end or n_end)")]
    MissingStopCondition,

    #[error("size class {class} exceeds the configured ceiling {ceiling}")]
    ClassCeilingExceeded { class: usize, ceiling: usize },

    #[error("trajectory too short: {0}")]
    InsufficientTrajectory(String),

    #[error("linear solve failed: {0}")]
    LinearSolve(String),

    #[error("exponent q = {0} must satisfy q >= 1")]
    InvalidExponent(f64),

    #[error("vector entry {index} is negative or NaN ({value})")]
    NegativeEntry { index: usize, value: f64 },

    #[error("index out of range: {0}")]
    OutOfRange(String),

    #[error("malformed tree record: {0}")]
    InvalidRecord(String),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn check_probability(p: f64) -> Result<()> {
    if p > 0.0 && p < 1.0 {
        Ok(())
    } else {
        Err(Error::InvalidProbability(p))
    }
}
