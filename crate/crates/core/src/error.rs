use thiserror::Error;

/// Errors surfaced by instance loading, constraint handling and the algorithms.
#[derive(Debug, Error)]
pub enum Error {
    #[error("item {item} is out of range for a ground set of {n} items")]
    ItemOutOfRange { item: usize, n: usize },

    #[error("distance matrix: {0}")]
    InvalidDistance(String),

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("inconsistent instance: {0}")]
    Inconsistent(String),

    #[error("invalid constraint: {0}")]
    InvalidConstraint(String),

    #[error("subset is not independent under the constraint")]
    NotIndependent,

    #[error("subset is not a basis of the constraint")]
    NotBasis,

    #[error("k = {k} exceeds ground set size n = {n}")]
    BudgetExceedsGroundSet { k: usize, n: usize },

    #[error("invalid budget: {0}")]
    InvalidBudget(String),

    #[error("brute-force guard: n = {n} exceeds the limit of {limit}")]
    GuardViolation { n: usize, limit: usize },

    #[error("unsupported: {0}")]
    Unsupported(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
