use num_bigint::BigUint;
use thiserror::Error;

/// Errors shared across the crate.
#[derive(Debug, Error)]
pub enum Error {
    #[error("vertex count must be at least {min}, got {n}")]
    VertexCountTooSmall { n: u32, min: u32 },

    #[error("vertex count {n} exceeds the dense-representation ceiling {max}")]
    VertexCountTooLarge { n: u32, max: u32 },

    #[error("probability {p} is outside [0, 1]")]
    InvalidProbability { p: f64 },

    #[error("requested {requested} edges but K_{n} has only {max}")]
    EdgeCountExceedsComplete { requested: u64, n: u32, max: u64 },

    #[error("catalog for n = {n} needs a budget of {required} copies, limit is {budget}")]
    CatalogBudget {
        n: u32,
        required: BigUint,
        budget: u64,
    },

    #[error("enumeration budget exceeded: {0}")]
    EnumerationBudget(String),

    #[error("inputs outside the statement's hypothesis: {0}")]
    OutsideHypothesis(String),

    #[error("mismatched vertex counts: {left} vs {right}")]
    VertexCountMismatch { left: u32, right: u32 },

    #[error("audit failed: {0}")]
    AuditFailed(String),

    #[error("degenerate data: {0}")]
    DegenerateData(String),

    #[error("invalid graph file: {0}")]
    GraphFormat(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
