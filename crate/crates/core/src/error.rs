use thiserror::Error;

/// Errors shared across the library.
#[derive(Debug, Error)]
pub enum Error {
    /// One or more structural invariants of an election document failed.
    /// Every violation found is listed, not just the first.
    #[error("invalid election: {}", .0.join("; "))]
    Validation(Vec<String>),

    #[error("malformed JSON: {0}")]
    Json(#[from] serde_json::Error),

    #[error("committee member {member} out of range (m = {num_candidates})")]
    InvalidCommittee { member: usize, num_candidates: usize },

    #[error("committee has {actual} members, expected {expected}")]
    WrongCommitteeSize { expected: usize, actual: usize },

    #[error("candidate index {index} out of range (m = {num_candidates})")]
    CandidateOutOfRange { index: usize, num_candidates: usize },

    #[error("work budget of {budget} exceeded {context}")]
    BudgetExceeded { budget: u64, context: String },

    #[error("precondition failed: {0}")]
    Precondition(String),

    #[error("non-finite coordinate in geometry")]
    NonFiniteCoordinate,

    #[error("ballots inconsistent with geometry: voter {voter}, candidate {candidate}")]
    GeometryMismatch { voter: usize, candidate: usize },

    #[error("candidate intervals are nested: candidates {0} and {1}")]
    NestedIntervals(usize, usize),

    #[error("price undefined: JR-constrained optimum is zero")]
    UndefinedPrice,

    #[error("invalid model parameter: {0}")]
    InvalidParameter(String),

    #[error("resampling budget exhausted for voter {0} (no non-empty ballot reachable)")]
    ResampleExhausted(usize),

    #[error("{0}")]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
