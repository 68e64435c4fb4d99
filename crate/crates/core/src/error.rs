use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("pair ({0}, {0}) is a self-pair")]
    SelfPair(usize),

    #[error("element {element} is outside the ground set 0..{n}")]
    OutOfRange { element: usize, n: usize },

    #[error("n = {n} exceeds the exhaustive-enumeration limit of {limit}")]
    OverLimit { n: usize, limit: usize },

    #[error("invalid cluster count k = {k} for n = {n}")]
    InvalidK { n: usize, k: usize },

    #[error("invalid partition: {0}")]
    InvalidPartition(String),

    #[error("ground-set size mismatch: expected {expected}, got {got}")]
    SizeMismatch { expected: usize, got: usize },

    #[error("answers admit more than one partition: {0}")]
    Ambiguous(String),

    #[error("answers admit no valid partition: {0}")]
    Infeasible(String),

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("minimax node budget of {budget} exhausted; value is at least {lower_bound}")]
    BudgetExhausted { lower_bound: u32, budget: usize },

    #[error("query cap of {cap} exceeded")]
    QueryCapExceeded { cap: usize },

    #[error("incompatible configuration: {0}")]
    Incompatible(String),

    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
