use thiserror::Error;

/// Errors raised across the toolkit.
#[derive(Debug, Error)]
pub enum Error {
    #[error("width mismatch: expected {expected} bits, got {actual}")]
    WidthMismatch { expected: usize, actual: usize },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("resource limit exceeded for {what}: requires {required}, available {available}")]
    Resource {
        what: &'static str,
        required: usize,
        available: usize,
    },

    #[error("depth violation: {0}")]
    DepthViolation(String),

    #[error("budget exceeded: {0}")]
    BudgetExceeded(String),

    #[error("map is not injective: inputs {first} and {second} both map to {image}")]
    NotInjective { first: u64, second: u64, image: u64 },

    #[error("impossible hidden-set parameters: target size {target} cannot contain {required} true elements")]
    ImpossibleHiddenSet { target: usize, required: usize },

    #[error("internal consistency failure: {0}")]
    InternalConsistency(String),

    #[error("contract violation: {0}")]
    ContractViolation(String),

    #[error("malformed data: {0}")]
    Format(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
