use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("point is not part of the labeling domain")]
    NotInDomain,

    #[error("labeling domain does not contain sample point {0}")]
    DomainMissingSample(usize),

    #[error("query budget of {0} exhausted")]
    BudgetExhausted(usize),

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("version space became empty; the target is not in the hypothesis table")]
    EmptyVersionSpace,

    #[error("labeled set is not separable by a homogeneous halfspace")]
    NonSeparable,

    #[error("forster transform failed: {0}")]
    ForsterNonConvergence(String),

    #[error("instance too large: {0}")]
    TooLarge(String),

    #[error("retry cap exceeded: kept {achieved} of {target} sets")]
    RetryCap { achieved: usize, target: usize },

    #[error("no initialization succeeded after {0} redraws")]
    InitializationExhausted(usize),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error("config: {0}")]
    Config(String),
}

pub type Result<T> = std::result::Result<T, Error>;
