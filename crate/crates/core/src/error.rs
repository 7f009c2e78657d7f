use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid modulus {0}: moduli must be >= 1")]
    InvalidModulus(i64),
    #[error("parse error: {0}")]
    Parse(String),
    #[error("rank mismatch: expected {expected} coordinates, found {found}")]
    RankMismatch { expected: usize, found: usize },
    #[error("element not in group: {0}")]
    NotInGroup(String),
    #[error("character xi must be nonzero")]
    ZeroCharacter,
    #[error("unsupported: {0}")]
    Unsupported(String),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("constant is infinite: {0}")]
    InfiniteConstant(String),
    #[error("search exceeds the configured tier: {0}")]
    BeyondTier(String),
    #[error("hypothesis fails: {0}")]
    Hypothesis(String),
    #[error("internal validation failed: {0}")]
    Validation(String),
    #[error("witness rejected: {0}")]
    WitnessRejected(String),
    #[error("checkpoint mismatch: {0}")]
    Checkpoint(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
