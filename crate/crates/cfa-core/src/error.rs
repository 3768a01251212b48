use thiserror::Error;

/// Errors produced by every module in this crate.
#[derive(Debug, Error)]
pub enum Error {
    #[error("non-finite score for item `{item}` in system `{system}`")]
    NonFiniteScore { system: String, item: String },

    #[error("rank-score functions differ in length: {left} vs {right}")]
    LengthMismatch { left: usize, right: usize },

    #[error("cognitive diversity needs at least 2 rank positions, got {0}")]
    DegenerateLength(usize),

    #[error("need at least 2 scoring systems, got {0}")]
    NeedTwoSystems(usize),

    #[error("unknown system `{0}`")]
    UnknownSystem(String),

    #[error("fusion subset needs at least 2 systems, got {0}")]
    SubsetTooSmall(usize),

    #[error("negative diversity-strength weight {weight} for system `{system}`")]
    NegativeWeight { system: String, weight: f64 },

    #[error("minimum subset size must be in 1..={k}, got {min_size}")]
    InvalidMinSize { min_size: usize, k: usize },

    #[error("weak orders are over different item sets ({left} vs {right} items)")]
    ItemSetMismatch { left: usize, right: usize },

    #[error("{what} is capped at n = {cap}, got n = {n}")]
    TooLarge {
        what: &'static str,
        cap: usize,
        n: usize,
    },

    #[error("parse error at {location}: {message}")]
    Parse { location: String, message: String },

    #[error("validation failed: {0}")]
    Validation(String),

    #[error("unit scorer failed: {0}")]
    ScorerFailure(String),

    #[error("invalid synthetic spec: {0}")]
    InvalidSpec(String),

    #[error("question `{id}`: {source}")]
    Question {
        id: String,
        #[source]
        source: Box<Error>,
    },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
