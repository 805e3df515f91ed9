use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid level grid: {0}")]
    InvalidGrid(String),

    #[error("invalid fuzzy number: {0}")]
    InvalidFuzzyNumber(String),

    #[error("parameter `{name}` = {value} is out of range: {reason}")]
    InvalidParameter {
        name: &'static str,
        value: f64,
        reason: &'static str,
    },

    #[error("negative weight {weight} at position {index}")]
    NegativeWeight { index: usize, weight: f64 },

    #[error("length mismatch: {weights} weights for {terms} terms")]
    LengthMismatch { weights: usize, terms: usize },

    #[error("sequence is empty")]
    EmptySequence,

    #[error("index {index} is out of range for a sequence of {len} terms")]
    IndexOutOfRange { index: usize, len: usize },

    #[error("too few points: need at least {needed}, got {got}")]
    TooShort { needed: usize, got: usize },
}
