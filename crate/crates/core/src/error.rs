use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid pmf: {0}")]
    InvalidPmf(String),

    #[error("alphabet mismatch: {0}")]
    AlphabetMismatch(String),

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("invalid instance: {0}")]
    InvalidInstance(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("invalid sample: {0}")]
    InvalidSample(String),

    #[error("enumeration budget exceeded: {needed} outcomes > budget {budget}")]
    BudgetExceeded { needed: u128, budget: u128 },

    #[error("learner output is not a codebook member")]
    OutsideCodebook,

    #[error("hypothesis unmet: {0}")]
    HypothesisUnmet(String),

    #[error("parse error: {0}")]
    Parse(String),
}
