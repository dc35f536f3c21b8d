use thiserror::Error;

use crate::lattice::SupportSet;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("malformed rational {text:?}: {reason}")]
    MalformedRational { text: String, reason: String },

    #[error("invalid norm specification: {0}")]
    InvalidNorm(String),

    #[error("budget exceeded: {0}")]
    Budget(String),

    #[error("indeterminate comparison: {0}")]
    Indeterminate(String),

    #[error("support not achievable: {0}")]
    NotAchievable(SupportSet),

    #[error("overlapping blocks: atom {0} appears in more than one block")]
    OverlappingBlocks(usize),

    #[error("block {block} is empty or escapes the atom range")]
    InvalidBlock { block: usize },

    #[error("functional support escapes block {block}")]
    FunctionalEscapesBlock { block: usize },

    #[error("vector support escapes block {block}")]
    VectorEscapesBlock { block: usize },

    #[error("vector for block {block} does not fill its block")]
    VectorDoesNotFillBlock { block: usize },

    #[error("zero vector for block {block}")]
    ZeroVector { block: usize },

    #[error("zero functional for block {block}")]
    ZeroFunctional { block: usize },

    #[error("invalid piecewise polynomial: {0}")]
    InvalidPiecewise(String),

    #[error("hypothesis violated: {0}")]
    Hypothesis(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error("internal consistency failure: {0}")]
    Internal(String),
}
