use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    /// The chain starting at `start` does not meet a prefix of length `len`.
    #[error("chain J({start}) does not intersect a prefix of length {len}")]
    EmptyRestriction { start: u64, len: usize },

    #[error("chain index must be a positive odd integer, got {0}")]
    InvalidChainIndex(u64),

    #[error("argument out of domain: {0}")]
    Domain(String),

    #[error("word is not admissible in the multiplicative golden mean shift")]
    Inadmissible,

    #[error("word length {0} is odd; an even length is required")]
    OddLength(usize),

    #[error("malformed word: {0}")]
    MalformedWord(String),

    #[error("certification failed: {0}")]
    CertificationFailure(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
}

pub type Result<T> = std::result::Result<T, Error>;
