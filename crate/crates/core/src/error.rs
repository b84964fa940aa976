//! Error types shared across the crate.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error("alphabet error: {0}")]
    Alphabet(String),

    #[error("symbol id {0} outside the source alphabet")]
    OutOfAlphabet(u8),

    #[error("substitution is not prolongable over '{0}'")]
    NotProlongable(String),

    #[error("the generated word is finite: {0}")]
    FiniteWord(String),

    #[error("normalization failed: {0}")]
    Normalize(String),

    #[error("invalid input: {0}")]
    Invalid(String),

    #[error("resource cap exceeded: {0}")]
    ResourceCap(String),

    #[error("scheme invariant violated: {0}")]
    Scheme(String),

    #[error("decision could not be completed: {0}")]
    Inconclusive(String),

    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
