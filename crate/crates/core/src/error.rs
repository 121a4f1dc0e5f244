use thiserror::Error;

use crate::puzzle::PuzzleKind;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("kind mismatch: expected {expected}, found {found}")]
    KindMismatch { expected: PuzzleKind, found: PuzzleKind },

    #[error("constructive schedule unsupported for n={n}, k={k}")]
    Unsupported { n: u32, k: u32 },

    #[error("configuration error: {0}")]
    Config(String),

    #[error("schema error on line {line}: {message}")]
    Schema { line: usize, message: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidParameter(msg.into())
    }
}
