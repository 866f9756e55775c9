use thiserror::Error;

/// Errors raised across the crate.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("invalid letter {letter:?} at position {position}")]
    InvalidLetter { letter: char, position: usize },

    #[error("word over the wrong alphabet: expected {expected}")]
    WrongAlphabet { expected: &'static str },

    #[error("illegal word: {0}")]
    IllegalWord(String),

    #[error("orbit of k = {k} meets the zero set of det B at step {step}")]
    SingularOrbit { k: f64, step: usize },

    #[error("numerical non-convergence: {0}")]
    NonConvergence(String),

    #[error("hypothesis violated: {0}")]
    Hypothesis(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid(msg: impl Into<String>) -> Error {
    Error::InvalidParameter(msg.into())
}
