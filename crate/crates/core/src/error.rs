use thiserror::Error;

use crate::verify::Violation;

pub type Result<T, E = RamseyError> = std::result::Result<T, E>;

/// A malformed colouring or certificate file.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("line {line}: {message}")]
pub struct ParseError {
    pub line: usize,
    pub message: String,
}

impl ParseError {
    pub(crate) fn new(line: usize, message: impl Into<String>) -> Self {
        Self {
            line,
            message: message.into(),
        }
    }
}

#[derive(Debug, Error)]
pub enum RamseyError {
    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("parse error at {0}")]
    Parse(#[from] ParseError),

    #[error("enumeration budget exceeded: {required} candidates required, budget is {budget}")]
    BudgetExceeded { required: u128, budget: u128 },

    /// A certificate whose recorded hash or bound disagrees with its colouring.
    #[error("certificate rejected: {0}")]
    CertificateMismatch(String),

    #[error("colouring is not clique-free: {0}")]
    NotCliqueFree(Violation),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl RamseyError {
    pub(crate) fn config(msg: impl Into<String>) -> Self {
        Self::Config(msg.into())
    }

    pub(crate) fn precondition(msg: impl Into<String>) -> Self {
        Self::Precondition(msg.into())
    }
}
