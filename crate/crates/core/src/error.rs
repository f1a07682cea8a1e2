use thiserror::Error;

/// Errors raised by the construction, evaluation and verification layers.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    /// An argument is outside the domain of the operation.
    #[error("domain error: {0}")]
    Domain(String),

    /// An input violates a documented precondition.
    #[error("precondition violated: {0}")]
    Precondition(String),

    /// A certified comparison could not be separated within the precision cap.
    #[error("indeterminate: {what} could not be decided at {precision} bits")]
    Indeterminate { what: String, precision: u32 },

    /// A required integer or exponent exceeds the configured bit budget.
    #[error("OVERFLOW at {quantity}: {detail}")]
    Overflow { quantity: String, detail: String },

    /// An oracle path was asked for more work than it allows.
    #[error("size limit exceeded: {0}")]
    SizeLimit(String),

    /// Malformed textual input (fractions, growth-function specs, state files).
    #[error("parse error: {0}")]
    Parse(String),
}

impl Error {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }

    pub(crate) fn precondition(msg: impl Into<String>) -> Self {
        Error::Precondition(msg.into())
    }

    pub(crate) fn parse(msg: impl Into<String>) -> Self {
        Error::Parse(msg.into())
    }

    pub(crate) fn overflow(quantity: impl Into<String>, detail: impl Into<String>) -> Self {
        Error::Overflow {
            quantity: quantity.into(),
            detail: detail.into(),
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
