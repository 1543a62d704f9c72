use thiserror::Error;

/// Errors raised by the solvers, operators and the command line front end.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("shape mismatch in {context}: expected {expected}, got {actual}")]
    Shape {
        context: &'static str,
        expected: String,
        actual: String,
    },

    #[error("field kind mismatch in {context}: expected {expected}, got {actual}")]
    Kind {
        context: &'static str,
        expected: String,
        actual: String,
    },

    #[error("material tensor is not positive definite at {location}")]
    NotPositive { location: String },

    #[error("{0}")]
    Unsupported(String),

    #[error("configuration error: {0}")]
    Config(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid(name: &'static str, reason: impl Into<String>) -> Error {
    Error::InvalidParameter {
        name,
        reason: reason.into(),
    }
}

pub(crate) fn shape(
    context: &'static str,
    expected: impl ToString,
    actual: impl ToString,
) -> Error {
    Error::Shape {
        context,
        expected: expected.to_string(),
        actual: actual.to_string(),
    }
}
