use thiserror::Error;

/// Errors produced by the toolkit.
///
/// Each variant maps onto one of the command-line exit classes through
/// [`Error::exit_code`].
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("unknown vertex `{0}`")]
    UnknownVertex(String),

    #[error("group axiom `{axiom}` fails at {witness}")]
    GroupAxiom { axiom: &'static str, witness: String },

    #[error("inconsistent facts for {group}: {detail}")]
    FactConsistency { group: String, detail: String },

    #[error("unsupported operation: {0}")]
    Unsupported(String),

    #[error("resource bound exceeded: {0}")]
    ResourceBound(String),

    #[error("outside the computed ball: {0}")]
    OutOfBall(String),

    #[error("internal error: {0}")]
    Internal(String),
}

impl Error {
    pub fn input(msg: impl Into<String>) -> Self {
        Error::InvalidInput(msg.into())
    }

    pub fn resource(msg: impl Into<String>) -> Self {
        Error::ResourceBound(msg.into())
    }

    pub fn unsupported(msg: impl Into<String>) -> Self {
        Error::Unsupported(msg.into())
    }

    /// Exit code used by the command-line front end: 2 for invalid input,
    /// 3 for an exceeded resource bound (including leaving a computed tree ball).
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::ResourceBound(_) | Error::OutOfBall(_) => 3,
            Error::Internal(_) => 1,
            _ => 2,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
