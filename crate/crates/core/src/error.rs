use thiserror::Error;

/// Errors surfaced by the geometry engine.
///
/// Integer overflow is deliberately not an `Error` variant: the engine
/// panics on overflow (see [`crate::lattice`]), because a wrapped value
/// would silently corrupt every downstream predicate.
#[derive(Debug, Error)]
pub enum Error {
    #[error("zero vector has no primitive part")]
    ZeroVector,

    #[error("degenerate configuration: {0}")]
    Degenerate(String),

    #[error("invalid fan: {0}")]
    InvalidFan(String),

    #[error("{0}")]
    InvalidArgument(String),

    #[error("dual polytope undefined: {0}")]
    DualUndefined(String),

    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    pub fn degenerate(msg: impl Into<String>) -> Self {
        Error::Degenerate(msg.into())
    }

    pub fn invalid_fan(msg: impl Into<String>) -> Self {
        Error::InvalidFan(msg.into())
    }

    pub fn arg(msg: impl Into<String>) -> Self {
        Error::InvalidArgument(msg.into())
    }

    pub fn parse(line: usize, msg: impl Into<String>) -> Self {
        Error::Parse {
            line,
            msg: msg.into(),
        }
    }
}
