use thiserror::Error;

/// Errors surfaced by samplers, oracles, solvers and training loops.
#[derive(Debug, Clone, Error)]
pub enum Error {
    /// A scalar or structural argument violated a precondition.
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    /// Vector lengths do not agree.
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    /// The state space is too large to enumerate exhaustively.
    #[error("intractable enumeration: {0}")]
    IntractableEnumeration(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn check_dim(expected: usize, got: usize) -> Result<()> {
    if expected == got {
        Ok(())
    } else {
        Err(Error::DimensionMismatch { expected, got })
    }
}
