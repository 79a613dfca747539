use thiserror::Error;

/// Errors raised by the numerical core.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("grid mismatch: {0}")]
    GridMismatch(String),
    #[error("unsupported angular index: {0}")]
    UnsupportedIndex(String),
    #[error("grid too coarse: {0}")]
    GridTooCoarse(String),
    #[error("linear solver breakdown at block {block}")]
    SolverBreakdown { block: usize },
}

pub type Result<T> = std::result::Result<T, Error>;
