use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("parse error: {0}")]
    Parse(String),

    #[error("truncation windows are incompatible: {0}")]
    TruncationMismatch(String),

    #[error("invalid truncation window: {0}")]
    InvalidWindow(String),

    #[error("operator depth insufficient: {0}")]
    InsufficientDepth(String),

    #[error("unbounded expansion: {0}")]
    UnboundedExpansion(String),

    #[error("operator is not a square-root candidate: {0}")]
    NotLaxOperator(String),

    /// A residual that must vanish by theory did not. Carries the offending
    /// data so callers can print it.
    #[error("internal consistency failure: {0}")]
    Consistency(String),

    #[error("not a total x-derivative: {0}")]
    NotExact(String),

    #[error("not a variational gradient: {0}")]
    NotGradient(String),

    #[error("negative epsilon exponent present: {0}")]
    NegativeEpsilon(String),

    #[error("ramification data violates a constraint: {0}")]
    Ramification(String),

    #[error("unstable pair (g, n) = ({0}, {1})")]
    Unstable(u32, usize),

    #[error("computation cancelled")]
    Cancelled,
}

pub type Result<T> = std::result::Result<T, Error>;
