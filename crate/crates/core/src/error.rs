use thiserror::Error;

/// Errors raised by the imaginarity toolkit.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("expected a square matrix, got {rows}x{cols}")]
    NotSquare { rows: usize, cols: usize },

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("matrix contains non-finite entries")]
    NonFinite,

    #[error("matrix is not Hermitian within tolerance")]
    NotHermitian,

    #[error("invalid tolerance: {0}")]
    InvalidTolerance(String),

    #[error("invalid density matrix: {0}")]
    InvalidState(String),

    #[error("invalid pure state: {0}")]
    InvalidPureState(String),

    #[error("matrix is not unitary within tolerance")]
    NotUnitary,

    #[error("map is not completely positive (min Choi eigenvalue {0:e})")]
    NotCompletelyPositive(f64),

    #[error("map is not trace preserving (deviation {0:e})")]
    NotTracePreserving(f64),

    #[error("Kraus operators are not complete (deviation {0:e})")]
    IncompleteKraus(f64),

    #[error("Kraus operators must be real for a real orthogonal dilation")]
    ComplexKraus,

    #[error("sampler did not converge after {0} iterations")]
    NoConvergence(usize),

    #[error("not convertible: M(source) = {source_measure} < M(target) = {target_measure}")]
    NotConvertible {
        source_measure: f64,
        target_measure: f64,
    },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}

pub type Result<T> = std::result::Result<T, Error>;
