use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid Hilbert space dimension {0} (need N >= 2)")]
    InvalidDimension(usize),

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("operator is not square ({rows}x{cols})")]
    NotSquare { rows: usize, cols: usize },

    #[error("Kraus operators are not trace preserving (residual {residual:.3e})")]
    NotTracePreserving { residual: f64 },

    #[error("Kraus list must contain between 1 and {max} operators, got {count}")]
    KrausCount { count: usize, max: usize },

    #[error("channels act on different spaces")]
    SpaceMismatch,

    #[error("parameter `{name}` = {value} out of range: {reason}")]
    ParameterOutOfRange {
        name: &'static str,
        value: f64,
        reason: &'static str,
    },

    #[error("parameter `{name}` = {value} is not representable on an N = {n} grid")]
    ParameterQuantization {
        name: &'static str,
        value: f64,
        n: usize,
    },

    #[error("operator is not unitary (residual {residual:.3e})")]
    NotUnitary { residual: f64 },

    #[error("operator is not Hermitian (residual {residual:.3e})")]
    NotHermitian { residual: f64 },

    #[error("invalid density matrix: {0}")]
    InvalidState(String),

    #[error("dimension N = {n} must be even")]
    OddDimension { n: usize },

    #[error("dimension N = {n} exceeds the limit {max} for this operation")]
    DimensionGuard { n: usize, max: usize },

    #[error("eigenvalue 1 has multiplicity {0}; the fixed point is not unique")]
    DegenerateFixedPoint(usize),

    #[error("index {index} out of range for dimension {n}")]
    IndexOutOfRange { index: usize, n: usize },

    #[error("grid mismatch: {0}x{1} vs {2}x{3}")]
    GridMismatch(usize, usize, usize, usize),

    #[error("numerical failure: {0}")]
    Numerical(&'static str),

    #[error("invalid channel specification: {0}")]
    Spec(String),
}
