use thiserror::Error;

/// Errors raised across the library.
///
/// Validation failures carry the measured residual so callers can tell a
/// near miss from a gross violation.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("shape mismatch: {left_rows}x{left_cols} vs {right_rows}x{right_cols}")]
    ShapeMismatch {
        left_rows: usize,
        left_cols: usize,
        right_rows: usize,
        right_cols: usize,
    },

    #[error("dimension mismatch: {0} vs {1}")]
    DimMismatch(usize, usize),

    #[error("matrix is not square: {0}x{1}")]
    NotSquare(usize, usize),

    #[error("matrix has {0} entries, expected {1}")]
    BadEntryCount(usize, usize),

    #[error("matrix contains a non-finite entry at ({0}, {1})")]
    NonFinite(usize, usize),

    #[error("not Hermitian: |M - M^dag|_HS = {residual:e}")]
    NotHermitian { residual: f64 },

    #[error("not positive semidefinite: minimum eigenvalue {min_eigenvalue:e}")]
    NotPsd { min_eigenvalue: f64 },

    #[error("trace is not one: Tr = {trace}")]
    TraceNotOne { trace: f64 },

    #[error("not idempotent: |P^2 - P|_HS = {residual:e}")]
    NotIdempotent { residual: f64 },

    #[error("projector trace {trace} is not an integer rank")]
    NonIntegerRank { trace: f64 },

    #[error("basis is not orthonormal: |G - I|_HS = {residual:e}")]
    NotOrthonormal { residual: f64 },

    #[error("not a unit vector: norm {norm}")]
    NotUnitVector { norm: f64 },

    #[error("vector lies outside the support: residual {residual:e}")]
    NotInSupport { residual: f64 },

    #[error("eigensolver did not converge after {sweeps} sweeps (off-diagonal norm {off_norm:e})")]
    NoConvergence { sweeps: usize, off_norm: f64 },

    #[error("state assignments are incompatible: supports intersect trivially")]
    Incompatible,

    #[error("event has zero probability (p = {p:e})")]
    ZeroProbability { p: f64 },

    #[error("pooling weight {0} outside the open interval (0, 1)")]
    WeightOutOfRange(f64),

    #[error("numerical fault: {0}")]
    NumericalFault(String),

    #[error("invalid tolerance {name} = {value}: must lie in (0, 1)")]
    InvalidTolerance { name: &'static str, value: f64 },

    #[error("bad rank {rank} for dimension {dim}")]
    BadRank { rank: usize, dim: usize },

    #[error("bad dimensions: {0}")]
    BadDims(String),
}

pub type Result<T> = std::result::Result<T, Error>;
