use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("input contains non-finite entries")]
    NonFinite,
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("matrix is not symmetric")]
    NotSymmetric,
    #[error("matrix is not skew-symmetric")]
    NotSkew,
    #[error("matrix is not square ({rows}x{cols})")]
    NotSquare { rows: usize, cols: usize },
    #[error("{what} out of range: {value}")]
    OutOfRange { what: &'static str, value: i64 },
    #[error("zero vector where a nonzero vector is required")]
    ZeroVector,
    #[error("vector is not a unit vector (norm {norm})")]
    NotUnit { norm: f64 },
    #[error("rows are not orthonormal (residual {residual:e})")]
    NotOrthonormal { residual: f64 },
    #[error("trigonometric polynomial is negative somewhere (minimum {min})")]
    NotNonnegative { min: f64 },
    #[error("ill-conditioned root configuration: {0}")]
    IllConditioned(String),
    #[error("trace mismatch: |Tr(A) - Tr(M)| = {residual:e}")]
    TraceMismatch { residual: f64 },
    #[error("affine constraints are inconsistent (residual {residual:e})")]
    InconsistentConstraints { residual: f64 },
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("degenerate linear system: {0}")]
    Degenerate(String),
    #[error("polynomial variable mismatch: {0}")]
    VariableMismatch(String),
    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;
