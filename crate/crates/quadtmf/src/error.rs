use thiserror::Error;

/// Errors shared across the crate's exact-arithmetic modules.
#[derive(Debug, Clone, Error, PartialEq)]
pub enum Error {
    #[error("matrix is singular")]
    SingularMatrix,

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("form is not symmetric")]
    NotSymmetric,

    #[error("diagonal entry {index} is odd; no integral quadratic form exists")]
    NonEvenDiagonal { index: usize },

    #[error("form is not unimodular (|det| = {det})")]
    NotUnimodular { det: String },

    #[error("form is not positive definite")]
    NotPositiveDefinite,

    #[error("form is not even")]
    NotEven,

    #[error("enumeration budget exceeded: {0}")]
    BudgetExceeded(String),

    #[error("illegal Kirby move: {0}")]
    IllegalMove(String),

    #[error("leading series coefficient is not a unit")]
    NonUnitLeading,

    #[error("tmf table validation failed: {0:?}")]
    ValidationError(Vec<String>),

    #[error("degree {0} outside the loaded table range")]
    OutOfRange(i64),

    #[error("map shapes do not compose: {0}")]
    ShapeMismatch(String),

    #[error("unknown builtin name: {0}")]
    UnknownName(String),

    #[error("tau is not in the upper half plane")]
    NotInUpperHalfPlane,

    #[error("matrix is not in SL2(Z)")]
    NotSL2,

    #[error("truncated tail bound {bound:e} exceeds tolerance {tol:e}")]
    TailBoundTooLarge { bound: f64, tol: f64 },

    #[error("precondition failed: {0}")]
    PreconditionFailed(String),

    #[error("inclusion is not isometric for the given forms")]
    InclusionNotIsometric,

    #[error("{0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;
