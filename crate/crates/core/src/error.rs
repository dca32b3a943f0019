use thiserror::Error;

use crate::hardy::Structure;

#[derive(Debug, Error)]
pub enum Error {
    #[error("truncation order mismatch: {left} vs {right}")]
    OrderMismatch { left: usize, right: usize },

    #[error("entry ({row}, {col}) is nonzero but the declared structure is {structure:?}")]
    StructureViolation {
        row: usize,
        col: usize,
        structure: Structure,
    },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("semigroup time must be nonnegative, got {0}")]
    NegativeTime(f64),

    #[error(
        "quadrature did not converge: value {value}, estimated error {error:e} above tolerance {tolerance:e}"
    )]
    QuadratureNonconvergence {
        value: num_complex::Complex64,
        error: f64,
        tolerance: f64,
    },

    #[error("power iteration did not converge in {iterations} iterations (last relative change {change:e})")]
    PowerIterationNonconvergence { iterations: usize, change: f64 },

    #[error(
        "direct alternating sum at ({row}, {col}) has rounding bound {bound:e} above tolerance {tolerance:e}; switch to the integral or extended-precision method"
    )]
    Cancellation {
        row: usize,
        col: usize,
        bound: f64,
        tolerance: f64,
    },

    #[error("methods disagree at ({row}, {col}) by {diff:e}, tolerance {tolerance:e}")]
    MethodDisagreement {
        row: usize,
        col: usize,
        diff: f64,
        tolerance: f64,
    },

    #[error("Gram matrix numerically singular: relative determinant {det:e} below {tolerance:e}")]
    SingularGram { det: f64, tolerance: f64 },

    #[error("malformed matrix data: {0}")]
    Parse(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
