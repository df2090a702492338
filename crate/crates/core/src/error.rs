//! Error types shared by every module of the crate.

use thiserror::Error;

/// Errors raised by the linear algebra kernels, the CP-map layer, the
/// solvers and the instance generators.
#[derive(Debug, Error)]
pub enum Error {
    /// Buffer length or operand shapes do not agree.
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    /// A NaN or infinite entry was supplied where finite data is required.
    #[error("non-finite entry at ({row}, {col})")]
    NonFinite { row: usize, col: usize },

    /// Input that must be symmetric deviates beyond the construction tolerance.
    #[error("matrix is not symmetric: |S[{row},{col}] - S[{col},{row}]| = {deviation:e}")]
    NotSymmetric {
        row: usize,
        col: usize,
        deviation: f64,
    },

    /// Cholesky pivot or eigenvalue not strictly positive (or not finite).
    #[error("matrix is not positive definite: {0}")]
    NotPositiveDefinite(String),

    /// Triangular matrix with a zero or non-finite diagonal entry.
    #[error("singular triangular matrix: diagonal entry {index} is {value:e}")]
    Singular { index: usize, value: f64 },

    /// The symmetric eigensolver ran out of iterations.
    #[error("eigensolver did not converge within {iterations} iterations")]
    NoConvergence { iterations: usize },

    /// The CP map of the problem is not well posed (Φ(I) or Φ*(I) singular).
    #[error("degenerate problem: {0}")]
    DegenerateProblem(String),

    /// Right scaling factor handed to frame recovery is not diagonal.
    #[error("right scaling factor is not diagonal: off-diagonal magnitude {offdiag:e} exceeds {tolerance:e}")]
    NotDiagonal { offdiag: f64, tolerance: f64 },

    /// A row of the frame generator matrix cannot be normalized.
    #[error("row {row} of the frame generator has norm {norm:e}, cannot normalize")]
    DegenerateRow { row: usize, norm: f64 },

    /// Invalid solver or generator parameters.
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Format(#[from] FormatError),
}

/// Problems found while parsing a problem file.
#[derive(Debug, Error)]
pub enum FormatError {
    #[error("syntax error at line {line}, column {column}: {message}")]
    Syntax {
        line: usize,
        column: usize,
        message: String,
    },

    #[error("field `{field}`: {message}")]
    Field { field: String, message: String },

    /// The file parsed but describes an ill-posed problem.
    #[error("degenerate problem: {0}")]
    Degenerate(String),
}

pub type Result<T> = std::result::Result<T, Error>;
