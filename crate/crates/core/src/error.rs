use std::path::PathBuf;

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("non-finite value produced by {0}")]
    NonFinite(&'static str),

    #[error("invalid sparse structure: {0}")]
    InvalidStructure(String),

    #[error("unsupported Matrix Market header: {0}")]
    Format(String),

    #[error("matrix must be square, found {rows}x{cols}")]
    NotSquare { rows: usize, cols: usize },

    #[error("{}:{line}: {message}", path.display())]
    Parse {
        path: PathBuf,
        line: usize,
        message: String,
    },

    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("SVD did not converge within {0} sweeps")]
    SvdNoConvergence(usize),

    #[error("upper-triangular factor has a zero diagonal entry at index {0}")]
    SingularTriangular(usize),

    #[error("initial residual is zero")]
    TrivialResidual,

    #[error("Krylov step requested after breakdown")]
    StepAfterBreakdown,

    #[error("A*1 is zero, so the consistent part A*1/||A*1|| is undefined; supply the right-hand side directly")]
    DegenerateNumerator,

    #[error("inverse iteration stalled with eigen-residual {residual:e}")]
    EigenNoConvergence { residual: f64 },

    #[error("dense eigenvector fallback is limited to n <= {limit}, got n = {n}")]
    TooLargeForDense { n: usize, limit: usize },

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
}
