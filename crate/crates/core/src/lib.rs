//! Krylov solvers for singular, possibly inconsistent, sparse linear systems.
//!
//! The centerpiece is GMRES whose Hessenberg least-squares subproblem is
//! solved with a tolerance-truncated SVD pseudoinverse instead of Givens
//! back-substitution, optionally on top of a once-reorthogonalized Arnoldi
//! basis. Plain GMRES, range-restricted GMRES, MINRES and range-restricted
//! MINRES are provided as baselines, all reporting the same per-iteration
//! [`ConvergenceHistory`].
//!
//! ```
//! use krylov_pinv::{solve, Method, SolveConfig, SparseMatrix};
//!
//! let a = SparseMatrix::from_triplets(2, [(0, 0, 1.0)]).unwrap();
//! let b = [1.0, 1.0];
//! let cfg = SolveConfig::new(Method::GmresPinv, 5);
//! let result = solve(&a, &b, &cfg).unwrap();
//! // The Krylov space is all of R^2 after two steps; the pseudoinverse
//! // then returns the minimum-norm least-squares solution.
//! assert_eq!(result.history.len(), 2);
//! assert!((result.last_x[0] - 1.0).abs() < 1e-14);
//! assert!(result.last_x[1].abs() < 1e-14);
//! ```

pub mod arnoldi;
pub mod dense;
pub mod diagnostics;
mod error;
pub mod problems;
pub mod solvers;
pub mod sparse;

pub use arnoldi::{ArnoldiState, Hessenberg, LanczosState};
pub use dense::{
    back_substitute, default_tol, pinv_truncated, svd, DenseMatrix, GivensState, SvdResult,
};
pub use diagnostics::{ConvergenceHistory, IterationRecord};
pub use error::{Error, Result};
pub use problems::{
    build_inconsistent_rhs, gen_periodic_convdiff, gen_rhs_convdiff, gen_semidefinite,
    smallest_eigenvector, InconsistentRhsSpec, NullVectorSource, PeriodicConvDiffSpec,
    SemidefiniteProblem, SemidefiniteSpec,
};
pub use solvers::{
    solve, solve_gmres, solve_gmres_pinv, solve_minres, solve_rrgmres, solve_rrminres, Method,
    SolveConfig, SolveResult, StopRule, Termination, TolPolicy,
};
pub use sparse::{read_matrix_market, write_matrix_market, SparseMatrix};

/// Inner product with four independent accumulators so the loop vectorizes.
pub(crate) fn dot(x: &[f64], y: &[f64]) -> f64 {
    let n = x.len().min(y.len());
    let (x, y) = (&x[..n], &y[..n]);
    let mut acc = [0.0f64; 4];
    let (xc, yc) = (x.chunks_exact(4), y.chunks_exact(4));
    let tail: f64 = xc
        .remainder()
        .iter()
        .zip(yc.remainder())
        .map(|(a, b)| a * b)
        .sum();
    for (a, b) in xc.zip(yc) {
        for i in 0..4 {
            acc[i] += a[i] * b[i];
        }
    }
    (acc[0] + acc[1]) + (acc[2] + acc[3]) + tail
}

pub(crate) fn norm2(x: &[f64]) -> f64 {
    dot(x, x).sqrt()
}

/// `y += alpha * x`
pub(crate) fn axpy(alpha: f64, x: &[f64], y: &mut [f64]) {
    for (yi, xi) in y.iter_mut().zip(x) {
        *yi += alpha * xi;
    }
}
