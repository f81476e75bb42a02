use std::path::PathBuf;

use clap::Parser;
use krylov_pinv::Method;

use crate::manifest::{ProblemKind, TolArg};

/// Every flag overrides the manifest key of the same name.
#[derive(Debug, Clone, Default, Parser)]
#[command(
    name = "krylov-pinv",
    version,
    about = "Run Krylov solvers on singular and inconsistent sparse systems and record their convergence histories"
)]
pub struct Args {
    /// TOML manifest; flags given alongside it take precedence.
    #[arg(long, value_name = "PATH")]
    pub manifest: Option<PathBuf>,

    #[arg(long, value_enum)]
    pub problem: Option<ProblemKind>,

    /// Mesh points per direction for the convection-diffusion problem.
    #[arg(long)]
    pub m: Option<usize>,

    /// Convection coefficient.
    #[arg(long, allow_hyphen_values = true)]
    pub d: Option<f64>,

    /// Matrix Market coordinate file.
    #[arg(long, value_name = "PATH")]
    pub matrix: Option<PathBuf>,

    /// Right-hand side (Matrix Market array or plain list); skips the
    /// generated inconsistent right-hand side.
    #[arg(long, value_name = "PATH")]
    pub rhs: Option<PathBuf>,

    /// Weight of the nullspace component added to the right-hand side.
    #[arg(long)]
    pub perturbation: Option<f64>,

    /// Nullspace vector for the perturbation; defaults to the smallest
    /// eigenvector, which needs a symmetric matrix.
    #[arg(long, value_name = "PATH")]
    pub null_vector: Option<PathBuf>,

    /// Size of the semidefinite problem.
    #[arg(long)]
    pub n: Option<usize>,

    /// Nullspace dimension of the semidefinite problem.
    #[arg(long)]
    pub null_dim: Option<usize>,

    /// Condition number of the nonzero part of the semidefinite problem.
    #[arg(long)]
    pub condition: Option<f64>,

    /// Comma-separated solver list: gmres, gmres_pinv, rrgmres, minres, rrminres.
    #[arg(long, value_delimiter = ',')]
    pub method: Option<Vec<Method>>,

    /// Iteration cap per solver (default 100).
    #[arg(long)]
    pub max_iter: Option<usize>,

    /// Reorthogonalize the Arnoldi basis (`--reorth false` turns it off).
    #[arg(long, num_args = 0..=1, default_missing_value = "true")]
    pub reorth: Option<bool>,

    /// Truncation tolerance: a number, or `default` for the numerical-rank rule.
    #[arg(long)]
    pub tol: Option<TolArg>,

    /// Stop once ||A^T r|| / ||A^T b|| reaches this value.
    #[arg(long)]
    pub stop_atr: Option<f64>,

    /// Output directory.
    #[arg(long, value_name = "DIR")]
    pub out: Option<PathBuf>,

    /// Emit SVG plots (`--plots false` turns them off).
    #[arg(long, num_args = 0..=1, default_missing_value = "true")]
    pub plots: Option<bool>,

    /// Take the Hessenberg SVD every this many iterations.
    #[arg(long)]
    pub svd_every: Option<usize>,

    /// Seed for randomized problems.
    #[arg(long)]
    pub seed: Option<u64>,

    /// Override the problem tag used in file names.
    #[arg(long)]
    pub tag: Option<String>,
}
