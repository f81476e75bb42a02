//! The five Krylov solvers behind one configuration type.
//!
//! All solvers start from `x_0 = 0` unless [`solve_from`] is used, record
//! one [`IterationRecord`](crate::IterationRecord) per completed iteration,
//! and report the iterate with the smallest `||A^T r_k|| / ||A^T b||` as
//! [`SolveResult::x`].

mod gmres;
mod minres;

use serde::{Deserialize, Serialize};

use crate::diagnostics::ConvergenceHistory;
use crate::error::{Error, Result};
use crate::sparse::SparseMatrix;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    /// Givens QR and back-substitution of the Hessenberg problem.
    Gmres,
    /// Truncated-SVD pseudoinverse of the Hessenberg problem.
    GmresPinv,
    /// GMRES over `K_k(A, A r_0)`.
    Rrgmres,
    Minres,
    /// MINRES over `K_k(A, A r_0)`.
    Rrminres,
}

impl Method {
    pub const ALL: [Method; 5] = [
        Method::Gmres,
        Method::GmresPinv,
        Method::Rrgmres,
        Method::Minres,
        Method::Rrminres,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Method::Gmres => "gmres",
            Method::GmresPinv => "gmres_pinv",
            Method::Rrgmres => "rrgmres",
            Method::Minres => "minres",
            Method::Rrminres => "rrminres",
        }
    }
}

impl std::fmt::Display for Method {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

impl std::str::FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Method::ALL
            .into_iter()
            .find(|m| m.name() == s.trim().to_ascii_lowercase().replace('-', "_"))
            .ok_or_else(|| Error::InvalidConfig(format!("unknown method `{s}`")))
    }
}

/// How the pseudoinverse truncation threshold is chosen.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TolPolicy {
    /// `max(k+1, k) * ulp(||H_{k+1,k}||_2)`, recomputed every iteration.
    DefaultNumericalRank,
    Fixed(f64),
}

impl TolPolicy {
    pub(crate) fn resolve(self, rows: usize, cols: usize, sigma_max: f64) -> f64 {
        match self {
            TolPolicy::DefaultNumericalRank => crate::dense::default_tol_for(rows, cols, sigma_max),
            TolPolicy::Fixed(t) => t,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StopRule {
    RunToMax,
    /// Stop once `||A^T r_k|| / ||A^T b||` drops to the threshold.
    AtrThreshold(f64),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolveConfig {
    pub method: Method,
    pub max_iter: usize,
    pub reorth: bool,
    pub tol_policy: TolPolicy,
    pub stop_rule: StopRule,
    /// Take an SVD of the Hessenberg matrix every this many iterations.
    pub record_svd_every: usize,
}

impl SolveConfig {
    pub fn new(method: Method, max_iter: usize) -> Self {
        Self {
            method,
            max_iter,
            reorth: false,
            tol_policy: TolPolicy::DefaultNumericalRank,
            stop_rule: StopRule::RunToMax,
            record_svd_every: 1,
        }
    }

    pub fn with_reorth(mut self, reorth: bool) -> Self {
        self.reorth = reorth;
        self
    }

    pub fn with_tol(mut self, tol_policy: TolPolicy) -> Self {
        self.tol_policy = tol_policy;
        self
    }

    pub fn with_stop_rule(mut self, stop_rule: StopRule) -> Self {
        self.stop_rule = stop_rule;
        self
    }

    pub fn with_svd_every(mut self, every: usize) -> Self {
        self.record_svd_every = every;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.max_iter == 0 {
            return Err(Error::InvalidConfig("max_iter must be at least 1".into()));
        }
        if self.record_svd_every == 0 {
            return Err(Error::InvalidConfig(
                "record_svd_every must be at least 1".into(),
            ));
        }
        if let TolPolicy::Fixed(t) = self.tol_policy {
            if !t.is_finite() || t < 0.0 {
                return Err(Error::InvalidConfig(format!(
                    "fixed tolerance must be finite and nonnegative, got {t}"
                )));
            }
        }
        if let StopRule::AtrThreshold(t) = self.stop_rule {
            if t.is_nan() || t <= 0.0 {
                return Err(Error::InvalidConfig(format!(
                    "atr threshold must be positive, got {t}"
                )));
            }
        }
        Ok(())
    }

    fn svd_due(&self, k: usize) -> bool {
        k % self.record_svd_every == 0
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Termination {
    MaxIter,
    ThresholdMet,
    /// `h_{k+1,k} = 0` or a zero pivot in the triangular factor.
    Breakdown,
    /// Zero initial residual (or zero range-restricted start vector).
    Trivial,
}

#[derive(Debug, Clone)]
pub struct SolveResult {
    /// Iterate with the smallest `||A^T r_k|| / ||A^T b||`; `x_0` when no
    /// iteration completed.
    pub x: Vec<f64>,
    /// Iteration that produced `x` (0 for `x_0`).
    pub best_iteration: usize,
    /// Iterate of the last completed iteration.
    pub last_x: Vec<f64>,
    pub history: ConvergenceHistory,
    pub termination: Termination,
}

/// Runs the solver selected by `cfg.method` from `x_0 = 0`.
pub fn solve(a: &SparseMatrix, b: &[f64], cfg: &SolveConfig) -> Result<SolveResult> {
    let x0 = vec![0.0; a.dim()];
    solve_from(a, b, &x0, cfg)
}

/// Runs the selected solver from an arbitrary initial guess.
///
/// Every reported experiment uses `x_0 = 0`; nonzero starts follow the same
/// formulas with `r_0 = b - A x_0`.
pub fn solve_from(
    a: &SparseMatrix,
    b: &[f64],
    x0: &[f64],
    cfg: &SolveConfig,
) -> Result<SolveResult> {
    cfg.validate()?;
    for len in [b.len(), x0.len()] {
        if len != a.dim() {
            return Err(Error::DimensionMismatch {
                expected: a.dim(),
                found: len,
            });
        }
    }
    if b.iter().chain(x0).any(|v| !v.is_finite()) {
        return Err(Error::NonFinite("solver input"));
    }
    match cfg.method {
        Method::Gmres => gmres::run(a, b, x0, cfg, gmres::Variant::Gmres),
        Method::GmresPinv => gmres::run(a, b, x0, cfg, gmres::Variant::Pinv),
        Method::Rrgmres => gmres::run(a, b, x0, cfg, gmres::Variant::RangeRestricted),
        Method::Minres => minres::run(a, b, x0, cfg, false),
        Method::Rrminres => minres::run(a, b, x0, cfg, true),
    }
}

fn with_method(cfg: &SolveConfig, method: Method) -> SolveConfig {
    SolveConfig {
        method,
        ..cfg.clone()
    }
}

pub fn solve_gmres(a: &SparseMatrix, b: &[f64], cfg: &SolveConfig) -> Result<SolveResult> {
    solve(a, b, &with_method(cfg, Method::Gmres))
}

pub fn solve_gmres_pinv(a: &SparseMatrix, b: &[f64], cfg: &SolveConfig) -> Result<SolveResult> {
    solve(a, b, &with_method(cfg, Method::GmresPinv))
}

pub fn solve_rrgmres(a: &SparseMatrix, b: &[f64], cfg: &SolveConfig) -> Result<SolveResult> {
    solve(a, b, &with_method(cfg, Method::Rrgmres))
}

pub fn solve_minres(a: &SparseMatrix, b: &[f64], cfg: &SolveConfig) -> Result<SolveResult> {
    solve(a, b, &with_method(cfg, Method::Minres))
}

pub fn solve_rrminres(a: &SparseMatrix, b: &[f64], cfg: &SolveConfig) -> Result<SolveResult> {
    solve(a, b, &with_method(cfg, Method::Rrminres))
}

/// Tracks the best iterate by `atr_ratio`.
struct BestIterate {
    x: Vec<f64>,
    k: usize,
    atr: f64,
}

impl BestIterate {
    fn new(x0: &[f64]) -> Self {
        Self {
            x: x0.to_vec(),
            k: 0,
            atr: f64::INFINITY,
        }
    }

    fn offer(&mut self, k: usize, atr: f64, x: &[f64]) {
        if atr < self.atr {
            self.atr = atr;
            self.k = k;
            self.x.copy_from_slice(x);
        }
    }
}

fn trivial_result(x0: &[f64], cfg: &SolveConfig) -> SolveResult {
    SolveResult {
        x: x0.to_vec(),
        best_iteration: 0,
        last_x: x0.to_vec(),
        history: ConvergenceHistory::new("", cfg.clone()),
        termination: Termination::Trivial,
    }
}

fn threshold_met(cfg: &SolveConfig, atr: f64) -> bool {
    matches!(cfg.stop_rule, StopRule::AtrThreshold(t) if atr <= t)
}
