//! Per-iteration instrumentation shared by every solver.
//!
//! Each completed iteration produces an [`IterationRecord`] holding the
//! true residual, the least-squares optimality ratio
//! `||A^T r_k|| / ||A^T b||`, the trailing singular-value ratios of the
//! current Hessenberg matrix, the `h_{k+1,k}` breakdown indicators and the
//! latest Givens sine.

use serde::{Deserialize, Serialize};

use crate::arnoldi::Hessenberg;
use crate::dense::DenseMatrix;
use crate::error::Result;
use crate::solvers::SolveConfig;
use crate::sparse::SparseMatrix;
use crate::{dot, norm2};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IterationRecord {
    pub k: usize,
    /// `||b - A x_k||_2`
    pub res_norm: f64,
    /// `||A^T r_k||_2 / ||A^T b||_2`
    pub atr_ratio: f64,
    /// `sigma_k / sigma_1`, `sigma_{k-1} / sigma_1`, `sigma_{k-2} / sigma_1`,
    /// `sigma_{k-3} / sigma_1` of `H_{k+1,k}`. An entry is absent when its
    /// index falls below 1 or no SVD was taken at this iteration.
    pub sig_ratios: [Option<f64>; 4],
    /// `h_{k+1,k} / ||H_{k,k}||_F`
    pub h_ratio: Option<f64>,
    /// `h_{k+1,k} / ||H_{k+1,k}||_F`
    pub h_ratio_full: Option<f64>,
    /// `h_{k+1,k} / min { |h_{i,k}| : h_{i,k} != 0, i <= k }`
    pub h_min_ratio: Option<f64>,
    /// Singular values of `H_{k+1,k}` strictly below the truncation tolerance.
    pub truncation_count: Option<usize>,
    /// `|s_k|` of the latest Givens rotation.
    pub givens_s: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConvergenceHistory {
    pub problem_tag: String,
    pub config: SolveConfig,
    pub records: Vec<IterationRecord>,
}

impl ConvergenceHistory {
    pub fn new(problem_tag: impl Into<String>, config: SolveConfig) -> Self {
        Self {
            problem_tag: problem_tag.into(),
            config,
            records: Vec::new(),
        }
    }

    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    pub fn last(&self) -> Option<&IterationRecord> {
        self.records.last()
    }

    pub fn atr_ratios(&self) -> Vec<f64> {
        self.records.iter().map(|r| r.atr_ratio).collect()
    }

    pub fn res_norms(&self) -> Vec<f64> {
        self.records.iter().map(|r| r.res_norm).collect()
    }

    /// Iteration and value of the smallest `atr_ratio` (earliest on ties).
    pub fn min_atr(&self) -> Option<(usize, f64)> {
        self.records.iter().filter(|r| !r.atr_ratio.is_nan()).fold(
            None,
            |best: Option<(usize, f64)>, r| match best {
                Some((_, v)) if v <= r.atr_ratio => best,
                _ => Some((r.k, r.atr_ratio)),
            },
        )
    }

    /// First iteration whose truncation count exceeds every earlier count
    /// (starting from zero).
    pub fn first_truncation_event(&self) -> Option<usize> {
        self.records
            .iter()
            .find(|r| r.truncation_count.is_some_and(|c| c > 0))
            .map(|r| r.k)
    }

    /// Iterations at which the truncation count increased.
    pub fn truncation_events(&self) -> Vec<usize> {
        let mut last = 0;
        let mut events = Vec::new();
        for r in &self.records {
            if let Some(c) = r.truncation_count {
                if c > last {
                    events.push(r.k);
                }
                last = c;
            }
        }
        events
    }
}

/// Solver-side view of one completed iteration.
pub struct IterationState<'a> {
    pub k: usize,
    pub x: &'a [f64],
    pub hessenberg: &'a dyn Hessenberg,
    /// Singular values of the current `H_{k+1,k}`, nonincreasing, when they
    /// were computed at this iteration.
    pub sigma: Option<&'a [f64]>,
    /// Truncation tolerance matching `sigma`.
    pub tol: Option<f64>,
    pub givens_s: f64,
}

/// Builds the record for one iteration directly from live state.
pub fn record_iteration(
    state: &IterationState<'_>,
    a: &SparseMatrix,
    b: &[f64],
) -> Result<IterationRecord> {
    let atb = a.matvec_transpose(b)?;
    Ok(build_record(state, a, b, norm2(&atb)))
}

/// Caches `||A^T b||` and scratch space across a run.
pub(crate) struct Recorder<'a> {
    a: &'a SparseMatrix,
    b: &'a [f64],
    atb_norm: f64,
}

impl<'a> Recorder<'a> {
    pub(crate) fn new(a: &'a SparseMatrix, b: &'a [f64]) -> Result<Self> {
        let atb = a.matvec_transpose(b)?;
        Ok(Self {
            a,
            b,
            atb_norm: norm2(&atb),
        })
    }

    pub(crate) fn record(&self, state: &IterationState<'_>) -> IterationRecord {
        build_record(state, self.a, self.b, self.atb_norm)
    }
}

fn build_record(
    state: &IterationState<'_>,
    a: &SparseMatrix,
    b: &[f64],
    atb_norm: f64,
) -> IterationRecord {
    let n = a.dim();
    let mut r = vec![0.0; n];
    a.matvec_into(state.x, &mut r);
    for (ri, bi) in r.iter_mut().zip(b) {
        *ri = bi - *ri;
    }
    let mut atr = vec![0.0; n];
    a.matvec_transpose_into(&r, &mut atr);
    // With A^T b = 0 the ratio has no scale; report the absolute norm.
    let denom = if atb_norm > 0.0 { atb_norm } else { 1.0 };

    let h = state.hessenberg;
    let sub = h.subdiagonal();
    let lead_sq = h.leading_frobenius_sq();
    let h_ratio = (lead_sq > 0.0).then(|| sub / lead_sq.sqrt());
    let full_sq = lead_sq + sub * sub;
    let h_ratio_full = (full_sq > 0.0).then(|| sub / full_sq.sqrt());
    let h_min_ratio = h
        .last_column()
        .iter()
        .filter(|v| **v != 0.0)
        .map(|v| v.abs())
        .reduce(f64::min)
        .map(|m| sub / m);

    let mut sig_ratios = [None; 4];
    let mut truncation_count = None;
    if let Some(sigma) = state.sigma {
        let s1 = sigma.first().copied().unwrap_or(0.0);
        let len = sigma.len();
        for (slot, out) in sig_ratios.iter_mut().enumerate() {
            if slot < len && s1 > 0.0 {
                *out = Some(sigma[len - 1 - slot] / s1);
            }
        }
        truncation_count = state.tol.map(|t| sigma.iter().filter(|s| **s < t).count());
    }

    IterationRecord {
        k: state.k,
        res_norm: norm2(&r),
        atr_ratio: norm2(&atr) / denom,
        sig_ratios,
        h_ratio,
        h_ratio_full,
        h_min_ratio,
        truncation_count,
        givens_s: state.givens_s.abs(),
    }
}

/// Relative defect `| ||A V_k||_F^2 - ||H_{k,k}||_F^2 - h_{k+1,k}^2 | / ||A V_k||_F^2`.
///
/// `h` is `H_{k+1,k}` and `av` holds the `k` columns of `A V_k`. The
/// identity is exact when `v_{k+1}` is orthogonal to `V_k`.
pub fn frobenius_identity_check(h: &DenseMatrix, av: &[Vec<f64>]) -> f64 {
    let k = h.cols();
    assert_eq!(h.rows(), k + 1, "H must be (k+1) x k");
    assert_eq!(av.len(), k, "A V_k must have k columns");
    let lhs: f64 = av.iter().map(|c| dot(c, c)).sum();
    let sub = if k > 0 { h[(k, k - 1)] } else { 0.0 };
    let lead = h.leading(k, k).frobenius_norm();
    let rhs = lead * lead + sub * sub;
    if lhs == 0.0 {
        return if rhs == 0.0 { 0.0 } else { f64::INFINITY };
    }
    (lhs - rhs).abs() / lhs
}
