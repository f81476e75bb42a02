//! Arnoldi-based solvers: GMRES, GMRES with a pseudoinverse Hessenberg
//! solve, and range-restricted GMRES.

use super::{threshold_met, trivial_result, BestIterate, SolveConfig, SolveResult, Termination};
use crate::arnoldi::{ArnoldiState, Hessenberg};
use crate::dense::{GivensState, TriangularSvd};
use crate::diagnostics::{ConvergenceHistory, IterationState, Recorder};
use crate::error::{Error, Result};
use crate::sparse::SparseMatrix;
use crate::{axpy, dot, norm2};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(super) enum Variant {
    Gmres,
    Pinv,
    RangeRestricted,
}

pub(super) fn run(
    a: &SparseMatrix,
    b: &[f64],
    x0: &[f64],
    cfg: &SolveConfig,
    variant: Variant,
) -> Result<SolveResult> {
    let n = a.dim();
    let mut r0 = vec![0.0; n];
    a.matvec_into(x0, &mut r0);
    for (ri, bi) in r0.iter_mut().zip(b) {
        *ri = bi - *ri;
    }
    if norm2(&r0) == 0.0 {
        return Ok(trivial_result(x0, cfg));
    }

    let start = match variant {
        Variant::RangeRestricted => a.matvec(&r0)?,
        _ => r0.clone(),
    };
    let mut arnoldi = match ArnoldiState::start(a, &start) {
        Ok(s) => s,
        Err(Error::TrivialResidual) => return Ok(trivial_result(x0, cfg)),
        Err(e) => return Err(e),
    };

    // First entry of the projected right-hand side: beta e_1 for GMRES,
    // V_{k+1}^T r_0 for the range-restricted space.
    let rhs0 = match variant {
        Variant::RangeRestricted => dot(&arnoldi.basis()[0], &r0),
        _ => arnoldi.beta(),
    };
    let mut givens = GivensState::new(rhs0);
    let mut factor = TriangularSvd::new();
    let recorder = Recorder::new(a, b)?;
    let mut history = ConvergenceHistory::new("", cfg.clone());
    let mut best = BestIterate::new(x0);
    let mut x = x0.to_vec();
    let mut termination = Termination::MaxIter;
    let limit = cfg.max_iter.min(n);

    for k in 1..=limit {
        let sub = arnoldi.step(a, cfg.reorth)?;
        let rhs_entry = match (variant, arnoldi.basis().get(k)) {
            (Variant::RangeRestricted, Some(v)) => dot(v, &r0),
            _ => 0.0,
        };
        let (_, s) = givens.update_with_rhs(&arnoldi.last_column(), sub, rhs_entry);
        factor.push_column(givens.r_column(k - 1));
        let last = k == limit || arnoldi.is_breakdown();

        // H = Q [R; 0], so R carries the singular values of H and the
        // truncated pseudoinverse solve reduces to R^+ applied to g[..k].
        let sigma = if cfg.svd_due(k) || (variant == Variant::Pinv && last) {
            factor.refresh()?;
            Some(factor.sigma())
        } else {
            None
        };
        let tol = sigma
            .as_ref()
            .map(|sv| cfg.tol_policy.resolve(k + 1, k, sv[0]));

        let y = match variant {
            Variant::Pinv => tol.map(|t| factor.solve_truncated(&givens.g()[..k], t)),
            _ => match givens.solve() {
                Ok(y) => Some(y),
                Err(Error::SingularTriangular(_)) => {
                    termination = Termination::Breakdown;
                    break;
                }
                Err(e) => return Err(e),
            },
        };
        if let Some(y) = y {
            x.copy_from_slice(x0);
            for (yi, vi) in y.iter().zip(arnoldi.basis()) {
                axpy(*yi, vi, &mut x);
            }
        }

        let record = recorder.record(&IterationState {
            k,
            x: &x,
            hessenberg: &arnoldi as &dyn Hessenberg,
            sigma: sigma.as_deref(),
            tol,
            givens_s: s,
        });
        best.offer(k, record.atr_ratio, &x);
        let atr = record.atr_ratio;
        history.records.push(record);

        if threshold_met(cfg, atr) {
            termination = Termination::ThresholdMet;
            break;
        }
        if arnoldi.is_breakdown() {
            termination = Termination::Breakdown;
            break;
        }
    }

    Ok(SolveResult {
        x: best.x,
        best_iteration: best.k,
        last_x: x,
        history,
        termination,
    })
}
