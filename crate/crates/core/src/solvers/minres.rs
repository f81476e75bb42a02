//! MINRES and range-restricted MINRES on the Lanczos tridiagonal.
//!
//! Only the last two rotations and search directions are kept, so memory
//! stays at a handful of vectors regardless of the iteration count.

use super::{threshold_met, trivial_result, BestIterate, SolveConfig, SolveResult, Termination};
use crate::arnoldi::{Hessenberg, LanczosState};
use crate::dense::TriangularSvd;
use crate::diagnostics::{ConvergenceHistory, IterationState, Recorder};
use crate::error::{Error, Result};
use crate::sparse::SparseMatrix;
use crate::{axpy, dot, norm2};

pub(super) fn run(
    a: &SparseMatrix,
    b: &[f64],
    x0: &[f64],
    cfg: &SolveConfig,
    range_restricted: bool,
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
    let start = if range_restricted {
        a.matvec(&r0)?
    } else {
        r0.clone()
    };
    let mut lanczos = match LanczosState::start(a, &start) {
        Ok(s) => s,
        Err(Error::TrivialResidual) => return Ok(trivial_result(x0, cfg)),
        Err(e) => return Err(e),
    };

    // g is the running (rotated) right-hand side entry of the current row.
    let mut g = if range_restricted {
        dot(lanczos.current(), &r0)
    } else {
        lanczos.beta()
    };
    let mut rot_prev2 = (1.0, 0.0);
    let mut rot_prev = (1.0, 0.0);
    let mut d_prev2 = vec![0.0; n];
    let mut d_prev = vec![0.0; n];
    let mut factor = TriangularSvd::new();
    let mut r_col = Vec::new();

    let recorder = Recorder::new(a, b)?;
    let mut history = ConvergenceHistory::new("", cfg.clone());
    let mut best = BestIterate::new(x0);
    let mut x = x0.to_vec();
    let mut termination = Termination::MaxIter;
    let limit = cfg.max_iter.min(n);

    for k in 1..=limit {
        let beta_k = lanczos.step(a)?;
        let v_k = lanczos.current().to_vec();
        let alpha_k = lanczos.alphas()[k - 1];
        let beta_km1 = if k > 1 { lanczos.betas()[k - 2] } else { 0.0 };

        // Column k of T is (.., beta_{k-1}, alpha_k, beta_k); apply the two
        // previous rotations to its nonzero entries.
        let r_km2 = rot_prev2.1 * beta_km1;
        let tmp = rot_prev2.0 * beta_km1;
        let r_km1 = rot_prev.0 * tmp + rot_prev.1 * alpha_k;
        let pivot = -rot_prev.1 * tmp + rot_prev.0 * alpha_k;

        let (c, s) = if beta_k == 0.0 {
            (1.0, 0.0)
        } else {
            let r = pivot.hypot(beta_k);
            (pivot / r, beta_k / r)
        };
        let r_kk = c * pivot + s * beta_k;
        if r_kk == 0.0 {
            termination = Termination::Breakdown;
            break;
        }

        let rhs_entry = match (range_restricted, lanczos.next_vector()) {
            (true, Some(v)) => dot(v, &r0),
            _ => 0.0,
        };
        let tau = c * g + s * rhs_entry;
        g = -s * g + c * rhs_entry;

        let mut d = v_k;
        axpy(-r_km2, &d_prev2, &mut d);
        axpy(-r_km1, &d_prev, &mut d);
        d.iter_mut().for_each(|v| *v /= r_kk);
        axpy(tau, &d, &mut x);

        d_prev2 = std::mem::replace(&mut d_prev, d);
        rot_prev2 = rot_prev;
        rot_prev = (c, s);

        // Same singular values as T_{k+1,k}; only three entries are nonzero.
        r_col.clear();
        r_col.resize(k, 0.0);
        r_col[k - 1] = r_kk;
        if k >= 2 {
            r_col[k - 2] = r_km1;
        }
        if k >= 3 {
            r_col[k - 3] = r_km2;
        }
        factor.push_column(&r_col);
        let sigma = if cfg.svd_due(k) {
            factor.refresh()?;
            Some(factor.sigma())
        } else {
            None
        };
        let tol = sigma
            .as_ref()
            .map(|sv| cfg.tol_policy.resolve(k + 1, k, sv[0]));
        let record = recorder.record(&IterationState {
            k,
            x: &x,
            hessenberg: &lanczos as &dyn Hessenberg,
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
        if lanczos.is_breakdown() {
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
