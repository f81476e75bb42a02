//! One-sided (Hestenes) Jacobi SVD and the tolerance-truncated pseudoinverse.

use super::DenseMatrix;
use crate::error::{Error, Result};
use crate::{axpy, dot};

pub(super) const MAX_SWEEPS: usize = 100;
/// A column pair counts as orthogonal once `|a_p . a_q| <= tol ||a_p|| ||a_q||`.
pub(super) const OFF_DIAGONAL_TOL: f64 = 1e-15;

/// `B = U diag(sigma) V^T` with `U` (m x m) and `V` (n x n) orthogonal and
/// `sigma` (length `min(m, n)`) sorted nonincreasing.
#[derive(Debug, Clone)]
pub struct SvdResult {
    pub u: DenseMatrix,
    pub sigma: Vec<f64>,
    pub v: DenseMatrix,
}

impl SvdResult {
    pub fn rows(&self) -> usize {
        self.u.rows()
    }

    pub fn cols(&self) -> usize {
        self.v.rows()
    }

    /// Largest singular value, i.e. the spectral norm.
    pub fn norm2(&self) -> f64 {
        self.sigma.first().copied().unwrap_or(0.0)
    }

    /// Number of singular values kept by truncation at `tol`.
    pub fn kept(&self, tol: f64) -> usize {
        self.sigma.iter().filter(|&&s| s >= tol && s > 0.0).count()
    }

    /// Number of singular values strictly below `tol`.
    pub fn truncated(&self, tol: f64) -> usize {
        self.sigma.iter().filter(|&&s| s < tol).count()
    }

    /// `sigma_1 / sigma_min`; infinite for a singular matrix.
    pub fn condition_number(&self) -> f64 {
        match (self.sigma.first(), self.sigma.last()) {
            (Some(&hi), Some(&lo)) if lo > 0.0 => hi / lo,
            _ => f64::INFINITY,
        }
    }

    /// Condition number of the operator actually inverted after truncation at
    /// `tol`: `sigma_1 / tol`.
    pub fn truncated_condition_number(&self, tol: f64) -> f64 {
        self.norm2() / tol
    }

    /// `V_1 Sigma_1^{-1} U_1^T rhs`, the minimum-norm least-squares solution
    /// against the truncated matrix.
    pub fn solve_truncated(&self, rhs: &[f64], tol: f64) -> Vec<f64> {
        assert_eq!(rhs.len(), self.rows(), "rhs length differs from row count");
        let mut y = vec![0.0; self.cols()];
        for (i, &s) in self.sigma.iter().enumerate() {
            if s >= tol && s > 0.0 {
                let coef = dot(self.u.col(i), rhs) / s;
                axpy(coef, self.v.col(i), &mut y);
            }
        }
        y
    }

    /// Explicit `V_1 Sigma_1^{-1} U_1^T` (n x m).
    pub fn pinv(&self, tol: f64) -> DenseMatrix {
        let (m, n) = (self.rows(), self.cols());
        let mut p = DenseMatrix::zeros(n, m);
        for (i, &s) in self.sigma.iter().enumerate() {
            if !(s >= tol && s > 0.0) {
                continue;
            }
            let (ui, vi) = (self.u.col(i), self.v.col(i));
            for (col, &uj) in ui.iter().enumerate() {
                axpy(uj / s, vi, p.col_mut(col));
            }
        }
        p
    }

    /// `U_1 Sigma_1 V_1^T`: the matrix with every singular value below `tol` zeroed.
    pub fn truncated_reconstruction(&self, tol: f64) -> DenseMatrix {
        let (m, n) = (self.rows(), self.cols());
        let mut b = DenseMatrix::zeros(m, n);
        for (i, &s) in self.sigma.iter().enumerate() {
            if !(s >= tol && s > 0.0) {
                continue;
            }
            let (ui, vi) = (self.u.col(i), self.v.col(i));
            for (col, &vj) in vi.iter().enumerate() {
                axpy(s * vj, ui, b.col_mut(col));
            }
        }
        b
    }

    pub fn reconstruct(&self) -> DenseMatrix {
        self.truncated_reconstruction(0.0)
    }
}

/// Full SVD by cyclic one-sided Jacobi.
///
/// Columns are rotated pairwise until every pair is orthogonal to within
/// 1e-15 relative to the product of their norms.
pub fn svd(b: &DenseMatrix) -> Result<SvdResult> {
    if !b.is_finite() {
        return Err(Error::NonFinite("svd input"));
    }
    if b.rows() >= b.cols() {
        jacobi_tall(b)
    } else {
        let t = jacobi_tall(&b.transpose())?;
        Ok(SvdResult {
            u: t.v,
            sigma: t.sigma,
            v: t.u,
        })
    }
}

fn jacobi_tall(b: &DenseMatrix) -> Result<SvdResult> {
    let (m, n) = (b.rows(), b.cols());
    let mut work = b.clone();
    let mut v = DenseMatrix::identity(n);
    let mut norms = vec![0.0; n];

    let mut converged = false;
    for _ in 0..MAX_SWEEPS {
        for (j, nj) in norms.iter_mut().enumerate() {
            *nj = dot(work.col(j), work.col(j));
        }
        let mut rotated = false;
        for p in 0..n.saturating_sub(1) {
            for q in p + 1..n {
                let (alpha, beta) = (norms[p], norms[q]);
                if alpha == 0.0 || beta == 0.0 {
                    continue;
                }
                let gamma = dot(work.col(p), work.col(q));
                if gamma.abs() <= OFF_DIAGONAL_TOL * alpha.sqrt() * beta.sqrt() {
                    continue;
                }
                rotated = true;
                let zeta = (beta - alpha) / (2.0 * gamma);
                let t = zeta.signum() / (zeta.abs() + zeta.hypot(1.0));
                let c = 1.0 / t.hypot(1.0);
                let s = c * t;
                rotate_columns(&mut work, p, q, c, s);
                rotate_columns(&mut v, p, q, c, s);
                norms[p] = alpha - t * gamma;
                norms[q] = beta + t * gamma;
            }
        }
        if !rotated {
            converged = true;
            break;
        }
    }
    if !converged {
        return Err(Error::SvdNoConvergence(MAX_SWEEPS));
    }

    let mut order: Vec<(usize, f64)> = (0..n)
        .map(|j| (j, dot(work.col(j), work.col(j)).sqrt()))
        .collect();
    order.sort_by(|a, b| b.1.total_cmp(&a.1));

    let mut u = DenseMatrix::zeros(m, m);
    let mut v_sorted = DenseMatrix::zeros(n, n);
    let mut sigma = Vec::with_capacity(n);
    let mut filled = 0;
    for (dst, &(src, s)) in order.iter().enumerate() {
        v_sorted.col_mut(dst).copy_from_slice(v.col(src));
        sigma.push(s);
        // Columns with a usable norm give left vectors directly; the rest
        // are completed below.
        if (s * s).is_normal() {
            let col = u.col_mut(dst);
            for (ui, wi) in col.iter_mut().zip(work.col(src)) {
                *ui = wi / s;
            }
            filled = dst + 1;
        }
    }
    complete_orthonormal(&mut u, filled);
    Ok(SvdResult {
        u,
        sigma,
        v: v_sorted,
    })
}

fn rotate_columns(a: &mut DenseMatrix, p: usize, q: usize, c: f64, s: f64) {
    debug_assert!(p < q);
    let rows = a.rows;
    let (left, right) = a.data.split_at_mut(q * rows);
    let cp = &mut left[p * rows..(p + 1) * rows];
    let cq = &mut right[..rows];
    for (x, y) in cp.iter_mut().zip(cq.iter_mut()) {
        let (xp, yq) = (*x, *y);
        *x = c * xp - s * yq;
        *y = s * xp + c * yq;
    }
}

/// Fills columns `filled..m` of `u` with unit vectors orthogonal to all
/// earlier columns. Each new column is the standard basis vector with the
/// largest component outside the current span, which is at least
/// `sqrt((m - next) / m)`, so the projection never cancels badly.
fn complete_orthonormal(u: &mut DenseMatrix, filled: usize) {
    let m = u.rows();
    for next in filled..m {
        let mut best: Option<(f64, Vec<f64>)> = None;
        for candidate in 0..m {
            let mut w = vec![0.0; m];
            w[candidate] = 1.0;
            for _ in 0..2 {
                for j in 0..next {
                    let c = dot(u.col(j), &w);
                    axpy(-c, u.col(j), &mut w);
                }
            }
            let nrm = dot(&w, &w).sqrt();
            if best.as_ref().map_or(true, |(b, _)| nrm > *b) {
                best = Some((nrm, w));
            }
        }
        let (nrm, w) = best.expect("m > 0 inside the loop");
        for (ui, wi) in u.col_mut(next).iter_mut().zip(&w) {
            *ui = wi / nrm;
        }
    }
}

/// Spacing between `|x|` and the next larger double.
pub fn ulp(x: f64) -> f64 {
    let a = x.abs();
    // next_up without needing a recent toolchain
    f64::from_bits(a.to_bits() + 1) - a
}

/// Default truncation tolerance `max(m, n) * ulp(||B||_2)`.
pub fn default_tol(b: &DenseMatrix) -> Result<f64> {
    let s = svd(b)?;
    Ok(default_tol_for(b.rows(), b.cols(), s.norm2()))
}

/// [`default_tol`] when the spectral norm is already known.
pub fn default_tol_for(rows: usize, cols: usize, sigma_max: f64) -> f64 {
    rows.max(cols) as f64 * ulp(sigma_max)
}

/// Pseudoinverse of `B` with every singular value `< tol` discarded.
pub fn pinv_truncated(b: &DenseMatrix, tol: f64) -> Result<DenseMatrix> {
    if tol.is_nan() || tol < 0.0 {
        return Err(Error::InvalidConfig(format!(
            "truncation tolerance must be nonnegative, got {tol}"
        )));
    }
    Ok(svd(b)?.pinv(tol))
}
