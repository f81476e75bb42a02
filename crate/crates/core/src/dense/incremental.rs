//! Singular values and truncated solves for a growing upper-triangular
//! factor, by one-sided Jacobi warm-started from the previous step.
//!
//! The Givens factor of `H_{k+1,k} = Q [R_k; 0]` only ever gains a column, so
//! the rotations that orthogonalized the rows of `R_{k-1}` are an excellent
//! starting guess for `R_k`. Jacobi runs on the columns of `R^T`:
//! `R^T J = Y` with orthogonal columns gives `R = J Σ (Y Σ^{-1})^T`.
//!
//! Each refresh re-orthonormalizes `J` and rebuilds `Y = R^T J` from the
//! exact `R`, so rounding does not accumulate across steps.

use super::svd::{MAX_SWEEPS, OFF_DIAGONAL_TOL};
use crate::error::{Error, Result};
use crate::{axpy, dot};

#[derive(Debug, Clone, Default)]
pub struct TriangularSvd {
    /// Column `l` holds `R[0..=l, l]`.
    r_cols: Vec<Vec<f64>>,
    /// Accumulated right rotations (left singular vectors of `R`).
    j: Vec<Vec<f64>>,
    /// `R^T J`, columns mutually orthogonal after a refresh.
    y: Vec<Vec<f64>>,
    fresh: bool,
    sweeps: usize,
}

impl TriangularSvd {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn len(&self) -> usize {
        self.r_cols.len()
    }

    pub fn is_empty(&self) -> bool {
        self.r_cols.is_empty()
    }

    /// Appends column `k` of `R` (`k + 1` entries, diagonal last).
    pub fn push_column(&mut self, column: &[f64]) {
        let k = self.len();
        assert_eq!(
            column.len(),
            k + 1,
            "column {k} of R needs {} entries",
            k + 1
        );
        self.r_cols.push(column.to_vec());
        for col in &mut self.j {
            col.push(0.0);
        }
        let mut e = vec![0.0; k + 1];
        e[k] = 1.0;
        self.j.push(e);
        self.fresh = false;
    }

    /// Sweeps used by the last refresh.
    pub fn last_sweeps(&self) -> usize {
        self.sweeps
    }

    /// Brings the factorization up to date with every pushed column.
    pub fn refresh(&mut self) -> Result<()> {
        if self.fresh {
            return Ok(());
        }
        if self.r_cols.iter().flatten().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite("triangular factor"));
        }
        let k = self.len();
        orthonormalize(&mut self.j);
        self.y.resize(k, Vec::new());
        for (yi, ji) in self.y.iter_mut().zip(&self.j) {
            yi.clear();
            yi.extend(self.r_cols.iter().map(|rc| dot(rc, &ji[..rc.len()])));
        }
        self.sweeps = jacobi(&mut self.y, &mut self.j)?;
        self.fresh = true;
        Ok(())
    }

    /// Singular values of `R`, nonincreasing.
    pub fn sigma(&self) -> Vec<f64> {
        assert!(self.fresh, "refresh before reading singular values");
        let mut s: Vec<f64> = self.y.iter().map(|c| dot(c, c).sqrt()).collect();
        s.sort_by(|a, b| b.total_cmp(a));
        s
    }

    /// `R^+ g` with singular values below `tol` (and exact zeros) dropped.
    pub fn solve_truncated(&self, g: &[f64], tol: f64) -> Vec<f64> {
        assert!(self.fresh, "refresh before solving");
        let k = self.len();
        assert_eq!(g.len(), k, "rhs length differs from R");
        let mut x = vec![0.0; k];
        for (yi, ji) in self.y.iter().zip(&self.j) {
            let s2 = dot(yi, yi);
            let s = s2.sqrt();
            if s > 0.0 && s >= tol {
                axpy(dot(ji, g) / s2, yi, &mut x);
            }
        }
        x
    }
}

/// Modified Gram-Schmidt in place; columns are already close to orthonormal.
fn orthonormalize(cols: &mut [Vec<f64>]) {
    for i in 0..cols.len() {
        let (done, rest) = cols.split_at_mut(i);
        let ci = &mut rest[0];
        for q in done.iter() {
            let h = dot(q, ci);
            axpy(-h, q, ci);
        }
        let nrm = dot(ci, ci).sqrt();
        ci.iter_mut().for_each(|v| *v /= nrm);
    }
}

/// Cyclic one-sided Jacobi on the columns of `y`, mirroring every rotation
/// on `j`. A pair is re-examined only if one of its columns changed since it
/// last passed the orthogonality test, which is exact bookkeeping rather than
/// an approximation. Returns the number of sweeps.
fn jacobi(y: &mut [Vec<f64>], j: &mut [Vec<f64>]) -> Result<usize> {
    let k = y.len();
    let mut clock: u64 = 1;
    let mut modified = vec![1u64; k];
    let mut checked = vec![0u64; k * k];
    let mut norms = vec![0.0; k];

    for sweep in 1..=MAX_SWEEPS {
        for (n, c) in norms.iter_mut().zip(y.iter()) {
            *n = dot(c, c);
        }
        let mut rotated = false;
        for p in 0..k.saturating_sub(1) {
            for q in p + 1..k {
                if checked[p * k + q] >= modified[p].max(modified[q]) {
                    continue;
                }
                let (alpha, beta) = (norms[p], norms[q]);
                if alpha == 0.0 || beta == 0.0 {
                    checked[p * k + q] = clock;
                    continue;
                }
                let (left, right) = y.split_at_mut(q);
                let (yp, yq) = (&mut left[p], &mut right[0]);
                let gamma = dot(yp, yq);
                if gamma.abs() <= OFF_DIAGONAL_TOL * alpha.sqrt() * beta.sqrt() {
                    checked[p * k + q] = clock;
                    continue;
                }
                rotated = true;
                let zeta = (beta - alpha) / (2.0 * gamma);
                let t = zeta.signum() / (zeta.abs() + zeta.hypot(1.0));
                let c = 1.0 / t.hypot(1.0);
                let s = c * t;
                rotate(yp, yq, c, s);
                let (left, right) = j.split_at_mut(q);
                rotate(&mut left[p], &mut right[0], c, s);
                norms[p] = alpha - t * gamma;
                norms[q] = beta + t * gamma;
                clock += 1;
                modified[p] = clock;
                modified[q] = clock;
            }
        }
        if !rotated {
            return Ok(sweep);
        }
    }
    Err(Error::SvdNoConvergence(MAX_SWEEPS))
}

fn rotate(x: &mut [f64], y: &mut [f64], c: f64, s: f64) {
    for (a, b) in x.iter_mut().zip(y.iter_mut()) {
        let (u, v) = (*a, *b);
        *a = c * u - s * v;
        *b = s * u + c * v;
    }
}
