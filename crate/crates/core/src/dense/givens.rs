//! Incremental Givens QR of an upper Hessenberg least-squares problem.

use super::DenseMatrix;
use crate::error::{Error, Result};

/// Running QR factorization of `H_{k+1,k}` together with the rotated
/// right-hand side.
///
/// After `k` updates, `R` is `k x k` upper triangular and `g` has `k + 1`
/// entries; `|g[k]|` is the least-squares residual of
/// `min || rhs - H_{k+1,k} y ||`.
#[derive(Debug, Clone)]
pub struct GivensState {
    rotations: Vec<(f64, f64)>,
    /// Column `j` holds `R[0..=j, j]`.
    r_cols: Vec<Vec<f64>>,
    g: Vec<f64>,
    /// `h_{k,k}^{(k-1)}`: diagonal entries after the earlier rotations, before
    /// the annihilating one.
    pivots: Vec<f64>,
}

impl GivensState {
    /// Starts with the first right-hand-side entry (`beta` for GMRES).
    pub fn new(rhs0: f64) -> Self {
        Self {
            rotations: Vec::new(),
            r_cols: Vec::new(),
            g: vec![rhs0],
            pivots: Vec::new(),
        }
    }

    pub fn len(&self) -> usize {
        self.rotations.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rotations.is_empty()
    }

    /// Appends column `k` of the Hessenberg matrix (`h_{1,k} .. h_{k,k}` in
    /// `column`, `h_{k+1,k}` in `h_subdiag`) and returns the new `(c_k, s_k)`.
    pub fn update(&mut self, column: &[f64], h_subdiag: f64) -> (f64, f64) {
        self.update_with_rhs(column, h_subdiag, 0.0)
    }

    /// As [`update`](Self::update), with `rhs_entry` appended to the
    /// right-hand side at row `k + 1` (zero for GMRES, `v_{k+1}^T b` for the
    /// range-restricted variants).
    pub fn update_with_rhs(
        &mut self,
        column: &[f64],
        h_subdiag: f64,
        rhs_entry: f64,
    ) -> (f64, f64) {
        let k = self.rotations.len();
        assert_eq!(column.len(), k + 1, "column must hold h_1k..h_kk");
        let mut col = column.to_vec();
        for (i, &(c, s)) in self.rotations.iter().enumerate() {
            let (a, b) = (col[i], col[i + 1]);
            col[i] = c * a + s * b;
            col[i + 1] = -s * a + c * b;
        }
        let pivot = col[k];
        let (c, s) = if h_subdiag == 0.0 {
            (1.0, 0.0)
        } else {
            let r = pivot.hypot(h_subdiag);
            (pivot / r, h_subdiag / r)
        };
        col[k] = c * pivot + s * h_subdiag;

        let gk = self.g[k];
        self.g[k] = c * gk + s * rhs_entry;
        self.g.push(-s * gk + c * rhs_entry);

        self.rotations.push((c, s));
        self.pivots.push(pivot);
        self.r_cols.push(col);
        (c, s)
    }

    pub fn rotations(&self) -> &[(f64, f64)] {
        &self.rotations
    }

    pub fn pivots(&self) -> &[f64] {
        &self.pivots
    }

    pub fn g(&self) -> &[f64] {
        &self.g
    }

    /// `|g_{k+1}|`, the least-squares residual norm.
    pub fn residual_norm(&self) -> f64 {
        self.g.last().map_or(0.0, |v| v.abs())
    }

    /// Column `j` of `R` (entries `0..=j`).
    pub fn r_column(&self, j: usize) -> &[f64] {
        &self.r_cols[j]
    }

    /// The triangular factor as a dense `k x k` matrix.
    pub fn r(&self) -> DenseMatrix {
        let k = self.len();
        let mut r = DenseMatrix::zeros(k, k);
        for (j, col) in self.r_cols.iter().enumerate() {
            r.col_mut(j)[..col.len()].copy_from_slice(col);
        }
        r
    }

    /// Solves `R y = g[..k]` bottom-up.
    pub fn solve(&self) -> Result<Vec<f64>> {
        let k = self.len();
        let mut y = self.g[..k].to_vec();
        for i in (0..k).rev() {
            let d = self.r_cols[i][i];
            if d == 0.0 {
                return Err(Error::SingularTriangular(i));
            }
            y[i] /= d;
            let yi = y[i];
            for (yl, rl) in y[..i].iter_mut().zip(&self.r_cols[i][..i]) {
                *yl -= rl * yi;
            }
        }
        Ok(y)
    }
}

/// Solves the upper-triangular system `R y = g` by backward substitution.
pub fn back_substitute(r: &DenseMatrix, g: &[f64]) -> Result<Vec<f64>> {
    let k = r.rows();
    assert_eq!(r.cols(), k, "R must be square");
    assert_eq!(g.len(), k, "g length differs from R");
    let mut y = g.to_vec();
    for i in (0..k).rev() {
        let d = r[(i, i)];
        if d == 0.0 {
            return Err(Error::SingularTriangular(i));
        }
        y[i] /= d;
        let yi = y[i];
        for (yl, rl) in y[..i].iter_mut().zip(&r.col(i)[..i]) {
            *yl -= rl * yi;
        }
    }
    Ok(y)
}
