//! Orthonormal Krylov bases.
//!
//! [`ArnoldiState`] runs modified Gram-Schmidt Arnoldi with an optional
//! single reorthogonalization pass and keeps every basis vector.
//! [`LanczosState`] runs the symmetric three-term recurrence and keeps only
//! the two most recent vectors.

use crate::dense::DenseMatrix;
use crate::error::{Error, Result};
use crate::sparse::SparseMatrix;
use crate::{axpy, dot, norm2};

/// Read access to the `(k+1) x k` upper Hessenberg matrix of a Krylov run.
pub trait Hessenberg {
    /// Number of completed steps `k`.
    fn steps(&self) -> usize;

    /// `h_{i,j}` with 1-based indices, zero outside the stored band.
    fn entry(&self, i: usize, j: usize) -> f64;

    /// `h_{k+1,k}` of the latest step.
    fn subdiagonal(&self) -> f64 {
        let k = self.steps();
        if k == 0 {
            0.0
        } else {
            self.entry(k + 1, k)
        }
    }

    /// `h_{1,k} .. h_{k,k}` of the latest step.
    fn last_column(&self) -> Vec<f64> {
        let k = self.steps();
        (1..=k).map(|i| self.entry(i, k)).collect()
    }

    /// Dense copy of `H_{k+1,k}`.
    fn to_dense(&self) -> DenseMatrix {
        let k = self.steps();
        let mut h = DenseMatrix::zeros(k + 1, k);
        for j in 1..=k {
            for i in 1..=(j + 1) {
                h[(i - 1, j - 1)] = self.entry(i, j);
            }
        }
        h
    }

    /// `||H_{k,k}||_F^2`: the square leading block, without `h_{k+1,k}`.
    fn leading_frobenius_sq(&self) -> f64 {
        let k = self.steps();
        let mut s = 0.0;
        for j in 1..=k {
            for i in 1..=(j + 1).min(k) {
                let h = self.entry(i, j);
                s += h * h;
            }
        }
        s
    }
}

/// Arnoldi process state: `A V_k = V_{k+1} H_{k+1,k}`.
#[derive(Debug, Clone)]
pub struct ArnoldiState {
    basis: Vec<Vec<f64>>,
    /// Column `j` (0-based) holds `h_{1,j+1} .. h_{j+2,j+1}`.
    h_cols: Vec<Vec<f64>>,
    beta: f64,
    breakdown: bool,
}

impl ArnoldiState {
    /// `v_1 = r0 / ||r0||`; fails with [`Error::TrivialResidual`] when `r0 = 0`.
    pub fn start(a: &SparseMatrix, r0: &[f64]) -> Result<Self> {
        if r0.len() != a.dim() {
            return Err(Error::DimensionMismatch {
                expected: a.dim(),
                found: r0.len(),
            });
        }
        let beta = norm2(r0);
        if beta == 0.0 {
            return Err(Error::TrivialResidual);
        }
        if !beta.is_finite() {
            return Err(Error::NonFinite("Arnoldi start vector"));
        }
        let v1 = r0.iter().map(|x| x / beta).collect();
        Ok(Self {
            basis: vec![v1],
            h_cols: Vec::new(),
            beta,
            breakdown: false,
        })
    }

    /// `||r0||`, the norm the start vector was scaled by.
    pub fn beta(&self) -> f64 {
        self.beta
    }

    pub fn steps(&self) -> usize {
        self.h_cols.len()
    }

    pub fn is_breakdown(&self) -> bool {
        self.breakdown
    }

    /// Stored basis vectors: `k + 1` of them, or `k` after breakdown.
    pub fn basis(&self) -> &[Vec<f64>] {
        &self.basis
    }

    /// One Arnoldi step by modified Gram-Schmidt, returning `h_{k+1,k}`.
    ///
    /// With `reorth`, one more full Gram-Schmidt pass is made over the
    /// vector; its coefficients are folded into the new column of `H` so the
    /// Arnoldi relation stays exact up to rounding.
    pub fn step(&mut self, a: &SparseMatrix, reorth: bool) -> Result<f64> {
        if self.breakdown {
            return Err(Error::StepAfterBreakdown);
        }
        let k = self.steps();
        if k >= a.dim() {
            return Err(Error::StepAfterBreakdown);
        }
        let mut w = vec![0.0; a.dim()];
        a.matvec_into(&self.basis[k], &mut w);

        let mut h = vec![0.0; k + 2];
        for (hi, vi) in h.iter_mut().zip(&self.basis) {
            *hi = dot(&w, vi);
            axpy(-*hi, vi, &mut w);
        }
        if reorth {
            for (hi, vi) in h.iter_mut().zip(&self.basis) {
                let c = dot(&w, vi);
                axpy(-c, vi, &mut w);
                *hi += c;
            }
        }
        let sub = norm2(&w);
        if !sub.is_finite() {
            return Err(Error::NonFinite("Arnoldi step"));
        }
        h[k + 1] = sub;
        if sub > 0.0 {
            w.iter_mut().for_each(|x| *x /= sub);
            self.basis.push(w);
        } else {
            self.breakdown = true;
        }
        self.h_cols.push(h);
        Ok(sub)
    }

    /// `x = V_k y`.
    pub fn combine(&self, y: &[f64]) -> Vec<f64> {
        let n = self.basis[0].len();
        let mut x = vec![0.0; n];
        for (yi, vi) in y.iter().zip(&self.basis) {
            axpy(*yi, vi, &mut x);
        }
        x
    }

    /// `max |V^T V - I|` over the stored basis.
    pub fn orthogonality_loss(&self) -> f64 {
        let m = self.basis.len();
        let mut worst = 0.0f64;
        for i in 0..m {
            for j in i..m {
                let d = dot(&self.basis[i], &self.basis[j]);
                let target = if i == j { 1.0 } else { 0.0 };
                worst = worst.max((d - target).abs());
            }
        }
        worst
    }

    /// `A V_k` as dense columns.
    pub fn apply_operator(&self, a: &SparseMatrix) -> Vec<Vec<f64>> {
        self.basis[..self.steps()]
            .iter()
            .map(|v| {
                let mut w = vec![0.0; a.dim()];
                a.matvec_into(v, &mut w);
                w
            })
            .collect()
    }

    /// `max |A V_k - V_{k+1} H_{k+1,k}|` entrywise.
    pub fn relation_residual(&self, a: &SparseMatrix) -> f64 {
        let av = self.apply_operator(a);
        let mut worst = 0.0f64;
        for (j, mut col) in av.into_iter().enumerate() {
            for (i, hij) in self.h_cols[j].iter().enumerate() {
                if let Some(vi) = self.basis.get(i) {
                    axpy(-hij, vi, &mut col);
                }
            }
            worst = col.iter().fold(worst, |m, x| m.max(x.abs()));
        }
        worst
    }
}

impl Hessenberg for ArnoldiState {
    fn steps(&self) -> usize {
        self.h_cols.len()
    }

    fn entry(&self, i: usize, j: usize) -> f64 {
        if j == 0 || j > self.h_cols.len() || i == 0 || i > j + 1 {
            return 0.0;
        }
        self.h_cols[j - 1][i - 1]
    }

    fn last_column(&self) -> Vec<f64> {
        match self.h_cols.last() {
            Some(c) => c[..c.len() - 1].to_vec(),
            None => Vec::new(),
        }
    }
}

/// Lanczos three-term recurrence for symmetric operators.
///
/// The tridiagonal coefficients are kept (`alpha_j = h_{j,j}`,
/// `beta_j = h_{j+1,j} = h_{j,j+1}`); basis vectors older than `v_{k}` are
/// dropped.
#[derive(Debug, Clone)]
pub struct LanczosState {
    prev: Option<Vec<f64>>,
    curr: Vec<f64>,
    next: Option<Vec<f64>>,
    alphas: Vec<f64>,
    betas: Vec<f64>,
    beta0: f64,
    breakdown: bool,
}

impl LanczosState {
    pub fn start(a: &SparseMatrix, r0: &[f64]) -> Result<Self> {
        if r0.len() != a.dim() {
            return Err(Error::DimensionMismatch {
                expected: a.dim(),
                found: r0.len(),
            });
        }
        let beta0 = norm2(r0);
        if beta0 == 0.0 {
            return Err(Error::TrivialResidual);
        }
        if !beta0.is_finite() {
            return Err(Error::NonFinite("Lanczos start vector"));
        }
        Ok(Self {
            prev: None,
            curr: r0.iter().map(|x| x / beta0).collect(),
            next: None,
            alphas: Vec::new(),
            betas: Vec::new(),
            beta0,
            breakdown: false,
        })
    }

    pub fn beta(&self) -> f64 {
        self.beta0
    }

    pub fn steps(&self) -> usize {
        self.alphas.len()
    }

    pub fn is_breakdown(&self) -> bool {
        self.breakdown
    }

    pub fn alphas(&self) -> &[f64] {
        &self.alphas
    }

    pub fn betas(&self) -> &[f64] {
        &self.betas
    }

    /// `v_k`, the vector the latest step expanded (`v_1` before any step).
    pub fn current(&self) -> &[f64] {
        &self.curr
    }

    /// `v_{k+1}` after a step without breakdown.
    pub fn next_vector(&self) -> Option<&[f64]> {
        self.next.as_deref()
    }

    /// One Lanczos step, returning `beta_k = h_{k+1,k}`.
    pub fn step(&mut self, a: &SparseMatrix) -> Result<f64> {
        if self.breakdown {
            return Err(Error::StepAfterBreakdown);
        }
        if self.steps() >= a.dim() {
            return Err(Error::StepAfterBreakdown);
        }
        if let Some(next) = self.next.take() {
            self.prev = Some(std::mem::replace(&mut self.curr, next));
        }
        let mut w = vec![0.0; a.dim()];
        a.matvec_into(&self.curr, &mut w);
        if let (Some(prev), Some(&b)) = (&self.prev, self.betas.last()) {
            axpy(-b, prev, &mut w);
        }
        let alpha = dot(&w, &self.curr);
        axpy(-alpha, &self.curr, &mut w);
        let beta = norm2(&w);
        if !beta.is_finite() || !alpha.is_finite() {
            return Err(Error::NonFinite("Lanczos step"));
        }
        self.alphas.push(alpha);
        self.betas.push(beta);
        if beta > 0.0 {
            w.iter_mut().for_each(|x| *x /= beta);
            self.next = Some(w);
        } else {
            self.breakdown = true;
        }
        Ok(beta)
    }
}

impl Hessenberg for LanczosState {
    fn steps(&self) -> usize {
        self.alphas.len()
    }

    fn entry(&self, i: usize, j: usize) -> f64 {
        let k = self.alphas.len();
        if i == 0 || j == 0 || j > k {
            return 0.0;
        }
        if i == j {
            self.alphas[j - 1]
        } else if i == j + 1 {
            self.betas[j - 1]
        } else if i + 1 == j {
            self.betas[i - 1]
        } else {
            0.0
        }
    }

    fn to_dense(&self) -> DenseMatrix {
        let k = self.steps();
        let mut h = DenseMatrix::zeros(k + 1, k);
        for j in 0..k {
            h[(j, j)] = self.alphas[j];
            h[(j + 1, j)] = self.betas[j];
            if j > 0 {
                h[(j - 1, j)] = self.betas[j - 1];
            }
        }
        h
    }
}
