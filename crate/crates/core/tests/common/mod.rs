#![allow(dead_code)]

use krylov_pinv::{DenseMatrix, SparseMatrix};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn uniform(rng: &mut ChaCha8Rng, len: usize) -> Vec<f64> {
    (0..len).map(|_| rng.gen_range(-1.0..1.0)).collect()
}

pub fn dense(rng: &mut ChaCha8Rng, rows: usize, cols: usize) -> DenseMatrix {
    DenseMatrix::from_column_major(rows, cols, uniform(rng, rows * cols))
}

/// Random square sparse matrix with roughly `per_row` entries per row and a
/// nonzero diagonal.
pub fn sparse(rng: &mut ChaCha8Rng, n: usize, per_row: usize) -> SparseMatrix {
    let mut t = Vec::new();
    for i in 0..n {
        t.push((i, i, 2.0 + rng.gen_range(0.0..1.0)));
        for _ in 0..per_row {
            t.push((i, rng.gen_range(0..n), rng.gen_range(-1.0..1.0)));
        }
    }
    SparseMatrix::from_triplets(n, t).unwrap()
}

pub fn symmetric(rng: &mut ChaCha8Rng, n: usize, per_row: usize) -> SparseMatrix {
    let a = sparse(rng, n, per_row);
    let t: Vec<_> = a.triplets().chain(a.transpose().triplets()).collect();
    SparseMatrix::from_triplets(n, t).unwrap()
}

pub fn dot(x: &[f64], y: &[f64]) -> f64 {
    x.iter().zip(y).map(|(a, b)| a * b).sum()
}

pub fn norm(x: &[f64]) -> f64 {
    dot(x, x).sqrt()
}

pub fn sub(x: &[f64], y: &[f64]) -> Vec<f64> {
    x.iter().zip(y).map(|(a, b)| a - b).collect()
}

pub fn residual(a: &SparseMatrix, x: &[f64], b: &[f64]) -> Vec<f64> {
    sub(b, &a.matvec(x).unwrap())
}

/// Dense Gaussian elimination with partial pivoting; the independent oracle
/// for nonsingular systems.
pub fn gauss_solve(a: &DenseMatrix, b: &[f64]) -> Vec<f64> {
    let n = a.rows();
    let mut m: Vec<Vec<f64>> = (0..n)
        .map(|i| {
            let mut row: Vec<f64> = (0..n).map(|j| a[(i, j)]).collect();
            row.push(b[i]);
            row
        })
        .collect();
    for c in 0..n {
        let p = (c..n)
            .max_by(|&x, &y| m[x][c].abs().total_cmp(&m[y][c].abs()))
            .unwrap();
        m.swap(c, p);
        for r in c + 1..n {
            let (top, rest) = m.split_at_mut(r);
            let f = rest[0][c] / top[c][c];
            for (v, p) in rest[0][c..].iter_mut().zip(&top[c][c..]) {
                *v -= f * p;
            }
        }
    }
    let mut x = vec![0.0; n];
    for i in (0..n).rev() {
        let s: f64 = (i + 1..n).map(|j| m[i][j] * x[j]).sum();
        x[i] = (m[i][n] - s) / m[i][i];
    }
    x
}

/// Least squares through the normal equations `B^T B y = B^T c`.
pub fn normal_equations(b: &DenseMatrix, c: &[f64]) -> Vec<f64> {
    let bt = b.transpose();
    gauss_solve(&bt.matmul(b), &bt.matvec(c))
}
