use super::DenseMatrix;

/// LU factorization with partial pivoting, `P A = L U`.
///
/// Exactly singular pivots are replaced by `eps * max|a_ij|` so the factors
/// can still drive inverse iteration on singular operators.
#[derive(Debug, Clone)]
pub struct LuFactors {
    lu: DenseMatrix,
    perm: Vec<usize>,
}

impl LuFactors {
    pub fn new(a: &DenseMatrix) -> Self {
        let n = a.rows();
        assert_eq!(a.cols(), n, "LU needs a square matrix");
        let floor = a.max_abs().max(f64::MIN_POSITIVE) * f64::EPSILON;
        let mut lu = a.clone();
        let mut perm: Vec<usize> = (0..n).collect();
        let mut multipliers = vec![0.0; n];
        for k in 0..n {
            let p = (k..n)
                .max_by(|&i, &j| lu[(i, k)].abs().total_cmp(&lu[(j, k)].abs()))
                .expect("nonempty pivot range");
            if p != k {
                perm.swap(p, k);
                for j in 0..n {
                    let tmp = lu[(p, j)];
                    lu[(p, j)] = lu[(k, j)];
                    lu[(k, j)] = tmp;
                }
            }
            if lu[(k, k)] == 0.0 {
                lu[(k, k)] = floor;
            }
            let pivot = lu[(k, k)];
            {
                let col = lu.col_mut(k);
                col[k + 1..].iter_mut().for_each(|v| *v /= pivot);
                multipliers[k + 1..n].copy_from_slice(&col[k + 1..]);
            }
            for j in k + 1..n {
                let ukj = lu[(k, j)];
                if ukj == 0.0 {
                    continue;
                }
                let col = lu.col_mut(j);
                for i in k + 1..n {
                    col[i] -= multipliers[i] * ukj;
                }
            }
        }
        Self { lu, perm }
    }

    pub fn solve(&self, b: &[f64]) -> Vec<f64> {
        let n = self.lu.rows();
        assert_eq!(b.len(), n);
        let mut x: Vec<f64> = self.perm.iter().map(|&p| b[p]).collect();
        // Column-oriented sweeps keep memory access contiguous.
        for j in 0..n {
            let xj = x[j];
            if xj != 0.0 {
                let col = self.lu.col(j);
                for i in j + 1..n {
                    x[i] -= col[i] * xj;
                }
            }
        }
        for j in (0..n).rev() {
            x[j] /= self.lu[(j, j)];
            let xj = x[j];
            let col = self.lu.col(j);
            for i in 0..j {
                x[i] -= col[i] * xj;
            }
        }
        x
    }
}
