//! Compressed sparse row storage for the square operator `A`.

mod market;

pub use market::{
    parse_matrix_market, read_matrix_market, read_vector, write_matrix_market, write_vector,
};

use crate::dense::DenseMatrix;
use crate::error::{Error, Result};

/// Immutable square CSR matrix.
///
/// Rows are stored with strictly increasing column indices. Products with
/// `A` and `A^T` are both served from the same arrays.
#[derive(Debug, Clone, PartialEq)]
pub struct SparseMatrix {
    n: usize,
    row_offsets: Vec<usize>,
    col_indices: Vec<usize>,
    values: Vec<f64>,
}

impl SparseMatrix {
    /// Wraps raw CSR arrays after checking every structural invariant.
    pub fn from_csr(
        n: usize,
        row_offsets: Vec<usize>,
        col_indices: Vec<usize>,
        values: Vec<f64>,
    ) -> Result<Self> {
        if row_offsets.len() != n + 1 {
            return Err(Error::InvalidStructure(format!(
                "row_offsets has length {}, expected {}",
                row_offsets.len(),
                n + 1
            )));
        }
        if row_offsets[0] != 0 || row_offsets[n] != values.len() {
            return Err(Error::InvalidStructure(
                "row_offsets must start at 0 and end at nnz".into(),
            ));
        }
        if col_indices.len() != values.len() {
            return Err(Error::InvalidStructure(
                "col_indices and values differ in length".into(),
            ));
        }
        for i in 0..n {
            let (lo, hi) = (row_offsets[i], row_offsets[i + 1]);
            if lo > hi {
                return Err(Error::InvalidStructure(format!(
                    "row_offsets decreases at row {i}"
                )));
            }
            let cols = &col_indices[lo..hi];
            if cols.iter().any(|&j| j >= n) {
                return Err(Error::InvalidStructure(format!(
                    "column index out of range in row {i}"
                )));
            }
            if cols.windows(2).any(|w| w[0] >= w[1]) {
                return Err(Error::InvalidStructure(format!(
                    "column indices not strictly increasing in row {i}"
                )));
            }
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite("CSR construction"));
        }
        Ok(Self {
            n,
            row_offsets,
            col_indices,
            values,
        })
    }

    /// Builds from `(row, col, value)` triplets. Duplicates are summed and
    /// entries whose final value is exactly zero are dropped.
    pub fn from_triplets<I>(n: usize, triplets: I) -> Result<Self>
    where
        I: IntoIterator<Item = (usize, usize, f64)>,
    {
        let mut entries: Vec<(usize, usize, f64)> = triplets.into_iter().collect();
        for &(i, j, v) in &entries {
            if i >= n || j >= n {
                return Err(Error::InvalidStructure(format!(
                    "entry ({i}, {j}) outside a {n}x{n} matrix"
                )));
            }
            if !v.is_finite() {
                return Err(Error::NonFinite("triplet input"));
            }
        }
        // Stable sort keeps duplicates in input order, so sums are reproducible.
        entries.sort_by_key(|&(i, j, _)| (i, j));

        let mut row_offsets = vec![0usize; n + 1];
        let mut col_indices = Vec::with_capacity(entries.len());
        let mut values = Vec::with_capacity(entries.len());
        let mut iter = entries.into_iter().peekable();
        while let Some((i, j, mut v)) = iter.next() {
            while let Some(&(i2, j2, v2)) = iter.peek() {
                if (i2, j2) != (i, j) {
                    break;
                }
                v += v2;
                iter.next();
            }
            if v != 0.0 {
                col_indices.push(j);
                values.push(v);
                row_offsets[i + 1] += 1;
            }
        }
        for i in 0..n {
            row_offsets[i + 1] += row_offsets[i];
        }
        Self::from_csr(n, row_offsets, col_indices, values)
    }

    /// Sparse copy of a square dense matrix, dropping exact zeros.
    pub fn from_dense(a: &DenseMatrix) -> Result<Self> {
        if a.rows() != a.cols() {
            return Err(Error::NotSquare {
                rows: a.rows(),
                cols: a.cols(),
            });
        }
        let n = a.rows();
        let triplets = (0..n).flat_map(|i| (0..n).map(move |j| (i, j, a[(i, j)])));
        Self::from_triplets(n, triplets)
    }

    pub fn identity(n: usize) -> Self {
        Self {
            n,
            row_offsets: (0..=n).collect(),
            col_indices: (0..n).collect(),
            values: vec![1.0; n],
        }
    }

    pub fn zeros(n: usize) -> Self {
        Self {
            n,
            row_offsets: vec![0; n + 1],
            col_indices: Vec::new(),
            values: Vec::new(),
        }
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn nnz(&self) -> usize {
        self.values.len()
    }

    pub fn row_offsets(&self) -> &[usize] {
        &self.row_offsets
    }

    pub fn col_indices(&self) -> &[usize] {
        &self.col_indices
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// Column indices and values stored in row `i`.
    pub fn row(&self, i: usize) -> (&[usize], &[f64]) {
        let (lo, hi) = (self.row_offsets[i], self.row_offsets[i + 1]);
        (&self.col_indices[lo..hi], &self.values[lo..hi])
    }

    /// Iterates `(row, col, value)` over stored entries in row-major order.
    pub fn triplets(&self) -> impl Iterator<Item = (usize, usize, f64)> + '_ {
        (0..self.n).flat_map(move |i| {
            let (cols, vals) = self.row(i);
            cols.iter().zip(vals).map(move |(&j, &v)| (i, j, v))
        })
    }

    /// Stored value at `(i, j)`, zero when the entry is not stored.
    pub fn get(&self, i: usize, j: usize) -> f64 {
        let (cols, vals) = self.row(i);
        cols.binary_search(&j).map_or(0.0, |p| vals[p])
    }

    /// `y = A x`
    pub fn matvec(&self, x: &[f64]) -> Result<Vec<f64>> {
        self.check_len(x)?;
        let mut y = vec![0.0; self.n];
        self.matvec_into(x, &mut y);
        if y.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite("matvec"));
        }
        Ok(y)
    }

    /// `y = A^T x`, accumulated column-wise from the row storage.
    pub fn matvec_transpose(&self, x: &[f64]) -> Result<Vec<f64>> {
        self.check_len(x)?;
        let mut y = vec![0.0; self.n];
        self.matvec_transpose_into(x, &mut y);
        if y.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite("matvec_transpose"));
        }
        Ok(y)
    }

    /// `y = A x` into caller storage, no finiteness check.
    ///
    /// # Panics
    /// When `x` or `y` does not have length `n`.
    pub fn matvec_into(&self, x: &[f64], y: &mut [f64]) {
        assert_eq!(x.len(), self.n, "x length");
        assert_eq!(y.len(), self.n, "y length");
        for (i, yi) in y.iter_mut().enumerate() {
            let (lo, hi) = (self.row_offsets[i], self.row_offsets[i + 1]);
            *yi = self.col_indices[lo..hi]
                .iter()
                .zip(&self.values[lo..hi])
                .map(|(&j, &v)| v * x[j])
                .sum();
        }
    }

    /// `y = A^T x` into caller storage. Panics like [`Self::matvec_into`].
    pub fn matvec_transpose_into(&self, x: &[f64], y: &mut [f64]) {
        assert_eq!(x.len(), self.n, "x length");
        assert_eq!(y.len(), self.n, "y length");
        y.iter_mut().for_each(|v| *v = 0.0);
        for (i, &xi) in x.iter().enumerate() {
            let (lo, hi) = (self.row_offsets[i], self.row_offsets[i + 1]);
            for (&j, &v) in self.col_indices[lo..hi].iter().zip(&self.values[lo..hi]) {
                y[j] += v * xi;
            }
        }
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.values.iter().map(|v| v * v).sum::<f64>().sqrt()
    }

    /// Dense copy; intended for tests and small problems.
    pub fn to_dense(&self) -> DenseMatrix {
        let mut d = DenseMatrix::zeros(self.n, self.n);
        for (i, j, v) in self.triplets() {
            d[(i, j)] = v;
        }
        d
    }

    /// Explicit transpose as a new CSR matrix.
    pub fn transpose(&self) -> Self {
        let triplets: Vec<_> = self.triplets().map(|(i, j, v)| (j, i, v)).collect();
        Self::from_triplets(self.n, triplets).expect("transpose of a valid matrix is valid")
    }

    /// True when `|a_ij - a_ji| <= tol * max|a|` for every stored entry.
    pub fn is_symmetric(&self, tol: f64) -> bool {
        let scale = self.values.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        self.triplets()
            .all(|(i, j, v)| (v - self.get(j, i)).abs() <= tol * scale)
    }

    fn check_len(&self, x: &[f64]) -> Result<()> {
        if x.len() != self.n {
            return Err(Error::DimensionMismatch {
                expected: self.n,
                found: x.len(),
            });
        }
        Ok(())
    }
}
