//! Test-problem generators: the periodic convection-diffusion operator, its
//! right-hand side, inconsistent right-hand sides built from a nullspace
//! vector, and random symmetric semidefinite matrices with a prescribed
//! spectrum.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::dense::{DenseMatrix, LuFactors};
use crate::error::{Error, Result};
use crate::sparse::SparseMatrix;
use crate::{axpy, dot, norm2};

/// Largest dimension for the dense inverse-iteration fallback.
pub const DENSE_EIGEN_LIMIT: usize = 2000;

/// `Δu + d ∂u/∂x₁` on the periodic unit square, `m × m` nodes.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PeriodicConvDiffSpec {
    pub m: usize,
    pub d: f64,
}

impl PeriodicConvDiffSpec {
    pub fn new(m: usize, d: f64) -> Self {
        Self { m, d }
    }

    pub fn n(&self) -> usize {
        self.m * self.m
    }

    pub fn validate(&self) -> Result<()> {
        if self.m < 3 {
            return Err(Error::InvalidConfig(format!(
                "mesh needs at least 3 points per side, got {}",
                self.m
            )));
        }
        if !self.d.is_finite() {
            return Err(Error::InvalidConfig(
                "convection coefficient must be finite".into(),
            ));
        }
        Ok(())
    }

    /// Node index of grid point `(i1, i2)`, row-major over `(x₁, x₂)`.
    pub fn node(&self, i1: usize, i2: usize) -> usize {
        i1 * self.m + i2
    }

    /// Coordinates `(x₁, x₂) = (i1 h, i2 h)` of a node.
    pub fn coordinates(&self, node: usize) -> (f64, f64) {
        let h = 1.0 / self.m as f64;
        ((node / self.m) as f64 * h, (node % self.m) as f64 * h)
    }

    /// Stencil weights `(diagonal, x₂ neighbours, x₁+h neighbour, x₁-h neighbour)`.
    ///
    /// The convection weight is rounded to a multiple of a power of two small
    /// enough that every partial row or column sum is exact, so `A 1 = 0` and
    /// `A^T 1 = 0` hold bit for bit. The rounding moves it by at most one
    /// unit in the last place.
    pub fn stencil(&self) -> (f64, f64, f64, f64) {
        let m = self.m as f64;
        let a = m * m;
        let mut c = self.d * m / 2.0;
        let bound = 6.0 * a + 2.0 * c.abs();
        let quantum = 2f64.powi(bound.log2().ceil() as i32 - 52);
        c = (c / quantum).round() * quantum;
        (-4.0 * a, a, a + c, a - c)
    }
}

/// Centered second-order differences with periodic wraparound.
pub fn gen_periodic_convdiff(spec: &PeriodicConvDiffSpec) -> Result<SparseMatrix> {
    spec.validate()?;
    let m = spec.m;
    let (diag, side, fwd, back) = spec.stencil();
    let mut triplets = Vec::with_capacity(5 * spec.n());
    for i1 in 0..m {
        for i2 in 0..m {
            let row = spec.node(i1, i2);
            triplets.push((row, row, diag));
            triplets.push((row, spec.node(i1, (i2 + 1) % m), side));
            triplets.push((row, spec.node(i1, (i2 + m - 1) % m), side));
            triplets.push((row, spec.node((i1 + 1) % m, i2), fwd));
            triplets.push((row, spec.node((i1 + m - 1) % m, i2), back));
        }
    }
    SparseMatrix::from_triplets(spec.n(), triplets)
}

/// `b_i = x₁ + x₂` at every node, in the matrix's node order.
pub fn gen_rhs_convdiff(spec: &PeriodicConvDiffSpec) -> Result<Vec<f64>> {
    if spec.m == 0 {
        return Err(Error::InvalidConfig("mesh must be nonempty".into()));
    }
    Ok((0..spec.n())
        .map(|i| {
            let (x1, x2) = spec.coordinates(i);
            x1 + x2
        })
        .collect())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum NullVectorSource {
    /// Caller-supplied vector; normalized before use.
    Analytic(Vec<f64>),
    /// Unit eigenvector of the eigenvalue of smallest magnitude, by inverse
    /// iteration with shift 0.
    SmallestEigenvector,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InconsistentRhsSpec {
    pub perturbation_scale: f64,
    pub null_vector_source: NullVectorSource,
}

impl InconsistentRhsSpec {
    pub fn new(perturbation_scale: f64, null_vector_source: NullVectorSource) -> Self {
        Self {
            perturbation_scale,
            null_vector_source,
        }
    }
}

/// `A 1 / ||A 1|| + scale * v` with `v` a unit (near-)nullspace vector.
pub fn build_inconsistent_rhs(a: &SparseMatrix, spec: &InconsistentRhsSpec) -> Result<Vec<f64>> {
    if !spec.perturbation_scale.is_finite() || spec.perturbation_scale < 0.0 {
        return Err(Error::InvalidConfig(format!(
            "perturbation scale must be finite and nonnegative, got {}",
            spec.perturbation_scale
        )));
    }
    let n = a.dim();
    let mut b = a.matvec(&vec![1.0; n])?;
    let top = norm2(&b);
    if top == 0.0 {
        return Err(Error::DegenerateNumerator);
    }
    b.iter_mut().for_each(|v| *v /= top);
    if spec.perturbation_scale == 0.0 {
        return Ok(b);
    }

    let v = match &spec.null_vector_source {
        NullVectorSource::Analytic(v) => {
            if v.len() != n {
                return Err(Error::DimensionMismatch {
                    expected: n,
                    found: v.len(),
                });
            }
            let nv = norm2(v);
            if nv == 0.0 || !nv.is_finite() {
                return Err(Error::NonFinite("null vector norm"));
            }
            v.iter().map(|x| x / nv).collect()
        }
        NullVectorSource::SmallestEigenvector => {
            if !a.is_symmetric(0.0) {
                return Err(Error::InvalidStructure(
                    "smallest eigenvector requires a symmetric matrix".into(),
                ));
            }
            smallest_eigenvector(a)?.1
        }
    };
    axpy(spec.perturbation_scale, &v, &mut b);
    Ok(b)
}

/// Eigenpair of smallest magnitude by inverse iteration with shift 0.
///
/// Uses a dense LU, so `n` is limited to [`DENSE_EIGEN_LIMIT`]. The returned
/// vector has unit norm and its largest-magnitude entry positive.
pub fn smallest_eigenvector(a: &SparseMatrix) -> Result<(f64, Vec<f64>)> {
    const MAX_SWEEPS: usize = 60;
    const TARGET: f64 = 1e-8;
    let n = a.dim();
    if n > DENSE_EIGEN_LIMIT {
        return Err(Error::TooLargeForDense {
            n,
            limit: DENSE_EIGEN_LIMIT,
        });
    }
    if n == 0 {
        return Err(Error::InvalidStructure("empty matrix".into()));
    }
    let lu = LuFactors::new(&a.to_dense());
    let mut rng = ChaCha8Rng::seed_from_u64(0x1f2e_3d4c);
    let mut v: Vec<f64> = (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect();
    normalize(&mut v);

    let mut residual = f64::INFINITY;
    for _ in 0..MAX_SWEEPS {
        v = lu.solve(&v);
        if !normalize(&mut v) {
            return Err(Error::NonFinite("inverse iteration"));
        }
        let av = a.matvec(&v)?;
        let lambda = dot(&v, &av);
        let mut r = av;
        axpy(-lambda, &v, &mut r);
        residual = norm2(&r);
        if residual <= TARGET {
            let pivot = v
                .iter()
                .copied()
                .max_by(|x, y| x.abs().total_cmp(&y.abs()))
                .unwrap_or(1.0);
            if pivot < 0.0 {
                v.iter_mut().for_each(|x| *x = -*x);
            }
            return Ok((lambda, v));
        }
    }
    Err(Error::EigenNoConvergence { residual })
}

fn normalize(v: &mut [f64]) -> bool {
    // Two passes guard against overflow after a solve with a floored pivot.
    let scale = v.iter().fold(0.0f64, |m, x| m.max(x.abs()));
    if scale == 0.0 || !scale.is_finite() {
        return false;
    }
    v.iter_mut().for_each(|x| *x /= scale);
    let nv = norm2(v);
    v.iter_mut().for_each(|x| *x /= nv);
    true
}

/// Spectrum of a random symmetric positive semidefinite matrix.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SemidefiniteSpec {
    pub n: usize,
    /// Number of exactly zero eigenvalues.
    pub null_dim: usize,
    /// Ratio of largest to smallest nonzero eigenvalue.
    pub condition: f64,
}

#[derive(Debug, Clone)]
pub struct SemidefiniteProblem {
    pub matrix: SparseMatrix,
    /// Orthonormal basis of the nullspace (columns of `Q` for the zero
    /// eigenvalues).
    pub null_basis: Vec<Vec<f64>>,
    /// Eigenvalues in the order of `Q`'s columns.
    pub eigenvalues: Vec<f64>,
}

/// `A = Q diag(λ) Q^T` with `Q` random orthogonal, `λ` log-spaced from 1 down
/// to `1 / condition`, followed by `null_dim` zeros. `A` is symmetric bit for
/// bit.
pub fn gen_semidefinite(spec: &SemidefiniteSpec, seed: u64) -> Result<SemidefiniteProblem> {
    let SemidefiniteSpec {
        n,
        null_dim,
        condition,
    } = *spec;
    if n == 0 || null_dim >= n {
        return Err(Error::InvalidConfig(format!(
            "need 0 <= null_dim < n, got null_dim = {null_dim}, n = {n}"
        )));
    }
    if !condition.is_finite() || condition < 1.0 {
        return Err(Error::InvalidConfig(format!(
            "condition must be finite and >= 1, got {condition}"
        )));
    }
    let rank = n - null_dim;
    let eigenvalues: Vec<f64> = (0..n)
        .map(|i| {
            if i >= rank {
                0.0
            } else if rank == 1 {
                1.0
            } else {
                condition.powf(-(i as f64) / (rank - 1) as f64)
            }
        })
        .collect();

    let q = random_orthogonal(n, seed);
    let mut dense = DenseMatrix::zeros(n, n);
    for j in 0..n {
        for i in 0..=j {
            let mut s = 0.0;
            for (p, lam) in eigenvalues.iter().enumerate().take(rank) {
                s += q[p][i] * lam * q[p][j];
            }
            dense[(i, j)] = s;
            dense[(j, i)] = s;
        }
    }
    Ok(SemidefiniteProblem {
        matrix: SparseMatrix::from_dense(&dense)?,
        null_basis: q[rank..].to_vec(),
        eigenvalues,
    })
}

/// Columns of a random orthogonal matrix: modified Gram-Schmidt, twice, on
/// uniform random vectors.
fn random_orthogonal(n: usize, seed: u64) -> Vec<Vec<f64>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut cols: Vec<Vec<f64>> = Vec::with_capacity(n);
    while cols.len() < n {
        let mut v: Vec<f64> = (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let start = norm2(&v);
        for _ in 0..2 {
            for q in &cols {
                let h = dot(q, &v);
                axpy(-h, q, &mut v);
            }
        }
        let nv = norm2(&v);
        // Retry on the (practically impossible) near-dependent draw.
        if nv > 1e-3 * start {
            v.iter_mut().for_each(|x| *x /= nv);
            cols.push(v);
        }
    }
    cols
}
