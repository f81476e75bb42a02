//! Turns a resolved [`ProblemSpec`] into a matrix, right-hand side and tag.

use std::path::Path;

use krylov_pinv::sparse::read_vector;
use krylov_pinv::{
    build_inconsistent_rhs, gen_periodic_convdiff, gen_rhs_convdiff, gen_semidefinite,
    read_matrix_market, InconsistentRhsSpec, NullVectorSource, SparseMatrix,
};

use crate::{Failure, ProblemSpec};

#[derive(Debug, Clone)]
pub struct Problem {
    pub tag: String,
    pub a: SparseMatrix,
    pub b: Vec<f64>,
}

pub fn build(spec: &ProblemSpec, seed: u64) -> Result<Problem, Failure> {
    match spec {
        ProblemSpec::GeneratedConvdiff(s) => Ok(Problem {
            tag: format!("convdiff_m{}_d{}", s.m, s.d),
            a: gen_periodic_convdiff(s)?,
            b: gen_rhs_convdiff(s)?,
        }),
        ProblemSpec::MatrixMarket {
            path,
            perturbation,
            null_vector,
        } => {
            let a = read_matrix_market(path)?;
            let source = match null_vector {
                Some(p) => NullVectorSource::Analytic(read_vector(p)?),
                None => NullVectorSource::SmallestEigenvector,
            };
            let b = build_inconsistent_rhs(&a, &InconsistentRhsSpec::new(*perturbation, source))?;
            Ok(Problem {
                tag: stem(path),
                a,
                b,
            })
        }
        ProblemSpec::MatrixMarketWithRhs { path, rhs } => {
            let a = read_matrix_market(path)?;
            let b = read_vector(rhs)?;
            if b.len() != a.dim() {
                return Err(Failure::usage(format!(
                    "{}: right-hand side has {} entries, matrix has dimension {}",
                    rhs.display(),
                    b.len(),
                    a.dim()
                )));
            }
            Ok(Problem {
                tag: stem(path),
                a,
                b,
            })
        }
        ProblemSpec::Semidefinite { spec, perturbation } => {
            let p = gen_semidefinite(spec, seed)?;
            let source =
                NullVectorSource::Analytic(p.null_basis.first().cloned().unwrap_or_default());
            let scale = if p.null_basis.is_empty() {
                0.0
            } else {
                *perturbation
            };
            let b = build_inconsistent_rhs(&p.matrix, &InconsistentRhsSpec::new(scale, source))?;
            Ok(Problem {
                tag: format!("semidefinite_n{}_null{}_seed{seed}", spec.n, spec.null_dim),
                a: p.matrix,
                b,
            })
        }
    }
}

fn stem(path: &Path) -> String {
    let raw = path
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| "matrix".into());
    raw.chars()
        .map(|c| {
            if c.is_ascii_alphanumeric() || "-_.".contains(c) {
                c
            } else {
                '_'
            }
        })
        .collect()
}
