mod common;

use common::*;
use krylov_pinv::{
    build_inconsistent_rhs, gen_periodic_convdiff, gen_rhs_convdiff, gen_semidefinite,
    smallest_eigenvector, InconsistentRhsSpec, NullVectorSource, PeriodicConvDiffSpec,
    SemidefiniteSpec,
};
use std::f64::consts::PI;

fn discretization_error(m: usize, d: f64) -> f64 {
    let spec = PeriodicConvDiffSpec::new(m, d);
    let a = gen_periodic_convdiff(&spec).unwrap();
    let n = spec.n();
    let u: Vec<f64> = (0..n)
        .map(|p| (2.0 * PI * spec.coordinates(p).0).cos())
        .collect();
    let au = a.matvec(&u).unwrap();
    (0..n)
        .map(|p| {
            let x1 = spec.coordinates(p).0;
            let exact =
                -4.0 * PI * PI * (2.0 * PI * x1).cos() - 2.0 * PI * d * (2.0 * PI * x1).sin();
            (au[p] - exact).abs()
        })
        .fold(0.0, f64::max)
}

#[test]
fn stencil_is_second_order() {
    for d in [0.0, 1.0, 5.0] {
        let e: Vec<f64> = [16, 32, 64]
            .iter()
            .map(|&m| discretization_error(m, d))
            .collect();
        for w in e.windows(2) {
            let ratio = w[0] / w[1];
            assert!((3.5..=4.5).contains(&ratio), "d = {d}: ratio {ratio}");
        }
    }
}

#[test]
fn convdiff_is_normal() {
    for (m, d) in [(3, 1.0), (5, 2.5), (8, 1.0), (10, 0.3)] {
        let a = gen_periodic_convdiff(&PeriodicConvDiffSpec::new(m, d))
            .unwrap()
            .to_dense();
        let at = a.transpose();
        let defect = a.matmul(&at).max_abs_diff(&at.matmul(&a));
        assert!(defect <= 1e-10, "m = {m}, d = {d}: {defect:e}");
    }
}

#[test]
fn ranges_are_orthogonal_to_constants() {
    let spec = PeriodicConvDiffSpec::new(12, 1.0);
    let a = gen_periodic_convdiff(&spec).unwrap();
    let n = spec.n();
    let ones = vec![1.0 / (n as f64).sqrt(); n];
    let mut g = rng(2);
    for _ in 0..20 {
        let w = uniform(&mut g, n);
        for y in [a.matvec(&w).unwrap(), a.matvec_transpose(&w).unwrap()] {
            assert!(dot(&y, &ones).abs() <= 1e-12 * norm(&y));
        }
    }
}

#[test]
fn desk_rhs_is_inconsistent() {
    let spec = PeriodicConvDiffSpec::new(20, 1.0);
    let b = gen_rhs_convdiff(&spec).unwrap();
    let n = spec.n() as f64;
    // Projection onto span(1) is the mean, and the mean of x1 + x2 is 1 - h.
    let mean = b.iter().sum::<f64>() / n;
    assert!((mean - (1.0 - 1.0 / 20.0)).abs() < 1e-14);
}

#[test]
fn inconsistent_rhs_has_requested_null_component() {
    let spec = SemidefiniteSpec {
        n: 40,
        null_dim: 1,
        condition: 1e4,
    };
    let p = gen_semidefinite(&spec, 3).unwrap();
    let q = &p.null_basis[0];
    for source in [
        NullVectorSource::Analytic(q.clone()),
        NullVectorSource::SmallestEigenvector,
    ] {
        let b = build_inconsistent_rhs(&p.matrix, &InconsistentRhsSpec::new(0.01, source)).unwrap();
        // A 1 lies in the range, which is orthogonal to the nullspace.
        assert!((dot(&b, q).abs() - 0.01).abs() <= 1e-10);
        let ab = p.matrix.matvec(&vec![1.0; 40]).unwrap();
        let consistent: Vec<f64> = ab.iter().map(|v| v / norm(&ab)).collect();
        assert!((norm(&sub(&b, &consistent)) - 0.01).abs() <= 1e-10);
    }
}

#[test]
fn semidefinite_eigenpairs_hold() {
    let spec = SemidefiniteSpec {
        n: 30,
        null_dim: 3,
        condition: 1e6,
    };
    let p = gen_semidefinite(&spec, 7).unwrap();
    assert!(p.matrix.is_symmetric(0.0));
    for q in &p.null_basis {
        assert!(norm(&p.matrix.matvec(q).unwrap()) <= 1e-14);
        assert!((norm(q) - 1.0).abs() <= 1e-14);
    }
    let (lambda, v) = smallest_eigenvector(&p.matrix).unwrap();
    assert!(lambda.abs() <= 1e-12);
    // The computed vector lies in the nullspace spanned by the basis.
    let proj: f64 = p.null_basis.iter().map(|q| dot(q, &v).powi(2)).sum();
    assert!((proj - 1.0).abs() <= 1e-10);
    let again = gen_semidefinite(&spec, 7).unwrap();
    assert_eq!(again.matrix, p.matrix);
}
