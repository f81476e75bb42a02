mod common;

use common::*;
use krylov_pinv::diagnostics::frobenius_identity_check;
use krylov_pinv::{ArnoldiState, DenseMatrix, Hessenberg, LanczosState};
use proptest::prelude::*;

fn run_arnoldi(
    seed: u64,
    n: usize,
    k: usize,
    reorth: bool,
) -> (krylov_pinv::SparseMatrix, ArnoldiState) {
    let mut r = rng(seed);
    let a = sparse(&mut r, n, 4);
    let b = uniform(&mut r, n);
    let mut s = ArnoldiState::start(&a, &b).unwrap();
    for _ in 0..k {
        s.step(&a, reorth).unwrap();
    }
    (a, s)
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 24, failure_persistence: None, ..ProptestConfig::default() })]

    #[test]
    fn arnoldi_relation_and_orthogonality(seed in 0u64..10_000, n in 5usize..60, reorth in any::<bool>()) {
        let k = n / 2;
        let (a, s) = run_arnoldi(seed, n, k, reorth);
        let fro = a.frobenius_norm();
        prop_assert!(s.relation_residual(&a) <= 1e-12 * fro);
        if reorth {
            prop_assert!(s.orthogonality_loss() <= 1e-12);
        }
        let h = s.to_dense();
        for j in 0..k {
            for i in j + 2..=k {
                prop_assert_eq!(h[(i, j)], 0.0);
            }
            prop_assert!(h[(j + 1, j)] >= 0.0);
        }
    }
}

#[test]
fn relation_and_frobenius_identity_at_scale() {
    let (a, s) = run_arnoldi(42, 100, 50, true);
    assert!(s.relation_residual(&a) <= 1e-12 * a.frobenius_norm());
    assert!(s.orthogonality_loss() <= 1e-12);
    let defect = frobenius_identity_check(&s.to_dense(), &s.apply_operator(&a));
    assert!(defect <= 1e-10, "defect {defect:e}");
}

#[test]
fn basis_matches_explicit_projection() {
    // H_{k,k} = V_k^T A V_k for an orthonormal basis.
    let (a, s) = run_arnoldi(3, 30, 10, true);
    let v = DenseMatrix::from_columns(&s.basis()[..10]);
    let av = DenseMatrix::from_columns(&s.apply_operator(&a));
    let proj = v.transpose().matmul(&av);
    let h = s.to_dense().leading(10, 10);
    assert!(proj.max_abs_diff(&h) <= 1e-12 * a.frobenius_norm());
}

#[test]
fn lanczos_matches_arnoldi_on_symmetric_operator() {
    let mut r = rng(11);
    let a = symmetric(&mut r, 40, 3);
    let b = uniform(&mut r, 40);
    let mut arn = ArnoldiState::start(&a, &b).unwrap();
    let mut lan = LanczosState::start(&a, &b).unwrap();
    assert_eq!(arn.beta(), lan.beta());
    let k = 12;
    for _ in 0..k {
        arn.step(&a, true).unwrap();
        lan.step(&a).unwrap();
    }
    let scale = a.frobenius_norm();
    for j in 1..=k {
        for i in 1..=(j + 1) {
            let want = arn.entry(i, j);
            let got = lan.entry(i, j);
            assert!(
                (want - got).abs() <= 1e-10 * scale,
                "h[{i},{j}]: {want} vs {got}"
            );
        }
    }
    // Lanczos' current vector is the k-th basis vector.
    let diff = sub(lan.current(), &arn.basis()[k - 1]);
    assert!(norm(&diff) <= 1e-8);
}

#[test]
fn invariant_subspace_breaks_down_exactly() {
    // Cyclic shift: the Krylov space of e1 closes after four steps.
    let a = krylov_pinv::SparseMatrix::from_triplets(
        4,
        [(1, 0, 1.0), (2, 1, 1.0), (3, 2, 1.0), (0, 3, 1.0)],
    )
    .unwrap();
    let mut s = ArnoldiState::start(&a, &[1.0, 0.0, 0.0, 0.0]).unwrap();
    for _ in 0..3 {
        assert_eq!(s.step(&a, false).unwrap(), 1.0);
        assert!(!s.is_breakdown());
    }
    assert_eq!(s.step(&a, false).unwrap(), 0.0);
    assert!(s.is_breakdown());
    assert!(s.step(&a, false).is_err());
}
