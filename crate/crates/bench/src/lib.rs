//! Shared fixtures for the criterion benches.

use krylov_pinv::{
    gen_periodic_convdiff, gen_rhs_convdiff, ArnoldiState, DenseMatrix, GivensState, Hessenberg,
    PeriodicConvDiffSpec, SparseMatrix,
};

/// Periodic convection-diffusion operator and right-hand side on an `m × m` mesh.
pub fn convdiff(m: usize) -> (SparseMatrix, Vec<f64>) {
    let spec = PeriodicConvDiffSpec::new(m, 1.0);
    let a = gen_periodic_convdiff(&spec).expect("valid mesh");
    let b = gen_rhs_convdiff(&spec).expect("valid mesh");
    (a, b)
}

/// `H_{k+1,k}` from `k` reorthogonalized Arnoldi steps, and the columns of its
/// Givens factor `R_k`.
pub fn hessenberg(m: usize, k: usize) -> (DenseMatrix, Vec<Vec<f64>>) {
    let (a, b) = convdiff(m);
    let mut arnoldi = ArnoldiState::start(&a, &b).expect("nonzero rhs");
    let mut givens = GivensState::new(1.0);
    for _ in 0..k {
        arnoldi.step(&a, true).expect("finite");
        givens.update(&arnoldi.last_column(), arnoldi.subdiagonal());
    }
    let r = (0..k).map(|j| givens.r_column(j).to_vec()).collect();
    (arnoldi.to_dense(), r)
}
