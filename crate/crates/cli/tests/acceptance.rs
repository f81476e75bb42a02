//! Acceptance suite. Prints one PASS/FAIL line per criterion and exits
//! nonzero if any criterion fails.

use std::path::Path;
use std::process::{Command, ExitCode};
use std::time::{Duration, Instant};

use krylov_pinv::diagnostics::frobenius_identity_check;
use krylov_pinv::{
    default_tol, gen_periodic_convdiff, gen_rhs_convdiff, gen_semidefinite, read_matrix_market,
    solve, svd, write_matrix_market, ArnoldiState, ConvergenceHistory, DenseMatrix, GivensState,
    Hessenberg, InconsistentRhsSpec, Method, NullVectorSource, PeriodicConvDiffSpec,
    SemidefiniteSpec, SolveConfig, SparseMatrix,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Collects failed checks and a few headline numbers for one criterion.
#[derive(Default)]
struct Report {
    failures: Vec<String>,
    notes: Vec<String>,
}

impl Report {
    fn check(&mut self, ok: bool, what: impl FnOnce() -> String) {
        if !ok {
            self.failures.push(what());
        }
    }

    fn note(&mut self, s: impl Into<String>) {
        self.notes.push(s.into());
    }
}

fn uniform(rng: &mut ChaCha8Rng, len: usize) -> Vec<f64> {
    (0..len).map(|_| rng.gen_range(-1.0..1.0)).collect()
}

fn norm(x: &[f64]) -> f64 {
    x.iter().map(|v| v * v).sum::<f64>().sqrt()
}

fn residual(a: &SparseMatrix, x: &[f64], b: &[f64]) -> Vec<f64> {
    let ax = a.matvec(x).unwrap();
    b.iter().zip(&ax).map(|(bi, ai)| bi - ai).collect()
}

fn gauss_solve(a: &DenseMatrix, b: &[f64]) -> Vec<f64> {
    let n = a.rows();
    let mut m: Vec<Vec<f64>> = (0..n)
        .map(|i| (0..n).map(|j| a[(i, j)]).chain([b[i]]).collect())
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

// 1. Kernel oracles.
fn kernel_oracles(r: &mut Report) {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let (mut worst_mp, mut worst_rec) = (0.0f64, 0.0f64);
    let mut deficient = 0;
    for i in 0..200 {
        let (m, n) = (rng.gen_range(1..=12), rng.gen_range(1..=11));
        let b = if i % 2 == 0 {
            DenseMatrix::from_column_major(m, n, uniform(&mut rng, m * n))
        } else {
            // Rank at most `inner` < min(m, n) by construction.
            let inner = rng.gen_range(0..m.min(n).max(1));
            let x = DenseMatrix::from_column_major(m, inner, uniform(&mut rng, m * inner));
            let y = DenseMatrix::from_column_major(inner, n, uniform(&mut rng, inner * n));
            deficient += 1;
            if inner == 0 {
                DenseMatrix::zeros(m, n)
            } else {
                x.matmul(&y)
            }
        };
        let f = svd(&b).unwrap();
        let s1 = f.norm2();
        let rec = f.reconstruct().max_abs_diff(&b);
        worst_rec = worst_rec.max(rec / s1.max(f64::MIN_POSITIVE));
        r.check(rec <= 1e-12 * s1, || {
            format!("matrix {i} ({m}x{n}): reconstruction {rec:e}")
        });

        // P is the exact Moore-Penrose inverse of the truncated matrix.
        let tol = default_tol(&b).unwrap();
        let bt = f.truncated_reconstruction(tol);
        let p = f.pinv(tol);
        let bp = bt.matmul(&p);
        let pb = p.matmul(&bt);
        let defects = [
            bp.matmul(&bt).max_abs_diff(&bt),
            pb.matmul(&p).max_abs_diff(&p),
            bp.max_abs_diff(&bp.transpose()),
            pb.max_abs_diff(&pb.transpose()),
        ];
        for (c, d) in defects.iter().enumerate() {
            worst_mp = worst_mp.max(d / s1.max(f64::MIN_POSITIVE));
            r.check(*d <= 1e-10 * s1, || {
                format!(
                    "matrix {i} ({m}x{n}): Moore-Penrose condition {} off by {d:e}",
                    c + 1
                )
            });
        }
    }

    let mut compared = 0;
    let mut worst_ls = 0.0f64;
    for trial in 0..200 {
        let k = rng.gen_range(1..=12);
        let mut h = DenseMatrix::zeros(k + 1, k);
        for j in 0..k {
            for i in 0..=j + 1 {
                h[(i, j)] = rng.gen_range(-1.0..1.0);
            }
            h[(j + 1, j)] = h[(j + 1, j)].abs();
        }
        if svd(&h).unwrap().condition_number() >= 1e6 {
            continue;
        }
        compared += 1;
        let beta = 1.0 + rng.gen_range(0.0..1.0);
        let mut g = GivensState::new(beta);
        for j in 0..k {
            let col: Vec<f64> = (0..=j).map(|i| h[(i, j)]).collect();
            g.update(&col, h[(j + 1, j)]);
        }
        let y = g.solve().unwrap();
        let ht = h.transpose();
        let mut e1 = vec![0.0; k + 1];
        e1[0] = beta;
        let want = gauss_solve(&ht.matmul(&h), &ht.matvec(&e1));
        let err = y
            .iter()
            .zip(&want)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max);
        let scale = want.iter().map(|v| v.abs()).fold(1.0f64, f64::max);
        worst_ls = worst_ls.max(err / scale);
        r.check(err <= 1e-10 * scale, || {
            format!("Hessenberg {trial} (k = {k}): LS error {err:e}")
        });
    }
    r.check(compared >= 100, || {
        format!("only {compared} Hessenbergs had condition < 1e6")
    });
    r.note(format!(
        "200 matrices ({deficient} rank-deficient): MP {worst_mp:.1e}*s1, reconstruction {worst_rec:.1e}*s1; {compared} LS solves, worst {worst_ls:.1e}"
    ));
}

fn random_sparse(rng: &mut ChaCha8Rng, n: usize, per_row: usize) -> SparseMatrix {
    let mut t = Vec::new();
    for i in 0..n {
        for _ in 0..per_row {
            t.push((i, rng.gen_range(0..n), rng.gen_range(-1.0..1.0)));
        }
    }
    SparseMatrix::from_triplets(n, t).unwrap()
}

// 2. Arnoldi invariants with reorthogonalization.
fn arnoldi_invariants(r: &mut Report) {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let (mut rel, mut fro, mut orth) = (0.0f64, 0.0f64, 0.0f64);
    for trial in 0..10 {
        let a = random_sparse(&mut rng, 100, 5);
        let b = uniform(&mut rng, 100);
        let mut s = ArnoldiState::start(&a, &b).unwrap();
        for _ in 0..50 {
            s.step(&a, true).unwrap();
        }
        let norm_f = a.frobenius_norm();
        let relation = s.relation_residual(&a) / norm_f;
        let defect = frobenius_identity_check(&s.to_dense(), &s.apply_operator(&a));
        let loss = s.orthogonality_loss();
        rel = rel.max(relation);
        fro = fro.max(defect);
        orth = orth.max(loss);
        r.check(relation <= 1e-12, || {
            format!("matrix {trial}: relation {relation:e}*||A||_F")
        });
        r.check(defect <= 1e-10, || {
            format!("matrix {trial}: Frobenius defect {defect:e}")
        });
        r.check(loss <= 1e-12, || {
            format!("matrix {trial}: ||V^T V - I|| = {loss:e}")
        });
    }
    r.note(format!(
        "10 matrices, k = 50: relation {rel:.1e}*||A||_F, defect {fro:.1e}, orthogonality {orth:.1e}"
    ));
}

// 3. Exact solves on SPD systems.
fn exact_solves(r: &mut Report) {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let (mut worst, mut kappa) = (0.0f64, 0.0f64);
    for trial in 0..5 {
        // Shifted Wishart M^T M / n + I.
        let m = DenseMatrix::from_column_major(50, 50, uniform(&mut rng, 2500));
        let mut spd = m.transpose().matmul(&m);
        for i in 0..50 {
            for j in 0..50 {
                spd[(i, j)] /= 50.0;
            }
            spd[(i, i)] += 1.0;
        }
        kappa = kappa.max(svd(&spd).unwrap().condition_number());
        let a = SparseMatrix::from_dense(&spd).unwrap();
        let b = uniform(&mut rng, 50);
        for method in [Method::Gmres, Method::GmresPinv, Method::Minres] {
            let res = solve(&a, &b, &SolveConfig::new(method, 50)).unwrap();
            let rn = norm(&residual(&a, &res.last_x, &b));
            worst = worst.max(rn);
            r.check(rn <= 1e-10, || {
                format!("system {trial}, {method}: ||r|| = {rn:e}")
            });
            if method == Method::Gmres {
                // Slack relative to ||r_0|| = ||b||.
                let slack = 1e-12 * norm(&b);
                let h = res.history.res_norms();
                for (k, w) in h.windows(2).enumerate() {
                    r.check(w[1] <= w[0] + slack, || {
                        format!(
                            "system {trial}: GMRES residual rose at k = {}: {} -> {}",
                            k + 2,
                            w[0],
                            w[1]
                        )
                    });
                }
            }
        }
    }
    r.note(format!(
        "5 systems (condition <= {kappa:.1}) x 3 solvers, worst ||r|| = {worst:.1e}"
    ));
}

// 4. Convection-diffusion desk experiment. Returns GMRES-pinv's history for 5.
fn desk_experiment(r: &mut Report) -> ConvergenceHistory {
    let spec = PeriodicConvDiffSpec::new(20, 1.0);
    let a = gen_periodic_convdiff(&spec).unwrap();
    let b = gen_rhs_convdiff(&spec).unwrap();
    let pinv = solve(
        &a,
        &b,
        &SolveConfig::new(Method::GmresPinv, 400).with_reorth(true),
    )
    .unwrap();
    // Plain GMRES; only its atr_ratio is read, so skip the SVD diagnostics.
    let plain = solve(
        &a,
        &b,
        &SolveConfig::new(Method::Gmres, 400).with_svd_every(400),
    )
    .unwrap();

    let h = &pinv.history;
    r.check(h.len() == 400, || {
        format!("GMRES-pinv stopped after {} iterations", h.len())
    });
    let (k_min, min) = h.min_atr().unwrap();
    r.check(min <= 1e-8, || format!("min atr_ratio {min:e} > 1e-8"));
    let after = h.records[k_min - 1..]
        .iter()
        .map(|rec| rec.atr_ratio)
        .fold(0.0, f64::max);
    r.check(after <= 10.0 * min, || {
        format!(
            "after k = {k_min} the ratio reaches {after:e} = {:.1}x the minimum",
            after / min
        )
    });
    let pinv_final = h.last().unwrap().atr_ratio;
    let plain_final = plain.history.last().unwrap().atr_ratio;
    r.check(plain.history.len() == 400, || {
        format!("plain GMRES stopped after {}", plain.history.len())
    });
    r.check(plain_final >= 1e2 * pinv_final, || {
        format!("plain GMRES final {plain_final:e} < 1e2 x GMRES-pinv final {pinv_final:e}")
    });
    r.note(format!(
        "GMRES-pinv min {min:.2e} at k = {k_min}, max after {after:.2e} ({:.1}x), final {pinv_final:.2e}; GMRES final {plain_final:.2e}",
        after / min
    ));
    pinv.history
}

// 5. Truncation and the residual drop.
fn truncation_coupling(r: &mut Report, h: &ConvergenceHistory) {
    let (k_min, _) = h.min_atr().unwrap();
    match h.first_truncation_event() {
        Some(k) => {
            r.check(k <= k_min, || {
                format!("first truncation at k = {k}, minimum at k = {k_min}")
            });
            r.note(format!(
                "first truncation at k = {k}, minimum at k = {k_min}"
            ));
        }
        None => r.check(false, || "no truncation event in the run".into()),
    }
}

// 6. Semidefinite family.
fn semidefinite(r: &mut Report) {
    let spec = SemidefiniteSpec {
        n: 300,
        null_dim: 3,
        condition: 1e10,
    };
    let p = gen_semidefinite(&spec, 1).unwrap();
    let rhs = InconsistentRhsSpec::new(0.01, NullVectorSource::Analytic(p.null_basis[0].clone()));
    let b = krylov_pinv::build_inconsistent_rhs(&p.matrix, &rhs).unwrap();
    let a = &p.matrix;

    let pinv = solve(
        a,
        &b,
        &SolveConfig::new(Method::GmresPinv, 300).with_reorth(true),
    )
    .unwrap();
    let res = norm(&residual(a, &pinv.x, &b));
    let rel = (res - 0.01).abs() / 0.01;
    r.check(rel <= 1e-3, || {
        format!("best-iterate residual {res:e}, {rel:e} relative from 0.01")
    });

    let minres = solve(a, &b, &SolveConfig::new(Method::Minres, 300)).unwrap();
    let (_, pinv_min) = pinv.history.min_atr().unwrap();
    let (_, minres_min) = minres.history.min_atr().unwrap();
    r.check(minres_min > pinv_min, || {
        format!("MINRES min atr {minres_min:e} not worse than GMRES-pinv {pinv_min:e}")
    });
    r.note(format!(
        "GMRES-pinv residual {res:.6e} (rel. error {rel:.1e}), min atr {pinv_min:.1e}; MINRES min atr {minres_min:.1e}"
    ));
}

fn files_identical(a: &Path, b: &Path) -> Result<usize, String> {
    let mut names: Vec<_> = std::fs::read_dir(a)
        .map_err(|e| e.to_string())?
        .map(|e| e.unwrap().file_name())
        .collect();
    names.sort();
    let mut other: Vec<_> = std::fs::read_dir(b)
        .map_err(|e| e.to_string())?
        .map(|e| e.unwrap().file_name())
        .collect();
    other.sort();
    if names != other {
        return Err(format!("file sets differ: {names:?} vs {other:?}"));
    }
    for name in &names {
        if std::fs::read(a.join(name)).unwrap() != std::fs::read(b.join(name)).unwrap() {
            return Err(format!("{} differs between runs", name.to_string_lossy()));
        }
    }
    Ok(names.len())
}

// 7. Determinism and IO.
fn determinism(r: &mut Report) {
    let dir = tempfile::tempdir().unwrap();

    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let convdiff = gen_periodic_convdiff(&PeriodicConvDiffSpec::new(20, 1.0)).unwrap();
    let mut awkward = Vec::new();
    for _ in 0..300 {
        let v: f64 = rng.gen_range(-1.0..1.0) * 10f64.powi(rng.gen_range(-300..300));
        awkward.push((rng.gen_range(0..50), rng.gen_range(0..50), v));
    }
    let awkward = SparseMatrix::from_triplets(50, awkward).unwrap();
    for (name, a) in [("convdiff", &convdiff), ("awkward", &awkward)] {
        let path = dir.path().join(format!("{name}.mtx"));
        write_matrix_market(&path, a).unwrap();
        let back = read_matrix_market(&path).unwrap();
        let exact = back.row_offsets() == a.row_offsets()
            && back.col_indices() == a.col_indices()
            && back
                .values()
                .iter()
                .zip(a.values())
                .all(|(x, y)| x.to_bits() == y.to_bits());
        r.check(exact, || {
            format!("{name}: Matrix Market round trip changed values")
        });
    }

    let exe = env!("CARGO_BIN_EXE_krylov-pinv");
    let run = |out: &Path| {
        Command::new(exe)
            .args([
                "--m",
                "8",
                "--max-iter",
                "40",
                "--plots",
                "--reorth",
                "--seed",
                "5",
            ])
            .args(["--method", "gmres,gmres_pinv,rrgmres,minres"])
            .arg("--out")
            .arg(out)
            .output()
            .unwrap()
    };
    let (first, second) = (dir.path().join("run1"), dir.path().join("run2"));
    let (o1, o2) = (run(&first), run(&second));
    r.check(o1.status.success() && o2.status.success(), || {
        format!("CLI failed: {}", String::from_utf8_lossy(&o1.stderr))
    });
    match files_identical(&first, &second) {
        Ok(n) => r.note(format!(
            "2 matrices round-trip bit for bit; 2 CLI runs, {n} files identical"
        )),
        Err(e) => r.check(false, || e),
    }

    let missing = dir.path().join("missing.mtx");
    let o = Command::new(exe)
        .arg("--matrix")
        .arg(&missing)
        .arg("--out")
        .arg(dir.path())
        .output()
        .unwrap();
    let stderr = String::from_utf8_lossy(&o.stderr);
    r.check(o.status.code() == Some(2), || {
        format!("missing matrix exit status {:?}", o.status.code())
    });
    r.check(stderr.contains("missing.mtx"), || {
        format!("missing-file message does not name the path: {stderr}")
    });
}

fn main() -> ExitCode {
    let mut all_ok = true;
    let mut desk = None;
    let criteria: [(u32, &str, u64); 7] = [
        (1, "kernel oracle suite", 5),
        (2, "Arnoldi invariants", 5),
        (3, "exact-solve regression", 1),
        (4, "inconsistent convection-diffusion experiment", 60),
        (5, "truncation and residual-drop coupling", 60),
        (6, "symmetric semidefinite family", 60),
        (7, "determinism and IO", 5),
    ];
    for (id, name, budget) in criteria {
        let mut r = Report::default();
        let start = Instant::now();
        match id {
            1 => kernel_oracles(&mut r),
            2 => arnoldi_invariants(&mut r),
            3 => exact_solves(&mut r),
            4 => desk = Some(desk_experiment(&mut r)),
            5 => truncation_coupling(&mut r, desk.as_ref().expect("criterion 4 runs first")),
            6 => semidefinite(&mut r),
            _ => determinism(&mut r),
        }
        let elapsed = start.elapsed();
        r.check(elapsed <= Duration::from_secs(budget), || {
            format!("took {:.2} s, budget {budget} s", elapsed.as_secs_f64())
        });
        let ok = r.failures.is_empty();
        all_ok &= ok;
        println!(
            "{} criterion {id}: {name} ({:.2} s of {budget} s)",
            if ok { "PASS" } else { "FAIL" },
            elapsed.as_secs_f64()
        );
        for n in &r.notes {
            println!("     {n}");
        }
        for f in r.failures.iter().take(10) {
            println!("     failed: {f}");
        }
    }
    if all_ok {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
