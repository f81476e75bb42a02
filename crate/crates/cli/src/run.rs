//! Builds the problem, runs every solver on its own thread, writes artifacts.

use std::path::PathBuf;

use krylov_pinv::sparse::write_vector;
use krylov_pinv::{solve, SolveResult};

use crate::output::{write_csv, write_json, HistoryDocument};
use crate::problem::{self, Problem};
use crate::{plot, Failure, RunManifest};

#[derive(Debug)]
pub struct SolverOutcome {
    pub label: String,
    pub result: SolveResult,
}

#[derive(Debug)]
pub struct RunReport {
    pub tag: String,
    pub dim: usize,
    pub outcomes: Vec<SolverOutcome>,
    /// Every file written, in write order.
    pub files: Vec<PathBuf>,
}

pub fn run(manifest: &RunManifest) -> Result<RunReport, Failure> {
    let Problem { tag, a, b } = problem::build(&manifest.problem, manifest.seed)?;
    let tag = manifest.tag.clone().unwrap_or(tag);
    let dir = &manifest.output_dir;
    std::fs::create_dir_all(dir).map_err(|e| Failure::usage(format!("{}: {e}", dir.display())))?;

    // Only the matrix and right-hand side are shared, read-only.
    let results: Vec<_> = std::thread::scope(|s| {
        let handles: Vec<_> = manifest
            .solvers
            .iter()
            .map(|run| {
                let (a, b) = (&a, &b);
                s.spawn(move || solve(a, b, &run.config))
            })
            .collect();
        handles
            .into_iter()
            .map(|h| h.join().expect("solver thread panicked"))
            .collect()
    });

    let mut outcomes = Vec::new();
    let mut files = Vec::new();
    let mut first_error = None;
    for (run, result) in manifest.solvers.iter().zip(results) {
        let mut result = match result {
            Ok(r) => r,
            Err(e) => {
                first_error.get_or_insert((run.label.clone(), Failure::from(e)));
                continue;
            }
        };
        result.history.problem_tag = tag.clone();
        let stem = format!("{tag}__{}", run.label);

        let csv = dir.join(format!("{stem}.csv"));
        write_csv(&csv, &result.history)?;
        let json = dir.join(format!("{stem}.json"));
        write_json(
            &json,
            &HistoryDocument {
                problem_tag: tag.clone(),
                label: run.label.clone(),
                method: run.config.method,
                config: run.config.clone(),
                termination: result.termination,
                best_iteration: result.best_iteration,
                records: result.history.records.clone(),
            },
        )?;
        let x = dir.join(format!("{stem}__x.mtx"));
        write_vector(&x, &result.x)?;
        files.extend([csv, json, x]);
        outcomes.push(SolverOutcome {
            label: run.label.clone(),
            result,
        });
    }

    if manifest.emit_plots && !outcomes.is_empty() {
        let runs: Vec<_> = outcomes
            .iter()
            .map(|o| (o.label.as_str(), &o.result.history))
            .collect();
        let path = dir.join(format!("{tag}__comparison.svg"));
        plot::comparison(&path, &tag, &runs)?;
        files.push(path);
        for o in &outcomes {
            let path = dir.join(format!("{tag}__{}__diagnostics.svg", o.label));
            plot::diagnostics(&path, &tag, &o.label, &o.result.history)?;
            files.push(path);
        }
    }

    if let Some((label, failure)) = first_error {
        return Err(match failure {
            Failure::Numerical(e) => Failure::Numerical(e.context(format!("solver `{label}`"))),
            Failure::Usage(e) => Failure::Usage(e.context(format!("solver `{label}`"))),
        });
    }
    Ok(RunReport {
        tag,
        dim: a.dim(),
        outcomes,
        files,
    })
}
