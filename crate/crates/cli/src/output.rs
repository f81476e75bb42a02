//! History files: a fixed-schema CSV and a JSON mirror with the same numbers.
//!
//! Floats are written in the shortest form that parses back to the same
//! bits (ryu in the CSV, serde_json uses the same algorithm), so the two
//! files agree exactly and repeated runs are byte-identical.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;

use krylov_pinv::{ConvergenceHistory, IterationRecord, Method, SolveConfig, Termination};
use serde::{Deserialize, Serialize};

use crate::Failure;

pub const CSV_COLUMNS: [&str; 11] = [
    "k",
    "res_norm",
    "atr_ratio",
    "sig_k_ratio",
    "sig_k1_ratio",
    "sig_k2_ratio",
    "sig_k3_ratio",
    "h_ratio",
    "h_min_ratio",
    "truncation_count",
    "givens_s",
];

/// Contents of the JSON mirror.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HistoryDocument {
    pub problem_tag: String,
    pub label: String,
    pub method: Method,
    pub config: SolveConfig,
    pub termination: Termination,
    /// Iteration whose iterate is reported as the answer (0 for `x_0`).
    pub best_iteration: usize,
    pub records: Vec<IterationRecord>,
}

pub fn float(v: f64) -> String {
    let mut buf = ryu::Buffer::new();
    buf.format(v).to_string()
}

fn opt_float(v: Option<f64>) -> String {
    v.map(float).unwrap_or_default()
}

pub fn csv_row(r: &IterationRecord) -> [String; 11] {
    [
        r.k.to_string(),
        float(r.res_norm),
        float(r.atr_ratio),
        opt_float(r.sig_ratios[0]),
        opt_float(r.sig_ratios[1]),
        opt_float(r.sig_ratios[2]),
        opt_float(r.sig_ratios[3]),
        opt_float(r.h_ratio),
        opt_float(r.h_min_ratio),
        r.truncation_count
            .map(|c| c.to_string())
            .unwrap_or_default(),
        float(r.givens_s),
    ]
}

fn io_failure(path: &Path, e: impl std::fmt::Display) -> Failure {
    Failure::usage(format!("{}: {e}", path.display()))
}

pub fn write_csv(path: &Path, history: &ConvergenceHistory) -> Result<(), Failure> {
    let mut w = csv::Writer::from_path(path).map_err(|e| io_failure(path, e))?;
    w.write_record(CSV_COLUMNS)
        .map_err(|e| io_failure(path, e))?;
    for r in &history.records {
        w.write_record(csv_row(r))
            .map_err(|e| io_failure(path, e))?;
    }
    w.flush().map_err(|e| io_failure(path, e))
}

pub fn write_json(path: &Path, doc: &HistoryDocument) -> Result<(), Failure> {
    let file = File::create(path).map_err(|e| io_failure(path, e))?;
    let mut w = BufWriter::new(file);
    serde_json::to_writer_pretty(&mut w, doc).map_err(|e| io_failure(path, e))?;
    w.write_all(b"\n")
        .and_then(|_| w.flush())
        .map_err(|e| io_failure(path, e))
}
