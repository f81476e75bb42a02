//! Run manifests: a TOML file whose keys mirror the command-line flags,
//! resolved together with the flags into a [`RunManifest`].
//!
//! ```toml
//! out = "results"
//! plots = true
//! method = ["gmres", "gmres_pinv"]
//! max-iter = 400
//!
//! [problem]
//! kind = "convdiff"
//! m = 20
//! d = 1.0
//!
//! [[solver]]
//! method = "gmres_pinv"
//! label = "gmres_pinv_reorth"
//! reorth = true
//! ```
//!
//! Precedence is flag, then `[[solver]]` entry, then top-level key, then the
//! built-in default. `--method` replaces the solver list outright.

use std::path::{Path, PathBuf};
use std::str::FromStr;

use clap::ValueEnum;
use krylov_pinv::{
    Method, PeriodicConvDiffSpec, SemidefiniteSpec, SolveConfig, StopRule, TolPolicy,
};
use serde::{Deserialize, Serialize};

use crate::{Args, Failure};

pub const DEFAULT_M: usize = 20;
pub const DEFAULT_D: f64 = 1.0;
pub const DEFAULT_MAX_ITER: usize = 100;
pub const DEFAULT_PERTURBATION: f64 = 0.01;
pub const DEFAULT_METHODS: [Method; 3] = [Method::Gmres, Method::GmresPinv, Method::Rrgmres];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum ProblemKind {
    /// Periodic convection-diffusion on the unit square.
    #[serde(alias = "generated_convdiff")]
    Convdiff,
    /// Matrix read from a Matrix Market file.
    #[serde(alias = "matrix-market")]
    MatrixMarket,
    /// Random symmetric positive semidefinite matrix with a known nullspace.
    Semidefinite,
}

/// `default` or a fixed nonnegative tolerance.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum TolArg {
    Fixed(f64),
    Named(NamedTol),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum NamedTol {
    Default,
}

impl TolArg {
    pub fn policy(self) -> TolPolicy {
        match self {
            TolArg::Fixed(t) => TolPolicy::Fixed(t),
            TolArg::Named(NamedTol::Default) => TolPolicy::DefaultNumericalRank,
        }
    }
}

impl FromStr for TolArg {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        if s.eq_ignore_ascii_case("default") {
            return Ok(TolArg::Named(NamedTol::Default));
        }
        s.parse::<f64>()
            .map(TolArg::Fixed)
            .map_err(|_| format!("expected a number or `default`, got `{s}`"))
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", deny_unknown_fields)]
pub struct ProblemFile {
    pub kind: Option<ProblemKind>,
    pub m: Option<usize>,
    pub d: Option<f64>,
    pub matrix: Option<PathBuf>,
    pub rhs: Option<PathBuf>,
    pub perturbation: Option<f64>,
    pub null_vector: Option<PathBuf>,
    pub n: Option<usize>,
    pub null_dim: Option<usize>,
    pub condition: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", deny_unknown_fields)]
pub struct SolverFile {
    pub method: Method,
    /// File-name label; defaults to the method name.
    pub label: Option<String>,
    pub max_iter: Option<usize>,
    pub reorth: Option<bool>,
    pub tol: Option<TolArg>,
    pub stop_atr: Option<f64>,
    pub svd_every: Option<usize>,
}

/// The manifest file as written, every key optional.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", deny_unknown_fields)]
pub struct ManifestFile {
    #[serde(default)]
    pub problem: ProblemFile,
    pub method: Option<Vec<Method>>,
    #[serde(default)]
    pub solver: Vec<SolverFile>,
    pub max_iter: Option<usize>,
    pub reorth: Option<bool>,
    pub tol: Option<TolArg>,
    pub stop_atr: Option<f64>,
    pub svd_every: Option<usize>,
    pub out: Option<PathBuf>,
    pub plots: Option<bool>,
    pub seed: Option<u64>,
    pub tag: Option<String>,
}

impl ManifestFile {
    pub fn read(path: &Path) -> Result<Self, Failure> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Failure::usage(format!("{}: {e}", path.display())))?;
        let mut file: ManifestFile = toml::from_str(&text)
            .map_err(|e| Failure::usage(format!("{}: {e}", path.display())))?;
        // Relative paths inside a manifest are relative to the manifest.
        let base = path.parent().unwrap_or(Path::new(""));
        for p in [
            &mut file.problem.matrix,
            &mut file.problem.rhs,
            &mut file.problem.null_vector,
            &mut file.out,
        ]
        .into_iter()
        .flatten()
        {
            if p.is_relative() {
                *p = base.join(&*p);
            }
        }
        Ok(file)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum ProblemSpec {
    GeneratedConvdiff(PeriodicConvDiffSpec),
    /// Right-hand side `A 1 / ||A 1|| + perturbation * u`.
    MatrixMarket {
        path: PathBuf,
        perturbation: f64,
        /// `None` means the smallest eigenvector.
        null_vector: Option<PathBuf>,
    },
    MatrixMarketWithRhs {
        path: PathBuf,
        rhs: PathBuf,
    },
    Semidefinite {
        spec: SemidefiniteSpec,
        perturbation: f64,
    },
}

#[derive(Debug, Clone, PartialEq)]
pub struct SolverRun {
    pub label: String,
    pub config: SolveConfig,
}

/// Fully resolved run description.
#[derive(Debug, Clone, PartialEq)]
pub struct RunManifest {
    pub problem: ProblemSpec,
    pub solvers: Vec<SolverRun>,
    pub output_dir: PathBuf,
    pub emit_plots: bool,
    pub seed: u64,
    /// Overrides the tag derived from the problem.
    pub tag: Option<String>,
}

impl RunManifest {
    pub fn from_args(args: &Args) -> Result<Self, Failure> {
        let file = match &args.manifest {
            Some(path) => ManifestFile::read(path)?,
            None => ManifestFile::default(),
        };
        Self::resolve(file, args)
    }

    pub fn resolve(file: ManifestFile, args: &Args) -> Result<Self, Failure> {
        let problem = resolve_problem(&file.problem, args)?;

        let entries: Vec<SolverFile> = match (&args.method, &file.method) {
            (Some(list), _) => plain_entries(list),
            (None, _) if !file.solver.is_empty() => file.solver.clone(),
            (None, Some(list)) => plain_entries(list),
            (None, None) => plain_entries(&DEFAULT_METHODS),
        };
        if entries.is_empty() {
            return Err(Failure::usage("at least one solver is required"));
        }

        let mut solvers = Vec::with_capacity(entries.len());
        for e in entries {
            let label = e
                .label
                .clone()
                .unwrap_or_else(|| e.method.name().to_string());
            if label.is_empty() || label.contains(['/', '\\']) {
                return Err(Failure::usage(format!("invalid solver label `{label}`")));
            }
            if solvers.iter().any(|s: &SolverRun| s.label == label) {
                return Err(Failure::usage(format!(
                    "duplicate solver label `{label}`; give repeated methods distinct labels"
                )));
            }
            let max_iter = args
                .max_iter
                .or(e.max_iter)
                .or(file.max_iter)
                .unwrap_or(DEFAULT_MAX_ITER);
            let mut config = SolveConfig::new(e.method, max_iter)
                .with_reorth(args.reorth.or(e.reorth).or(file.reorth).unwrap_or(false))
                .with_svd_every(
                    args.svd_every
                        .or(e.svd_every)
                        .or(file.svd_every)
                        .unwrap_or(1),
                );
            if let Some(t) = args.tol.or(e.tol).or(file.tol) {
                config = config.with_tol(t.policy());
            }
            if let Some(t) = args.stop_atr.or(e.stop_atr).or(file.stop_atr) {
                config = config.with_stop_rule(StopRule::AtrThreshold(t));
            }
            config
                .validate()
                .map_err(|e| Failure::usage(format!("solver `{label}`: {e}")))?;
            solvers.push(SolverRun { label, config });
        }

        Ok(RunManifest {
            problem,
            solvers,
            output_dir: args
                .out
                .clone()
                .or(file.out)
                .unwrap_or_else(|| PathBuf::from("out")),
            emit_plots: args.plots.or(file.plots).unwrap_or(false),
            seed: args.seed.or(file.seed).unwrap_or(0),
            tag: args.tag.clone().or(file.tag),
        })
    }
}

fn plain_entries(methods: &[Method]) -> Vec<SolverFile> {
    methods
        .iter()
        .map(|&method| SolverFile {
            method,
            label: None,
            max_iter: None,
            reorth: None,
            tol: None,
            stop_atr: None,
            svd_every: None,
        })
        .collect()
}

fn resolve_problem(file: &ProblemFile, args: &Args) -> Result<ProblemSpec, Failure> {
    let matrix = args.matrix.clone().or(file.matrix.clone());
    let kind = args.problem.or(file.kind).unwrap_or(if matrix.is_some() {
        ProblemKind::MatrixMarket
    } else {
        ProblemKind::Convdiff
    });
    let perturbation = args
        .perturbation
        .or(file.perturbation)
        .unwrap_or(DEFAULT_PERTURBATION);
    if !perturbation.is_finite() || perturbation < 0.0 {
        return Err(Failure::usage(format!(
            "--perturbation must be finite and nonnegative, got {perturbation}"
        )));
    }
    match kind {
        ProblemKind::Convdiff => {
            let spec = PeriodicConvDiffSpec::new(
                args.m.or(file.m).unwrap_or(DEFAULT_M),
                args.d.or(file.d).unwrap_or(DEFAULT_D),
            );
            spec.validate().map_err(Failure::usage)?;
            Ok(ProblemSpec::GeneratedConvdiff(spec))
        }
        ProblemKind::MatrixMarket => {
            let path =
                matrix.ok_or_else(|| Failure::usage("--problem matrix-market needs --matrix"))?;
            match args.rhs.clone().or(file.rhs.clone()) {
                Some(rhs) => Ok(ProblemSpec::MatrixMarketWithRhs { path, rhs }),
                None => Ok(ProblemSpec::MatrixMarket {
                    path,
                    perturbation,
                    null_vector: args.null_vector.clone().or(file.null_vector.clone()),
                }),
            }
        }
        ProblemKind::Semidefinite => {
            let n = args
                .n
                .or(file.n)
                .ok_or_else(|| Failure::usage("--problem semidefinite needs --n"))?;
            let spec = SemidefiniteSpec {
                n,
                null_dim: args.null_dim.or(file.null_dim).unwrap_or(1),
                condition: args.condition.or(file.condition).unwrap_or(1e10),
            };
            Ok(ProblemSpec::Semidefinite { spec, perturbation })
        }
    }
}
