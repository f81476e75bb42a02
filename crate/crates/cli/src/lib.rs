//! Library half of the `krylov-pinv` command: manifest resolution, problem
//! setup, concurrent solver runs, and the CSV, JSON and SVG artifacts.

pub mod args;
pub mod manifest;
pub mod output;
pub mod plot;
pub mod problem;
pub mod run;

pub use args::Args;
pub use manifest::{ManifestFile, ProblemKind, ProblemSpec, RunManifest, SolverRun, TolArg};
pub use run::{run, RunReport, SolverOutcome};

use std::fmt;

/// A failed invocation, split by exit status.
#[derive(Debug)]
pub enum Failure {
    /// Bad flags, bad manifest, unreadable or unwritable files. Exit 2.
    Usage(anyhow::Error),
    /// The numerics gave up (SVD or eigen iteration stalled, NaN). Exit 1.
    Numerical(anyhow::Error),
}

impl Failure {
    pub fn usage(msg: impl fmt::Display) -> Self {
        Failure::Usage(anyhow::anyhow!("{msg}"))
    }

    pub fn exit_code(&self) -> u8 {
        match self {
            Failure::Usage(_) => 2,
            Failure::Numerical(_) => 1,
        }
    }

    pub fn error(&self) -> &anyhow::Error {
        match self {
            Failure::Usage(e) | Failure::Numerical(e) => e,
        }
    }
}

impl fmt::Display for Failure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:#}", self.error())
    }
}

impl From<krylov_pinv::Error> for Failure {
    fn from(e: krylov_pinv::Error) -> Self {
        use krylov_pinv::Error as E;
        match e {
            E::SvdNoConvergence(_)
            | E::NonFinite(_)
            | E::EigenNoConvergence { .. }
            | E::DegenerateNumerator
            | E::SingularTriangular(_) => Failure::Numerical(e.into()),
            _ => Failure::Usage(e.into()),
        }
    }
}

/// Resolves flags (and the manifest they may name) and runs everything.
pub fn execute(args: &Args) -> Result<RunReport, Failure> {
    let manifest = RunManifest::from_args(args)?;
    run(&manifest)
}
