use std::process::ExitCode;

use clap::Parser;
use krylov_pinv_cli::{execute, Args};

fn main() -> ExitCode {
    let args = Args::parse();
    match execute(&args) {
        Ok(report) => {
            println!("{} (n = {})", report.tag, report.dim);
            for o in &report.outcomes {
                let r = &o.result;
                let last = r.history.last();
                println!(
                    "  {:<12} {:>5} iterations  {:<13} best k = {:<5} atr = {:.3e}  final atr = {:.3e}",
                    o.label,
                    r.history.len(),
                    format!("{:?}", r.termination).to_lowercase(),
                    r.best_iteration,
                    r.history.min_atr().map_or(f64::NAN, |m| m.1),
                    last.map_or(f64::NAN, |l| l.atr_ratio),
                );
            }
            for f in &report.files {
                println!("  wrote {}", f.display());
            }
            ExitCode::SUCCESS
        }
        Err(failure) => {
            eprintln!("error: {failure}");
            ExitCode::from(failure.exit_code())
        }
    }
}
