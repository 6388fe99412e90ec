//! `covlab`: run covariance-field verification scenarios and write reports.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use covlab_core::checks::{run_scenario, CheckRegistry, Report, Status};
use covlab_core::scenario::{builtin_names, Scenario};
use covlab_core::Error;

const EXIT_CHECK_FAILURE: u8 = 1;
const EXIT_VALIDATION: u8 = 2;

#[derive(Parser, Debug)]
#[command(
    name = "covlab",
    version,
    about = "Numerical checks for covariance-field parametrized field theories"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Run the checks listed in a scenario file (or a built-in scenario name).
    Run {
        scenario: String,
        /// Write the JSON report here instead of stdout.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Override the sampling seed.
        #[arg(long)]
        seed: Option<u64>,
        /// Override the number of sample points.
        #[arg(long)]
        points: Option<usize>,
        /// Override the finite-difference step (the outer step becomes 2×).
        #[arg(long)]
        step: Option<f64>,
        /// Use Richardson extrapolation for total derivatives.
        #[arg(long)]
        richardson: bool,
    },
    /// List the available checks and what each verifies.
    ListChecks,
    /// Parse a scenario and dry-run it at every sample point.
    Validate { scenario: String },
}

fn apply_overrides(
    s: &mut Scenario,
    seed: Option<u64>,
    points: Option<usize>,
    step: Option<f64>,
    richardson: bool,
) {
    if let Some(seed) = seed {
        s.sample.seed = seed;
    }
    if let Some(n) = points {
        s.sample.count = n;
        if let Some(pts) = &mut s.sample.points {
            pts.truncate(n);
        }
    }
    if let Some(h) = step {
        s.steps = s.steps.with_step(h);
    }
    if richardson {
        s.steps.richardson = true;
    }
}

fn print_summary(report: &Report) {
    eprintln!(
        "scenario {} ({}, dim {})",
        report.scenario, report.theory, report.dimension
    );
    for c in &report.checks {
        let max = c
            .max_residual
            .map(|v| format!("{v:.3e}"))
            .unwrap_or_else(|| "-".into());
        eprintln!(
            "  {:<18} {:<5} max {:>10}  tol {:.0e}{}",
            c.name,
            c.status,
            max,
            c.tolerance,
            c.note
                .as_deref()
                .map(|n| format!("  ({n})"))
                .unwrap_or_default()
        );
    }
}

fn validation_exit(e: &Error) -> ExitCode {
    eprintln!("error: {e}");
    ExitCode::from(EXIT_VALIDATION)
}

fn run(cli: Cli) -> ExitCode {
    match cli.command {
        Command::ListChecks => {
            for (name, citation) in CheckRegistry::standard().catalog() {
                println!("{name}\t{citation}");
            }
            ExitCode::SUCCESS
        }
        Command::Validate { scenario } => {
            let prepared = Scenario::load(&scenario).and_then(|s| s.prepare());
            match prepared {
                Ok(p) => {
                    println!(
                        "ok: {} ({} points, checks: {})",
                        p.scenario.name,
                        p.points.len(),
                        p.scenario.checks.join(", ")
                    );
                    ExitCode::SUCCESS
                }
                Err(e) => validation_exit(&e),
            }
        }
        Command::Run {
            scenario,
            out,
            seed,
            points,
            step,
            richardson,
        } => {
            let mut s = match Scenario::load(&scenario) {
                Ok(s) => s,
                Err(e) => {
                    if matches!(e, Error::Io(_)) {
                        eprintln!("built-in scenarios: {}", builtin_names().join(", "));
                    }
                    return validation_exit(&e);
                }
            };
            apply_overrides(&mut s, seed, points, step, richardson);
            let report = match run_scenario(&s, &CheckRegistry::standard()) {
                Ok(r) => r,
                Err(e) => return validation_exit(&e),
            };
            let body = report.to_json();
            match &out {
                Some(path) => {
                    if let Err(e) = std::fs::write(path, format!("{body}\n")) {
                        eprintln!("error: cannot write {}: {e}", path.display());
                        return ExitCode::from(EXIT_VALIDATION);
                    }
                }
                None => println!("{body}"),
            }
            print_summary(&report);
            if report.checks.iter().any(|c| c.status == Status::Fail) {
                ExitCode::from(EXIT_CHECK_FAILURE)
            } else {
                ExitCode::SUCCESS
            }
        }
    }
}

fn main() -> ExitCode {
    run(Cli::parse())
}
