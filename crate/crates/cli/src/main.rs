//! `fracfp`: run solves, convergence studies, stability probes and invariant checks.
//!
//! Exit codes: 0 success, 1 failed check, 2 configuration, 3 solver, 4 I/O.

mod checks;
mod commands;
mod error;
mod output;
mod settings;

use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use checks::Faults;
use error::CliError;
use settings::{Flags, Settings};

#[derive(Parser)]
#[command(name = "fracfp", version, about = "Time-fractional Fokker-Planck experiments")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Solve one problem; writes solution.csv, mass.csv and run.meta.
    Solve(Flags),
    /// Spatial convergence study; writes table.csv and errors_<alpha>_<qh>.csv.
    Convergence(Flags),
    /// Norm growth for random initial data; writes stability.csv.
    Stability(Flags),
    /// Run the invariant checks and report pass/fail.
    Check(CheckArgs),
}

#[derive(Args)]
struct CheckArgs {
    #[command(flatten)]
    flags: Flags,
    /// Add this to the first weight of every row (negative control).
    #[arg(long, hide = true, default_value_t = 0.0, allow_hyphen_values = true)]
    perturb_weights: f64,
}

fn run(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Solve(f) => commands::solve(&Settings::resolve(&f)?),
        Command::Convergence(f) => commands::convergence(&Settings::resolve(&f)?),
        Command::Stability(f) => commands::stability(&Settings::resolve(&f)?),
        Command::Check(a) => commands::check(
            &Settings::resolve(&a.flags)?,
            Faults {
                weight_perturbation: a.perturb_weights,
            },
        ),
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            if !matches!(e, CliError::CheckFailed) {
                eprintln!("fracfp: {e}");
            }
            ExitCode::from(e.exit_code())
        }
    }
}
