//! `gardner5`: evaluate, verify and evolve breathers of the fifth-order Gardner
//! equation, and run the H^s two-breather scan.
//!
//! Exit codes: 0 success, 1 failed check, 2 invalid input, 3 runtime guard.

mod args;
mod eval;
mod evolve;
mod failure;
mod illposed;
mod verify;

use std::process::ExitCode;

use clap::{Parser, Subcommand};

use failure::{Failure, Outcome};

/// Caps rayon parallelism; 0 or unset means one thread per core.
const THREADS_ENV: &str = "GARDNER5_THREADS";

#[derive(Debug, Parser)]
#[command(name = "gardner5", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Sample a breather on a grid and write x,B as CSV.
    Eval(eval::EvalArgs),
    /// Check PDE, elliptic, mass and dual-form residuals; JSON report.
    Verify(verify::VerifyArgs),
    /// Evolve initial data with the spectral solver from a JSON document.
    Evolve(evolve::EvolveArgs),
    /// Run the two-breather H^s scan from a JSON document.
    Illposed(illposed::IllposedArgs),
}

fn configure_threads() -> Outcome {
    let Ok(raw) = std::env::var(THREADS_ENV) else {
        return Ok(());
    };
    let threads: usize = raw
        .trim()
        .parse()
        .map_err(|_| Failure::Invalid(format!("{THREADS_ENV} must be a non-negative integer, got '{raw}'")))?;
    if threads > 0 {
        rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build_global()
            .map_err(|e| Failure::Invalid(format!("{THREADS_ENV}: {e}")))?;
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(2) } else { ExitCode::SUCCESS };
        }
    };
    let result = configure_threads().and_then(|()| match &cli.command {
        Command::Eval(a) => eval::run(a),
        Command::Verify(a) => verify::run(a),
        Command::Evolve(a) => evolve::run(a),
        Command::Illposed(a) => illposed::run(a),
    });
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("gardner5: {e}");
            e.exit_code()
        }
    }
}
