use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use ncqm_cli::commands::{
    cmd_check, cmd_decompose, cmd_distance, cmd_evolve, ensure_exists, parse_entries, parse_times,
    CheckArgs, DecomposeArgs, DistanceArgs, EvolveArgs,
};

/// Numerical laboratory for quantum mechanics on noncommutative
/// configuration spaces: builds finite matrix models, assembles
/// Hamiltonians, and certifies their structural axioms by residual
/// computation.
#[derive(Parser)]
#[command(name = "ncqm", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run axiom checks for a (model, hamiltonian) pair.
    Check {
        /// Model spec JSON.
        #[arg(long)]
        spec: PathBuf,
        /// Hamiltonian spec JSON.
        #[arg(long)]
        ham: PathBuf,
        /// Comma-separated check names, or "all".
        #[arg(long, default_value = "all")]
        checks: String,
        #[arg(long, default_value_t = 0x5eed)]
        seed: u64,
        /// Residual tolerance override.
        #[arg(long)]
        tol: Option<f64>,
        /// Output directory for report JSON and the summary CSV.
        #[arg(long, default_value = "reports")]
        out: PathBuf,
        /// Window margin override for the model.
        #[arg(long)]
        window_margin: Option<usize>,
        /// Concurrent check limit.
        #[arg(long, default_value_t = 2)]
        jobs: usize,
    },
    /// Decompose derivation coefficients into standard plus inner parts.
    Decompose {
        /// Coefficient JSON (radius, theta, sparse c1/c2 entries).
        #[arg(long)]
        coeffs: PathBuf,
        /// Output JSON path.
        #[arg(long)]
        out: PathBuf,
        /// Range of the small-denominator growth scan.
        #[arg(long, default_value_t = 200)]
        diophantine_max_n: usize,
    },
    /// Evolve an observable and tabulate norms and Heisenberg residuals.
    Evolve {
        #[arg(long)]
        spec: PathBuf,
        #[arg(long)]
        ham: PathBuf,
        /// Operator label (generator, opposite generator, or named).
        #[arg(long)]
        observable: String,
        /// Comma-separated time grid.
        #[arg(long)]
        times: String,
        /// Output CSV path.
        #[arg(long, default_value = "evolution.csv")]
        out: PathBuf,
        /// Matrix entries to tabulate, e.g. "0,0;1,2".
        #[arg(long, default_value = "")]
        entries: String,
    },
    /// Spectral distance between two states.
    Distance {
        #[arg(long)]
        spec: PathBuf,
        /// Problem JSON: Dirac data plus the two states.
        #[arg(long)]
        problem: PathBuf,
        #[arg(long, default_value = "distance.json")]
        out: PathBuf,
        #[arg(long, default_value_t = 0x5eed)]
        seed: u64,
    },
}

fn run() -> anyhow::Result<i32> {
    let cli = Cli::parse();
    let outcome = match cli.command {
        Command::Check { spec, ham, checks, seed, tol, out, window_margin, jobs } => {
            ensure_exists(&spec)?;
            ensure_exists(&ham)?;
            cmd_check(&CheckArgs { spec, ham, checks, seed, tol, out, window_margin, jobs })?
        }
        Command::Decompose { coeffs, out, diophantine_max_n } => {
            ensure_exists(&coeffs)?;
            cmd_decompose(&DecomposeArgs { coeffs, out, diophantine_max_n })?
        }
        Command::Evolve { spec, ham, observable, times, out, entries } => {
            ensure_exists(&spec)?;
            ensure_exists(&ham)?;
            cmd_evolve(&EvolveArgs {
                spec,
                ham,
                observable,
                times: parse_times(&times)?,
                out,
                entries: parse_entries(&entries)?,
            })?
        }
        Command::Distance { spec, problem, out, seed } => {
            ensure_exists(&spec)?;
            ensure_exists(&problem)?;
            cmd_distance(&DistanceArgs { spec, problem, out, seed })?
        }
    };
    Ok(outcome.exit_code)
}

fn main() -> ExitCode {
    match run() {
        Ok(code) => ExitCode::from(code as u8),
        Err(err) => {
            eprintln!("error: {err:#}");
            ExitCode::from(2)
        }
    }
}
