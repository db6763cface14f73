mod commands;
mod error;
mod format;
mod generate;

use clap::{Parser, Subcommand};
use commands::{BenchArgs, Mode, SolveArgs};
use std::path::PathBuf;
use std::process::ExitCode;

/// Linear-time solves and log-determinants for exponential-sum covariance
/// matrices.
#[derive(Parser)]
#[command(name = "ess", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Write a seeded random benchmark problem.
    Generate {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        p: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Problem file; standard output when omitted.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Also write the matching right-hand side here.
        #[arg(long)]
        rhs: Option<PathBuf>,
    },
    /// Solve a problem file and print a JSON report.
    Solve {
        problem: PathBuf,
        /// Right-hand side, one value per line. Defaults to all ones.
        #[arg(long)]
        rhs: Option<PathBuf>,
        /// Compare against the dense oracle when n is within the dense cap.
        #[arg(long)]
        verify: bool,
        #[arg(long, default_value_t = 2000)]
        dense_cap: usize,
        #[arg(long)]
        out: Option<PathBuf>,
        /// Dump the extended matrix as `row col value` lines (0-based).
        #[arg(long, hide = true)]
        triplets: Option<PathBuf>,
    },
    /// Time every (n, p, seed) combination; one JSON record per line.
    Bench {
        #[arg(long, value_delimiter = ',', required = true)]
        n: Vec<usize>,
        #[arg(long, value_delimiter = ',', default_value = "5")]
        p: Vec<usize>,
        #[arg(long, value_delimiter = ',', default_value = "0")]
        seed: Vec<u64>,
        /// Shorthand for `--mode both`.
        #[arg(long, conflicts_with = "mode")]
        verify: bool,
        #[arg(long, value_enum, default_value_t = Mode::Fast)]
        mode: Mode,
        #[arg(long, default_value_t = 2000)]
        dense_cap: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn main() -> ExitCode {
    let result = match Cli::parse().command {
        Command::Generate { n, p, seed, out, rhs } => commands::generate(n, p, seed, out.as_deref(), rhs.as_deref()),
        Command::Solve { problem, rhs, verify, dense_cap, out, triplets } => commands::solve(SolveArgs {
            problem: &problem,
            rhs: rhs.as_deref(),
            verify,
            dense_cap,
            out: out.as_deref(),
            triplets: triplets.as_deref(),
        }),
        Command::Bench { n, p, seed, verify, mode, dense_cap, out } => commands::bench(BenchArgs {
            ns: &n,
            ps: &p,
            seeds: &seed,
            mode: if verify { Mode::Both } else { mode },
            dense_cap,
            out,
        }),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
