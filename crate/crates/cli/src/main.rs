//! `fhmdp`: solve, check, simulate and verify finite-horizon MDPs.
//!
//! Exit codes: 0 success, 1 comparison failure, 2 usage, IO or validation
//! error. Reports go to stdout, diagnostics to stderr.

mod commands;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Debug, Parser)]
#[command(name = "fhmdp", version, about = "Finite-horizon MDP solver")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Solve by backward induction and print value and decision tables.
    Solve {
        #[command(flatten)]
        model: ModelArgs,
        #[arg(long, default_value_t = 10)]
        horizon: usize,
        #[arg(long, value_enum, default_value_t = Format::Table)]
        format: Format,
    },
    /// Solve and compare against an expected-results fixture.
    Check {
        #[command(flatten)]
        model: ModelArgs,
        /// Fixture file, or a bundled name (drilling-final, drilling-stagewise).
        #[arg(long)]
        expected: String,
        /// Defaults to the fixture's horizon.
        #[arg(long)]
        horizon: Option<usize>,
    },
    /// Monte Carlo estimate of a policy's expected total reward.
    Simulate {
        #[command(flatten)]
        model: ModelArgs,
        #[arg(long, default_value_t = 10)]
        horizon: usize,
        /// Policy file (`decisions = [[...]]`); defaults to the optimal policy.
        #[arg(long)]
        policy: Option<PathBuf>,
        /// 1-based start state; repeatable. Defaults to every state.
        #[arg(long = "start")]
        starts: Vec<usize>,
        #[arg(long, default_value_t = 100_000, value_parser = clap::value_parser!(u64).range(1..))]
        episodes: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, value_enum, default_value_t = Format::Table)]
        format: Format,
    },
    /// Compare backward induction with exhaustive policy enumeration.
    Verify {
        #[command(flatten)]
        source: VerifySource,
        #[arg(long, default_value_t = 10)]
        horizon: usize,
        /// Seed for --random instances.
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Largest number of Markov policies to enumerate.
        #[arg(long, default_value_t = fhmdp::oracle::DEFAULT_ENUMERATION_CAP)]
        cap: u64,
    },
}

#[derive(Debug, Args)]
struct ModelArgs {
    /// Model file, or a bundled name (drilling, toy3).
    #[arg(long)]
    model: String,
    /// File with `terminal_values = [...]`; zeros when omitted.
    #[arg(long)]
    terminal_values: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = RowCheckArg::Tolerance)]
    row_check: RowCheckArg,
}

#[derive(Debug, Args)]
#[group(required = true, multiple = false)]
struct VerifySource {
    /// Model file, or a bundled name.
    #[arg(long)]
    model: Option<String>,
    /// Check this many seeded random instances (up to 3 states, 3 actions, 3 stages).
    #[arg(long)]
    random: Option<u64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Table,
    Csv,
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum RowCheckArg {
    /// Row sums within 1e-6 of 1.
    Tolerance,
    /// Row sums exactly 1.
    Strict,
    /// Rescale rows that are within 1e-6 of 1.
    Renormalize,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match commands::run(cli.command) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
