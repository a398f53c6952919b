use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

use crate::solver::oracle::DEFAULT_BOUND;
use crate::solver::DEFAULT_TIMEOUT_MS;

#[derive(Debug, Parser)]
#[command(name = "refine", version, about = "Refinement type checker backed by an SMT solver")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Type-check files and discharge their verification conditions.
    Check(CheckArgs),
}

#[derive(Clone, Debug, Args)]
pub struct CheckArgs {
    /// Source files (`.rfn`).
    #[arg(required = true, value_name = "FILE")]
    pub files: Vec<PathBuf>,

    /// SMT-LIB v2 solver executable. Defaults to $REFINE_SOLVER, then z3 or cvc5 on PATH.
    #[arg(long, value_name = "PATH")]
    pub solver: Option<PathBuf>,

    /// Extra argument for the solver, replacing the defaults. Repeatable.
    #[arg(long = "solver-arg", value_name = "ARG", allow_hyphen_values = true)]
    pub solver_args: Vec<String>,

    /// Per-VC solver timeout in milliseconds.
    #[arg(long, value_name = "MS", default_value_t = DEFAULT_TIMEOUT_MS,
          value_parser = clap::value_parser!(u64).range(1..))]
    pub timeout: u64,

    /// Write each VC's script to DIR/<stem>.vc<K>.smt2.
    #[arg(long = "dump-smt", value_name = "DIR")]
    pub dump_smt: Option<PathBuf>,

    /// Search bound for the brute-force oracle used with --no-solver.
    #[arg(long = "oracle-bound", value_name = "N", default_value_t = DEFAULT_BOUND)]
    pub oracle_bound: u32,

    /// Decide VCs with the bounded brute-force oracle instead of a solver.
    #[arg(long = "no-solver")]
    pub no_solver: bool,

    /// After a fully verified check, evaluate ENTRY applied to ARGS.
    #[arg(long, num_args = 1.., value_name = "ENTRY ARGS", allow_negative_numbers = true)]
    pub run: Option<Vec<String>>,

    /// Number of solver processes to run in parallel.
    #[arg(long, value_name = "N", default_value_t = 1,
          value_parser = clap::value_parser!(u64).range(1..))]
    pub jobs: u64,
}
