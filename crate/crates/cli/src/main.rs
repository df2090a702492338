//! `opscale`: generate operator scaling instances, run the solvers, collect
//! convergence and runtime traces, and emit plot scripts.
//!
//! Exit codes: 0 when every requested run completed (a diverged solve is a
//! result, not a failure), 2 for usage errors, 3 for I/O or format errors.

use std::process::ExitCode;

use clap::{Parser, Subcommand};

mod commands;
mod error;
mod instance;
mod plot;
mod traces;

use commands::{BenchArgs, GenArgs, RunArgs};
use plot::PlotArgs;

#[derive(Parser, Debug)]
#[command(name = "opscale", version, about = "Operator scaling experiments")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Generate a problem file and print its grad norm at the identity scaling.
    Gen(GenArgs),
    /// Run solvers and write one trace CSV per algorithm plus summary.json.
    Solve(RunArgs),
    /// Time repeated solves and write per-iteration runtime statistics.
    Bench(BenchArgs),
    /// Write a matplotlib script plotting trace files.
    Plot(PlotArgs),
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Gen(args) => commands::gen(args),
        Command::Solve(args) => commands::solve_cmd(args),
        Command::Bench(args) => commands::bench(args),
        Command::Plot(args) => plot::plot(args),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("opscale: {e}");
            e.exit_code()
        }
    }
}
