//! Command-line front door: construct families, run checkers, drive
//! forcing chains.
//!
//! Exit codes: 0 success/pass, 1 bad configuration or malformed input,
//! 2 construction or rule exhaustion, 3 check failed, 4 inconclusive.
//! All randomness flows from `--seed`; re-running a command with the same
//! seed and inputs reproduces its outputs byte for byte. Set `ADFAM_LOG`
//! (error|warn|info|debug) for progress messages on stderr.

mod check;
mod construct;
mod force;
mod util;

use clap::{Parser, Subcommand};
use std::process::ExitCode;

#[derive(Parser, Debug)]
#[command(
    name = "adfam",
    version,
    about = "Finite-scale almost disjoint family toolkit"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Build a family and write it with a replayable log
    Construct(construct::ConstructArgs),
    /// Run budgeted checkers over a family file
    Check(check::CheckArgs),
    /// Drive a dense-rule chain over a poset and extract the result
    Force(force::ForceArgs),
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::new().filter("ADFAM_LOG")).init();
    let cli = Cli::parse();
    let outcome = match &cli.command {
        Command::Construct(args) => construct::run(args),
        Command::Check(args) => check::run(args),
        Command::Force(args) => force::run(args),
    };
    match outcome {
        Ok(code) => ExitCode::from(code as u8),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(util::EXIT_BAD_CONFIG as u8)
        }
    }
}
