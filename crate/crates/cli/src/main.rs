//! Command-line laboratory for the list update problem where every adjacent
//! swap costs one unit, including swaps of the requested item.
//!
//! Subcommands: `simulate` runs one online algorithm over a sequence,
//! `ratio` prices it against optimum oracles, `check` validates the
//! engine's constant tables and identities, `verify` builds the request
//! game and proves ratio bounds, and `generate` emits adversarial
//! workloads. Every command is deterministic given its seed; the process
//! exits nonzero iff a check or verification fails. The env var
//! `LISTUP_MAX_STATES` caps verifier and oracle state spaces.

mod check;
mod common;
mod generate;
mod ratio;
mod simulate;
mod source;
mod verify;

use std::process::ExitCode;

use clap::{Parser, Subcommand};

#[derive(Parser)]
#[command(name = "listup", version, about = "Laboratory for list update with paid unit swaps")]
struct Cli {
    #[command(subcommand)]
    command: Commands,
}

#[derive(Subcommand)]
enum Commands {
    /// Run an online algorithm over a sequence and stream per-step costs.
    Simulate(simulate::SimulateArgs),
    /// Price an algorithm against optimum oracles.
    Ratio(ratio::RatioArgs),
    /// Check the constant tables, parameter inequalities and identities.
    Check(check::CheckArgs),
    /// Build the request game; verify a ratio or certify a class bound.
    Verify(verify::VerifyArgs),
    /// Emit an adversarial workload plus its predicted costs.
    Generate(generate::GenerateArgs),
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Commands::Simulate(args) => simulate::run(args),
        Commands::Ratio(args) => ratio::run(args),
        Commands::Check(args) => check::run(args),
        Commands::Verify(args) => verify::run(args),
        Commands::Generate(args) => generate::run(args),
    };
    match result {
        Ok(code) => code,
        Err(msg) => {
            eprintln!("error: {msg}");
            ExitCode::FAILURE
        }
    }
}
