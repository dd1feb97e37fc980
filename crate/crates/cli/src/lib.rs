//! Command-line front end: argument parsing, run manifests and output files.

pub mod commands;
pub mod error;
pub mod law;
pub mod manifest;
pub mod table;

use clap::{Parser, Subcommand};

use commands::{constants, pvar, simulate, smallball, verify};
pub use error::{CliError, CliResult};

#[derive(Debug, Parser)]
#[command(name = "smallball", version, about = "Small-ball probabilities of stable processes")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Evaluate the closed-form constants and bounds for (alpha, p, kappa).
    Constants(constants::ConstantsArgs),
    /// Monte Carlo small-ball probabilities.
    Smallball(smallball::SmallballArgs),
    /// Run a pinned verification suite.
    Verify(verify::VerifyArgs),
    /// Simulate one path.
    Simulate(simulate::SimulateArgs),
    /// Semi-norms of a path read from CSV.
    Pvar(pvar::PvarArgs),
}

pub fn execute(cli: &Cli) -> CliResult<()> {
    match &cli.command {
        Command::Constants(a) => constants::run(a),
        Command::Smallball(a) => smallball::run(a).map(|_| ()),
        Command::Verify(a) => verify::run(a).map(|_| ()),
        Command::Simulate(a) => simulate::run(a),
        Command::Pvar(a) => pvar::run(a).map(|_| ()),
    }
}
