//! Library half of the `ginv` binary, so the subcommands can be driven from
//! tests without spawning processes.

pub mod check;
pub mod commands;
pub mod matfile;

use clap::{Parser, Subcommand};

use commands::{CliResult, GenerateArgs, InverseArgs, SolveArgs};

#[derive(Debug, Parser)]
#[command(name = "ginv", version, about = "Weighted generalized inverses")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Compute a generalized inverse
    Inverse(InverseArgs),
    /// Solve a constrained minimization or the restricted matrix equation
    Solve(SolveArgs),
    /// Run randomized property checks
    Check(check::CheckArgs),
    /// Write a random pair with prescribed index and core size
    Generate(GenerateArgs),
}

pub fn run(cli: &Cli, out: &mut dyn std::io::Write, err: &mut dyn std::io::Write) -> CliResult {
    match &cli.command {
        Command::Inverse(a) => commands::cmd_inverse(a, out, err),
        Command::Solve(a) => commands::cmd_solve(a, out, err),
        Command::Check(a) => commands::cmd_check(a, out, err),
        Command::Generate(a) => commands::cmd_generate(a, out, err),
    }
}
