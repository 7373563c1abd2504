//! `qoc`: optimize and simulate qubit decay-rate protocols.
//!
//! Exit codes: 0 on success, 1 on any input or configuration error,
//! 2 when an optimization ends without converging.

mod analytic;
mod optimize;
mod output;
mod simulate;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

#[derive(Debug, Parser)]
#[command(
    name = "qoc",
    version,
    about = "Optimize and simulate decay-rate protocols for a dissipative qubit"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Minimize a cost functional over admissible decay-rate protocols.
    Optimize(optimize::OptimizeArgs),
    /// Propagate a protocol read from CSV and tabulate the observables.
    Simulate(simulate::SimulateArgs),
    /// Write a closed-form reference result.
    Analytic(analytic::AnalyticArgs),
}

/// Outcome of a command that ran to completion.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Status {
    Success,
    NotConverged,
}

/// Output directory flag shared by every command.
#[derive(Debug, Clone, clap::Args, serde::Serialize)]
pub struct OutDir {
    /// Directory for the written artifacts; created if missing.
    #[arg(long, env = "QOC_OUT_DIR", default_value = ".")]
    pub out: PathBuf,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let result = match cli.command {
        Command::Optimize(args) => optimize::run(&args),
        Command::Simulate(args) => simulate::run(&args),
        Command::Analytic(args) => analytic::run(&args),
    };
    match result {
        Ok(Status::Success) => ExitCode::SUCCESS,
        Ok(Status::NotConverged) => ExitCode::from(2),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use clap::CommandFactory;

    #[test]
    fn command_definition_is_consistent() {
        Cli::command().debug_assert();
    }

    #[test]
    fn functional_maps_to_core_kinds() {
        use qoc_core::CostFunctional;
        assert_eq!(CostFunctional::from(optimize::Functional::Qsl), CostFunctional::Qsl);
        assert_eq!(CostFunctional::from(optimize::Functional::Heating), CostFunctional::Heating);
    }
}
