use std::process::ExitCode;

use clap::{Parser, Subcommand};
use interdiv_cli::{run_experiment, validate_spec, RawFlags, EXIT_BOUND_VIOLATION};

#[derive(Parser)]
#[command(
    name = "interdiv",
    version,
    about = "Multiuser interference diversity simulations for cognitive radio networks"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run an experiment preset and write its results.
    Run(RawFlags),
}

fn main() -> ExitCode {
    let Command::Run(flags) = Cli::parse().command;
    let spec = match validate_spec(&flags) {
        Ok(spec) => spec,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(e.exit_code() as u8);
        }
    };
    match run_experiment(&spec) {
        Ok(outcome) => {
            eprintln!("wrote {} rows to {}", outcome.rows.len(), spec.output_path.display());
            if outcome.violations.is_empty() {
                ExitCode::SUCCESS
            } else {
                for v in &outcome.violations {
                    eprintln!("bound violated: {v}");
                }
                ExitCode::from(EXIT_BOUND_VIOLATION as u8)
            }
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
