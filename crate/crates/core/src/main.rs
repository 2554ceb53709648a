use std::process::ExitCode;

use clap::Parser;
use lwfr::io::{run_cli, Cli};
use lwfr::SolverError;

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run_cli(&cli) {
        Ok(lines) => {
            for line in lines {
                println!("{line}");
            }
            ExitCode::SUCCESS
        }
        Err(err) => {
            eprintln!("{}", err.machine_line());
            match err {
                SolverError::Admissibility { .. } | SolverError::NonFinite { .. } => {
                    ExitCode::from(2)
                }
                _ => ExitCode::FAILURE,
            }
        }
    }
}
