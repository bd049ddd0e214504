use std::process::ExitCode;

use clap::Parser;

use beveridge_toolkit::cli::{run, Cli};

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(status) if status.violations.is_empty() => ExitCode::SUCCESS,
        Ok(status) => {
            for v in &status.violations {
                eprintln!("violation: {v}");
            }
            ExitCode::from(1)
        }
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
