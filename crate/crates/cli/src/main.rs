use std::process::ExitCode;

use clap::Parser;
use strata_cli::{execute, Cli};

fn main() -> ExitCode {
    let cli = Cli::parse();
    let stdout = std::io::stdout();
    match execute(cli, &mut stdout.lock()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("strata: {f}");
            ExitCode::from(&f)
        }
    }
}
