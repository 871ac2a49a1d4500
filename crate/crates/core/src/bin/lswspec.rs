use std::process::ExitCode;

use clap::Parser;
use lswspec::cli::{run, RunConfig};

fn main() -> ExitCode {
    let config = RunConfig::parse();
    match run(&config) {
        Ok(paths) => {
            for p in paths.iter().filter(|p| p.as_os_str() != "-") {
                eprintln!("wrote {}", p.display());
            }
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}
