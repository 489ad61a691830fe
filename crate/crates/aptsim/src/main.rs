use std::process::ExitCode;

use aptsim::{execute, RunConfig};
use clap::Parser;

fn main() -> ExitCode {
    let cfg = RunConfig::parse();
    match execute(&cfg) {
        Ok(written) => {
            for path in written {
                println!("{}", path.display());
            }
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("aptsim: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
