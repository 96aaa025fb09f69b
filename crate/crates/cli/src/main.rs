use std::io;
use std::process::ExitCode;

use clap::Parser;
use maxshare_cli::{emit, run, Cli};

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli, &mut io::stdin().lock()).and_then(|report| {
        emit(&cli, &report)?;
        Ok(report.code)
    }) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("maxshare: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
