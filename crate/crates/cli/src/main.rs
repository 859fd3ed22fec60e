use std::process::ExitCode;

use clap::error::ErrorKind;
use embezzle_cli::{parse_args, run, EXIT_ERROR};

fn main() -> ExitCode {
    let cfg = match parse_args(std::env::args_os()) {
        Ok(cfg) => cfg,
        Err(e) => {
            let _ = e.print();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => ExitCode::SUCCESS,
                _ => ExitCode::from(EXIT_ERROR as u8),
            };
        }
    };
    ExitCode::from(run(&cfg) as u8)
}
