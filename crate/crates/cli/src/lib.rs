//! Command-line front end for `embezzle-core`.
//!
//! [`parse_args`] turns flags into a [`RunConfig`]. [`run`] executes it,
//! writes the [`Report`] and returns the exit status:
//!
//! * 0 on success
//! * 1 on a validation or runtime error
//! * 2 when a verification or post-hoc check reports violations

mod args;
mod commands;
mod config;
mod error;
mod table;

use std::fs;
use std::io::{self, Write};

pub use args::parse_args;
pub use commands::{catalyst_sites, compile_vdh, CompiledVdh};
pub use config::{Command, Format, RunConfig};
pub use error::{CliError, CliResult};
pub use table::{Cell, Report};

pub const EXIT_OK: i32 = 0;
pub const EXIT_ERROR: i32 = 1;
pub const EXIT_VIOLATION: i32 = 2;

/// Validates the keys and runs the command.
pub fn execute(cfg: &RunConfig) -> CliResult<Report> {
    cfg.validate_keys()?;
    commands::dispatch(cfg)
}

pub fn render(report: &Report, format: Format) -> CliResult<String> {
    match format {
        Format::Csv => report.to_csv(),
        Format::StructuredText => report.to_structured(),
    }
}

/// Runs `cfg`, writes the report to its output path or stdout, prints
/// violations and errors on stderr, and returns the exit status.
pub fn run(cfg: &RunConfig) -> i32 {
    let result = run_inner(cfg);
    match &result {
        Ok(report) => {
            for v in &report.violations {
                eprintln!("violation: {v}");
            }
        }
        Err(e) => eprintln!("error: {e}"),
    }
    exit_status(&result)
}

pub fn exit_status(result: &CliResult<Report>) -> i32 {
    match result {
        Ok(report) if report.violations.is_empty() => EXIT_OK,
        Ok(_) => EXIT_VIOLATION,
        Err(_) => EXIT_ERROR,
    }
}

fn run_inner(cfg: &RunConfig) -> CliResult<Report> {
    let report = execute(cfg)?;
    let text = render(&report, cfg.format)?;
    match &cfg.output_path {
        Some(path) => fs::write(path, text)?,
        None => io::stdout().lock().write_all(text.as_bytes())?,
    }
    Ok(report)
}
