//! Flag parsing. Every flag is kept as a raw string and handed to the
//! command through [`RunConfig`], which validates it at dispatch time.

use std::ffi::OsString;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::config::{Command, Format, RunConfig};

#[derive(Parser, Debug)]
#[command(
    name = "embezzle",
    version,
    about = "Simulate entanglement embezzlement on qudit chains and evaluate circuit-complexity lower bounds"
)]
struct Cli {
    #[command(subcommand)]
    command: Sub,
}

#[derive(Subcommand, Debug)]
enum Sub {
    /// Run an embezzling family and report overlaps and entropies.
    Simulate(Flags),
    /// Evaluate a single lower-bound formula.
    Bounds(Flags),
    /// Evaluate bounds or protocol figures over a grid (comma-separated lists).
    Sweep(Flags),
    /// Run randomized inequality checks; exits 2 on any violation.
    Verify(Flags),
    /// Compile the vdH permutation into a chain schedule and compare cost with the lower bound.
    Compile(Flags),
}

#[derive(ValueEnum, Clone, Copy, Debug, Default)]
enum FormatArg {
    #[default]
    Csv,
    #[value(name = "structured_text", alias = "structured-text")]
    StructuredText,
    Json,
}

impl From<FormatArg> for Format {
    fn from(f: FormatArg) -> Self {
        match f {
            FormatArg::Csv => Format::Csv,
            FormatArg::StructuredText | FormatArg::Json => Format::StructuredText,
        }
    }
}

macro_rules! flags {
    ($($field:ident => $name:literal : $help:literal),* $(,)?) => {
        #[derive(Args, Debug, Default)]
        struct Flags {
            $(
                #[arg(long = $name, help = $help, allow_hyphen_values = true)]
                $field: Option<String>,
            )*
            /// Write the report here instead of stdout.
            #[arg(long)]
            out: Option<PathBuf>,
            #[arg(long, value_enum, default_value_t)]
            format: FormatArg,
        }

        impl Flags {
            fn pairs(&self) -> Vec<(&'static str, &Option<String>)> {
                vec![$(($name, &self.$field)),*]
            }
        }
    };
}

flags! {
    family => "family": "Embezzling family: vdh or itp",
    rank => "N": "Catalyst Schmidt rank (list in sweep)",
    d => "d": "Local dimension of the embezzled system",
    d_e => "d-e": "Local dimension of the embezzler site",
    epsilon => "epsilon": "Precision ε (list in sweep)",
    delta_s => "delta-S": "Embezzled entropy ΔS (list in sweep)",
    c => "c": "Constant in the entangling-rate bound",
    k => "k": "Locality of the generators",
    m => "m": "Coarse-graining block size",
    big_m => "M": "Integer cut count for the asymptotic formula",
    lambda1 => "lambda1": "First Schmidt parameter of the ITP family",
    lambda2 => "lambda2": "Second Schmidt parameter of the ITP family",
    formula => "formula": "Bound formula for `bounds`",
    remedy => "remedy": "k-local remedy: overall_factor or strided_sum",
    sites => "sites": "Number of chain sites or cuts",
    dim => "dim": "Hilbert-space dimension for the Fannes formula and suite",
    suite => "suite": "Verification suite: all, sie, fannes, norm_monotonicity, cost_entropy_chain",
    trials => "trials": "Random trials per suite",
    seed => "seed": "Seed for all randomness",
    substeps => "substeps": "Integration substeps per schedule slice",
    schedule_out => "schedule-out": "Write the compiled schedule as JSON",
    log_base => "log-base": "Logarithm base for entropies and bounds (default e)",
}

/// Parses a full argument list, program name first.
pub fn parse_args<I, T>(args: I) -> Result<RunConfig, clap::Error>
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = Cli::try_parse_from(args)?;
    let (command, flags) = match cli.command {
        Sub::Simulate(f) => (Command::Simulate, f),
        Sub::Bounds(f) => (Command::Bounds, f),
        Sub::Sweep(f) => (Command::Sweep, f),
        Sub::Verify(f) => (Command::Verify, f),
        Sub::Compile(f) => (Command::Compile, f),
    };
    let mut cfg = RunConfig::new(command).with_format(flags.format.into());
    for (key, value) in flags.pairs() {
        if let Some(v) = value {
            cfg = cfg.with(key, v);
        }
    }
    if let Some(path) = flags.out {
        cfg = cfg.with_output(path);
    }
    Ok(cfg)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn maps_flags_to_keys() {
        let cfg = parse_args([
            "embezzle",
            "bounds",
            "--formula",
            "asymptotic",
            "--delta-S",
            "0.6931",
            "--d-e",
            "2",
            "--M",
            "1000",
            "--format",
            "json",
        ])
        .unwrap();
        assert_eq!(cfg.command, Command::Bounds);
        assert_eq!(cfg.raw("delta-S"), Some("0.6931"));
        assert_eq!(cfg.raw("d-e"), Some("2"));
        assert_eq!(cfg.raw("M"), Some("1000"));
        assert_eq!(cfg.raw("m"), None);
        assert_eq!(cfg.format, Format::StructuredText);
        assert!(cfg.output_path.is_none());
    }

    #[test]
    fn unknown_flag_is_a_parse_error() {
        assert!(parse_args(["embezzle", "simulate", "--bogus", "1"]).is_err());
        assert!(parse_args(["embezzle", "teleport"]).is_err());
    }

    #[test]
    fn negative_values_reach_validation() {
        let cfg = parse_args(["embezzle", "bounds", "--epsilon", "-1"]).unwrap();
        assert_eq!(cfg.raw("epsilon"), Some("-1"));
    }
}
