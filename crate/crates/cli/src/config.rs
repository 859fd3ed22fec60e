use std::collections::BTreeMap;
use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;

use embezzle_core::LogBase;
use serde::{Deserialize, Serialize};

use crate::error::{CliError, CliResult};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Command {
    Simulate,
    Bounds,
    Sweep,
    Verify,
    Compile,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Command::Simulate => "simulate",
            Command::Bounds => "bounds",
            Command::Sweep => "sweep",
            Command::Verify => "verify",
            Command::Compile => "compile",
        }
    }

    /// Parameter keys the command understands, besides `log-base`.
    pub fn accepted(self) -> &'static [&'static str] {
        match self {
            Command::Simulate => &[
                "family", "N", "d", "d-e", "lambda1", "lambda2", "epsilon", "substeps",
            ],
            Command::Bounds => &[
                "formula", "delta-S", "epsilon", "d", "d-e", "c", "k", "m", "M", "remedy", "sites",
                "dim", "lambda1", "lambda2",
            ],
            Command::Sweep => &[
                "family", "N", "d", "d-e", "delta-S", "epsilon", "c", "k", "m", "sites", "lambda1",
                "lambda2",
            ],
            Command::Verify => &["suite", "trials", "seed", "d", "d-e", "sites", "dim"],
            Command::Compile => &["family", "N", "d", "d-e", "substeps", "schedule-out", "c"],
        }
    }
}

impl fmt::Display for Command {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Format {
    #[default]
    Csv,
    StructuredText,
}

impl FromStr for Format {
    type Err = CliError;
    fn from_str(s: &str) -> CliResult<Self> {
        match s {
            "csv" => Ok(Format::Csv),
            "structured_text" | "json" => Ok(Format::StructuredText),
            other => Err(CliError::Invalid {
                key: "format".into(),
                value: other.into(),
                reason: "expected csv or structured_text".into(),
            }),
        }
    }
}

/// A command plus its flags as raw `key → value` strings; values are parsed
/// and range-checked when the command runs.
#[derive(Clone, Debug, PartialEq)]
pub struct RunConfig {
    pub command: Command,
    pub parameters: BTreeMap<String, String>,
    pub output_path: Option<PathBuf>,
    pub format: Format,
}

impl RunConfig {
    pub fn new(command: Command) -> Self {
        Self {
            command,
            parameters: BTreeMap::new(),
            output_path: None,
            format: Format::Csv,
        }
    }

    pub fn with(mut self, key: &str, value: impl ToString) -> Self {
        self.parameters.insert(key.to_string(), value.to_string());
        self
    }

    pub fn with_format(mut self, format: Format) -> Self {
        self.format = format;
        self
    }

    pub fn with_output(mut self, path: impl Into<PathBuf>) -> Self {
        self.output_path = Some(path.into());
        self
    }

    /// Rejects keys the command does not accept.
    pub fn validate_keys(&self) -> CliResult<()> {
        let accepted = self.command.accepted();
        for key in self.parameters.keys() {
            if key != "log-base" && !accepted.contains(&key.as_str()) {
                return Err(CliError::Unexpected {
                    key: key.clone(),
                    command: self.command.name(),
                });
            }
        }
        Ok(())
    }

    pub fn raw(&self, key: &str) -> Option<&str> {
        self.parameters.get(key).map(String::as_str)
    }

    pub fn get<T: FromStr>(&self, key: &str) -> CliResult<Option<T>>
    where
        T::Err: fmt::Display,
    {
        self.raw(key).map(|v| parse_value(key, v)).transpose()
    }

    pub fn get_or<T: FromStr>(&self, key: &str, default: T) -> CliResult<T>
    where
        T::Err: fmt::Display,
    {
        Ok(self.get(key)?.unwrap_or(default))
    }

    pub fn require<T: FromStr>(&self, key: &str) -> CliResult<T>
    where
        T::Err: fmt::Display,
    {
        self.get(key)?
            .ok_or_else(|| CliError::Missing(key.to_string()))
    }

    /// Comma-separated list.
    pub fn list<T: FromStr>(&self, key: &str) -> CliResult<Option<Vec<T>>>
    where
        T::Err: fmt::Display,
    {
        let Some(raw) = self.raw(key) else {
            return Ok(None);
        };
        let items: Vec<T> = raw
            .split(',')
            .map(str::trim)
            .filter(|s| !s.is_empty())
            .map(|v| parse_value(key, v))
            .collect::<CliResult<_>>()?;
        if items.is_empty() {
            return Err(invalid(key, raw, "empty list"));
        }
        Ok(Some(items))
    }

    pub fn require_list<T: FromStr>(&self, key: &str) -> CliResult<Vec<T>>
    where
        T::Err: fmt::Display,
    {
        self.list(key)?
            .ok_or_else(|| CliError::Missing(key.to_string()))
    }

    pub fn log_base(&self) -> CliResult<LogBase> {
        match self.get::<f64>("log-base")? {
            None => Ok(LogBase::NATURAL),
            Some(b) => {
                LogBase::new(b).map_err(|e| invalid("log-base", &b.to_string(), &e.to_string()))
            }
        }
    }
}

fn parse_value<T: FromStr>(key: &str, value: &str) -> CliResult<T>
where
    T::Err: fmt::Display,
{
    value
        .parse()
        .map_err(|e: T::Err| invalid(key, value, &e.to_string()))
}

pub(crate) fn invalid(key: &str, value: &str, reason: &str) -> CliError {
    CliError::Invalid {
        key: key.to_string(),
        value: value.to_string(),
        reason: reason.to_string(),
    }
}
