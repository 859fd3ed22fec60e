use std::collections::BTreeMap;
use std::fmt;

use serde_json::{json, Value};

use crate::config::Command;
use crate::error::CliResult;

#[derive(Clone, Debug, PartialEq)]
pub enum Cell {
    Int(i64),
    Float(f64),
    Text(String),
    Bool(bool),
    Empty,
}

impl Cell {
    pub fn as_f64(&self) -> Option<f64> {
        match *self {
            Cell::Int(i) => Some(i as f64),
            Cell::Float(x) => Some(x),
            _ => None,
        }
    }

    fn to_json(&self) -> Value {
        match self {
            Cell::Int(i) => json!(i),
            Cell::Float(x) => serde_json::Number::from_f64(*x).map_or(Value::Null, Value::Number),
            Cell::Text(s) => json!(s),
            Cell::Bool(b) => json!(b),
            Cell::Empty => Value::Null,
        }
    }
}

impl fmt::Display for Cell {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Cell::Int(i) => write!(f, "{i}"),
            Cell::Float(x) => write!(f, "{x}"),
            Cell::Text(s) => f.write_str(s),
            Cell::Bool(b) => write!(f, "{b}"),
            Cell::Empty => Ok(()),
        }
    }
}

impl From<f64> for Cell {
    fn from(x: f64) -> Self {
        Cell::Float(x)
    }
}

impl From<usize> for Cell {
    fn from(x: usize) -> Self {
        Cell::Int(x as i64)
    }
}

impl From<u64> for Cell {
    fn from(x: u64) -> Self {
        Cell::Int(x as i64)
    }
}

impl From<bool> for Cell {
    fn from(x: bool) -> Self {
        Cell::Bool(x)
    }
}

impl From<&str> for Cell {
    fn from(x: &str) -> Self {
        Cell::Text(x.to_string())
    }
}

impl From<String> for Cell {
    fn from(x: String) -> Self {
        Cell::Text(x)
    }
}

impl<T: Into<Cell>> From<Option<T>> for Cell {
    fn from(x: Option<T>) -> Self {
        x.map_or(Cell::Empty, Into::into)
    }
}

/// Output of one command: a fixed-column table plus the run's parameters.
#[derive(Clone, Debug, PartialEq)]
pub struct Report {
    pub command: Command,
    pub parameters: BTreeMap<String, String>,
    pub log_base: f64,
    pub columns: Vec<String>,
    pub rows: Vec<Vec<Cell>>,
    /// Failed post-hoc checks; a nonempty list maps to exit status 2.
    pub violations: Vec<String>,
}

impl Report {
    pub fn new(
        command: Command,
        parameters: BTreeMap<String, String>,
        log_base: f64,
        columns: &[&str],
    ) -> Self {
        Self {
            command,
            parameters,
            log_base,
            columns: columns.iter().map(|c| c.to_string()).collect(),
            rows: Vec::new(),
            violations: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        debug_assert_eq!(row.len(), self.columns.len(), "row width");
        self.rows.push(row);
    }

    pub fn column(&self, name: &str) -> Option<usize> {
        self.columns.iter().position(|c| c == name)
    }

    /// Numeric values of a column, `None` for empty cells.
    pub fn values(&self, name: &str) -> Vec<Option<f64>> {
        let Some(i) = self.column(name) else {
            return Vec::new();
        };
        self.rows.iter().map(|r| r[i].as_f64()).collect()
    }

    /// CSV preceded by `# key=value` lines holding the command, log base and
    /// every given parameter; read it back with `#` as the comment byte.
    pub fn to_csv(&self) -> CliResult<String> {
        let mut preamble = format!(
            "# command={}\n# log_base={}\n",
            self.command.name(),
            self.log_base
        );
        for (k, v) in &self.parameters {
            preamble.push_str(&format!("# {k}={v}\n"));
        }
        Ok(preamble + &self.csv_body()?)
    }

    /// Header and rows only.
    pub fn csv_body(&self) -> CliResult<String> {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(&self.columns)?;
        for row in &self.rows {
            w.write_record(row.iter().map(|c| c.to_string()))?;
        }
        let bytes = w.into_inner().map_err(|e| e.into_error())?;
        Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
    }

    pub fn to_structured(&self) -> CliResult<String> {
        let rows: Vec<Value> = self
            .rows
            .iter()
            .map(|r| Value::Array(r.iter().map(Cell::to_json).collect()))
            .collect();
        let doc = json!({
            "command": self.command.name(),
            "log_base": self.log_base,
            "parameters": self.parameters,
            "columns": self.columns,
            "rows": rows,
            "violations": self.violations,
        });
        let mut text = serde_json::to_string_pretty(&doc)?;
        text.push('\n');
        Ok(text)
    }
}
