//! Experiment drivers behind the command-line tool.
//!
//! Each driver takes a serde config, runs, and returns a [`Table`]. Output
//! files start with the resolved config, so any output can be fed back as
//! `--config` to regenerate it:
//!
//! ```text
//! # command: phase
//! # config: {"n":200,...,"seed":0}
//! # nondeterministic: time_s
//! ratio,m,successes,...
//! ```
//!
//! JSON output carries the same information under `command`, `config` and
//! `nondeterministic`, with the rows as objects.

use std::fmt;
use std::fs;
use std::io::Write;
use std::path::Path;

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use serde_json::{json, Map};

use crate::error::{Error, Result};

pub mod bounds_table;
pub mod learned;
pub mod oneshot;
pub mod phase;
pub mod ut_sweep;
pub mod verify;

pub use bounds_table::{bounds_table, BoundsTableConfig};
pub use learned::{eval_models, train_models, LearnedTaskConfig, TrainRun};
pub use oneshot::{gen_signals, solve_signal, GenConfig, Method, SolveConfig};
pub use phase::{phase, PhaseConfig};
pub use ut_sweep::{ut_sweep, UtSweep, UtSweepConfig};
pub use verify::{verify, width_mc, CheckResult, Report, VerifyConfig, WidthCase, WidthMcConfig};

const CONFIG_PREFIX: &str = "# config: ";
const COMMAND_PREFIX: &str = "# command: ";
const NONDET_PREFIX: &str = "# nondeterministic: ";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    #[default]
    Csv,
    Json,
}

impl std::str::FromStr for Format {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "csv" => Ok(Format::Csv),
            "json" => Ok(Format::Json),
            other => Err(Error::Usage(format!("unknown format '{other}' (expected csv or json)"))),
        }
    }
}

/// One table cell. Displays as it appears in CSV output.
#[derive(Debug, Clone, PartialEq)]
pub enum Value {
    Int(i64),
    Float(f64),
    Bool(bool),
    Text(String),
    Missing,
}

impl Value {
    pub fn as_f64(&self) -> Option<f64> {
        match *self {
            Value::Int(i) => Some(i as f64),
            Value::Float(f) => Some(f),
            _ => None,
        }
    }

    fn to_json(&self) -> serde_json::Value {
        match self {
            Value::Int(i) => json!(i),
            // non-finite floats have no JSON form
            Value::Float(f) if f.is_finite() => json!(f),
            Value::Float(f) => json!(f.to_string()),
            Value::Bool(b) => json!(b),
            Value::Text(s) => json!(s),
            Value::Missing => serde_json::Value::Null,
        }
    }
}

impl fmt::Display for Value {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Value::Int(i) => write!(f, "{i}"),
            Value::Float(v) => write!(f, "{v}"),
            Value::Bool(b) => write!(f, "{b}"),
            Value::Text(s) => f.write_str(s),
            Value::Missing => Ok(()),
        }
    }
}

impl From<f64> for Value {
    fn from(v: f64) -> Self {
        Value::Float(v)
    }
}

impl From<usize> for Value {
    fn from(v: usize) -> Self {
        Value::Int(v as i64)
    }
}

impl From<u64> for Value {
    fn from(v: u64) -> Self {
        Value::Int(v as i64)
    }
}

impl From<bool> for Value {
    fn from(v: bool) -> Self {
        Value::Bool(v)
    }
}

impl From<&str> for Value {
    fn from(v: &str) -> Self {
        Value::Text(v.into())
    }
}

impl From<String> for Value {
    fn from(v: String) -> Self {
        Value::Text(v)
    }
}

impl<T: Into<Value>> From<Option<T>> for Value {
    fn from(v: Option<T>) -> Self {
        v.map_or(Value::Missing, Into::into)
    }
}

/// Rows of named columns.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Table {
    pub columns: Vec<String>,
    pub rows: Vec<Vec<Value>>,
    /// Columns whose values change between runs (wall-clock times).
    pub nondeterministic: Vec<String>,
}

impl Table {
    pub fn new(columns: &[&str]) -> Self {
        Self {
            columns: columns.iter().map(|c| c.to_string()).collect(),
            ..Default::default()
        }
    }

    pub fn push(&mut self, row: Vec<Value>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }

    pub fn column(&self, name: &str) -> Option<usize> {
        self.columns.iter().position(|c| c == name)
    }

    /// Numeric values of a column, `None` for text or missing cells.
    pub fn floats(&self, name: &str) -> Vec<Option<f64>> {
        match self.column(name) {
            Some(j) => self.rows.iter().map(|r| r[j].as_f64()).collect(),
            None => Vec::new(),
        }
    }

    /// Copy without the nondeterministic columns.
    pub fn deterministic(&self) -> Table {
        let keep: Vec<usize> = (0..self.columns.len())
            .filter(|&j| !self.nondeterministic.contains(&self.columns[j]))
            .collect();
        Table {
            columns: keep.iter().map(|&j| self.columns[j].clone()).collect(),
            rows: self
                .rows
                .iter()
                .map(|r| keep.iter().map(|&j| r[j].clone()).collect())
                .collect(),
            nondeterministic: Vec::new(),
        }
    }
}

/// Writes `table` with its provenance header.
pub fn write_output<W: Write, C: Serialize>(
    mut out: W,
    format: Format,
    command: &str,
    config: &C,
    table: &Table,
) -> Result<()> {
    let config = serde_json::to_value(config)?;
    match format {
        Format::Csv => {
            writeln!(out, "{COMMAND_PREFIX}{command}")?;
            writeln!(out, "{CONFIG_PREFIX}{}", serde_json::to_string(&config)?)?;
            if !table.nondeterministic.is_empty() {
                writeln!(out, "{NONDET_PREFIX}{}", table.nondeterministic.join(","))?;
            }
            let mut w = csv::Writer::from_writer(&mut out);
            w.write_record(&table.columns).map_err(csv_err)?;
            for row in &table.rows {
                w.write_record(row.iter().map(Value::to_string)).map_err(csv_err)?;
            }
            w.flush()?;
        }
        Format::Json => {
            let rows: Vec<serde_json::Value> = table
                .rows
                .iter()
                .map(|r| {
                    let obj: Map<String, serde_json::Value> = table
                        .columns
                        .iter()
                        .cloned()
                        .zip(r.iter().map(Value::to_json))
                        .collect();
                    serde_json::Value::Object(obj)
                })
                .collect();
            let doc = json!({
                "command": command,
                "config": config,
                "nondeterministic": table.nondeterministic,
                "rows": rows,
            });
            serde_json::to_writer_pretty(&mut out, &doc)?;
            writeln!(out)?;
        }
    }
    Ok(())
}

/// Same as [`write_output`], to a file or to stdout when `path` is `None`.
pub fn emit<C: Serialize>(path: Option<&Path>, format: Format, command: &str, config: &C, table: &Table) -> Result<()> {
    match path {
        Some(p) => {
            let mut buf = Vec::new();
            write_output(&mut buf, format, command, config, table)?;
            fs::write(p, buf)?;
            Ok(())
        }
        None => write_output(std::io::stdout().lock(), format, command, config, table),
    }
}

fn csv_err(e: csv::Error) -> Error {
    Error::Io(std::io::Error::other(e))
}

/// Reads a config for `command` from a plain JSON config file, a JSON
/// output document, or a CSV output with a `# config:` header line.
pub fn load_config<C: DeserializeOwned>(path: impl AsRef<Path>, command: &str) -> Result<C> {
    let path = path.as_ref();
    let text = fs::read_to_string(path)?;
    parse_config(&text, command).map_err(|e| match e {
        Error::Config(msg) => Error::Config(format!("{}: {msg}", path.display())),
        other => other,
    })
}

pub fn parse_config<C: DeserializeOwned>(text: &str, command: &str) -> Result<C> {
    let check_command = |found: Option<&str>| match found {
        Some(c) if c != command => Err(Error::Config(format!("file was written by '{c}', not '{command}'"))),
        _ => Ok(()),
    };
    if text.trim_start().starts_with('{') {
        let mut doc: serde_json::Value = serde_json::from_str(text)?;
        if let Some(obj) = doc.as_object_mut() {
            if obj.contains_key("config") && obj.contains_key("rows") {
                check_command(obj.get("command").and_then(|c| c.as_str()))?;
                let cfg = obj.remove("config").unwrap_or_default();
                return serde_json::from_value(cfg).map_err(|e| Error::Config(e.to_string()));
            }
        }
        return serde_json::from_value(doc).map_err(|e| Error::Config(e.to_string()));
    }
    let mut found_command = None;
    for line in text.lines() {
        if let Some(c) = line.strip_prefix(COMMAND_PREFIX) {
            found_command = Some(c.trim());
        } else if let Some(cfg) = line.strip_prefix(CONFIG_PREFIX) {
            check_command(found_command)?;
            return serde_json::from_str(cfg).map_err(|e| Error::Config(e.to_string()));
        } else if !line.starts_with('#') {
            break;
        }
    }
    Err(Error::Config("no JSON config and no '# config:' header found".into()))
}
