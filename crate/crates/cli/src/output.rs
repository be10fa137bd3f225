//! Result emission as JSON documents or flat CSV tables.
//!
//! JSON floats use serde_json's shortest round-trip form; CSV floats carry 17
//! significant digits. Object keys are sorted, so output is byte-stable for a
//! fixed configuration.

use std::io::Write;
use std::path::Path;

use serde::Serialize;
use serde_json::{json, Value};

use crate::config::{Format, RunConfig};
use crate::error::{CliError, CliResult};

#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Int(u64),
    Float(f64),
    Text(String),
    Bool(bool),
}

impl Cell {
    fn render(&self) -> String {
        match self {
            Cell::Int(v) => v.to_string(),
            Cell::Float(v) => format_float(*v),
            Cell::Text(s) => s.clone(),
            Cell::Bool(b) => b.to_string(),
        }
    }
}

impl From<usize> for Cell {
    fn from(v: usize) -> Self {
        Cell::Int(v as u64)
    }
}

impl From<f64> for Cell {
    fn from(v: f64) -> Self {
        Cell::Float(v)
    }
}

impl From<&str> for Cell {
    fn from(v: &str) -> Self {
        Cell::Text(v.to_string())
    }
}

impl From<bool> for Cell {
    fn from(v: bool) -> Self {
        Cell::Bool(v)
    }
}

/// Seventeen significant digits, enough to round-trip any `f64`.
pub fn format_float(v: f64) -> String {
    if v.is_finite() {
        format!("{v:.16e}")
    } else {
        v.to_string()
    }
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct Table {
    pub header: Vec<&'static str>,
    pub rows: Vec<Vec<Cell>>,
}

impl Table {
    pub fn new(header: &[&'static str]) -> Self {
        Self { header: header.to_vec(), rows: Vec::new() }
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        debug_assert_eq!(row.len(), self.header.len());
        self.rows.push(row);
    }
}

/// A command's payload in both output shapes.
#[derive(Debug, Clone, PartialEq)]
pub struct Report {
    pub data: Value,
    pub table: Table,
    /// Basis-pursuit solves that stopped at the iteration cap.
    pub nonconverged: usize,
}

impl Report {
    pub fn new(data: impl Serialize, table: Table) -> CliResult<Self> {
        let data = serde_json::to_value(data).map_err(|e| CliError::Io(std::io::Error::other(e)))?;
        Ok(Self { data, table, nonconverged: 0 })
    }
}

pub fn render(report: &Report, config: &RunConfig) -> CliResult<Vec<u8>> {
    match config.output_format {
        Format::Json => render_json(report, config),
        Format::Csv => render_csv(&report.table),
    }
}

fn render_json(report: &Report, config: &RunConfig) -> CliResult<Vec<u8>> {
    let doc = json!({
        "meta": {
            "command": config.command,
            "parameters": config.params,
            "seed": config.seed,
            "version": env!("CARGO_PKG_VERSION"),
        },
        "data": report.data,
    });
    let mut bytes = serde_json::to_vec_pretty(&doc).map_err(|e| CliError::Io(std::io::Error::other(e)))?;
    bytes.push(b'\n');
    Ok(bytes)
}

fn render_csv(table: &Table) -> CliResult<Vec<u8>> {
    let mut writer = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(Vec::new());
    writer.write_record(&table.header).map_err(csv_io)?;
    for row in &table.rows {
        writer.write_record(row.iter().map(Cell::render)).map_err(csv_io)?;
    }
    writer.into_inner().map_err(|e| CliError::Io(std::io::Error::other(e.to_string())))
}

fn csv_io(err: csv::Error) -> CliError {
    CliError::Io(std::io::Error::other(err))
}

/// Writes `bytes` to `path` through a temporary file in the same directory,
/// or to standard output when no path is given.
pub fn emit(bytes: &[u8], path: Option<&Path>) -> CliResult<()> {
    match path {
        None => {
            let mut out = std::io::stdout().lock();
            out.write_all(bytes)?;
            out.flush()?;
        }
        Some(path) => {
            let dir = match path.parent() {
                Some(p) if !p.as_os_str().is_empty() => p,
                _ => Path::new("."),
            };
            let mut tmp = tempfile::NamedTempFile::new_in(dir)?;
            tmp.write_all(bytes)?;
            tmp.as_file().sync_all()?;
            tmp.persist(path).map_err(|e| CliError::Io(e.error))?;
        }
    }
    Ok(())
}
