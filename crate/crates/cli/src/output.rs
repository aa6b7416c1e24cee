//! CSV and JSON tables with a commented provenance header.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Json,
}

impl Format {
    pub fn extension(self) -> &'static str {
        match self {
            Format::Csv => "csv",
            Format::Json => "json",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Int(i64),
    Float(f64),
    Bool(bool),
}

impl Cell {
    fn csv(&self) -> String {
        match *self {
            Cell::Int(v) => v.to_string(),
            Cell::Float(v) => format_float(v),
            Cell::Bool(v) => v.to_string(),
        }
    }

    fn json(&self) -> serde_json::Value {
        match *self {
            Cell::Int(v) => v.into(),
            Cell::Float(v) if v.is_finite() => v.into(),
            Cell::Float(_) => serde_json::Value::Null,
            Cell::Bool(v) => v.into(),
        }
    }

    pub fn as_f64(&self) -> f64 {
        match *self {
            Cell::Int(v) => v as f64,
            Cell::Float(v) => v,
            Cell::Bool(v) => v as u8 as f64,
        }
    }
}

impl From<f64> for Cell {
    fn from(v: f64) -> Self {
        Cell::Float(v)
    }
}

impl From<usize> for Cell {
    fn from(v: usize) -> Self {
        Cell::Int(v as i64)
    }
}

impl From<bool> for Cell {
    fn from(v: bool) -> Self {
        Cell::Bool(v)
    }
}

/// 17 significant digits, `.` decimal point.
pub fn format_float(v: f64) -> String {
    if v.is_nan() {
        "NaN".into()
    } else if v.is_infinite() {
        if v > 0.0 { "inf".into() } else { "-inf".into() }
    } else {
        format!("{v:.16e}")
    }
}

/// A named table plus `key = value` header lines.
#[derive(Debug, Clone, Default)]
pub struct Table {
    pub name: String,
    pub header: BTreeMap<String, String>,
    pub columns: Vec<String>,
    pub rows: Vec<Vec<Cell>>,
}

impl Table {
    pub fn new(name: &str, columns: &[&str]) -> Self {
        Self {
            name: name.to_string(),
            header: BTreeMap::new(),
            columns: columns.iter().map(|c| c.to_string()).collect(),
            rows: Vec::new(),
        }
    }

    pub fn meta(mut self, key: &str, value: impl ToString) -> Self {
        self.header.insert(key.to_string(), value.to_string());
        self
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        assert_eq!(row.len(), self.columns.len(), "row width for table {}", self.name);
        self.rows.push(row);
    }

    pub fn column(&self, name: &str) -> Option<Vec<f64>> {
        let idx = self.columns.iter().position(|c| c == name)?;
        Some(self.rows.iter().map(|r| r[idx].as_f64()).collect())
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        writeln!(out, "# coherence-orders {}", env!("CARGO_PKG_VERSION")).unwrap();
        writeln!(out, "# table = {}", self.name).unwrap();
        for (k, v) in &self.header {
            writeln!(out, "# {k} = {v}").unwrap();
        }
        writeln!(out, "{}", self.columns.join(",")).unwrap();
        for row in &self.rows {
            let cells: Vec<String> = row.iter().map(Cell::csv).collect();
            writeln!(out, "{}", cells.join(",")).unwrap();
        }
        out
    }

    pub fn to_json(&self) -> String {
        let mut header = self.header.clone();
        header.insert("version".into(), env!("CARGO_PKG_VERSION").into());
        let value = serde_json::json!({
            "table": self.name,
            "header": header,
            "columns": self.columns,
            "rows": self.rows.iter().map(|r| r.iter().map(Cell::json).collect::<Vec<_>>()).collect::<Vec<_>>(),
        });
        let mut s = serde_json::to_string_pretty(&value).expect("table serializes");
        s.push('\n');
        s
    }

    pub fn render(&self, format: Format) -> String {
        match format {
            Format::Csv => self.to_csv(),
            Format::Json => self.to_json(),
        }
    }

    /// Writes `<dir>/<name>.<ext>` and returns the path.
    pub fn write(&self, dir: &Path, format: Format) -> Result<PathBuf, CliError> {
        let path = dir.join(format!("{}.{}", self.name, format.extension()));
        write_file(&path, &self.render(format))?;
        Ok(path)
    }
}

pub fn write_file(path: &Path, contents: &str) -> Result<(), CliError> {
    if let Some(parent) = path.parent() {
        fs::create_dir_all(parent).map_err(|e| CliError::io(parent, e))?;
    }
    fs::write(path, contents).map_err(|e| CliError::io(path, e))
}

/// Parsed CSV produced by [`Table::to_csv`]: header lines and raw cell strings.
#[derive(Debug, Clone, PartialEq)]
pub struct ParsedCsv {
    pub header: Vec<String>,
    pub columns: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

pub fn parse_csv(text: &str) -> ParsedCsv {
    let mut header = Vec::new();
    let mut lines = text.lines().filter(|l| {
        if l.starts_with('#') {
            header.push(l.to_string());
            false
        } else {
            !l.trim().is_empty()
        }
    });
    let columns = lines
        .next()
        .map(|l| l.split(',').map(str::to_string).collect())
        .unwrap_or_default();
    let rows = lines.map(|l| l.split(',').map(str::to_string).collect()).collect();
    ParsedCsv { header, columns, rows }
}
