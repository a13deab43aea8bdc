//! Tables and their CSV / JSON renderings.

use std::fs;
use std::path::{Path, PathBuf};

use crate::config::Format;
use crate::CliError;

#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Int(u64),
    Num(f64),
    Text(String),
}

impl From<u64> for Cell {
    fn from(v: u64) -> Self {
        Cell::Int(v)
    }
}

impl From<f64> for Cell {
    fn from(v: f64) -> Self {
        Cell::Num(v)
    }
}

impl From<&str> for Cell {
    fn from(v: &str) -> Self {
        Cell::Text(v.to_string())
    }
}

impl From<String> for Cell {
    fn from(v: String) -> Self {
        Cell::Text(v)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub name: String,
    pub columns: Vec<String>,
    pub rows: Vec<Vec<Cell>>,
}

impl Table {
    pub fn new(name: impl Into<String>, columns: &[&str]) -> Self {
        Self {
            name: name.into(),
            columns: columns.iter().map(|c| c.to_string()).collect(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }

    /// Two-column `quantity, value` table.
    pub fn scalars(name: impl Into<String>, items: Vec<(String, Cell)>) -> Self {
        let mut t = Self::new(name, &["quantity", "value"]);
        for (k, v) in items {
            t.push(vec![Cell::Text(k), v]);
        }
        t
    }

    pub fn to_csv(&self) -> Result<String, CliError> {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(&self.columns).map_err(csv_err)?;
        for row in &self.rows {
            w.write_record(row.iter().map(csv_cell)).map_err(csv_err)?;
        }
        let bytes = w.into_inner().map_err(|e| CliError::Io(e.to_string()))?;
        String::from_utf8(bytes).map_err(|e| CliError::Io(e.to_string()))
    }

    /// `{"columns": [...], "rows": [[...], ...]}` with floats at 17
    /// significant digits; non-finite floats become `null`.
    pub fn to_json(&self) -> String {
        let mut out = String::from("{\"columns\":[");
        let cols: Vec<String> = self.columns.iter().map(|c| json_string(c)).collect();
        out.push_str(&cols.join(","));
        out.push_str("],\"rows\":[");
        let rows: Vec<String> = self
            .rows
            .iter()
            .map(|r| format!("[{}]", r.iter().map(json_cell).collect::<Vec<_>>().join(",")))
            .collect();
        out.push_str(&rows.join(",\n"));
        out.push_str("]}\n");
        out
    }

    pub fn render(&self, format: Format) -> Result<String, CliError> {
        match format {
            Format::Csv => self.to_csv(),
            Format::Json => Ok(self.to_json()),
        }
    }

    /// Writes `<dir>/<name>.<csv|json>` and returns its path.
    pub fn write(&self, dir: &Path, format: Format) -> Result<PathBuf, CliError> {
        let ext = match format {
            Format::Csv => "csv",
            Format::Json => "json",
        };
        let path = dir.join(format!("{}.{ext}", self.name));
        fs::write(&path, self.render(format)?)
            .map_err(|e| CliError::Io(format!("cannot write {}: {e}", path.display())))?;
        Ok(path)
    }
}

fn csv_err(e: csv::Error) -> CliError {
    CliError::Io(e.to_string())
}

fn csv_cell(c: &Cell) -> String {
    match c {
        Cell::Int(v) => v.to_string(),
        Cell::Num(v) if v.is_finite() => format!("{v:.9e}"),
        Cell::Num(v) => v.to_string(),
        Cell::Text(s) => s.clone(),
    }
}

fn json_cell(c: &Cell) -> String {
    match c {
        Cell::Int(v) => v.to_string(),
        Cell::Num(v) if v.is_finite() => format!("{v:.16e}"),
        Cell::Num(_) => "null".into(),
        Cell::Text(s) => json_string(s),
    }
}

fn json_string(s: &str) -> String {
    serde_json::Value::String(s.to_string()).to_string()
}
