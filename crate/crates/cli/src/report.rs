//! Report assembly and rendering.

use serde::Deserialize;
use serde_json::{json, Map, Value};

use crate::error::CliError;

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Json,
    Csv,
    #[default]
    Table,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Text(String),
    Num(f64),
    Int(u64),
}

impl Cell {
    fn csv(&self) -> String {
        match self {
            Cell::Text(s) => s.clone(),
            Cell::Num(x) => format!("{x}"),
            Cell::Int(n) => n.to_string(),
        }
    }

    fn table(&self) -> String {
        match self {
            Cell::Text(s) => s.clone(),
            Cell::Num(x) if x.abs() < 5e-7 => format!("{:.6}", 0.0),
            Cell::Num(x) => format!("{x:.6}"),
            Cell::Int(n) => n.to_string(),
        }
    }
}

impl From<&str> for Cell {
    fn from(s: &str) -> Self {
        Cell::Text(s.to_string())
    }
}

impl From<String> for Cell {
    fn from(s: String) -> Self {
        Cell::Text(s)
    }
}

impl From<f64> for Cell {
    fn from(x: f64) -> Self {
        Cell::Num(x)
    }
}

impl From<usize> for Cell {
    fn from(n: usize) -> Self {
        Cell::Int(n as u64)
    }
}

impl From<u64> for Cell {
    fn from(n: u64) -> Self {
        Cell::Int(n)
    }
}

/// One command's output: a flat table for csv/table and structured records
/// for json.
#[derive(Debug, Clone)]
pub struct Report {
    pub command: &'static str,
    pub seed: u64,
    /// Lines printed above the table, and top-level json fields.
    pub summary: Vec<(&'static str, Value)>,
    pub columns: Vec<&'static str>,
    pub rows: Vec<Vec<Cell>>,
    pub records: Vec<Value>,
}

impl Report {
    pub fn new(command: &'static str, seed: u64, columns: Vec<&'static str>) -> Self {
        Report {
            command,
            seed,
            summary: Vec::new(),
            columns,
            rows: Vec::new(),
            records: Vec::new(),
        }
    }

    pub fn summary(&mut self, key: &'static str, value: Value) {
        self.summary.push((key, value));
    }

    pub fn push(&mut self, row: Vec<Cell>, record: Value) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
        self.records.push(record);
    }

    pub fn render(&self, format: Format) -> Result<String, CliError> {
        match format {
            Format::Json => self.json(),
            Format::Csv => self.csv(),
            Format::Table => Ok(self.table()),
        }
    }

    fn json(&self) -> Result<String, CliError> {
        let mut top = Map::new();
        top.insert("schema_version".into(), json!(SCHEMA_VERSION));
        top.insert("command".into(), json!(self.command));
        top.insert("seed".into(), json!(self.seed));
        for (k, v) in &self.summary {
            top.insert((*k).into(), v.clone());
        }
        top.insert("records".into(), Value::Array(self.records.clone()));
        let mut s = serde_json::to_string_pretty(&Value::Object(top))?;
        s.push('\n');
        Ok(s)
    }

    fn csv(&self) -> Result<String, CliError> {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(&self.columns)?;
        for row in &self.rows {
            w.write_record(row.iter().map(Cell::csv))?;
        }
        let bytes = w.into_inner().map_err(|e| CliError::Io(e.into_error()))?;
        Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
    }

    fn table(&self) -> String {
        let mut out = String::new();
        for (k, v) in &self.summary {
            let v = match v {
                Value::String(s) => s.clone(),
                other => other.to_string(),
            };
            out.push_str(&format!("{k}: {v}\n"));
        }
        let cells: Vec<Vec<String>> = self.rows.iter().map(|r| r.iter().map(Cell::table).collect()).collect();
        let widths: Vec<usize> = self
            .columns
            .iter()
            .enumerate()
            .map(|(i, c)| {
                cells
                    .iter()
                    .map(|r| r[i].chars().count())
                    .chain([c.len()])
                    .max()
                    .unwrap_or(0)
            })
            .collect();
        let line = |items: Vec<String>| -> String {
            let padded: Vec<String> = items
                .iter()
                .zip(&widths)
                .map(|(s, &w)| format!("{s}{}", " ".repeat(w - s.chars().count())))
                .collect();
            format!("{}\n", padded.join("  ").trim_end())
        };
        if !self.columns.is_empty() {
            out.push_str(&line(self.columns.iter().map(|c| c.to_string()).collect()));
            for r in cells {
                out.push_str(&line(r));
            }
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample() -> Report {
        let mut r = Report::new("demo", 3, vec!["name", "value"]);
        r.summary("note", json!("ok"));
        r.push(vec!["a".into(), 0.5.into()], json!({"name": "a", "value": 0.5}));
        r.push(vec!["bb".into(), 1.0.into()], json!({"name": "bb", "value": 1.0}));
        r
    }

    #[test]
    fn json_carries_schema_version() {
        let v: Value = serde_json::from_str(&sample().render(Format::Json).unwrap()).unwrap();
        assert_eq!(v["schema_version"], json!(SCHEMA_VERSION));
        assert_eq!(v["records"][1]["name"], json!("bb"));
    }

    #[test]
    fn csv_and_table_layouts() {
        assert_eq!(sample().render(Format::Csv).unwrap(), "name,value\na,0.5\nbb,1\n");
        let t = sample().render(Format::Table).unwrap();
        assert_eq!(t, "note: ok\nname  value\na     0.500000\nbb    1.000000\n");
    }
}
