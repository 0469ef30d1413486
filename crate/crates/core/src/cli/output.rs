use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};

use serde_json::{Map, Value};

use super::Format;

#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Num(f64),
    Int(u64),
    Text(String),
}

impl Cell {
    fn csv(&self) -> String {
        match self {
            Cell::Num(v) => format!("{v:.16e}"),
            Cell::Int(v) => v.to_string(),
            Cell::Text(s) => s.clone(),
        }
    }

    fn json(&self) -> Value {
        match self {
            Cell::Num(v) => serde_json::Number::from_f64(*v).map_or(Value::Null, Value::Number),
            Cell::Int(v) => Value::from(*v),
            Cell::Text(s) => Value::from(s.as_str()),
        }
    }
}

impl From<f64> for Cell {
    fn from(v: f64) -> Self {
        Cell::Num(v)
    }
}

impl From<usize> for Cell {
    fn from(v: usize) -> Self {
        Cell::Int(v as u64)
    }
}

impl From<&str> for Cell {
    fn from(v: &str) -> Self {
        Cell::Text(v.to_owned())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    columns: Vec<String>,
    rows: Vec<Vec<Cell>>,
}

impl Table {
    pub fn new(columns: &[&str]) -> Self {
        Self {
            columns: columns.iter().map(|c| (*c).to_owned()).collect(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        assert_eq!(row.len(), self.columns.len(), "row width");
        self.rows.push(row);
    }

    pub fn columns(&self) -> &[String] {
        &self.columns
    }

    pub fn rows(&self) -> &[Vec<Cell>] {
        &self.rows
    }

    pub fn to_csv(&self, config: &Value) -> String {
        let mut s = format!("# config: {config}\n{}\n", self.columns.join(","));
        for row in &self.rows {
            let line: Vec<String> = row.iter().map(Cell::csv).collect();
            s.push_str(&line.join(","));
            s.push('\n');
        }
        s
    }

    pub fn to_json(&self) -> Value {
        let mut m = Map::new();
        m.insert("columns".into(), Value::from(self.columns.clone()));
        m.insert(
            "rows".into(),
            Value::Array(
                self.rows
                    .iter()
                    .map(|r| Value::Array(r.iter().map(Cell::json).collect()))
                    .collect(),
            ),
        );
        Value::Object(m)
    }
}

/// Result of one command: a table, a summary object, and the checks that failed.
#[derive(Debug, Clone, Default)]
pub struct Output {
    pub table: Option<Table>,
    pub summary: Map<String, Value>,
    pub failures: Vec<String>,
}

impl Output {
    fn document(&self, config: &Value) -> Value {
        let mut doc = self.summary.clone();
        doc.insert("config".into(), config.clone());
        if let Some(t) = &self.table {
            doc.insert("table".into(), t.to_json());
        }
        Value::Object(doc)
    }
}

/// `roots.csv` → `roots.summary.json`
pub fn summary_path(out: &Path) -> PathBuf {
    out.with_extension("summary.json")
}

/// Write the output in the requested format.
///
/// CSV mode writes the table to `out` (or stdout) and the summary next to it
/// (or on stderr); JSON mode writes one object holding config, summary and table.
pub fn emit(output: &Output, config: &Value, format: Format, out: Option<&Path>) -> io::Result<()> {
    match format {
        Format::Json => {
            let mut text = serde_json::to_string_pretty(&output.document(config))?;
            text.push('\n');
            write_to(out, &text)
        }
        Format::Csv => {
            let table = output.table.clone().unwrap_or_else(|| Table::new(&[]));
            write_to(out, &table.to_csv(config))?;
            if output.summary.is_empty() {
                return Ok(());
            }
            let mut summary = output.summary.clone();
            summary.insert("config".into(), config.clone());
            let summary = Value::Object(summary);
            match out {
                Some(path) => {
                    let mut text = serde_json::to_string_pretty(&summary)?;
                    text.push('\n');
                    fs::write(summary_path(path), text)
                }
                None => {
                    eprintln!("summary: {summary}");
                    Ok(())
                }
            }
        }
    }
}

fn write_to(out: Option<&Path>, text: &str) -> io::Result<()> {
    match out {
        Some(path) => fs::write(path, text),
        None => {
            let mut stdout = io::stdout().lock();
            stdout.write_all(text.as_bytes())?;
            stdout.flush()
        }
    }
}
