//! Report rendering. CSV floats use `{:.16e}` (17 significant digits, so
//! every value parses back to the same `f64`); JSON uses serde_json's
//! shortest round-trip form.

use std::io::Write;

use clap::ValueEnum;
use serde::Serialize;
use serde_json::{Map, Value};

use crate::error::{CliError, CliResult};

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Int(i64),
    Num(f64),
    Text(String),
}

impl Cell {
    fn csv(&self) -> String {
        match self {
            Cell::Int(i) => i.to_string(),
            Cell::Num(x) => format_float(*x),
            Cell::Text(s) => s.clone(),
        }
    }

    fn json(&self) -> Value {
        match self {
            Cell::Int(i) => Value::from(*i),
            Cell::Num(x) => json_float(*x),
            Cell::Text(s) => Value::from(s.clone()),
        }
    }
}

impl From<f64> for Cell {
    fn from(x: f64) -> Self {
        Cell::Num(x)
    }
}

impl From<usize> for Cell {
    fn from(i: usize) -> Self {
        Cell::Int(i as i64)
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

pub fn format_float(x: f64) -> String {
    if x.is_finite() {
        format!("{x:.16e}")
    } else if x.is_nan() {
        "nan".into()
    } else if x > 0.0 {
        "inf".into()
    } else {
        "-inf".into()
    }
}

/// JSON has no infinities; they become the strings `"inf"` / `"-inf"`.
pub fn json_float(x: f64) -> Value {
    serde_json::Number::from_f64(x)
        .map(Value::Number)
        .unwrap_or_else(|| Value::from(format_float(x)))
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct Table {
    pub headers: Vec<String>,
    pub rows: Vec<Vec<Cell>>,
}

impl Table {
    pub fn new(headers: &[&str]) -> Self {
        Self {
            headers: headers.iter().map(|h| h.to_string()).collect(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        debug_assert_eq!(row.len(), self.headers.len());
        self.rows.push(row);
    }

    pub fn to_json(&self) -> Value {
        Value::Array(
            self.rows
                .iter()
                .map(|row| {
                    let mut m = Map::new();
                    for (h, c) in self.headers.iter().zip(row) {
                        m.insert(h.clone(), c.json());
                    }
                    Value::Object(m)
                })
                .collect(),
        )
    }
}

/// Result of one command: structured data, and optionally the same data as
/// a table for CSV.
#[derive(Debug, Clone, PartialEq)]
pub struct Report {
    pub json: Value,
    pub table: Option<Table>,
    pub default_format: Format,
}

impl Report {
    pub fn structured(json: Value) -> Self {
        Self {
            json,
            table: None,
            default_format: Format::Json,
        }
    }

    pub fn tabular(table: Table, extra: Option<(&str, Value)>) -> Self {
        let mut m = Map::new();
        m.insert("rows".into(), table.to_json());
        if let Some((k, v)) = extra {
            m.insert(k.into(), v);
        }
        Self {
            json: Value::Object(m),
            table: Some(table),
            default_format: Format::Csv,
        }
    }

    pub fn render(&self, format: Option<Format>) -> CliResult<Vec<u8>> {
        match format.unwrap_or(self.default_format) {
            Format::Json => {
                let mut s = serde_json::to_string_pretty(&self.json).map_err(|e| CliError::Numeric(e.to_string()))?;
                s.push('\n');
                Ok(s.into_bytes())
            }
            Format::Csv => {
                let table = match &self.table {
                    Some(t) => t.clone(),
                    None => flatten(&self.json),
                };
                write_csv(&table)
            }
        }
    }
}

fn write_csv(table: &Table) -> CliResult<Vec<u8>> {
    let mut w = csv::Writer::from_writer(Vec::new());
    let io = |e: csv::Error| CliError::Numeric(e.to_string());
    w.write_record(&table.headers).map_err(io)?;
    for row in &table.rows {
        w.write_record(row.iter().map(Cell::csv)).map_err(io)?;
    }
    w.flush()?;
    w.into_inner().map_err(|e| CliError::Numeric(e.to_string()))
}

/// `key,value` rows with dotted paths for nested JSON.
fn flatten(json: &Value) -> Table {
    fn walk(prefix: &str, v: &Value, out: &mut Table) {
        match v {
            Value::Object(m) => {
                for (k, v) in m {
                    let key = if prefix.is_empty() { k.clone() } else { format!("{prefix}.{k}") };
                    walk(&key, v, out);
                }
            }
            Value::Array(a) => {
                for (i, v) in a.iter().enumerate() {
                    walk(&format!("{prefix}.{i}"), v, out);
                }
            }
            Value::Number(n) => {
                let cell = match n.as_i64() {
                    Some(i) if !n.is_f64() => Cell::Int(i),
                    _ => Cell::Num(n.as_f64().unwrap_or(f64::NAN)),
                };
                out.push(vec![Cell::Text(prefix.into()), cell]);
            }
            Value::String(s) => out.push(vec![Cell::Text(prefix.into()), Cell::Text(s.clone())]),
            Value::Bool(b) => out.push(vec![Cell::Text(prefix.into()), Cell::Text(b.to_string())]),
            Value::Null => out.push(vec![Cell::Text(prefix.into()), Cell::Text(String::new())]),
        }
    }
    let mut t = Table::new(&["key", "value"]);
    walk("", json, &mut t);
    t
}

pub fn emit(bytes: &[u8], out: Option<&std::path::Path>) -> CliResult<()> {
    match out {
        Some(path) => std::fs::write(path, bytes).map_err(|e| CliError::input(format!("{}: {e}", path.display()))),
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout.write_all(bytes)?;
            stdout.flush()?;
            Ok(())
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn floats_round_trip_through_csv() {
        for x in [0.1, 1.0 / 3.0, 7.0 / 16.0, 1e-300, -2.5e17, std::f64::consts::PI] {
            let s = format_float(x);
            assert_eq!(s.parse::<f64>().unwrap(), x, "{s}");
        }
        assert_eq!(format_float(f64::INFINITY), "inf");
    }

    #[test]
    fn structured_report_flattens() {
        let r = Report::structured(serde_json::json!({"a": {"b": 1.5, "c": [1, 2]}, "d": "x"}));
        let csv = String::from_utf8(r.render(Some(Format::Csv)).unwrap()).unwrap();
        assert!(csv.starts_with("key,value\n"));
        assert!(csv.contains("a.b,1.5000000000000000e0\n"));
        assert!(csv.contains("a.c.1,2\n"));
        assert!(csv.contains("d,x\n"));
    }

    #[test]
    fn empty_table_is_header_only() {
        let t = Table::new(&["sample_id", "value"]);
        let r = Report::tabular(t, None);
        assert_eq!(r.render(None).unwrap(), b"sample_id,value\n");
    }
}
