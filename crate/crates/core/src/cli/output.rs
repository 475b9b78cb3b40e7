//! CSV and JSON emission.
//!
//! CSV files start with `#` comment lines holding the tool version and the
//! full configuration, then a header row. JSON reports are one object with
//! `config`, `results` and `diagnostics`.

use std::io::Write;
use std::path::Path;

use serde::Serialize;
use serde_json::{json, Value};

use super::CliError;

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(untagged)]
pub enum Cell {
    F(f64),
    I(i64),
    B(bool),
    S(String),
}

impl Cell {
    fn render(&self) -> String {
        match self {
            Cell::F(x) if x.is_finite() => serde_json::to_string(x).expect("finite float"),
            Cell::F(x) => format!("{x}"),
            Cell::I(x) => format!("{x}"),
            Cell::B(b) => format!("{b}"),
            Cell::S(s) => s.clone(),
        }
    }
}

impl From<f64> for Cell {
    fn from(x: f64) -> Self {
        Cell::F(x)
    }
}

impl From<bool> for Cell {
    fn from(b: bool) -> Self {
        Cell::B(b)
    }
}

impl From<usize> for Cell {
    fn from(n: usize) -> Self {
        Cell::I(n as i64)
    }
}

impl From<i64> for Cell {
    fn from(n: i64) -> Self {
        Cell::I(n)
    }
}

impl From<&str> for Cell {
    fn from(s: &str) -> Self {
        Cell::S(s.to_string())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Report {
    pub columns: Vec<&'static str>,
    pub rows: Vec<Vec<Cell>>,
    /// Structured results for JSON; the table is used when this is `null`.
    pub results: Value,
    pub diagnostics: Value,
    /// Short summary printed alongside the main output.
    pub summary: Option<Value>,
}

impl Report {
    pub fn table(columns: Vec<&'static str>, rows: Vec<Vec<Cell>>) -> Self {
        Report { columns, rows, results: Value::Null, diagnostics: json!({}), summary: None }
    }

    fn table_json(&self) -> Value {
        let rows: Vec<Value> = self
            .rows
            .iter()
            .map(|r| {
                let obj: serde_json::Map<String, Value> =
                    self.columns.iter().zip(r).map(|(c, v)| (c.to_string(), json!(v))).collect();
                Value::Object(obj)
            })
            .collect();
        Value::Array(rows)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Json,
}

impl std::str::FromStr for Format {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "csv" => Ok(Format::Csv),
            "json" => Ok(Format::Json),
            _ => Err(format!("unknown format `{s}`")),
        }
    }
}

pub fn render_csv(report: &Report, version: &str, config: &Value) -> Result<Vec<u8>, CliError> {
    let mut out = Vec::new();
    writeln!(out, "# {version}").expect("write to memory");
    writeln!(out, "# config: {config}").expect("write to memory");
    let mut w = csv::Writer::from_writer(out);
    let io = |e: csv::Error| CliError::Io(e.to_string());
    w.write_record(&report.columns).map_err(io)?;
    for row in &report.rows {
        w.write_record(row.iter().map(Cell::render)).map_err(io)?;
    }
    w.into_inner().map_err(|e| CliError::Io(e.to_string()))
}

pub fn render_json(report: &Report, version: &str, config: &Value) -> Result<Vec<u8>, CliError> {
    let results = if report.results.is_null() { report.table_json() } else { report.results.clone() };
    let doc = json!({
        "version": version,
        "config": config,
        "results": results,
        "diagnostics": report.diagnostics,
    });
    let mut out = serde_json::to_vec_pretty(&doc).map_err(|e| CliError::Io(e.to_string()))?;
    out.push(b'\n');
    Ok(out)
}

/// Writes to `path`, or to standard output when `path` is `None` or `-`.
pub fn emit(bytes: &[u8], path: Option<&Path>) -> Result<(), CliError> {
    match path {
        Some(p) if p.as_os_str() != "-" => {
            std::fs::write(p, bytes).map_err(|e| CliError::Io(format!("cannot write {}: {e}", p.display())))
        }
        _ => {
            let mut so = std::io::stdout().lock();
            so.write_all(bytes).and_then(|_| so.flush()).map_err(|e| CliError::Io(e.to_string()))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn csv_has_comments_then_header() {
        let r = Report::table(vec!["a", "b"], vec![vec![1.5.into(), "x,y".into()]]);
        let s = String::from_utf8(render_csv(&r, "nhadm 0.1.0", &json!({"k": 1})).unwrap()).unwrap();
        assert_eq!(s, "# nhadm 0.1.0\n# config: {\"k\":1}\na,b\n1.5,\"x,y\"\n");
    }

    #[test]
    fn json_falls_back_to_table() {
        let r = Report::table(vec!["a"], vec![vec![f64::NAN.into()]]);
        let v: Value = serde_json::from_slice(&render_json(&r, "v", &json!({})).unwrap()).unwrap();
        assert_eq!(v["results"][0]["a"], Value::Null);
        assert!(v.get("diagnostics").is_some());
    }
}
