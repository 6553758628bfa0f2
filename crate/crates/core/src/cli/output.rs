//! Result tables and their JSON, CSV and plain-text renderings.

use std::io::{self, Write};

use clap::ValueEnum;
use serde_json::{json, Map, Value as Json};

use crate::numerics::Scalar;

pub const SCHEMA_VERSION: u64 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
    Plain,
}

/// One table cell. Numbers travel as decimal strings (`p/q` for exact
/// rationals) so JSON never rounds them.
#[derive(Debug, Clone, PartialEq)]
pub enum Value {
    Text(String),
    Count(u64),
    Flag(bool),
    Missing,
}

impl Value {
    fn render(&self) -> String {
        match self {
            Value::Text(s) => s.clone(),
            Value::Count(n) => n.to_string(),
            Value::Flag(b) => b.to_string(),
            Value::Missing => String::new(),
        }
    }

    fn json(&self) -> Json {
        match self {
            Value::Text(s) => Json::String(s.clone()),
            Value::Count(n) => json!(n),
            Value::Flag(b) => json!(b),
            Value::Missing => Json::Null,
        }
    }
}

impl From<&Scalar> for Value {
    fn from(s: &Scalar) -> Self {
        Value::Text(s.to_string())
    }
}

impl From<Scalar> for Value {
    fn from(s: Scalar) -> Self {
        Value::Text(s.to_string())
    }
}

impl From<f64> for Value {
    fn from(x: f64) -> Self {
        Value::Text(crate::numerics::format_f64(x))
    }
}

impl From<usize> for Value {
    fn from(n: usize) -> Self {
        Value::Count(n as u64)
    }
}

impl From<u64> for Value {
    fn from(n: u64) -> Self {
        Value::Count(n)
    }
}

impl From<bool> for Value {
    fn from(b: bool) -> Self {
        Value::Flag(b)
    }
}

impl From<&str> for Value {
    fn from(s: &str) -> Self {
        Value::Text(s.to_string())
    }
}

impl From<String> for Value {
    fn from(s: String) -> Self {
        Value::Text(s)
    }
}

impl<T: Into<Value>> From<Option<T>> for Value {
    fn from(v: Option<T>) -> Self {
        v.map_or(Value::Missing, Into::into)
    }
}

/// A homogeneous result table plus the resolved inputs that produced it.
#[derive(Debug, Clone, PartialEq)]
pub struct Report {
    pub command: String,
    pub params: Vec<(String, Value)>,
    pub columns: Vec<String>,
    pub rows: Vec<Vec<Value>>,
}

impl Report {
    pub fn new(command: &str, columns: &[&str]) -> Self {
        Self {
            command: command.to_string(),
            params: Vec::new(),
            columns: columns.iter().map(|c| c.to_string()).collect(),
            rows: Vec::new(),
        }
    }

    pub fn param(&mut self, key: &str, value: impl Into<Value>) -> &mut Self {
        self.params.push((key.to_string(), value.into()));
        self
    }

    pub fn push(&mut self, row: Vec<Value>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }
}

pub fn write_output(report: &Report, format: Format, out: &mut dyn Write) -> io::Result<()> {
    match format {
        Format::Json => write_json(report, out),
        Format::Csv => write_csv(report, out),
        Format::Plain => write_plain(report, out),
    }
}

fn write_json(report: &Report, out: &mut dyn Write) -> io::Result<()> {
    let params: Map<String, Json> = report
        .params
        .iter()
        .map(|(k, v)| (k.clone(), v.json()))
        .collect();
    let results: Vec<Json> = report
        .rows
        .iter()
        .map(|row| {
            Json::Object(
                report
                    .columns
                    .iter()
                    .cloned()
                    .zip(row.iter().map(Value::json))
                    .collect(),
            )
        })
        .collect();
    let doc = json!({
        "schema_version": SCHEMA_VERSION,
        "command": report.command,
        "params": params,
        "results": results,
    });
    serde_json::to_writer_pretty(&mut *out, &doc)?;
    writeln!(out)
}

fn write_csv(report: &Report, out: &mut dyn Write) -> io::Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(&report.columns)?;
    for row in &report.rows {
        w.write_record(row.iter().map(Value::render))?;
    }
    w.flush()
}

fn write_plain(report: &Report, out: &mut dyn Write) -> io::Result<()> {
    let cells: Vec<Vec<String>> = report
        .rows
        .iter()
        .map(|r| r.iter().map(Value::render).collect())
        .collect();
    let widths: Vec<usize> = report
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
    let line = |out: &mut dyn Write, fields: &[String]| -> io::Result<()> {
        let mut s = String::new();
        for (i, f) in fields.iter().enumerate() {
            if i > 0 {
                s.push_str("  ");
            }
            s.push_str(f);
            s.extend(std::iter::repeat_n(' ', widths[i] - f.chars().count()));
        }
        writeln!(out, "{}", s.trim_end())
    };
    line(out, &report.columns)?;
    for r in &cells {
        line(out, r)?;
    }
    Ok(())
}
