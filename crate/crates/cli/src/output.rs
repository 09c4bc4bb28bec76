use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::Path;

use serde_json::{json, Map, Value};

use crate::error::CliError;

#[derive(Clone, Debug, PartialEq)]
pub enum Cell {
    F(f64),
    I(i64),
    S(String),
}

impl Cell {
    fn text(&self) -> String {
        match self {
            Cell::F(v) if v.is_nan() => "NaN".into(),
            Cell::F(v) if v.is_infinite() => if *v > 0.0 { "inf" } else { "-inf" }.into(),
            Cell::F(v) => serde_json::to_string(v).expect("finite float"),
            Cell::I(v) => v.to_string(),
            Cell::S(s) => s.clone(),
        }
    }

    fn json(&self) -> Value {
        match self {
            Cell::F(v) if v.is_finite() => json!(v),
            Cell::F(_) => Value::String(self.text()),
            Cell::I(v) => json!(v),
            Cell::S(s) => json!(s),
        }
    }
}

impl From<f64> for Cell {
    fn from(v: f64) -> Self {
        Cell::F(v)
    }
}

impl From<usize> for Cell {
    fn from(v: usize) -> Self {
        Cell::I(v as i64)
    }
}

impl From<u64> for Cell {
    fn from(v: u64) -> Self {
        Cell::I(v as i64)
    }
}

impl From<String> for Cell {
    fn from(v: String) -> Self {
        Cell::S(v)
    }
}

impl From<&str> for Cell {
    fn from(v: &str) -> Self {
        Cell::S(v.to_string())
    }
}

#[derive(Clone, Debug, Default, PartialEq)]
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

    fn write_csv(&self, w: impl Write) -> Result<(), CliError> {
        let mut out = csv::Writer::from_writer(w);
        out.write_record(&self.headers)?;
        for row in &self.rows {
            out.write_record(row.iter().map(Cell::text))?;
        }
        out.flush()?;
        Ok(())
    }

    fn to_json(&self) -> Value {
        Value::Array(
            self.rows
                .iter()
                .map(|row| {
                    let obj: Map<String, Value> =
                        self.headers.iter().cloned().zip(row.iter().map(Cell::json)).collect();
                    Value::Object(obj)
                })
                .collect(),
        )
    }
}

/// What a command produces: an optional table and a JSON report.
#[derive(Clone, Debug)]
pub struct Artifact {
    pub table: Option<Table>,
    pub report: Value,
    pub summary: String,
    /// Set when a checked property failed; the run exits with code 2.
    pub violation: Option<String>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, clap::ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

fn sink(path: Option<&Path>) -> Result<Box<dyn Write>, CliError> {
    Ok(match path {
        Some(p) => Box::new(BufWriter::new(File::create(p)?)),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    })
}

fn report_row(report: &Value) -> Table {
    let mut headers = Vec::new();
    let mut row = Vec::new();
    if let Value::Object(m) = report {
        for (k, v) in m {
            let cell = match v {
                Value::Number(n) => n
                    .as_i64()
                    .map(Cell::I)
                    .unwrap_or_else(|| Cell::F(n.as_f64().unwrap_or(f64::NAN))),
                Value::String(s) => Cell::S(s.clone()),
                Value::Bool(b) => Cell::S(b.to_string()),
                Value::Null => Cell::S(String::new()),
                other => Cell::S(other.to_string()),
            };
            headers.push(k.clone());
            row.push(cell);
        }
    }
    Table {
        headers,
        rows: vec![row],
    }
}

pub fn emit(artifact: &Artifact, format: Format, out: Option<&Path>, report: Option<&Path>) -> Result<(), CliError> {
    let mut w = sink(out)?;
    match format {
        Format::Csv => match &artifact.table {
            Some(t) => t.write_csv(&mut w)?,
            None => report_row(&artifact.report).write_csv(&mut w)?,
        },
        Format::Json => {
            let v = match &artifact.table {
                Some(t) => json!({ "report": artifact.report, "rows": t.to_json() }),
                None => artifact.report.clone(),
            };
            serde_json::to_writer_pretty(&mut w, &v)?;
            writeln!(w)?;
        }
    }
    w.flush()?;
    if let Some(p) = report {
        let mut r = sink(Some(p))?;
        serde_json::to_writer_pretty(&mut r, &artifact.report)?;
        writeln!(r)?;
        r.flush()?;
    }
    Ok(())
}
