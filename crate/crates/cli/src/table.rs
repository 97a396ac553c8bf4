use std::io::Write;

use serde_json::{Map, Value};

use crate::args::Format;

#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Num(f64),
    Int(i64),
    /// Exact integer too wide for `i64`, kept as digits.
    Digits(String),
    Text(String),
    Bool(bool),
}

impl Cell {
    fn csv_field(&self) -> String {
        match self {
            Cell::Num(v) => format_num(*v),
            Cell::Int(v) => v.to_string(),
            Cell::Digits(s) | Cell::Text(s) => s.clone(),
            Cell::Bool(b) => b.to_string(),
        }
    }

    fn json(&self) -> Value {
        match self {
            Cell::Num(v) => num_json(*v),
            Cell::Int(v) => Value::from(*v),
            Cell::Digits(s) => s
                .parse::<u64>()
                .map(Value::from)
                .unwrap_or_else(|_| Value::String(s.clone())),
            Cell::Text(s) => Value::String(s.clone()),
            Cell::Bool(b) => Value::Bool(*b),
        }
    }
}

impl From<f64> for Cell {
    fn from(v: f64) -> Self {
        Cell::Num(v)
    }
}

impl From<i64> for Cell {
    fn from(v: i64) -> Self {
        Cell::Int(v)
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

impl From<&str> for Cell {
    fn from(v: &str) -> Self {
        Cell::Text(v.to_owned())
    }
}

/// 17 significant digits in scientific notation.
pub fn format_num(v: f64) -> String {
    if v.is_finite() {
        format!("{v:.16e}")
    } else {
        v.to_string()
    }
}

/// JSON numbers use the shortest round-trip form; non-finite values become null.
pub fn num_json(v: f64) -> Value {
    serde_json::Number::from_f64(v).map_or(Value::Null, Value::Number)
}

/// Whether a command's checks passed.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Status {
    Pass,
    Reject,
}

/// Tabular result of one command.
#[derive(Debug, Clone)]
pub struct Report {
    pub config: Map<String, Value>,
    pub columns: Vec<&'static str>,
    pub rows: Vec<Vec<Cell>>,
    pub summary: Map<String, Value>,
    pub status: Status,
}

impl Report {
    pub fn new(config: Map<String, Value>, columns: Vec<&'static str>) -> Self {
        Report {
            config,
            columns,
            rows: Vec::new(),
            summary: Map::new(),
            status: Status::Pass,
        }
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }

    pub fn summarize(&mut self, key: &str, value: f64) {
        self.summary.insert(key.to_owned(), num_json(value));
    }

    pub fn reject_unless(&mut self, ok: bool) {
        if !ok {
            self.status = Status::Reject;
        }
    }

    pub fn write<W: Write>(&self, format: Format, mut w: W) -> std::io::Result<()> {
        match format {
            Format::Csv => {
                let mut csv = csv::Writer::from_writer(w);
                csv.write_record(&self.columns)?;
                for row in &self.rows {
                    csv.write_record(row.iter().map(Cell::csv_field))?;
                }
                csv.flush()
            }
            Format::Json => {
                let rows: Vec<Value> = self
                    .rows
                    .iter()
                    .map(|row| {
                        let obj: Map<String, Value> = self
                            .columns
                            .iter()
                            .zip(row)
                            .map(|(k, v)| ((*k).to_owned(), v.json()))
                            .collect();
                        Value::Object(obj)
                    })
                    .collect();
                let mut doc = Map::new();
                doc.insert("config".into(), Value::Object(self.config.clone()));
                doc.insert("rows".into(), Value::Array(rows));
                doc.insert(
                    "residual_summary".into(),
                    Value::Object(self.summary.clone()),
                );
                serde_json::to_writer_pretty(&mut w, &Value::Object(doc))?;
                writeln!(w)
            }
        }
    }
}
