//! Output assembly: one schema for both CSV and JSON.
//!
//! CSV is a header row plus data rows, UTF-8, LF line endings; exact rational
//! cells render as `p/q` and never as floats. JSON wraps the same table in a
//! single top-level record with parameters and provenance. Identical
//! invocations produce byte-identical output.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use serde::Serialize;
use serde_json::{json, Value};

/// One table cell; exact values stay textual, floats are explicit.
#[derive(Clone, Debug)]
pub enum Cell {
    Int(i64),
    Big(BigInt),
    Rational(String),
    Float(f64),
    Bool(bool),
    Text(String),
}

impl Cell {
    fn csv(&self) -> String {
        match self {
            Cell::Int(v) => v.to_string(),
            Cell::Big(v) => v.to_string(),
            Cell::Rational(s) => s.clone(),
            Cell::Float(v) => format!("{v}"),
            Cell::Bool(b) => b.to_string(),
            Cell::Text(s) => csv_escape(s),
        }
    }

    fn json(&self) -> Value {
        match self {
            Cell::Int(v) => json!(v),
            // big integers exceed JSON number range; keep them textual
            Cell::Big(v) => json!(v.to_string()),
            Cell::Rational(s) => json!(s),
            Cell::Float(v) => json!(v),
            Cell::Bool(b) => json!(b),
            Cell::Text(s) => json!(s),
        }
    }
}

/// RFC 4180 quoting for free-text cells.
fn csv_escape(s: &str) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

/// Column-ordered table of rendered cells.
#[derive(Clone, Debug, Default)]
pub struct Table {
    pub columns: Vec<String>,
    pub rows: Vec<Vec<Cell>>,
}

impl Table {
    pub fn new(columns: &[&str]) -> Self {
        Self {
            columns: columns.iter().map(|c| c.to_string()).collect(),
            rows: Vec::new(),
        }
    }

    pub fn with_columns(columns: Vec<String>) -> Self {
        Self {
            columns,
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        assert_eq!(row.len(), self.columns.len(), "ragged table row");
        self.rows.push(row);
    }
}

#[derive(Serialize)]
struct Provenance {
    seed: Option<u64>,
    precision_bits: usize,
    git_rev: String,
}

/// The single top-level object emitted in JSON mode.
#[derive(Serialize)]
pub struct OutputRecord {
    schema_version: &'static str,
    command: String,
    parameters: BTreeMap<String, Value>,
    rows: Vec<BTreeMap<String, Value>>,
    provenance: Provenance,
}

pub struct Report {
    pub command: String,
    pub parameters: BTreeMap<String, Value>,
    pub table: Table,
    pub seed: Option<u64>,
    pub precision_bits: usize,
}

fn git_rev() -> String {
    std::env::var("BCLOCK_GIT_REV")
        .ok()
        .or_else(|| option_env!("BCLOCK_GIT_REV").map(String::from))
        .unwrap_or_else(|| "unknown".to_string())
}

impl Report {
    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        out.push_str(&self.table.columns.join(","));
        out.push('\n');
        for row in &self.table.rows {
            let cells: Vec<String> = row.iter().map(Cell::csv).collect();
            out.push_str(&cells.join(","));
            out.push('\n');
        }
        out
    }

    pub fn to_json(&self) -> String {
        let rows = self
            .table
            .rows
            .iter()
            .map(|row| {
                self.table
                    .columns
                    .iter()
                    .zip(row)
                    .map(|(c, v)| (c.clone(), v.json()))
                    .collect()
            })
            .collect();
        let record = OutputRecord {
            schema_version: "1",
            command: self.command.clone(),
            parameters: self.parameters.clone(),
            rows,
            provenance: Provenance {
                seed: self.seed,
                precision_bits: self.precision_bits,
                git_rev: git_rev(),
            },
        };
        let mut s = serde_json::to_string_pretty(&record).expect("serializable");
        s.push('\n');
        s
    }
}
