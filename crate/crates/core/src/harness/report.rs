//! Run reports and their JSON and CSV forms.

use std::collections::BTreeMap;

use serde::Serialize;
use serde_json::Value;

use super::config::ExperimentConfig;
use crate::error::{Error, Result};
use crate::hilbert::CMatrix;
use crate::measurement::Mode;
use crate::protocols::Resources;

/// Significant digits kept for every floating-point number in a report.
pub const SIGNIFICANT_DIGITS: usize = 12;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Metric {
    pub value: f64,
    pub uncertainty: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(untagged)]
pub enum Cell {
    Int(u64),
    Num(f64),
    Text(String),
}

impl From<f64> for Cell {
    fn from(x: f64) -> Self {
        Cell::Num(x)
    }
}

impl From<u64> for Cell {
    fn from(x: u64) -> Self {
        Cell::Int(x)
    }
}

impl From<usize> for Cell {
    fn from(x: usize) -> Self {
        Cell::Int(x as u64)
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

#[derive(Debug, Clone, PartialEq, Serialize)]
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

    pub fn push(&mut self, row: Vec<Cell>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Report {
    pub config: ExperimentConfig,
    pub protocol: String,
    pub mode: Mode,
    pub seed: u64,
    pub metrics: BTreeMap<String, Metric>,
    pub tables: BTreeMap<String, Table>,
    pub verdicts: BTreeMap<String, String>,
    /// Matrices as rows of `[re, im]` pairs.
    pub states: BTreeMap<String, Vec<Vec<[f64; 2]>>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub resources: Option<Resources>,
    pub log: Vec<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub wall_clock_ms: Option<f64>,
}

impl Report {
    pub fn new(config: &ExperimentConfig) -> Self {
        Self {
            config: config.clone(),
            protocol: config.protocol.clone(),
            mode: config.mode,
            seed: config.seed,
            metrics: BTreeMap::new(),
            tables: BTreeMap::new(),
            verdicts: BTreeMap::new(),
            states: BTreeMap::new(),
            resources: None,
            log: Vec::new(),
            wall_clock_ms: None,
        }
    }

    pub fn metric(&mut self, name: &str, value: f64, uncertainty: f64) {
        self.metrics.insert(name.to_string(), Metric { value, uncertainty });
    }

    pub fn exact(&mut self, name: &str, value: f64) {
        self.metric(name, value, 0.0);
    }

    pub fn verdict(&mut self, name: &str, value: impl ToString) {
        self.verdicts.insert(name.to_string(), value.to_string());
    }

    pub fn table(&mut self, name: &str, table: Table) {
        self.tables.insert(name.to_string(), table);
    }

    pub fn state(&mut self, name: &str, m: &CMatrix) {
        let rows = (0..m.nrows())
            .map(|i| (0..m.ncols()).map(|j| [m[(i, j)].re, m[(i, j)].im]).collect())
            .collect();
        self.states.insert(name.to_string(), rows);
    }

    /// Pretty JSON with sorted keys and every float cut to
    /// [`SIGNIFICANT_DIGITS`] significant digits.
    pub fn to_json(&self) -> String {
        let mut value = serde_json::to_value(self).expect("report serializes");
        round_floats(&mut value);
        let mut out = serde_json::to_string_pretty(&value).expect("value serializes");
        out.push('\n');
        out
    }

    /// Long-format CSV of the tables only: `table,row,column,value`.
    pub fn to_csv(&self) -> Result<String> {
        let mut w = csv::Writer::from_writer(Vec::new());
        let csv_err = |e: csv::Error| Error::Io(e.to_string());
        w.write_record(["table", "row", "column", "value"]).map_err(csv_err)?;
        for (name, table) in &self.tables {
            for (i, row) in table.rows.iter().enumerate() {
                for (col, cell) in table.columns.iter().zip(row) {
                    let v = match cell {
                        Cell::Int(k) => k.to_string(),
                        Cell::Num(x) => format_float(*x),
                        Cell::Text(s) => s.clone(),
                    };
                    w.write_record([name.as_str(), &i.to_string(), col.as_str(), &v]).map_err(csv_err)?;
                }
            }
        }
        let bytes = w.into_inner().map_err(|e| Error::Io(e.to_string()))?;
        Ok(String::from_utf8(bytes).expect("csv output is UTF-8"))
    }
}

/// Rounds to [`SIGNIFICANT_DIGITS`] significant digits.
pub fn round_significant(x: f64) -> f64 {
    if x == 0.0 || !x.is_finite() {
        return x;
    }
    format!("{:.*e}", SIGNIFICANT_DIGITS - 1, x).parse().expect("formatted float parses")
}

fn format_float(x: f64) -> String {
    let r = round_significant(x);
    serde_json::to_string(&r).unwrap_or_else(|_| "null".into())
}

fn round_floats(v: &mut Value) {
    match v {
        Value::Number(n) if n.is_f64() => {
            let x = round_significant(n.as_f64().expect("f64"));
            *v = serde_json::Number::from_f64(x).map_or(Value::Null, Value::Number);
        }
        Value::Array(items) => items.iter_mut().for_each(round_floats),
        Value::Object(map) => map.values_mut().for_each(round_floats),
        _ => {}
    }
}
