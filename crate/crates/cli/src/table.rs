use std::io::Write;

use serde_json::{json, Value};

use crate::config::Format;
use crate::error::Result;

/// Column-labelled numeric data, written with a fixed number format so
/// that identical inputs give byte-identical files.
#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub columns: Vec<String>,
    pub rows: Vec<Vec<f64>>,
}

impl Table {
    pub fn new<S: Into<String>>(columns: impl IntoIterator<Item = S>) -> Self {
        Self {
            columns: columns.into_iter().map(Into::into).collect(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<f64>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }

    pub fn column(&self, name: &str) -> Option<Vec<f64>> {
        let i = self.columns.iter().position(|c| c == name)?;
        Some(self.rows.iter().map(|r| r[i]).collect())
    }

    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(&self.columns)?;
        for row in &self.rows {
            w.write_record(row.iter().map(|&v| format_value(v)))?;
        }
        w.flush()?;
        Ok(())
    }

    pub fn write_json<W: Write>(&self, mut out: W) -> Result<()> {
        let rows: Vec<Value> = self
            .rows
            .iter()
            .map(|r| Value::Array(r.iter().map(|&v| json_value(v)).collect()))
            .collect();
        let doc = json!({ "columns": self.columns, "rows": rows });
        serde_json::to_writer_pretty(&mut out, &doc)?;
        writeln!(out)?;
        Ok(())
    }

    pub fn write<W: Write>(&self, out: W, format: Format) -> Result<()> {
        match format {
            Format::Csv => self.write_csv(out),
            Format::Json => self.write_json(out),
        }
    }
}

pub fn format_value(v: f64) -> String {
    if v == 0.0 {
        // Avoid "-0e0" next to "0e0" for the same physical value.
        "0.0000000000e0".to_string()
    } else {
        format!("{v:.10e}")
    }
}

fn json_value(v: f64) -> Value {
    // Round-trip through the CSV text so both formats carry the same digits.
    if v.is_finite() {
        json!(format_value(v).parse::<f64>().unwrap_or(v))
    } else {
        Value::Null
    }
}
