//! Column-oriented result tables and their CSV / JSON rendering.

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

/// A value that could not be computed, with the reason.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Missing {
    pub row: usize,
    pub column: String,
    pub reason: String,
}

/// Everything needed to re-run the command that produced a table.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Meta {
    pub tool: String,
    pub version: String,
    /// The resolved invocation, replayable with `bxshadow replay`.
    pub command: serde_json::Value,
    /// Resolved inputs in linear units.
    pub resolved: serde_json::Value,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
}

impl Meta {
    pub fn new(command: serde_json::Value, resolved: serde_json::Value, seed: Option<u64>) -> Self {
        Meta {
            tool: env!("CARGO_PKG_NAME").to_string(),
            version: env!("CARGO_PKG_VERSION").to_string(),
            command,
            resolved,
            seed,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Column {
    pub name: String,
    pub values: Vec<Option<f64>>,
}

/// Named columns of equal length; absent values are `None`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CurveTable {
    pub columns: Vec<Column>,
    pub missing: Vec<Missing>,
    pub meta: Meta,
}

/// Sidecar document written next to a CSV table.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TableSidecar {
    pub meta: Meta,
    pub columns: Vec<String>,
    pub rows: usize,
    pub missing: Vec<Missing>,
}

impl CurveTable {
    pub fn new(meta: Meta) -> Self {
        CurveTable {
            columns: Vec::new(),
            missing: Vec::new(),
            meta,
        }
    }

    pub fn rows(&self) -> usize {
        self.columns.first().map_or(0, |c| c.values.len())
    }

    pub fn push_column(&mut self, name: impl Into<String>, values: Vec<Option<f64>>) {
        debug_assert!(self.columns.is_empty() || values.len() == self.rows());
        self.columns.push(Column {
            name: name.into(),
            values,
        });
    }

    pub fn column(&self, name: &str) -> Option<&[Option<f64>]> {
        self.columns
            .iter()
            .find(|c| c.name == name)
            .map(|c| c.values.as_slice())
    }

    /// Header line plus one line per row; missing values are empty fields.
    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        let header: Vec<&str> = self.columns.iter().map(|c| c.name.as_str()).collect();
        out.push_str(&header.join(","));
        out.push('\n');
        let mut buf = ryu::Buffer::new();
        for r in 0..self.rows() {
            for (i, c) in self.columns.iter().enumerate() {
                if i > 0 {
                    out.push(',');
                }
                match c.values[r] {
                    Some(v) if v.is_finite() => out.push_str(buf.format_finite(v)),
                    Some(v) => {
                        let _ = write!(out, "{v}");
                    }
                    None => {}
                }
            }
            out.push('\n');
        }
        out
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("tables serialize") + "\n"
    }

    pub fn sidecar(&self) -> TableSidecar {
        TableSidecar {
            meta: self.meta.clone(),
            columns: self.columns.iter().map(|c| c.name.clone()).collect(),
            rows: self.rows(),
            missing: self.missing.clone(),
        }
    }
}
