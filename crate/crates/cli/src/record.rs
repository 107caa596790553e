//! Result tables and their CSV and JSON forms.

use std::collections::BTreeMap;
use std::io::Write;

use qfi_core::format::sci12;
use serde::{Deserialize, Serialize};

use crate::config::RunConfig;

/// Named columns, one row per grid point. Missing values are NaN.
#[derive(Clone, Debug, Default, PartialEq)]
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
        assert_eq!(
            row.len(),
            self.columns.len(),
            "row width differs from the header"
        );
        self.rows.push(row);
    }

    pub fn column(&self, name: &str) -> Option<Vec<f64>> {
        let k = self.columns.iter().position(|c| c == name)?;
        Some(self.rows.iter().map(|r| r[k]).collect())
    }
}

/// What a job hands back: the table plus job-level results that are not
/// per-point (fits, crossing intervals).
#[derive(Clone, Debug, Default, PartialEq)]
pub struct JobOutput {
    pub table: Table,
    pub summary: BTreeMap<String, serde_json::Value>,
}

/// The JSON document: resolved config, per-point outputs, tool version and
/// wall time.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ResultRecord {
    pub tool: String,
    pub version: String,
    pub config: RunConfig,
    pub columns: Vec<String>,
    /// One entry per CSV row; non-finite values are `null`.
    pub points: Vec<Vec<Option<f64>>>,
    pub summary: BTreeMap<String, serde_json::Value>,
    pub wall_time_s: f64,
}

impl ResultRecord {
    pub fn new(config: RunConfig, output: JobOutput, wall_time_s: f64) -> Self {
        let points = output
            .table
            .rows
            .iter()
            .map(|r| r.iter().map(|&x| x.is_finite().then_some(x)).collect())
            .collect();
        Self {
            tool: env!("CARGO_PKG_NAME").to_string(),
            version: env!("CARGO_PKG_VERSION").to_string(),
            config,
            columns: output.table.columns,
            points,
            summary: output.summary,
            wall_time_s,
        }
    }

    pub fn column(&self, name: &str) -> Option<Vec<Option<f64>>> {
        let k = self.columns.iter().position(|c| c == name)?;
        Some(self.points.iter().map(|r| r[k]).collect())
    }

    /// Header row then one row per point, `sci12` numbers, LF endings.
    pub fn write_csv<W: Write>(&self, mut out: W) -> std::io::Result<()> {
        writeln!(out, "{}", self.columns.join(","))?;
        for row in &self.points {
            let cells: Vec<String> = row
                .iter()
                .map(|x| x.map_or_else(|| "nan".to_string(), sci12))
                .collect();
            writeln!(out, "{}", cells.join(","))?;
        }
        Ok(())
    }

    pub fn to_csv(&self) -> String {
        let mut buf = Vec::new();
        self.write_csv(&mut buf).expect("writing to memory");
        String::from_utf8(buf).expect("CSV is ASCII")
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("records serialize")
    }

    pub fn from_json(text: &str) -> serde_json::Result<Self> {
        serde_json::from_str(text)
    }
}
