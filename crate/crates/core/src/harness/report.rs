//! Verification reports and their JSON form.
//!
//! The writer sorts object keys and prints every float with 17 significant
//! digits, so a report parses back to an equal value and two runs with the
//! same inputs differ only in `timestamp`.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::Path;

use serde::{Deserialize, Serialize};
use serde_json::Value;

use super::HarnessError;
use crate::operators::{DerivativeMode, FdScheme, OperatorConfig};

pub const SCHEMA_VERSION: u32 = 1;

/// How `max_error` is computed from a pair of results `a`, `b`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Metric {
    /// `max |a - b| / (1 + max(|a|, |b|, |f|))` over components, where `f`
    /// is the input field at the sample point.
    Scaled,
    /// `max |a - b|` over components.
    Absolute,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Record {
    pub id: String,
    pub chart: String,
    pub samples: usize,
    /// `None` when an evaluation error stopped the record.
    pub max_error: Option<f64>,
    pub max_abs_error: Option<f64>,
    pub tolerance: f64,
    pub metric: Metric,
    pub pass: bool,
    pub error: Option<String>,
}

/// Observations that are not pass/fail checks.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Diagnostic {
    pub id: String,
    pub chart: String,
    pub message: String,
    pub values: BTreeMap<String, f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct VerificationReport {
    pub schema_version: u32,
    pub suite: String,
    pub charts: Vec<String>,
    pub seed: u64,
    pub count: usize,
    pub points_per_field: usize,
    pub derivative_mode: DerivativeMode,
    pub fd_scheme: FdScheme,
    pub fd_step: f64,
    pub tolerance_override: Option<f64>,
    /// Seconds since the Unix epoch.
    pub timestamp: u64,
    pub pass: bool,
    pub records: Vec<Record>,
    pub diagnostics: Vec<Diagnostic>,
}

fn now() -> u64 {
    std::time::SystemTime::now()
        .duration_since(std::time::UNIX_EPOCH)
        .map(|d| d.as_secs())
        .unwrap_or(0)
}

impl VerificationReport {
    pub fn new(
        suite: &str,
        seed: u64,
        count: usize,
        points_per_field: usize,
        config: &OperatorConfig,
        tolerance_override: Option<f64>,
    ) -> Self {
        Self {
            schema_version: SCHEMA_VERSION,
            suite: suite.to_string(),
            charts: Vec::new(),
            seed,
            count,
            points_per_field,
            derivative_mode: config.derivative_mode,
            fd_scheme: config.fd_scheme,
            fd_step: config.fd_step,
            tolerance_override,
            timestamp: now(),
            pass: true,
            records: Vec::new(),
            diagnostics: Vec::new(),
        }
    }

    pub fn push(&mut self, record: Record) {
        if !self.charts.contains(&record.chart) {
            self.charts.push(record.chart.clone());
        }
        self.pass &= record.pass;
        self.records.push(record);
    }

    /// Appends another report's records and diagnostics.
    pub fn merge(&mut self, other: VerificationReport) {
        for r in other.records {
            self.push(r);
        }
        for c in other.charts {
            if !self.charts.contains(&c) {
                self.charts.push(c);
            }
        }
        self.diagnostics.extend(other.diagnostics);
    }

    pub fn record(&self, id: &str, chart: &str) -> Option<&Record> {
        self.records.iter().find(|r| r.id == id && r.chart == chart)
    }

    pub fn failures(&self) -> impl Iterator<Item = &Record> {
        self.records.iter().filter(|r| !r.pass)
    }

    pub fn to_json(&self) -> String {
        let value = serde_json::to_value(self).expect("report serializes");
        let mut out = String::new();
        write_value(&mut out, &value, 0);
        out.push('\n');
        out
    }

    pub fn from_json(text: &str) -> Result<Self, HarnessError> {
        let report: Self = serde_json::from_str(text).map_err(|e| HarnessError::Report(e.to_string()))?;
        if report.schema_version != SCHEMA_VERSION {
            return Err(HarnessError::Report(format!(
                "unsupported schema_version {}",
                report.schema_version
            )));
        }
        Ok(report)
    }
}

fn format_f64(x: f64) -> String {
    if x.is_finite() {
        format!("{x:.16e}")
    } else {
        // serde_json turns non-finite floats into null before we get here
        "null".to_string()
    }
}

fn indent(out: &mut String, level: usize) {
    for _ in 0..level {
        out.push_str("  ");
    }
}

fn write_value(out: &mut String, v: &Value, level: usize) {
    match v {
        Value::Null => out.push_str("null"),
        Value::Bool(b) => out.push_str(if *b { "true" } else { "false" }),
        Value::Number(n) => {
            if let Some(u) = n.as_u64() {
                let _ = write!(out, "{u}");
            } else if let Some(i) = n.as_i64() {
                let _ = write!(out, "{i}");
            } else {
                out.push_str(&format_f64(n.as_f64().unwrap_or(f64::NAN)));
            }
        }
        Value::String(s) => out.push_str(&Value::String(s.clone()).to_string()),
        Value::Array(items) => {
            if items.is_empty() {
                out.push_str("[]");
                return;
            }
            out.push_str("[\n");
            for (i, item) in items.iter().enumerate() {
                indent(out, level + 1);
                write_value(out, item, level + 1);
                out.push_str(if i + 1 < items.len() { ",\n" } else { "\n" });
            }
            indent(out, level);
            out.push(']');
        }
        Value::Object(map) => {
            if map.is_empty() {
                out.push_str("{}");
                return;
            }
            let mut keys: Vec<&String> = map.keys().collect();
            keys.sort();
            out.push_str("{\n");
            for (i, k) in keys.iter().enumerate() {
                indent(out, level + 1);
                out.push_str(&Value::String((*k).clone()).to_string());
                out.push_str(": ");
                write_value(out, &map[*k], level + 1);
                out.push_str(if i + 1 < keys.len() { ",\n" } else { "\n" });
            }
            indent(out, level);
            out.push('}');
        }
    }
}

/// Writes the report to `path`.
pub fn emit_report(report: &VerificationReport, path: &Path) -> Result<(), HarnessError> {
    std::fs::write(path, report.to_json()).map_err(|source| HarnessError::Io {
        path: path.to_path_buf(),
        source,
    })
}
