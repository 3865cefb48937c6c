//! Deterministic report emission: CSV tables, the JSON summary and its
//! schema.

use std::collections::BTreeMap;
use std::io::Write;
use std::path::Path;

use serde::Serialize;

/// Fixed float formatting: 17 significant digits, locale-free.
pub fn format_float(x: f64) -> String {
    if x == 0.0 {
        return "0.0000000000000000e0".into();
    }
    format!("{x:.16e}")
}

/// A CSV table with a header row; every cell formats deterministically.
pub struct CsvTable {
    header: Vec<String>,
    rows: Vec<Vec<String>>,
}

impl CsvTable {
    pub fn new(header: &[&str]) -> Self {
        Self { header: header.iter().map(|s| s.to_string()).collect(), rows: Vec::new() }
    }

    pub fn push(&mut self, cells: Vec<String>) {
        assert_eq!(cells.len(), self.header.len(), "row width matches header");
        self.rows.push(cells);
    }

    pub fn to_string(&self) -> String {
        let mut out = String::new();
        out.push_str(&self.header.join(","));
        out.push('\n');
        for row in &self.rows {
            out.push_str(&row.join(","));
            out.push('\n');
        }
        out
    }

    pub fn write(&self, path: &Path) -> std::io::Result<()> {
        let mut file = std::fs::File::create(path)?;
        file.write_all(self.to_string().as_bytes())
    }
}

/// One named metric: the value, its tolerance when one applies, and the
/// verdict.
#[derive(Clone, Debug, Serialize)]
pub struct Metric {
    pub value: f64,
    pub tolerance: Option<f64>,
    pub pass: Option<bool>,
}

/// The JSON summary: inputs echoed, metrics with tolerances, overall
/// verdict.
#[derive(Serialize)]
pub struct Summary {
    pub subcommand: String,
    pub inputs: crate::config::RunConfig,
    pub metrics: BTreeMap<String, Metric>,
    pub pass: bool,
}

impl Summary {
    pub fn new(subcommand: &str, inputs: crate::config::RunConfig) -> Self {
        Self {
            subcommand: subcommand.into(),
            inputs,
            metrics: BTreeMap::new(),
            pass: true,
        }
    }

    /// Records a metric checked against an upper bound on its magnitude.
    pub fn check(&mut self, name: &str, value: f64, tolerance: f64) -> bool {
        let pass = value.abs() <= tolerance && value.is_finite();
        self.metrics.insert(
            name.into(),
            Metric { value, tolerance: Some(tolerance), pass: Some(pass) },
        );
        self.pass &= pass;
        pass
    }

    /// Records a boolean condition with its witness value.
    pub fn assert_that(&mut self, name: &str, value: f64, pass: bool) -> bool {
        self.metrics.insert(name.into(), Metric { value, tolerance: None, pass: Some(pass) });
        self.pass &= pass;
        pass
    }

    /// Records an informational value without a verdict.
    pub fn note(&mut self, name: &str, value: f64) {
        self.metrics.insert(name.into(), Metric { value, tolerance: None, pass: None });
    }

    pub fn write(&self, path: &Path) -> std::io::Result<()> {
        let text = serde_json::to_string_pretty(self).expect("summary serializes");
        std::fs::write(path, text)
    }
}

/// Validates the documented summary schema on a raw JSON value: the four
/// top-level keys with their types, and each metric carrying value /
/// tolerance / pass.
#[cfg_attr(not(test), allow(dead_code))]
pub fn validate_summary_schema(value: &serde_json::Value) -> Result<(), String> {
    let obj = value.as_object().ok_or("summary must be an object")?;
    for key in ["subcommand", "inputs", "metrics", "pass"] {
        if !obj.contains_key(key) {
            return Err(format!("missing key '{key}'"));
        }
    }
    if !obj["subcommand"].is_string() {
        return Err("'subcommand' must be a string".into());
    }
    if !obj["inputs"].is_object() {
        return Err("'inputs' must be an object".into());
    }
    if !obj["pass"].is_boolean() {
        return Err("'pass' must be a boolean".into());
    }
    let metrics = obj["metrics"].as_object().ok_or("'metrics' must be an object")?;
    for (name, metric) in metrics {
        let m = metric.as_object().ok_or_else(|| format!("metric '{name}' must be an object"))?;
        for key in ["value", "tolerance", "pass"] {
            if !m.contains_key(key) {
                return Err(format!("metric '{name}' missing '{key}'"));
            }
        }
        if !m["value"].is_number() {
            return Err(format!("metric '{name}': 'value' must be a number"));
        }
        if !(m["tolerance"].is_number() || m["tolerance"].is_null()) {
            return Err(format!("metric '{name}': 'tolerance' must be a number or null"));
        }
        if !(m["pass"].is_boolean() || m["pass"].is_null()) {
            return Err(format!("metric '{name}': 'pass' must be a boolean or null"));
        }
    }
    Ok(())
}
