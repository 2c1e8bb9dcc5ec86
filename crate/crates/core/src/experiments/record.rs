//! Result records, their CSV form, and the run manifest.

use super::config::ExperimentConfig;
use crate::error::Result;
use serde::Serialize;
use serde_json::Value;
use std::io::Write;
use std::path::Path;

pub const CSV_COLUMNS: [&str; 8] =
    ["experiment", "param_json", "value_name", "value", "drift_pct", "fit_exponent", "fit_halfwidth", "pass"];

/// One measured quantity. `params` carries the parameter tuple and full
/// provenance (grid, time grid, seed); object keys serialize sorted.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ResultRecord {
    pub experiment: String,
    pub params: Value,
    pub value_name: String,
    pub value: f64,
    /// Refinement drift in percent; 0 for exact arithmetic.
    pub drift_pct: f64,
    pub fit_exponent: Option<f64>,
    pub fit_halfwidth: Option<f64>,
    pub pass: bool,
}

impl ResultRecord {
    pub fn new(experiment: &str, params: Value, value_name: &str, value: f64, drift: f64, pass: bool) -> Self {
        ResultRecord {
            experiment: experiment.to_string(),
            params,
            value_name: value_name.to_string(),
            value,
            drift_pct: 100.0 * drift,
            fit_exponent: None,
            fit_halfwidth: None,
            pass,
        }
    }

    pub fn with_fit(mut self, exponent: f64, halfwidth: f64) -> Self {
        self.fit_exponent = Some(exponent);
        self.fit_halfwidth = Some(halfwidth);
        self
    }

    pub fn param_json(&self) -> String {
        self.params.to_string()
    }
}

fn number(x: f64) -> String {
    format!("{x}")
}

fn optional(x: Option<f64>) -> String {
    x.map(number).unwrap_or_default()
}

/// Writes the header row and one row per record.
pub fn write_csv(records: &[ResultRecord], out: impl Write) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(CSV_COLUMNS)?;
    for r in records {
        w.write_record([
            r.experiment.clone(),
            r.param_json(),
            r.value_name.clone(),
            number(r.value),
            number(r.drift_pct),
            optional(r.fit_exponent),
            optional(r.fit_halfwidth),
            r.pass.to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

/// Run summary written next to the CSV. Holds no timestamps, so
/// identical runs produce identical bytes.
#[derive(Debug, Clone, Serialize)]
pub struct Manifest {
    pub software: &'static str,
    pub version: &'static str,
    pub experiment: String,
    pub seed: u64,
    pub threads: Option<usize>,
    pub config: ExperimentConfig,
    pub outputs: Vec<String>,
    pub records: usize,
    pub failed_records: usize,
    pub passed: bool,
}

impl Manifest {
    pub fn write(&self, path: &Path) -> Result<()> {
        let mut text = serde_json::to_string_pretty(self)?;
        text.push('\n');
        std::fs::write(path, text)?;
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use serde_json::json;

    #[test]
    fn csv_layout() {
        let records = vec![
            ResultRecord::new("x", json!({"p": 2.5, "a": 1}), "ratio", 0.25, 0.001, true),
            ResultRecord::new("x", json!({}), "slope", -4.0, 0.0, false).with_fit(-4.0, 0.5),
        ];
        let mut buf = Vec::new();
        write_csv(&records, &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines[0], CSV_COLUMNS.join(","));
        // keys come out sorted; the JSON cell is quoted
        assert_eq!(lines[1], r#"x,"{""a"":1,""p"":2.5}",ratio,0.25,0.1,,,true"#);
        assert_eq!(lines[2], "x,{},slope,-4,0,-4,0.5,false");
    }
}
