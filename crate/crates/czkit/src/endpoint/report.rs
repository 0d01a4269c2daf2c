//! Experiment reports and their CSV serialization.
//!
//! Every experiment produces one report: an id, a deterministic parameter
//! map, a series of `(abscissa, value)` pairs, and named summary metrics.
//! Series rows serialize as `experiment,param_json,abscissa,value` and
//! summaries as `experiment,metric,value`, with floats printed to 17
//! significant digits so reruns are byte-identical.

use std::collections::BTreeMap;
use std::path::Path;

use crate::error::{invalid, Result};

/// Least-squares line `y = slope * x + intercept` with its R².
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct FitLine {
    pub slope: f64,
    pub intercept: f64,
    pub r_squared: f64,
}

/// Ordinary least squares in the given coordinates. Returns `None` with
/// fewer than three points or a degenerate abscissa.
pub fn linear_fit(points: &[(f64, f64)]) -> Option<FitLine> {
    if points.len() < 3 {
        return None;
    }
    let n = points.len() as f64;
    let sx: f64 = points.iter().map(|(x, _)| x).sum();
    let sy: f64 = points.iter().map(|(_, y)| y).sum();
    let sxx: f64 = points.iter().map(|(x, _)| x * x).sum();
    let sxy: f64 = points.iter().map(|(x, y)| x * y).sum();
    let det = n * sxx - sx * sx;
    if det.abs() < 1e-12 * (1.0 + sxx.abs()) {
        return None;
    }
    let slope = (n * sxy - sx * sy) / det;
    let intercept = (sy - slope * sx) / n;
    let mean_y = sy / n;
    let ss_tot: f64 = points.iter().map(|(_, y)| (y - mean_y).powi(2)).sum();
    let ss_res: f64 = points
        .iter()
        .map(|(x, y)| (y - slope * x - intercept).powi(2))
        .sum();
    let r_squared = if ss_tot > 0.0 { 1.0 - ss_res / ss_tot } else { 1.0 };
    Some(FitLine { slope, intercept, r_squared })
}

/// Fit in log-log coordinates, ignoring non-positive points. Returns `None`
/// with fewer than three usable points or a degenerate abscissa.
pub fn log_log_fit(points: &[(f64, f64)]) -> Option<FitLine> {
    let logs: Vec<(f64, f64)> = points
        .iter()
        .filter(|(x, y)| *x > 0.0 && *y > 0.0)
        .map(|(x, y)| (x.ln(), y.ln()))
        .collect();
    linear_fit(&logs)
}

/// One experiment's output: series rows plus summary metrics.
#[derive(Clone, Debug)]
pub struct ExperimentReport {
    pub id: String,
    pub params: BTreeMap<String, serde_json::Value>,
    pub series: Vec<(f64, f64)>,
    pub summary: Vec<(String, f64)>,
}

impl ExperimentReport {
    pub fn new(id: impl Into<String>) -> Self {
        Self { id: id.into(), params: BTreeMap::new(), series: Vec::new(), summary: Vec::new() }
    }

    pub fn with_param(mut self, key: &str, value: impl Into<serde_json::Value>) -> Self {
        self.params.insert(key.to_string(), value.into());
        self
    }

    pub fn push_summary(&mut self, metric: &str, value: f64) {
        self.summary.push((metric.to_string(), value));
    }

    /// Deterministic JSON of the parameter map (BTreeMap keeps key order).
    pub fn param_json(&self) -> String {
        serde_json::to_string(&self.params).expect("JSON maps of numbers and strings serialize")
    }

    pub fn summary_value(&self, metric: &str) -> Option<f64> {
        self.summary.iter().find(|(k, _)| k == metric).map(|(_, v)| *v)
    }
}

/// 17 significant digits; round-trips every f64 and is stable across runs.
pub fn format_float(x: f64) -> String {
    format!("{x:.16e}")
}

/// Write all series rows (`experiment,param_json,abscissa,value`).
pub fn write_series_csv(path: &Path, reports: &[ExperimentReport]) -> Result<()> {
    let mut w = csv::Writer::from_path(path)?;
    w.write_record(["experiment", "param_json", "abscissa", "value"])
        .map_err(|e| invalid(format!("csv write failed: {e}")))?;
    for report in reports {
        let params = report.param_json();
        for (x, y) in &report.series {
            w.write_record([
                report.id.as_str(),
                params.as_str(),
                format_float(*x).as_str(),
                format_float(*y).as_str(),
            ])
            .map_err(|e| invalid(format!("csv write failed: {e}")))?;
        }
    }
    w.flush()?;
    Ok(())
}

/// Write all summary rows (`experiment,metric,value`).
pub fn write_summary_csv(path: &Path, reports: &[ExperimentReport]) -> Result<()> {
    let mut w = csv::Writer::from_path(path)?;
    w.write_record(["experiment", "metric", "value"])
        .map_err(|e| invalid(format!("csv write failed: {e}")))?;
    for report in reports {
        for (metric, value) in &report.summary {
            w.write_record([report.id.as_str(), metric.as_str(), format_float(*value).as_str()])
                .map_err(|e| invalid(format!("csv write failed: {e}")))?;
        }
    }
    w.flush()?;
    Ok(())
}
