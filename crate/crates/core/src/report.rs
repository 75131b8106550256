//! Output files: results JSON, convergence CSV, and the benchmark and sweep
//! reports. Every writer has a matching reader.

use std::fs;
use std::path::Path;

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::metrics::Metrics;
use crate::solver::SolverConfig;

/// Summary written by `fit` as `results.json`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FitReport {
    pub labels_path: String,
    pub n: usize,
    pub n_views: usize,
    pub anchors: usize,
    pub neighbors: usize,
    pub single_view: bool,
    pub alpha: Vec<f64>,
    pub final_objective: f64,
    pub iters: usize,
    pub converged: bool,
    pub elapsed_seconds: f64,
    pub build_seconds: f64,
    pub solver: SolverConfig,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub metrics: Option<Metrics>,
    #[serde(default)]
    pub warnings: Vec<String>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ConvergencePoint {
    pub iteration: usize,
    pub objective: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BenchmarkRow {
    pub n: usize,
    pub build_seconds: f64,
    pub solve_seconds: f64,
    pub total: f64,
    pub iters: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub m: usize,
    pub beta: f64,
    pub gamma: f64,
    pub acc: Option<f64>,
    pub nmi: Option<f64>,
    pub purity: Option<f64>,
    pub ari: Option<f64>,
    pub f_score: Option<f64>,
    pub precision: Option<f64>,
    pub iters: Option<usize>,
    pub final_objective: Option<f64>,
    pub converged: Option<bool>,
    /// Objective never rose by more than the descent slack.
    pub monotone: Option<bool>,
    pub error: Option<String>,
}

/// Writes `bytes` to a sibling temp file and renames it into place.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<()> {
    let mut tmp = path.as_os_str().to_owned();
    tmp.push(".tmp");
    let tmp = std::path::PathBuf::from(tmp);
    fs::write(&tmp, bytes).map_err(|e| Error::io(&tmp, e))?;
    fs::rename(&tmp, path).map_err(|e| Error::io(path, e))
}

pub fn write_fit_report(path: &Path, report: &FitReport) -> Result<()> {
    let text = serde_json::to_string_pretty(report).expect("serializable report") + "\n";
    write_atomic(path, text.as_bytes())
}

pub fn read_fit_report(path: &Path) -> Result<FitReport> {
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    serde_json::from_str(&text).map_err(|e| Error::MalformedMeta {
        file: path.to_path_buf(),
        reason: e.to_string(),
    })
}

pub fn convergence_points(history: &[f64]) -> Vec<ConvergencePoint> {
    history
        .iter()
        .enumerate()
        .map(|(iteration, &objective)| ConvergencePoint {
            iteration,
            objective,
        })
        .collect()
}

pub fn write_csv<T: Serialize>(path: &Path, rows: &[T]) -> Result<()> {
    let mut writer = csv::Writer::from_writer(Vec::new());
    for row in rows {
        writer.serialize(row).map_err(|e| csv_error(path, e))?;
    }
    let bytes = writer
        .into_inner()
        .map_err(|e| Error::io(path, e.into_error()))?;
    write_atomic(path, &bytes)
}

pub fn read_csv<T: DeserializeOwned>(path: &Path) -> Result<Vec<T>> {
    let mut reader = csv::Reader::from_path(path).map_err(|e| csv_error(path, e))?;
    reader
        .deserialize()
        .collect::<std::result::Result<Vec<T>, _>>()
        .map_err(|e| csv_error(path, e))
}

fn csv_error(path: &Path, e: csv::Error) -> Error {
    match e.into_kind() {
        csv::ErrorKind::Io(io) => Error::io(path, io),
        other => Error::MalformedMeta {
            file: path.to_path_buf(),
            reason: format!("{other:?}"),
        },
    }
}
