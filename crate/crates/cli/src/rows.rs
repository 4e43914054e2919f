//! Flat result records and their CSV / JSONL encodings.

use std::io::Write;
use std::path::Path;

use lpp_core::estimators::{MethodInfo, RateEstimate, ShapeEstimate};
use serde::{Deserialize, Serialize};

pub const TOOL_VERSION: &str = env!("CARGO_PKG_VERSION");

/// One emitted result. Absent metrics stay empty, never zero.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResultRow {
    pub experiment: String,
    pub distribution: String,
    pub t: Option<f64>,
    pub r: Option<f64>,
    pub n: Option<u32>,
    pub n_samples: Option<u64>,
    pub method: Option<String>,
    pub p_hat: Option<f64>,
    pub ci_low: Option<f64>,
    pub ci_high: Option<f64>,
    pub fekete_bound: Option<f64>,
    pub mean: Option<f64>,
    pub std_err: Option<f64>,
    pub seed: Option<u64>,
    pub wall_time_s: Option<f64>,
    pub tool_version: String,
}

impl ResultRow {
    pub fn new(experiment: &str, distribution: &str, seed: u64) -> Self {
        ResultRow {
            experiment: experiment.to_string(),
            distribution: distribution.to_string(),
            t: None,
            r: None,
            n: None,
            n_samples: None,
            method: None,
            p_hat: None,
            ci_low: None,
            ci_high: None,
            fekete_bound: None,
            mean: None,
            std_err: None,
            seed: Some(seed),
            wall_time_s: None,
            tool_version: TOOL_VERSION.to_string(),
        }
    }

    pub fn from_rate(experiment: &str, distribution: &str, seed: u64, est: &RateEstimate) -> Self {
        let mut row = ResultRow::new(experiment, distribution, seed);
        row.t = Some(est.t);
        row.r = est.r.is_finite().then_some(est.r);
        row.n = Some(est.n);
        row.n_samples = Some(est.n_samples);
        row.method = Some(describe_method(&est.method));
        row.p_hat = Some(est.p_hat);
        row.ci_low = Some(est.ci_low);
        row.ci_high = Some(est.ci_high);
        row.fekete_bound = est.fekete_bound.is_finite().then_some(est.fekete_bound);
        row
    }

    pub fn from_shape(
        experiment: &str,
        distribution: &str,
        seed: u64,
        est: &ShapeEstimate,
    ) -> Self {
        let mut row = ResultRow::new(experiment, distribution, seed);
        row.t = Some(est.t);
        row.n = Some(est.n);
        row.n_samples = Some(est.n_samples);
        row.method = Some("direct".into());
        row.mean = Some(est.mean);
        row.std_err = Some(est.std_err);
        row
    }
}

pub fn describe_method(m: &MethodInfo) -> String {
    match m {
        MethodInfo::Direct => "direct".into(),
        MethodInfo::Tilted {
            lambda,
            corridor_halfwidth,
        } => format!("tilted;lambda={lambda};halfwidth={corridor_halfwidth}"),
        MethodInfo::DownTilted { lambda } => format!("down-tilted;lambda={lambda}"),
    }
}

pub fn write_csv<W: Write>(out: W, rows: &[ResultRow]) -> Result<(), String> {
    let mut w = csv::Writer::from_writer(out);
    for row in rows {
        w.serialize(row).map_err(|e| e.to_string())?;
    }
    w.flush().map_err(|e| e.to_string())
}

pub fn write_jsonl<W: Write>(mut out: W, rows: &[ResultRow]) -> Result<(), String> {
    for row in rows {
        let line = serde_json::to_string(row).map_err(|e| e.to_string())?;
        writeln!(out, "{line}").map_err(|e| e.to_string())?;
    }
    Ok(())
}

pub fn read_csv(path: &Path) -> Result<Vec<ResultRow>, String> {
    let mut reader = csv::Reader::from_path(path).map_err(|e| e.to_string())?;
    let mut rows = Vec::new();
    for record in reader.deserialize() {
        rows.push(record.map_err(|e| format!("schema mismatch in {path:?}: {e}"))?);
    }
    Ok(rows)
}
