//! Summary tables and rate-slope fits over emitted rows.

use std::path::Path;

use lpp_core::stats::ols_slope;

use crate::rows::{read_csv, ResultRow};
use crate::runner::CliError;

const CORNER_RATE_TARGET: f64 = 0.613_705_638_880_109_5;

pub fn report(path: &Path) -> Result<String, CliError> {
    let rows = read_csv(path).map_err(CliError::Runtime)?;
    if rows.is_empty() {
        return Err(CliError::Validation("no rows in input".into()));
    }
    let family = rows[0].experiment.clone();
    if rows.iter().any(|r| r.experiment != family) {
        return Err(CliError::Validation(format!(
            "schema mismatch: rows mix experiment families ({} and {})",
            family,
            rows.iter()
                .map(|r| r.experiment.as_str())
                .find(|e| *e != family)
                .unwrap_or("?")
        )));
    }
    let mut out = String::new();
    out.push_str(&format!("experiment: {family} ({} rows)\n", rows.len()));
    out.push_str(&table(&rows));
    if family == "shape" || family == "uniform-walk" || family == "identity" {
        return Ok(out);
    }
    out.push_str(&slope_section(&rows, &family));
    Ok(out)
}

fn fmt_opt(v: Option<f64>) -> String {
    v.map_or_else(String::new, |x| format!("{x:.6e}"))
}

fn table(rows: &[ResultRow]) -> String {
    let mut s = String::new();
    s.push_str("n,t,r,p_hat,ci_low,ci_high,fekete_bound,mean,std_err\n");
    for r in rows {
        s.push_str(&format!(
            "{},{},{},{},{},{},{},{},{}\n",
            r.n.map_or_else(String::new, |v| v.to_string()),
            r.t.map_or_else(String::new, |v| v.to_string()),
            r.r.map_or_else(String::new, |v| v.to_string()),
            fmt_opt(r.p_hat),
            fmt_opt(r.ci_low),
            fmt_opt(r.ci_high),
            fmt_opt(r.fekete_bound),
            fmt_opt(r.mean),
            fmt_opt(r.std_err),
        ));
    }
    s
}

fn slope_section(rows: &[ResultRow], family: &str) -> String {
    let usable: Vec<(f64, f64)> = rows
        .iter()
        .filter_map(|r| match (r.n, r.p_hat) {
            (Some(n), Some(p)) if p > 0.0 => Some((n as f64, -p.ln())),
            _ => None,
        })
        .collect();
    let skipped = rows.len() - usable.len();
    let mut s = String::new();
    if skipped > 0 {
        s.push_str(&format!(
            "slope fit: excluded {skipped} zero-hit or metric-free rows\n"
        ));
    }
    let xs: Vec<f64> = usable.iter().map(|u| u.0).collect();
    let ys: Vec<f64> = usable.iter().map(|u| u.1).collect();
    match ols_slope(&xs, &ys) {
        None => s.push_str("slope fit: omitted (needs at least two usable scales)\n"),
        Some(fit) => {
            s.push_str(&format!(
                "slope of -log(p_hat) vs n: {:.6} +- {:.6} over {} points\n",
                fit.slope, fit.slope_std_err, fit.points
            ));
            if family == "corner" && rows.iter().all(|r| r.distribution == "exp:1") {
                s.push_str(&format!(
                    "corner-path decay rate target: {CORNER_RATE_TARGET:.6}\n"
                ));
            }
        }
    }
    s
}
