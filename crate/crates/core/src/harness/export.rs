//! CSV and JSON output of experiment results.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use serde_json::json;

use crate::error::{Error, Result};
use crate::harness::experiment::ExperimentResult;
use crate::harness::fit;

pub const CSV_COLUMNS: [&str; 13] = [
    "algo", "rep_count", "t", "N_t", "cum_calls", "gap_mean", "gap_se", "dist_sq_mean", "dist_sq_se", "dM_mean", "dM_se", "alpha_t",
    "beta_t",
];

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ExportFormat {
    Csv,
    Json,
}

/// One parsed CSV line.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CsvRow {
    pub algo: String,
    pub rep_count: u64,
    pub t: u64,
    #[serde(rename = "N_t")]
    pub n_t: u64,
    pub cum_calls: u64,
    pub gap_mean: f64,
    pub gap_se: f64,
    pub dist_sq_mean: f64,
    pub dist_sq_se: f64,
    #[serde(rename = "dM_mean")]
    pub dm_mean: f64,
    #[serde(rename = "dM_se")]
    pub dm_se: f64,
    pub alpha_t: f64,
    pub beta_t: Option<f64>,
}

fn sci(v: f64) -> String {
    format!("{v:.16e}")
}

fn csv_error(path: &Path, e: csv::Error) -> Error {
    match e.into_kind() {
        csv::ErrorKind::Io(io) => Error::io(path, io),
        other => Error::Format { path: path.to_path_buf(), reason: format!("{other:?}") },
    }
}

pub fn write_csv(result: &ExperimentResult, path: &Path) -> Result<()> {
    let mut w = csv::Writer::from_path(path).map_err(|e| csv_error(path, e))?;
    w.write_record(CSV_COLUMNS).map_err(|e| csv_error(path, e))?;
    for r in &result.rows {
        w.write_record([
            result.algorithm.name().to_string(),
            r.rep_count.to_string(),
            r.t.to_string(),
            r.n_t.to_string(),
            r.cum_calls.to_string(),
            sci(r.gap_mean),
            sci(r.gap_se),
            sci(r.dist_sq_mean),
            sci(r.dist_sq_se),
            sci(r.dm_mean),
            sci(r.dm_se),
            sci(r.alpha_t),
            r.beta_t.map(sci).unwrap_or_default(),
        ])
        .map_err(|e| csv_error(path, e))?;
    }
    w.flush().map_err(|e| Error::io(path, e))
}

pub fn read_csv(path: &Path) -> Result<Vec<CsvRow>> {
    let mut r = csv::Reader::from_path(path).map_err(|e| csv_error(path, e))?;
    let headers = r.headers().map_err(|e| csv_error(path, e))?.clone();
    if headers.iter().ne(CSV_COLUMNS) {
        return Err(Error::Format { path: path.to_path_buf(), reason: "unexpected column layout".into() });
    }
    r.deserialize().map(|row| row.map_err(|e| csv_error(path, e))).collect()
}

/// Re-derives rate fits and a decade complexity table from stored rows.
pub fn render_report(name: &str, rows: &[CsvRow]) -> Result<String> {
    let Some(last) = rows.last() else { return Err(Error::AllFailed) };
    let t: Vec<f64> = rows.iter().map(|r| r.t as f64).collect();
    let window = fit::default_window(last.t);
    let mut out = String::new();
    let _ = writeln!(out, "{name}: {} iterations, {} replications, algorithm {}", rows.len(), last.rep_count, last.algo);
    let _ = writeln!(out, "  final gap {:.6e} +/- {:.2e}, dist^2 {:.6e}, oracle calls {}", last.gap_mean, last.gap_se, last.dist_sq_mean, last.cum_calls);
    let gaps: Vec<f64> = rows.iter().map(|r| r.gap_mean).collect();
    let dists: Vec<f64> = rows.iter().map(|r| r.dist_sq_mean).collect();
    match fit::fit_power_rate(&t, &gaps, window) {
        Ok(f) => _ = writeln!(out, "  gap power slope {:.4} (r^2 {:.4}) over t in [{}, {}]", f.rate, f.r_squared, window.0, window.1),
        Err(e) => _ = writeln!(out, "  gap power slope unavailable: {e}"),
    }
    match fit::fit_geometric_rate(&t, &dists, window) {
        Ok(f) => _ = writeln!(out, "  dist^2 geometric ratio {:.6} (r^2 {:.4})", f.rate, f.r_squared),
        Err(e) => _ = writeln!(out, "  dist^2 geometric ratio unavailable: {e}"),
    }
    let ts: Vec<u64> = rows.iter().map(|r| r.t).collect();
    let calls: Vec<u64> = rows.iter().map(|r| r.cum_calls).collect();
    let eps: Vec<f64> = (1..=8).map(|k| 10f64.powi(-k)).collect();
    let curve = fit::complexity_points(&ts, &gaps, &calls, &eps);
    let _ = writeln!(out, "  {:>8} {:>8} {:>22}", "eps", "T_hit", "cum_calls");
    for r in &curve {
        match (r.t_hit, r.cum_calls) {
            (Some(th), Some(c)) => _ = writeln!(out, "  {:>8.0e} {th:>8} {c:>22}", r.eps),
            _ => _ = writeln!(out, "  {:>8.0e} {:>8} {:>22}", r.eps, "-", "-"),
        }
    }
    if let Some(slope) = fit::complexity_slope(&curve) {
        let _ = writeln!(out, "  complexity slope {slope:.4}");
    }
    Ok(out)
}

pub fn summary_json(result: &ExperimentResult) -> serde_json::Value {
    json!({
        "name": result.name,
        "algorithm": result.algorithm.name(),
        "library_version": env!("CARGO_PKG_VERSION"),
        "seed": result.seed,
        "replications": result.replications,
        "failures": result.failures,
        "budget_stops": result.budget_stops,
        "iterations": result.rows.len(),
        "start_gap": result.start_gap,
        "start_dist_sq": result.start_dist_sq,
        "final_gap_mean": result.rows.last().map(|r| r.gap_mean),
        "total_oracle_calls": result.rows.last().map(|r| r.cum_calls),
        "fitted_rates": result.rates,
        "bounds": result.bounds,
        "config_echo": result.config_echo,
    })
}

/// Writes `<name>.csv` and/or `<name>.json` into `out_dir`.
pub fn export(result: &ExperimentResult, formats: &[ExportFormat], out_dir: &Path) -> Result<Vec<PathBuf>> {
    if result.rows.is_empty() {
        return Err(Error::AllFailed);
    }
    std::fs::create_dir_all(out_dir).map_err(|e| Error::io(out_dir, e))?;
    let mut paths = Vec::new();
    for f in formats {
        let path = match f {
            ExportFormat::Csv => {
                let p = out_dir.join(format!("{}.csv", result.name));
                write_csv(result, &p)?;
                p
            }
            ExportFormat::Json => {
                let p = out_dir.join(format!("{}.json", result.name));
                let text = serde_json::to_string_pretty(&summary_json(result)).expect("summary serializes");
                std::fs::write(&p, text + "\n").map_err(|e| Error::io(&p, e))?;
                p
            }
        };
        paths.push(path);
    }
    Ok(paths)
}
