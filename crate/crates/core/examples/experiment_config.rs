//! Loads a config file, runs it and writes CSV and JSON output.
//!
//! cargo run --example experiment_config -- configs/strong_rate.conf /tmp/out

use std::path::PathBuf;

use dynbatch::harness::{export, run_experiment, ExperimentConfig, ExportFormat};

fn main() -> dynbatch::error::Result<()> {
    let mut args = std::env::args().skip(1);
    let path = PathBuf::from(args.next().unwrap_or_else(|| concat!(env!("CARGO_MANIFEST_DIR"), "/configs/strong_rate.conf").into()));
    let out = PathBuf::from(args.next().unwrap_or_else(|| std::env::temp_dir().join("dynbatch").display().to_string()));
    let mut cfg = ExperimentConfig::from_file(&path)?;
    cfg.override_reps(5);
    print!("{}", cfg.to_config_string());
    let result = run_experiment(&cfg)?;
    for p in export(&result, &[ExportFormat::Csv, ExportFormat::Json], &out)? {
        println!("wrote {}", p.display());
    }
    Ok(())
}
