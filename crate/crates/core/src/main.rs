use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use dynbatch::error::{Error, Result};
use dynbatch::harness::export::{read_csv, render_report};
use dynbatch::harness::verify::DEFAULT_SEED;
use dynbatch::harness::{export, run_experiment, verify, ExperimentConfig, ExportFormat};

const OUT_DIR_ENV: &str = "DYNBATCH_OUT_DIR";

#[derive(Parser)]
#[command(name = "dynbatch", version, about = "Stochastic prox-gradient experiments with growing mini-batches")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(clap::Args, Clone, Default)]
struct Overrides {
    /// Output directory (defaults to run.out, then $DYNBATCH_OUT_DIR, then ./results)
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    reps: Option<u32>,
    /// Oracle-call budget per replication
    #[arg(long)]
    budget: Option<u64>,
    /// Worker threads (defaults to available parallelism)
    #[arg(long)]
    jobs: Option<usize>,
}

#[derive(Subcommand)]
enum Command {
    /// Run one experiment config and write <name>.csv and <name>.json
    Run {
        config: PathBuf,
        #[command(flatten)]
        overrides: Overrides,
    },
    /// Run every *.conf file in a directory
    Sweep {
        config_dir: PathBuf,
        #[command(flatten)]
        overrides: Overrides,
    },
    /// Run a verification suite: prox, oracle, schedules, theorem1, theorem2, complexity
    Verify {
        suite: String,
        #[arg(long, default_value_t = DEFAULT_SEED)]
        seed: u64,
    },
    /// Re-derive fits and complexity tables from stored CSV files
    Report { result_dir: PathBuf },
}

fn run_one(path: &Path, o: &Overrides) -> Result<()> {
    let mut cfg = ExperimentConfig::from_file(path)?;
    if let Some(s) = o.seed {
        cfg.override_seed(s);
    }
    if let Some(r) = o.reps {
        cfg.override_reps(r);
    }
    if let Some(b) = o.budget {
        cfg.override_budget(b);
    }
    if let Some(out) = &o.out {
        cfg.override_out(out.clone());
    }
    if o.jobs.is_some() {
        cfg.jobs = o.jobs;
    }
    let out = cfg
        .out_dir
        .clone()
        .or_else(|| std::env::var_os(OUT_DIR_ENV).map(PathBuf::from))
        .unwrap_or_else(|| PathBuf::from("results"));
    let result = run_experiment(&cfg)?;
    let files = export(&result, &[ExportFormat::Csv, ExportFormat::Json], &out)?;
    println!(
        "{}: {} replications ({} failed, {} budget-stopped), final gap {:.4e}",
        result.name,
        result.replications,
        result.failures,
        result.budget_stops,
        result.rows.last().map_or(f64::NAN, |r| r.gap_mean)
    );
    for f in files {
        println!("  wrote {}", f.display());
    }
    Ok(())
}

fn files_with_ext(dir: &Path, ext: &str) -> Result<Vec<PathBuf>> {
    let io = |e| Error::Io { path: dir.to_path_buf(), source: e };
    let mut files = Vec::new();
    for entry in std::fs::read_dir(dir).map_err(io)? {
        let p = entry.map_err(io)?.path();
        if p.extension().is_some_and(|e| e == ext) {
            files.push(p);
        }
    }
    files.sort();
    Ok(files)
}

fn execute(cli: Cli) -> Result<bool> {
    match cli.command {
        Command::Run { config, overrides } => run_one(&config, &overrides).map(|_| true),
        Command::Sweep { config_dir, overrides } => {
            let files = files_with_ext(&config_dir, "conf")?;
            if files.is_empty() {
                return Err(Error::Validation(format!("no .conf files in {}", config_dir.display())));
            }
            for f in files {
                run_one(&f, &overrides)?;
            }
            Ok(true)
        }
        Command::Verify { suite, seed } => {
            let report = verify(&suite, seed)?;
            for c in &report.checks {
                println!("{c}");
            }
            Ok(report.passed())
        }
        Command::Report { result_dir } => {
            let files = files_with_ext(&result_dir, "csv")?;
            for f in &files {
                let rows = read_csv(f)?;
                let name = f.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
                print!("{}", render_report(&name, &rows)?);
            }
            Ok(true)
        }
    }
}

fn main() -> ExitCode {
    match execute(Cli::parse()) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(3),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
