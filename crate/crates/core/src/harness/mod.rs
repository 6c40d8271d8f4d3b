//! Experiment configuration, replicated runs, rate fitting, export and the
//! verification suites.

pub mod config;
pub mod experiment;
pub mod export;
pub mod fit;
pub mod verify;

pub use config::{Algorithm, ExperimentConfig, Policy};
pub use experiment::{complexity_curve, run_experiment, AggregateRow, ExperimentResult};
pub use export::{export, ExportFormat};
pub use fit::{fit_geometric_rate, fit_power_rate, RateFit};
pub use verify::{verify, Check, Report};
