//! Seeded Monte-Carlo runner for the contrastive subspace estimators: preset
//! experiments, sweeps, summaries and CSV output.

pub mod config;
pub mod error;
pub mod output;
pub mod presets;
pub mod runner;

pub use config::{
    parse_config, ExperimentConfig, MethodEntry, ModelTemplate, Overlay, SweepAxis, Truncation,
};
pub use error::HarnessError;
pub use output::{emit_csv, emit_summary, write_records, write_summary};
pub use presets::{preset, CATALOG};
pub use runner::{run_sweep, run_trial, summarize, SummaryRow, SweepResult, TrialRecord};
