//! Experiment driver: JSON configs in, CSV rows out, plus structural
//! chain diagnostics and a small CLI wrapping both.

pub mod analyze;
pub mod cli;
pub mod config;
pub mod rows;
pub mod runner;

pub use analyze::{analyze_task, write_analyze_to_path, AnalyzeRow};
pub use cli::cli_main;
pub use config::{
    default_walk_steps, resolve, resolve_task, validate_config, ConfigError, ExperimentConfig,
    MetricName, OracleConfig, Resolved, SamplerConfig, SamplerSpec, TaskConfig, SAMPLER_NAMES,
    TASK_NAMES,
};
pub use rows::{fmt17, rows_to_string, sort_rows, write_rows, write_rows_to_path, CsvRow};
pub use runner::{experiment_rows, run_experiment, run_one, run_replicates};
