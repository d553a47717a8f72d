//! Experiment configs, pipelines and reports.
//!
//! An [`ExperimentConfig`] names a pipeline, its initial data and a fit
//! window. [`run_experiment`] executes it, writes one CSV and one JSON
//! sidecar per solver run plus two-column `.dat` files per fitted norm,
//! and returns the [`Report`] also stored as `report.json`.

mod config;
mod pipeline;
mod report;

pub use config::{
    DataSpec, ExperimentConfig, ExperimentKind, SyntheticSpec, CHARACTER_TOLERANCE,
    CONTINUUM_TOLERANCE, TORUS_TOLERANCE,
};
pub use pipeline::{
    continuum_series, initial_data, norm_name, plan_runs, predictions, rebuild_report,
    run_experiment, RunPlan, CONFIG_FILE,
};
pub use report::{emit_report, write_two_column, FitResult, Report, REPORT_FILE};
