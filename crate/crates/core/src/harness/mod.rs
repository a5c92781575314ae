//! Experiment engine: configuration, the active-learning loop, multi-run
//! suites and report files.

mod config;
mod experiment;
mod report;
mod suite;

pub use config::{DataConfig, ExperimentConfig};
pub use experiment::{
    initial_seed_set, prepare_data, run_experiment, train_iteration, ExperimentRecord, PreparedData, RunOutput,
};
pub use report::{
    emit_reports, read_records_dir, read_run_records, run_stem, wilcoxon_comparisons, write_records_csv,
    write_run_files, ReportFiles, RunFailure, WilcoxonRow, CURVE_COLUMNS, METRICS_COLUMNS, RECORD_COLUMNS,
    RUNTIME_COLUMNS, RUNTIME_TABLE_COLUMNS, WILCOXON_COLUMNS,
};
pub use suite::{run_suite, write_suite, SuiteFiles, SuiteReport};
