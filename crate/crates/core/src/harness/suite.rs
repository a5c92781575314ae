//! Multi-strategy, multi-seed orchestration.

use std::fs;
use std::path::{Path, PathBuf};

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::strategies::Strategy;

use super::config::ExperimentConfig;
use super::experiment::{run_experiment, ExperimentRecord, PreparedData, RunOutput};
use super::report::{emit_reports, wilcoxon_comparisons, write_records_csv, write_run_files, ReportFiles, RunFailure, WilcoxonRow};

#[derive(Debug, Clone)]
pub struct SuiteReport {
    /// Successful runs in (strategy, seed) configuration order.
    pub runs: Vec<RunOutput>,
    pub failures: Vec<RunFailure>,
    pub wilcoxon: Vec<WilcoxonRow>,
}

impl SuiteReport {
    pub fn records(&self) -> Vec<ExperimentRecord> {
        self.runs.iter().flat_map(|r| r.records.iter().cloned()).collect()
    }
}

/// Run every configured strategy for every configured seed. Runs are
/// independent and execute in parallel; a failing run is recorded and its
/// siblings continue.
pub fn run_suite(config: &ExperimentConfig, data: &PreparedData) -> Result<SuiteReport> {
    config.validate()?;
    let jobs: Vec<(Strategy, u64)> = config
        .strategies
        .iter()
        .flat_map(|&s| config.seeds.iter().map(move |&seed| (s, seed)))
        .collect();
    let outcomes: Vec<_> = jobs
        .par_iter()
        .map(|&(strategy, seed)| (strategy, seed, run_experiment(config, data, strategy, seed)))
        .collect();

    let mut runs = Vec::new();
    let mut failures = Vec::new();
    for (strategy, seed, outcome) in outcomes {
        match outcome {
            Ok(run) => runs.push(run),
            Err(e) => {
                log::error!("{strategy} seed {seed} failed: {e}");
                failures.push(RunFailure { strategy, seed, kind: e.kind().to_string(), message: e.to_string() });
            }
        }
    }
    let records: Vec<ExperimentRecord> = runs.iter().flat_map(|r| r.records.iter().cloned()).collect();
    let wilcoxon = wilcoxon_comparisons(&records);
    Ok(SuiteReport { runs, failures, wilcoxon })
}

/// Where a suite's files went.
#[derive(Debug, Clone)]
pub struct SuiteFiles {
    pub run_files: Vec<PathBuf>,
    pub merged_records: PathBuf,
    pub failures: PathBuf,
    pub config: PathBuf,
    pub reports: Option<ReportFiles>,
}

/// Write per-run files under `out_dir/runs`, the merged records, failures,
/// the resolved configuration and (when any run succeeded) the reports.
pub fn write_suite(report: &SuiteReport, config: &ExperimentConfig, out_dir: &Path) -> Result<SuiteFiles> {
    let runs_dir = out_dir.join("runs");
    fs::create_dir_all(&runs_dir).map_err(|e| Error::io(&runs_dir, e))?;
    let mut run_files = Vec::new();
    for run in &report.runs {
        run_files.extend(write_run_files(run, &runs_dir)?);
    }
    let merged_records = out_dir.join("merged_records.csv");
    write_records_csv(&report.records(), &merged_records)?;

    let failures = out_dir.join("failures.csv");
    let mut w = csv::Writer::from_path(&failures).map_err(|e| Error::Format(e.to_string()))?;
    w.write_record(["strategy", "seed", "kind", "message"]).map_err(|e| Error::Format(e.to_string()))?;
    for f in &report.failures {
        w.write_record([f.strategy.name(), &f.seed.to_string(), &f.kind, &f.message])
            .map_err(|e| Error::Format(e.to_string()))?;
    }
    w.flush().map_err(|e| Error::io(&failures, e))?;

    let config_path = out_dir.join("config.json");
    let mut text = serde_json::to_string_pretty(config).expect("config serializes");
    text.push('\n');
    fs::write(&config_path, text).map_err(|e| Error::io(&config_path, e))?;

    let records = report.records();
    let reports = if records.is_empty() {
        None
    } else {
        Some(emit_reports(&records, &report.failures, Some(config), out_dir)?)
    };
    Ok(SuiteFiles { run_files, merged_records, failures, config: config_path, reports })
}
