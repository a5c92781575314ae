//! Record files and aggregate reports.
//!
//! Per run, three files share the stem `{strategy}_seed{seed}`:
//!
//! - `.records.csv`: one row per evaluation point, deterministic.
//! - `.audit.jsonl`: one line per queried batch, deterministic.
//! - `.runtime.csv`: wall-clock selection time per batch.
//!
//! Reports written by [`emit_reports`]: `learning_curves.csv`,
//! `metrics_table.csv`, `runtime_table.csv`, `wilcoxon.csv` and, last,
//! `manifest.json`.

use std::collections::{BTreeMap, HashMap};
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use serde::Serialize;
use sha2::{Digest, Sha256};

use crate::analysis::{self, BatchMetrics, WilcoxonResult};
use crate::error::{Error, Result};
use crate::format::g6;
use crate::strategies::Strategy;

use super::config::ExperimentConfig;
use super::experiment::{ExperimentRecord, RunOutput};

pub const RECORD_COLUMNS: [&str; 13] = [
    "strategy",
    "seed",
    "iteration",
    "labeled_count",
    "pool_size",
    "labeled_fraction",
    "macro_f1",
    "micro_f1",
    "queried_label_entropy",
    "diversity",
    "representativeness",
    "label_entropy",
    "kl_to_ground_truth",
];
pub const RUNTIME_COLUMNS: [&str; 4] = ["strategy", "seed", "iteration", "selection_runtime_s"];
pub const CURVE_COLUMNS: [&str; 7] =
    ["strategy", "seed", "iteration", "labeled_count", "labeled_fraction", "macro_f1", "micro_f1"];
pub const METRICS_COLUMNS: [&str; 12] = [
    "strategy",
    "runs",
    "diversity",
    "representativeness",
    "query_entropy_mean",
    "query_entropy_std_iterations",
    "query_entropy_std_seeds",
    "selected_entropy",
    "kl_to_ground_truth",
    "final_macro_f1",
    "final_micro_f1",
    "final_labeled_fraction",
];
pub const RUNTIME_TABLE_COLUMNS: [&str; 7] = [
    "strategy",
    "runs",
    "batches",
    "mean_selection_s",
    "std_selection_s",
    "max_selection_s",
    "total_selection_s_per_run",
];
pub const WILCOXON_COLUMNS: [&str; 8] =
    ["strategy_a", "strategy_b", "pairs", "nonzero_pairs", "statistic", "p_value", "method", "status"];

/// A run that failed inside a suite.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct RunFailure {
    pub strategy: Strategy,
    pub seed: u64,
    pub kind: String,
    pub message: String,
}

pub fn run_stem(strategy: Strategy, seed: u64) -> String {
    format!("{}_seed{seed}", strategy.name())
}

fn opt(x: Option<f64>) -> String {
    x.map(g6).unwrap_or_default()
}

fn csv_err(path: &Path, e: csv::Error) -> Error {
    match e.into_kind() {
        csv::ErrorKind::Io(io) => Error::io(path, io),
        other => Error::Format(format!("{}: {other:?}", path.display())),
    }
}

fn write_csv<I>(path: &Path, header: &[&str], rows: I) -> Result<()>
where
    I: IntoIterator<Item = Vec<String>>,
{
    let mut w = csv::Writer::from_path(path).map_err(|e| csv_err(path, e))?;
    w.write_record(header).map_err(|e| csv_err(path, e))?;
    for row in rows {
        w.write_record(&row).map_err(|e| csv_err(path, e))?;
    }
    w.flush().map_err(|e| Error::io(path, e))
}

fn record_row(r: &ExperimentRecord) -> Vec<String> {
    let m = r.batch_metrics.as_ref();
    vec![
        r.strategy.name().to_string(),
        r.seed.to_string(),
        r.iteration.to_string(),
        r.labeled_count.to_string(),
        r.pool_size.to_string(),
        g6(r.labeled_fraction()),
        g6(r.macro_f1),
        g6(r.micro_f1),
        opt(r.queried_label_entropy),
        opt(m.and_then(|m| m.diversity)),
        opt(m.and_then(|m| m.representativeness)),
        opt(m.map(|m| m.label_entropy)),
        opt(m.map(|m| m.kl_to_ground_truth)),
    ]
}

/// Write the records CSV of any set of records.
pub fn write_records_csv(records: &[ExperimentRecord], path: &Path) -> Result<()> {
    write_csv(path, &RECORD_COLUMNS, records.iter().map(record_row))
}

/// Write the three per-run files into `dir`; returns their paths.
pub fn write_run_files(run: &RunOutput, dir: &Path) -> Result<[PathBuf; 3]> {
    fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    let stem = run_stem(run.strategy, run.seed);
    let records = dir.join(format!("{stem}.records.csv"));
    let audit = dir.join(format!("{stem}.audit.jsonl"));
    let runtime = dir.join(format!("{stem}.runtime.csv"));

    write_records_csv(&run.records, &records)?;
    let mut text = String::new();
    for batch in &run.batches {
        text.push_str(&batch.to_json_line());
        text.push('\n');
    }
    fs::write(&audit, text).map_err(|e| Error::io(&audit, e))?;
    write_csv(
        &runtime,
        &RUNTIME_COLUMNS,
        run.records.iter().filter_map(|r| {
            r.batch_metrics.as_ref().map(|m| {
                vec![
                    r.strategy.name().to_string(),
                    r.seed.to_string(),
                    r.iteration.to_string(),
                    g6(m.selection_runtime_s),
                ]
            })
        }),
    )?;
    Ok([records, audit, runtime])
}

fn parse_field<T: std::str::FromStr>(path: &Path, line: usize, name: &str, raw: &str) -> Result<T> {
    raw.parse().map_err(|_| Error::Parse {
        path: path.to_path_buf(),
        line,
        message: format!("bad {name} value {raw:?}"),
    })
}

fn parse_opt(path: &Path, line: usize, name: &str, raw: &str) -> Result<Option<f64>> {
    if raw.is_empty() {
        Ok(None)
    } else {
        parse_field(path, line, name, raw).map(Some)
    }
}

fn read_rows(path: &Path, header: &[&str]) -> Result<Vec<(usize, csv::StringRecord)>> {
    let mut reader = csv::Reader::from_path(path).map_err(|e| csv_err(path, e))?;
    let found = reader.headers().map_err(|e| csv_err(path, e))?;
    if found.iter().ne(header.iter().copied()) {
        return Err(Error::Format(format!("{}: unexpected header {found:?}", path.display())));
    }
    let mut rows = Vec::new();
    for (i, row) in reader.records().enumerate() {
        rows.push((i + 2, row.map_err(|e| csv_err(path, e))?));
    }
    Ok(rows)
}

/// Read a records CSV, joining the sibling runtime CSV when present.
pub fn read_run_records(records_path: &Path) -> Result<Vec<ExperimentRecord>> {
    let p = records_path;
    let mut runtimes: HashMap<(String, String, String), f64> = HashMap::new();
    let name = p.file_name().and_then(|n| n.to_str()).unwrap_or_default();
    if let Some(stem) = name.strip_suffix(".records.csv") {
        let rt = p.with_file_name(format!("{stem}.runtime.csv"));
        if rt.exists() {
            for (line, row) in read_rows(&rt, &RUNTIME_COLUMNS)? {
                let secs = parse_field(&rt, line, "selection_runtime_s", &row[3])?;
                runtimes.insert((row[0].to_string(), row[1].to_string(), row[2].to_string()), secs);
            }
        }
    }
    let mut out = Vec::new();
    for (line, row) in read_rows(p, &RECORD_COLUMNS)? {
        let label_entropy = parse_opt(p, line, "label_entropy", &row[11])?;
        let batch_metrics = match label_entropy {
            None => None,
            Some(label_entropy) => Some(BatchMetrics {
                diversity: parse_opt(p, line, "diversity", &row[9])?,
                representativeness: parse_opt(p, line, "representativeness", &row[10])?,
                label_entropy,
                kl_to_ground_truth: parse_field(p, line, "kl_to_ground_truth", &row[12])?,
                selection_runtime_s: runtimes
                    .get(&(row[0].to_string(), row[1].to_string(), row[2].to_string()))
                    .copied()
                    .unwrap_or(f64::NAN),
            }),
        };
        out.push(ExperimentRecord {
            strategy: parse_field(p, line, "strategy", &row[0])?,
            seed: parse_field(p, line, "seed", &row[1])?,
            iteration: parse_field(p, line, "iteration", &row[2])?,
            labeled_count: parse_field(p, line, "labeled_count", &row[3])?,
            pool_size: parse_field(p, line, "pool_size", &row[4])?,
            macro_f1: parse_field(p, line, "macro_f1", &row[6])?,
            micro_f1: parse_field(p, line, "micro_f1", &row[7])?,
            queried_label_entropy: parse_opt(p, line, "queried_label_entropy", &row[8])?,
            batch_metrics,
        });
    }
    Ok(out)
}

/// Collect every `*.records.csv` in `dir` and `dir/runs`.
pub fn read_records_dir(dir: &Path) -> Result<Vec<ExperimentRecord>> {
    if !dir.is_dir() {
        return Err(Error::io(dir, std::io::Error::new(std::io::ErrorKind::NotFound, "not a directory")));
    }
    let mut files = Vec::new();
    for d in [dir.to_path_buf(), dir.join("runs")] {
        if !d.is_dir() {
            continue;
        }
        for entry in fs::read_dir(&d).map_err(|e| Error::io(&d, e))? {
            let path = entry.map_err(|e| Error::io(&d, e))?.path();
            if path.to_str().is_some_and(|s| s.ends_with(".records.csv")) {
                files.push(path);
            }
        }
    }
    files.sort();
    let mut records = Vec::new();
    for f in files {
        records.extend(read_run_records(&f)?);
    }
    if records.is_empty() {
        return Err(Error::EmptySelection(format!("no records found in {}", dir.display())));
    }
    Ok(records)
}

/// Records of one (strategy, seed) run, in iteration order.
struct RunView<'a> {
    strategy: Strategy,
    seed: u64,
    records: Vec<&'a ExperimentRecord>,
}

impl RunView<'_> {
    fn query_entropies(&self) -> Vec<f64> {
        self.records.iter().filter_map(|r| r.batch_metrics.as_ref().map(|m| m.label_entropy)).collect()
    }

    fn last(&self) -> &ExperimentRecord {
        self.records.last().expect("runs are non-empty")
    }
}

fn group_runs(records: &[ExperimentRecord]) -> Vec<RunView<'_>> {
    let mut map: BTreeMap<(Strategy, u64), Vec<&ExperimentRecord>> = BTreeMap::new();
    for r in records {
        map.entry((r.strategy, r.seed)).or_default().push(r);
    }
    map.into_iter()
        .map(|((strategy, seed), mut records)| {
            records.sort_by_key(|r| r.iteration);
            RunView { strategy, seed, records }
        })
        .collect()
}

fn mean(values: &[f64]) -> Option<f64> {
    (!values.is_empty()).then(|| values.iter().sum::<f64>() / values.len() as f64)
}

fn mean_std(values: &[f64]) -> (Option<f64>, Option<f64>) {
    if values.is_empty() {
        (None, None)
    } else {
        let (m, s) = analysis::mean_std(values);
        (Some(m), Some(s))
    }
}

fn by_strategy<'a, 'b>(runs: &'b [RunView<'a>]) -> BTreeMap<Strategy, Vec<&'b RunView<'a>>> {
    let mut map: BTreeMap<Strategy, Vec<&RunView>> = BTreeMap::new();
    for run in runs {
        map.entry(run.strategy).or_default().push(run);
    }
    map
}

fn metrics_rows(runs: &[RunView]) -> Vec<Vec<String>> {
    by_strategy(runs)
        .into_iter()
        .map(|(strategy, group)| {
            let batch = |f: fn(&BatchMetrics) -> Option<f64>| -> Vec<f64> {
                group
                    .iter()
                    .flat_map(|run| run.records.iter().filter_map(|r| r.batch_metrics.as_ref().and_then(f)))
                    .collect()
            };
            let mut run_means = Vec::new();
            let mut run_stds = Vec::new();
            for run in &group {
                if let (Some(m), Some(s)) = mean_std(&run.query_entropies()) {
                    run_means.push(m);
                    run_stds.push(s);
                }
            }
            let (q_mean, q_std_seeds) = mean_std(&run_means);
            let selected: Vec<f64> = group
                .iter()
                .filter_map(|run| run.records.iter().rev().find_map(|r| r.queried_label_entropy))
                .collect();
            let finals = |f: fn(&ExperimentRecord) -> f64| -> Option<f64> {
                mean(&group.iter().map(|run| f(run.last())).collect::<Vec<_>>())
            };
            vec![
                strategy.name().to_string(),
                group.len().to_string(),
                opt(mean(&batch(|m| m.diversity))),
                opt(mean(&batch(|m| m.representativeness))),
                opt(q_mean),
                opt(mean(&run_stds)),
                opt(q_std_seeds),
                opt(mean(&selected)),
                opt(mean(&batch(|m| Some(m.kl_to_ground_truth)))),
                opt(finals(|r| r.macro_f1)),
                opt(finals(|r| r.micro_f1)),
                opt(finals(|r| r.labeled_fraction())),
            ]
        })
        .collect()
}

fn runtime_rows(runs: &[RunView]) -> Vec<Vec<String>> {
    by_strategy(runs)
        .into_iter()
        .map(|(strategy, group)| {
            let times: Vec<f64> = group
                .iter()
                .flat_map(|run| run.records.iter().filter_map(|r| r.batch_metrics.as_ref()))
                .map(|m| m.selection_runtime_s)
                .filter(|t| t.is_finite())
                .collect();
            let (m, s) = mean_std(&times);
            let max = times.iter().copied().fold(None, |acc: Option<f64>, t| Some(acc.map_or(t, |a| a.max(t))));
            let per_run = (!times.is_empty()).then(|| times.iter().sum::<f64>() / group.len() as f64);
            vec![
                strategy.name().to_string(),
                group.len().to_string(),
                times.len().to_string(),
                opt(m),
                opt(s),
                opt(max),
                opt(per_run),
            ]
        })
        .collect()
}

/// One pairwise comparison of per-seed mean query label entropies.
#[derive(Debug, Clone, PartialEq)]
pub struct WilcoxonRow {
    pub strategy_a: Strategy,
    pub strategy_b: Strategy,
    /// Seeds present for both strategies.
    pub pairs: usize,
    /// `Err` carries the reason the test could not run.
    pub result: std::result::Result<WilcoxonResult, String>,
}

/// Pairwise Wilcoxon tests between all strategies present in `records`.
/// Empty when fewer than two strategies are present.
pub fn wilcoxon_comparisons(records: &[ExperimentRecord]) -> Vec<WilcoxonRow> {
    let runs = group_runs(records);
    let mut per_strategy: BTreeMap<Strategy, BTreeMap<u64, f64>> = BTreeMap::new();
    for run in &runs {
        let entry = per_strategy.entry(run.strategy).or_default();
        if let Some(m) = mean(&run.query_entropies()) {
            entry.insert(run.seed, m);
        }
    }
    let strategies: Vec<Strategy> = per_strategy.keys().copied().collect();
    let mut rows = Vec::new();
    for (i, &a) in strategies.iter().enumerate() {
        for &b in &strategies[i + 1..] {
            let (xa, xb) = (&per_strategy[&a], &per_strategy[&b]);
            let (x, y): (Vec<f64>, Vec<f64>) =
                xa.iter().filter_map(|(seed, va)| xb.get(seed).map(|vb| (*va, *vb))).unzip();
            rows.push(WilcoxonRow {
                strategy_a: a,
                strategy_b: b,
                pairs: x.len(),
                result: analysis::wilcoxon_signed_rank(&x, &y).map_err(|e| e.kind().to_string()),
            });
        }
    }
    rows
}

fn wilcoxon_csv_rows(rows: &[WilcoxonRow]) -> Vec<Vec<String>> {
    if rows.is_empty() {
        let mut row = vec![String::new(); WILCOXON_COLUMNS.len()];
        row[2] = "0".into();
        row[7] = "not_applicable".into();
        return vec![row];
    }
    rows.iter()
        .map(|r| {
            let mut row = vec![r.strategy_a.name().to_string(), r.strategy_b.name().to_string(), r.pairs.to_string()];
            match &r.result {
                Ok(w) => row.extend([
                    w.n.to_string(),
                    g6(w.statistic),
                    g6(w.p_value),
                    serde_json::to_value(w.method).expect("enum").as_str().unwrap_or_default().to_string(),
                    "ok".to_string(),
                ]),
                Err(reason) => row.extend([String::new(), String::new(), String::new(), String::new(), reason.clone()]),
            }
            row
        })
        .collect()
}

/// Paths of the files written by [`emit_reports`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ReportFiles {
    pub learning_curves: PathBuf,
    pub metrics_table: PathBuf,
    pub runtime_table: PathBuf,
    pub wilcoxon: PathBuf,
    pub manifest: PathBuf,
}

#[derive(Serialize)]
struct ManifestRun {
    strategy: Strategy,
    seed: u64,
    records: usize,
    final_labeled_count: usize,
}

#[derive(Serialize)]
struct Manifest<'a> {
    format: &'static str,
    version: u32,
    textal_version: &'static str,
    config_hash: Option<String>,
    runs: Vec<ManifestRun>,
    failures: &'a [RunFailure],
    files: BTreeMap<String, String>,
}

fn sha256_file(path: &Path) -> Result<String> {
    let bytes = fs::read(path).map_err(|e| Error::io(path, e))?;
    Ok(Sha256::digest(&bytes).iter().map(|b| format!("{b:02x}")).collect())
}

/// Write the aggregate report files into `out_dir`. The manifest is written
/// last, so its presence marks a complete report.
pub fn emit_reports(
    records: &[ExperimentRecord],
    failures: &[RunFailure],
    config: Option<&ExperimentConfig>,
    out_dir: &Path,
) -> Result<ReportFiles> {
    if records.is_empty() {
        return Err(Error::EmptySelection("no records to report".into()));
    }
    fs::create_dir_all(out_dir).map_err(|e| Error::io(out_dir, e))?;
    let files = ReportFiles {
        learning_curves: out_dir.join("learning_curves.csv"),
        metrics_table: out_dir.join("metrics_table.csv"),
        runtime_table: out_dir.join("runtime_table.csv"),
        wilcoxon: out_dir.join("wilcoxon.csv"),
        manifest: out_dir.join("manifest.json"),
    };
    let runs = group_runs(records);

    write_csv(
        &files.learning_curves,
        &CURVE_COLUMNS,
        runs.iter().flat_map(|run| {
            run.records.iter().map(|r| {
                vec![
                    r.strategy.name().to_string(),
                    r.seed.to_string(),
                    r.iteration.to_string(),
                    r.labeled_count.to_string(),
                    g6(r.labeled_fraction()),
                    g6(r.macro_f1),
                    g6(r.micro_f1),
                ]
            })
        }),
    )?;
    write_csv(&files.metrics_table, &METRICS_COLUMNS, metrics_rows(&runs))?;
    write_csv(&files.runtime_table, &RUNTIME_TABLE_COLUMNS, runtime_rows(&runs))?;
    write_csv(&files.wilcoxon, &WILCOXON_COLUMNS, wilcoxon_csv_rows(&wilcoxon_comparisons(records)))?;

    let mut hashes = BTreeMap::new();
    for p in [&files.learning_curves, &files.metrics_table, &files.runtime_table, &files.wilcoxon] {
        let name = p.file_name().expect("file name").to_string_lossy().into_owned();
        hashes.insert(name, sha256_file(p)?);
    }
    let manifest = Manifest {
        format: "textal-report",
        version: 1,
        textal_version: env!("CARGO_PKG_VERSION"),
        config_hash: config.map(ExperimentConfig::hash),
        runs: runs
            .iter()
            .map(|run| ManifestRun {
                strategy: run.strategy,
                seed: run.seed,
                records: run.records.len(),
                final_labeled_count: run.last().labeled_count,
            })
            .collect(),
        failures,
        files: hashes,
    };
    let mut text = serde_json::to_string_pretty(&manifest).expect("manifest serializes");
    text.push('\n');
    let mut f = fs::File::create(&files.manifest).map_err(|e| Error::io(&files.manifest, e))?;
    f.write_all(text.as_bytes()).map_err(|e| Error::io(&files.manifest, e))?;
    Ok(files)
}
