// Every strategy over several seeds on Gaussian clusters, with the report
// files written to OUT_DIR (default: a temporary directory).
//
//     cargo run --release --example benchmark_suite [OUT_DIR]

use std::path::PathBuf;

use textal::featurize::CorpusFormat;
use textal::harness::{run_suite, write_suite, ExperimentConfig};
use textal::strategies::Strategy;
use textal::synthetic::cluster_data;

fn main() -> textal::Result<()> {
    let keep = std::env::args().nth(1).map(PathBuf::from);
    let out = keep.clone().unwrap_or_else(|| std::env::temp_dir().join(format!("textal-suite-{}", std::process::id())));

    let data = cluster_data(400, 200, 8, 4, 2.0, 1)?;
    let mut config = ExperimentConfig::new("clusters", "clusters", CorpusFormat::Jsonl);
    config.classifier.hidden_dim = 16;
    config.classifier.epochs = 15;
    config.classifier.learning_rate = 1e-2;
    config.batch_size = 20;
    config.seed_set_size = 20;
    config.iterations = 4;
    config.strategies = Strategy::ALL.to_vec();
    config.strategy_config.dal_sub_batches = 2;
    config.strategy_config.mc_passes = 8;
    config.seeds = (1..=5).collect();
    config.output_dir = out.clone();

    let report = run_suite(&config, &data)?;
    let files = write_suite(&report, &config, &out)?;
    println!("{} runs, {} failures", report.runs.len(), report.failures.len());
    if let Some(reports) = &files.reports {
        let table = std::fs::read_to_string(&reports.metrics_table)
            .map_err(|e| textal::Error::Io { path: reports.metrics_table.clone(), source: e })?;
        print!("{table}");
    }
    for row in &report.wilcoxon {
        match &row.result {
            Ok(w) => println!("{} vs {}: p = {:.3}", row.strategy_a, row.strategy_b, w.p_value),
            Err(reason) => println!("{} vs {}: {reason}", row.strategy_a, row.strategy_b),
        }
    }
    if keep.is_none() {
        let _ = std::fs::remove_dir_all(&out);
    }
    Ok(())
}
