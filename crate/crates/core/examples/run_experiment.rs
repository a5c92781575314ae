// One active-learning run: seed set, then select, label and retrain from
// scratch each iteration. Prints the learning curve.
//
//     cargo run --example run_experiment [STRATEGY]

use textal::featurize::CorpusFormat;
use textal::harness::{prepare_data, run_experiment, ExperimentConfig};
use textal::strategies::Strategy;
use textal::synthetic::trec_corpus;

fn main() -> textal::Result<()> {
    let strategy: Strategy = std::env::args().nth(1).unwrap_or_else(|| "entropy".into()).parse()?;
    let dir = std::env::temp_dir().join(format!("textal-run-{}", std::process::id()));
    std::fs::create_dir_all(&dir).map_err(|e| textal::Error::Io { path: dir.clone(), source: e })?;
    let (train, validation) = (dir.join("train.label"), dir.join("validation.label"));
    for (path, counts, part) in [(&train, [40, 80, 80, 80, 60, 60], 0), (&validation, [10, 20, 20, 20, 15, 15], 1)] {
        std::fs::write(path, trec_corpus(&counts, 0.6, 4, part))
            .map_err(|e| textal::Error::Io { path: path.clone(), source: e })?;
    }

    let mut config = ExperimentConfig::new(&train, &validation, CorpusFormat::Trec6);
    config.featurizer.hash_dim = 1024;
    config.classifier.hidden_dim = 32;
    config.classifier.learning_rate = 1e-2;
    config.batch_size = 20;
    config.seed_set_size = 20;
    config.iterations = 6;
    config.strategy_config.dal_sub_batches = 4;

    let data = prepare_data(&config)?;
    let run = run_experiment(&config, &data, strategy, 0)?;
    println!("{strategy}: iteration, labeled, macro F1, batch label entropy");
    for r in &run.records {
        let entropy = r.batch_metrics.as_ref().map(|m| format!("{:.3}", m.label_entropy)).unwrap_or_default();
        println!("{:>3} {:>5} {:.3} {entropy}", r.iteration, r.labeled_count, r.macro_f1);
    }
    let _ = std::fs::remove_dir_all(&dir);
    Ok(())
}
