//! The retrain-from-scratch active-learning loop.

use std::time::Instant;

use serde::{Deserialize, Serialize};

use crate::analysis::{self, BatchMetrics, DEFAULT_KL_EPSILON};
use crate::data::{Dataset, FeatureMatrix, Split};
use crate::error::{Error, Result};
use crate::featurize::{fit_featurizer, load_embeddings, parse_corpus, FeaturizerMode, FittedFeaturizer};
use crate::model::{train_on_rows, ClassifierState};
use crate::pool::Pool;
use crate::rng::RngState;
use crate::strategies::{self, QueryBatch, SelectionContext, Strategy};

use super::config::ExperimentConfig;

/// Parsed and featurized train/validation splits.
#[derive(Debug, Clone)]
pub struct PreparedData {
    pub train: Dataset,
    pub validation: Dataset,
    pub train_features: FeatureMatrix,
    pub validation_features: FeatureMatrix,
    /// Present for hashed TF-IDF, fitted on the training split only.
    pub featurizer: Option<FittedFeaturizer>,
}

impl PreparedData {
    /// Featurize already-parsed splits. Validation classes are mapped onto
    /// the training class order.
    pub fn from_datasets(train: Dataset, validation: Dataset, config: &ExperimentConfig) -> Result<Self> {
        let validation = validation.remap_classes(train.class_names())?;
        match config.featurizer.mode {
            FeaturizerMode::HashedTfidf => {
                let featurizer = fit_featurizer(&train, &config.featurizer)?;
                let train_features = featurizer.transform(&train);
                let validation_features = featurizer.transform(&validation);
                Ok(Self { train, validation, train_features, validation_features, featurizer: Some(featurizer) })
            }
            FeaturizerMode::Precomputed => {
                let missing = || Error::Config("precomputed features need embedding paths".into());
                let tp = config.data.train_embeddings.as_ref().ok_or_else(missing)?;
                let vp = config.data.validation_embeddings.as_ref().ok_or_else(missing)?;
                let train_features = load_embeddings(tp, train.len())?;
                let validation_features = load_embeddings(vp, validation.len())?;
                Self::from_features(train, validation, train_features, validation_features)
            }
        }
    }

    /// Use caller-supplied feature matrices.
    pub fn from_features(
        train: Dataset,
        validation: Dataset,
        train_features: FeatureMatrix,
        validation_features: FeatureMatrix,
    ) -> Result<Self> {
        if train_features.rows() != train.len() || validation_features.rows() != validation.len() {
            return Err(Error::Shape(format!(
                "feature rows {}/{} for {}/{} instances",
                train_features.rows(),
                validation_features.rows(),
                train.len(),
                validation.len()
            )));
        }
        if train_features.dim() != validation_features.dim() {
            return Err(Error::Shape(format!(
                "train dim {} vs validation dim {}",
                train_features.dim(),
                validation_features.dim()
            )));
        }
        let validation = validation.remap_classes(train.class_names())?;
        Ok(Self { train, validation, train_features, validation_features, featurizer: None })
    }
}

/// Parse, featurize and size-check the data named by `config`.
pub fn prepare_data(config: &ExperimentConfig) -> Result<PreparedData> {
    let train = parse_corpus(&config.data.train_path, config.data.format, Split::Train)?;
    let validation = parse_corpus(&config.data.validation_path, config.data.format, Split::Validation)?;
    config.validate_pool_size(train.len())?;
    PreparedData::from_datasets(train, validation, config)
}

/// One evaluation point of a run. The batch (if any) was selected by the
/// model evaluated in the same record.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentRecord {
    pub strategy: Strategy,
    pub seed: u64,
    pub iteration: usize,
    pub labeled_count: usize,
    pub pool_size: usize,
    pub macro_f1: f64,
    pub micro_f1: f64,
    /// Label entropy of every instance queried so far, this record's batch
    /// included; the random seed set is not counted.
    pub queried_label_entropy: Option<f64>,
    pub batch_metrics: Option<BatchMetrics>,
}

impl ExperimentRecord {
    pub fn labeled_fraction(&self) -> f64 {
        self.labeled_count as f64 / self.pool_size as f64
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunOutput {
    pub strategy: Strategy,
    pub seed: u64,
    pub records: Vec<ExperimentRecord>,
    pub batches: Vec<QueryBatch>,
    /// True when the pool ran out before all iterations completed.
    pub truncated: bool,
}

/// The initial labeled set for `seed`; identical for every strategy.
pub fn initial_seed_set(pool_size: usize, seed_set_size: usize, seed: u64) -> Vec<usize> {
    let all: Vec<usize> = (0..pool_size).collect();
    let mut picked = RngState::new(seed).stream("seed_set", 0).sample(&all, seed_set_size);
    picked.sort_unstable();
    picked
}

/// Train a fresh classifier on the labeled part of `pool`. The result depends
/// only on the labeled set, `seed` and `iteration`.
pub fn train_iteration(
    config: &ExperimentConfig,
    features: &FeatureMatrix,
    pool: &Pool,
    seed: u64,
    iteration: usize,
) -> Result<ClassifierState> {
    let rows = pool.labeled_indices();
    let labels = pool.labeled_labels();
    let mut rng = RngState::new(seed).stream("train", iteration as u64);
    train_on_rows(features, &rows, &labels, pool.num_classes(), &config.classifier, &mut rng)
}

/// Run one strategy for one seed: seed set, then `iterations` rounds of
/// train, evaluate, select and label, then a final train and evaluate.
pub fn run_experiment(
    config: &ExperimentConfig,
    data: &PreparedData,
    strategy: Strategy,
    seed: u64,
) -> Result<RunOutput> {
    config.validate()?;
    config.validate_pool_size(data.train.len())?;
    let classes = data.train.num_classes();
    let rng_state = RngState::new(seed);
    let stream_tag = format!("strategy/{}", strategy.name());
    let ground_truth = Pool::new(data.train.labels(), classes)?.ground_truth_distribution();

    let mut pool = Pool::new(data.train.labels(), classes)?;
    pool = pool.label_instances(&initial_seed_set(pool.len(), config.seed_set_size, seed))?;
    let validation_labels = data.validation.labels();

    let mut records = Vec::with_capacity(config.iterations + 1);
    let mut batches = Vec::with_capacity(config.iterations);
    let mut queried: Vec<usize> = Vec::new();
    let mut truncated = false;

    for t in 0..=config.iterations {
        let model = train_iteration(config, &data.train_features, &pool, seed, t)?;
        let predicted = model.predict_proba(&data.validation_features)?.predictions();
        let mut record = ExperimentRecord {
            strategy,
            seed,
            iteration: t,
            labeled_count: pool.labeled().len(),
            pool_size: pool.len(),
            macro_f1: analysis::macro_f1(&predicted, &validation_labels, classes)?,
            micro_f1: analysis::micro_f1(&predicted, &validation_labels, classes)?,
            queried_label_entropy: None,
            batch_metrics: None,
        };
        if t == config.iterations {
            records.push(record);
            break;
        }
        if pool.unlabeled().is_empty() {
            log::warn!("{strategy} seed {seed}: pool exhausted at iteration {t}; stopping early");
            truncated = true;
            records.push(record);
            break;
        }
        if pool.unlabeled().len() < config.batch_size {
            log::warn!(
                "{strategy} seed {seed}: only {} unlabeled left for a batch of {} at iteration {t}",
                pool.unlabeled().len(),
                config.batch_size
            );
            truncated = true;
        }

        let ctx = SelectionContext {
            pool: &pool,
            features: &data.train_features,
            model: &model,
            config: &config.strategy_config,
        };
        let mut rng = rng_state.stream(&stream_tag, t as u64);
        let started = Instant::now();
        let batch = strategies::select(strategy, &ctx, config.batch_size, t, &mut rng)?;
        let runtime = started.elapsed().as_secs_f64();

        let reprs = ctx.representations()?;
        let metrics = batch_metrics(config, &pool, &reprs, &batch, &ground_truth, seed, t, runtime)?;
        queried.extend_from_slice(&batch.indices);
        record.queried_label_entropy =
            Some(analysis::label_entropy(&pool.empirical_label_distribution(&queried, 0.0)?));
        record.batch_metrics = Some(metrics);
        records.push(record);

        pool = pool.label_instances(&batch.indices)?;
        batches.push(batch);
    }
    Ok(RunOutput { strategy, seed, records, batches, truncated })
}

#[allow(clippy::too_many_arguments)]
fn batch_metrics(
    config: &ExperimentConfig,
    pool: &Pool,
    reprs: &FeatureMatrix,
    batch: &QueryBatch,
    ground_truth: &crate::data::LabelDistribution,
    seed: u64,
    iteration: usize,
    runtime: f64,
) -> Result<BatchMetrics> {
    let mut rng = RngState::new(seed).stream("metrics", iteration as u64);
    let defined = |r: Result<f64>| match r {
        Ok(v) => Ok(Some(v)),
        Err(Error::UndefinedMetric(msg)) => {
            log::debug!("metric undefined at iteration {iteration}: {msg}");
            Ok(None)
        }
        Err(e) => Err(e),
    };
    let diversity = defined(analysis::diversity(&reprs.select_rows(&batch.indices), reprs, &mut rng))?;
    let representativeness = defined(analysis::representativeness(
        &batch.indices,
        pool,
        reprs,
        config.knn_k,
        config.density_baseline_rows,
        &mut rng,
    ))?;
    let dist = pool.empirical_label_distribution(&batch.indices, 0.0)?;
    Ok(BatchMetrics {
        diversity,
        representativeness,
        label_entropy: analysis::label_entropy(&dist),
        kl_to_ground_truth: analysis::kl_divergence(&dist, ground_truth, DEFAULT_KL_EPSILON),
        selection_runtime_s: runtime,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::featurize::CorpusFormat;
    use crate::synthetic::cluster_data;

    fn small_config(batch: usize, iterations: usize) -> ExperimentConfig {
        let mut cfg = ExperimentConfig::new("unused", "unused", CorpusFormat::Jsonl);
        cfg.batch_size = batch;
        cfg.iterations = iterations;
        cfg.seed_set_size = batch;
        cfg.classifier.hidden_dim = 8;
        cfg.classifier.epochs = 5;
        cfg.strategy_config.dal_sub_batches = 2;
        cfg.strategy_config.dal_discriminator.hidden_dim = 8;
        cfg.strategy_config.dal_discriminator.epochs = 3;
        cfg
    }

    #[test]
    fn one_iteration_gives_two_evaluations_and_one_batch() {
        let data = cluster_data(60, 20, 4, 3, 3.0, 1).unwrap();
        let run = run_experiment(&small_config(5, 1), &data, Strategy::Random, 7).unwrap();
        assert_eq!(run.records.len(), 2);
        assert_eq!(run.batches.len(), 1);
        assert!(run.records[0].batch_metrics.is_some());
        assert!(run.records[1].batch_metrics.is_none());
        assert!(!run.truncated);
    }

    #[test]
    fn labeled_count_follows_schedule() {
        let data = cluster_data(80, 20, 4, 3, 3.0, 1).unwrap();
        let cfg = small_config(6, 4);
        for strategy in Strategy::ALL {
            let run = run_experiment(&cfg, &data, strategy, 3).unwrap();
            let counts: Vec<usize> = run.records.iter().map(|r| r.labeled_count).collect();
            assert_eq!(counts, vec![6, 12, 18, 24, 30], "{strategy}");
            assert!(run.batches.iter().all(|b| b.len() == 6));
        }
    }

    #[test]
    fn runs_repeat_exactly() {
        let data = cluster_data(60, 20, 4, 3, 3.0, 2).unwrap();
        let cfg = small_config(5, 3);
        let strip = |mut run: RunOutput| {
            for r in &mut run.records {
                if let Some(m) = &mut r.batch_metrics {
                    m.selection_runtime_s = 0.0;
                }
            }
            run
        };
        let a = strip(run_experiment(&cfg, &data, Strategy::Dbal, 4).unwrap());
        let b = strip(run_experiment(&cfg, &data, Strategy::Dbal, 4).unwrap());
        assert_eq!(a, b);
    }

    #[test]
    fn strategies_share_the_seed_set_model() {
        let data = cluster_data(60, 30, 4, 3, 2.0, 3).unwrap();
        let cfg = small_config(5, 1);
        let a = run_experiment(&cfg, &data, Strategy::Random, 11).unwrap();
        let b = run_experiment(&cfg, &data, Strategy::Coreset, 11).unwrap();
        assert_eq!(a.records[0].macro_f1, b.records[0].macro_f1);
        assert_eq!(a.records[0].micro_f1, b.records[0].micro_f1);
    }

    #[test]
    fn exhaustion_truncates() {
        let data = cluster_data(20, 10, 3, 2, 3.0, 4).unwrap();
        let mut cfg = small_config(6, 5);
        assert!(matches!(run_experiment(&cfg, &data, Strategy::Random, 0), Err(Error::Config(_))));
        cfg.allow_truncation = true;
        let run = run_experiment(&cfg, &data, Strategy::Entropy, 0).unwrap();
        assert!(run.truncated);
        let counts: Vec<usize> = run.records.iter().map(|r| r.labeled_count).collect();
        assert_eq!(counts, vec![6, 12, 18, 20]);
        assert_eq!(run.batches.last().unwrap().len(), 2);
    }

    #[test]
    fn seed_set_is_seeded_and_sorted() {
        let a = initial_seed_set(100, 10, 5);
        assert_eq!(a, initial_seed_set(100, 10, 5));
        assert_ne!(a, initial_seed_set(100, 10, 6));
        assert!(a.windows(2).all(|w| w[0] < w[1]));
    }
}
