//! Experiment configuration.
//!
//! Configurations are flat TOML key/value files; every key is optional except
//! the data paths. Relative paths resolve against the file's directory.
//!
//! | key | default | meaning |
//! |-----|---------|---------|
//! | `train_path`, `validation_path` | required | corpus files |
//! | `format` | `"trec6"` | `trec6`, `ag_news_csv` or `jsonl` |
//! | `featurizer` | `"hashed_tfidf"` | or `"precomputed"` |
//! | `hash_dim`, `lowercase`, `sublinear_tf`, `l2_normalize` | 4096, true, true, true | TF-IDF settings |
//! | `train_embeddings`, `validation_embeddings` | none | CSV/JSONL rows for `precomputed` |
//! | `hidden_dim`, `dropout_rate`, `learning_rate`, `epochs`, `minibatch_size`, `l2_penalty`, `optimizer` | 64, 0.3, 1e-3, 30, 32, 1e-4, `"adam"` | classifier |
//! | `strategies` | `["random"]` | strategies to run; `run` uses the first |
//! | `mc_passes`, `dal_sub_batches` | 20, 10 | strategy parameters |
//! | `dal_hidden_dim`, `dal_epochs`, `dal_learning_rate`, `dal_dropout_rate` | classifier values | DAL discriminator |
//! | `representation` | `"hidden"` | `hidden` or `raw` space for core-set, DAL and metrics |
//! | `knn_k`, `density_baseline_rows` | 10, 1000 | representativeness |
//! | `batch_size`, `iterations` | 100, 20 | loop size |
//! | `seed_set_size` | `batch_size` | initial random labeled set |
//! | `seeds` | `[0]` | experiment seeds |
//! | `output_dir` | `"out"` | where reports go |
//! | `allow_truncation` | false | accept `seed_set_size + batch_size * iterations` above the pool size |

use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::featurize::{CorpusFormat, FeaturizerConfig, FeaturizerMode};
use crate::model::{ClassifierConfig, Optimizer};
use crate::strategies::{Representation, Strategy, StrategyConfig};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DataConfig {
    pub train_path: PathBuf,
    pub validation_path: PathBuf,
    pub format: CorpusFormat,
    pub train_embeddings: Option<PathBuf>,
    pub validation_embeddings: Option<PathBuf>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub data: DataConfig,
    pub featurizer: FeaturizerConfig,
    pub classifier: ClassifierConfig,
    pub strategies: Vec<Strategy>,
    pub strategy_config: StrategyConfig,
    pub batch_size: usize,
    pub iterations: usize,
    pub seed_set_size: usize,
    pub seeds: Vec<u64>,
    pub knn_k: usize,
    pub density_baseline_rows: usize,
    pub output_dir: PathBuf,
    pub allow_truncation: bool,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct ConfigFile {
    train_path: PathBuf,
    validation_path: PathBuf,
    format: Option<String>,
    featurizer: Option<FeaturizerMode>,
    hash_dim: Option<usize>,
    lowercase: Option<bool>,
    sublinear_tf: Option<bool>,
    l2_normalize: Option<bool>,
    train_embeddings: Option<PathBuf>,
    validation_embeddings: Option<PathBuf>,
    hidden_dim: Option<usize>,
    dropout_rate: Option<f64>,
    learning_rate: Option<f64>,
    epochs: Option<usize>,
    minibatch_size: Option<usize>,
    l2_penalty: Option<f64>,
    optimizer: Option<Optimizer>,
    strategies: Option<Vec<String>>,
    mc_passes: Option<usize>,
    dal_sub_batches: Option<usize>,
    dal_hidden_dim: Option<usize>,
    dal_epochs: Option<usize>,
    dal_learning_rate: Option<f64>,
    dal_dropout_rate: Option<f64>,
    representation: Option<Representation>,
    knn_k: Option<usize>,
    density_baseline_rows: Option<usize>,
    batch_size: Option<usize>,
    iterations: Option<usize>,
    seed_set_size: Option<usize>,
    seeds: Option<Vec<u64>>,
    output_dir: Option<PathBuf>,
    allow_truncation: Option<bool>,
}

impl ExperimentConfig {
    /// Defaults around the given data files.
    pub fn new(train_path: impl Into<PathBuf>, validation_path: impl Into<PathBuf>, format: CorpusFormat) -> Self {
        Self {
            data: DataConfig {
                train_path: train_path.into(),
                validation_path: validation_path.into(),
                format,
                train_embeddings: None,
                validation_embeddings: None,
            },
            featurizer: FeaturizerConfig::default(),
            classifier: ClassifierConfig::default(),
            strategies: vec![Strategy::Random],
            strategy_config: StrategyConfig::default(),
            batch_size: 100,
            iterations: 20,
            seed_set_size: 100,
            seeds: vec![0],
            knn_k: crate::analysis::DEFAULT_K,
            density_baseline_rows: 1000,
            output_dir: PathBuf::from("out"),
            allow_truncation: false,
        }
    }

    pub fn from_toml_str(text: &str, base_dir: &Path) -> Result<Self> {
        let file: ConfigFile = toml::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        let resolve = |p: PathBuf| if p.is_absolute() { p } else { base_dir.join(p) };
        let format = match file.format {
            Some(f) => f.parse()?,
            None => CorpusFormat::Trec6,
        };
        let mut cfg = ExperimentConfig::new(resolve(file.train_path), resolve(file.validation_path), format);
        cfg.data.train_embeddings = file.train_embeddings.map(resolve);
        cfg.data.validation_embeddings = file.validation_embeddings.map(resolve);

        let f = &mut cfg.featurizer;
        f.mode = file.featurizer.unwrap_or(f.mode);
        f.hash_dim = file.hash_dim.unwrap_or(f.hash_dim);
        f.lowercase = file.lowercase.unwrap_or(f.lowercase);
        f.sublinear_tf = file.sublinear_tf.unwrap_or(f.sublinear_tf);
        f.l2_normalize = file.l2_normalize.unwrap_or(f.l2_normalize);

        let c = &mut cfg.classifier;
        c.hidden_dim = file.hidden_dim.unwrap_or(c.hidden_dim);
        c.dropout_rate = file.dropout_rate.unwrap_or(c.dropout_rate);
        c.learning_rate = file.learning_rate.unwrap_or(c.learning_rate);
        c.epochs = file.epochs.unwrap_or(c.epochs);
        c.minibatch_size = file.minibatch_size.unwrap_or(c.minibatch_size);
        c.l2_penalty = file.l2_penalty.unwrap_or(c.l2_penalty);
        c.optimizer = file.optimizer.unwrap_or(c.optimizer);

        if let Some(names) = file.strategies {
            cfg.strategies = names.iter().map(|n| n.parse()).collect::<Result<_>>()?;
        }
        let s = &mut cfg.strategy_config;
        s.mc_passes = file.mc_passes.unwrap_or(s.mc_passes);
        s.dal_sub_batches = file.dal_sub_batches.unwrap_or(s.dal_sub_batches);
        s.representation = file.representation.unwrap_or(s.representation);
        s.dal_discriminator = cfg.classifier.clone();
        let d = &mut s.dal_discriminator;
        d.hidden_dim = file.dal_hidden_dim.unwrap_or(d.hidden_dim);
        d.epochs = file.dal_epochs.unwrap_or(d.epochs);
        d.learning_rate = file.dal_learning_rate.unwrap_or(d.learning_rate);
        d.dropout_rate = file.dal_dropout_rate.unwrap_or(d.dropout_rate);

        cfg.knn_k = file.knn_k.unwrap_or(cfg.knn_k);
        cfg.density_baseline_rows = file.density_baseline_rows.unwrap_or(cfg.density_baseline_rows);
        cfg.batch_size = file.batch_size.unwrap_or(cfg.batch_size);
        cfg.iterations = file.iterations.unwrap_or(cfg.iterations);
        cfg.seed_set_size = file.seed_set_size.unwrap_or(cfg.batch_size);
        cfg.seeds = file.seeds.unwrap_or(cfg.seeds);
        cfg.output_dir = resolve(file.output_dir.unwrap_or(cfg.output_dir));
        cfg.allow_truncation = file.allow_truncation.unwrap_or(false);
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let base = path.parent().unwrap_or(Path::new("."));
        Self::from_toml_str(&text, base)
    }

    /// Checks that need no data.
    pub fn validate(&self) -> Result<()> {
        if self.batch_size == 0 {
            return Err(Error::Config("batch_size must be >= 1".into()));
        }
        if self.iterations == 0 {
            return Err(Error::Config("iterations must be >= 1".into()));
        }
        if self.seed_set_size == 0 {
            return Err(Error::Config("seed_set_size must be >= 1".into()));
        }
        if self.seeds.is_empty() {
            return Err(Error::Config("at least one seed is required".into()));
        }
        if self.strategies.is_empty() {
            return Err(Error::Config("at least one strategy is required".into()));
        }
        if self.knn_k == 0 || self.density_baseline_rows == 0 {
            return Err(Error::Config("knn_k and density_baseline_rows must be >= 1".into()));
        }
        self.featurizer.validate()?;
        self.classifier.validate()?;
        // The sub-batch bound only matters when DAL actually runs.
        let dal_bound = if self.strategies.contains(&Strategy::Dal) { self.batch_size } else { usize::MAX };
        self.strategy_config.validate(dal_bound)?;
        if self.featurizer.mode == FeaturizerMode::Precomputed
            && (self.data.train_embeddings.is_none() || self.data.validation_embeddings.is_none())
        {
            return Err(Error::Config(
                "precomputed features need train_embeddings and validation_embeddings".into(),
            ));
        }
        Ok(())
    }

    /// Checks against the size of the training pool.
    pub fn validate_pool_size(&self, train_rows: usize) -> Result<()> {
        let needed = self.seed_set_size + self.batch_size * self.iterations;
        if self.seed_set_size > train_rows {
            return Err(Error::Config(format!(
                "seed_set_size {} exceeds the {train_rows} training instances",
                self.seed_set_size
            )));
        }
        if needed > train_rows && !self.allow_truncation {
            return Err(Error::Config(format!(
                "seed_set_size + batch_size * iterations = {needed} exceeds the {train_rows} training \
                 instances (set allow_truncation = true to stop early instead)"
            )));
        }
        Ok(())
    }

    /// SHA-256 of the canonical JSON form.
    pub fn hash(&self) -> String {
        let json = serde_json::to_vec(self).expect("config serializes");
        let digest = Sha256::digest(&json);
        digest.iter().map(|b| format!("{b:02x}")).collect()
    }
}
