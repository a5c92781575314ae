//! Batch query strategies.
//!
//! Each strategy maps the current pool, features and trained model to a
//! [`QueryBatch`] of `min(B, |unlabeled|)` distinct unlabeled indices.
//! Top-B selections order by descending score and break ties toward the
//! lower index.

mod coreset;
mod dal;
mod egl;
mod uncertainty;

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::data::FeatureMatrix;
use crate::error::{Error, Result};
use crate::format::round6;
use crate::model::{ClassifierConfig, ClassifierState};
use crate::pool::Pool;
use crate::rng::StreamRng;

pub use coreset::select_coreset;
pub use dal::{select_dal, sub_batch_sizes, train_discriminator};
pub use egl::select_egl;
pub use uncertainty::{entropy, select_dbal, select_entropy};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QueryBatch {
    pub indices: Vec<usize>,
    /// Strategy-specific diagnostic per index (entropy, expected gradient
    /// length, min-distance, discriminator probability; 0 for random).
    pub scores: Vec<f64>,
    pub strategy: String,
    pub iteration: usize,
}

impl QueryBatch {
    pub fn len(&self) -> usize {
        self.indices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.indices.is_empty()
    }

    /// One audit-log line: `{"iteration":..,"strategy":..,"indices":[..],"scores":[..]}`.
    pub fn to_json_line(&self) -> String {
        let scores: Vec<f64> = self.scores.iter().map(|&s| round6(s)).collect();
        serde_json::json!({
            "iteration": self.iteration,
            "strategy": self.strategy,
            "indices": self.indices,
            "scores": scores,
        })
        .to_string()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Strategy {
    Random,
    Entropy,
    Egl,
    Dbal,
    Coreset,
    Dal,
}

impl Strategy {
    pub const ALL: [Strategy; 6] = [
        Strategy::Random,
        Strategy::Entropy,
        Strategy::Egl,
        Strategy::Dbal,
        Strategy::Coreset,
        Strategy::Dal,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Strategy::Random => "random",
            Strategy::Entropy => "entropy",
            Strategy::Egl => "egl",
            Strategy::Dbal => "dbal",
            Strategy::Coreset => "coreset",
            Strategy::Dal => "dal",
        }
    }
}

impl fmt::Display for Strategy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Strategy {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let lower = s.trim().to_ascii_lowercase();
        Strategy::ALL
            .into_iter()
            .find(|st| st.name() == lower)
            .or(match lower.as_str() {
                "uncertainty" => Some(Strategy::Entropy),
                "core-set" => Some(Strategy::Coreset),
                _ => None,
            })
            .ok_or_else(|| Error::Config(format!("unknown strategy {s:?}")))
    }
}

/// Which space core-set and DAL measure distances in.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Representation {
    /// The classifier's hidden activations.
    Hidden,
    /// The input features as given.
    Raw,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StrategyConfig {
    pub mc_passes: usize,
    pub dal_sub_batches: usize,
    pub dal_discriminator: ClassifierConfig,
    pub representation: Representation,
}

impl Default for StrategyConfig {
    fn default() -> Self {
        Self {
            mc_passes: 20,
            dal_sub_batches: 10,
            dal_discriminator: ClassifierConfig::default(),
            representation: Representation::Hidden,
        }
    }
}

impl StrategyConfig {
    pub fn validate(&self, batch_size: usize) -> Result<()> {
        if self.mc_passes == 0 {
            return Err(Error::Config("mc_passes must be >= 1".into()));
        }
        if self.dal_sub_batches == 0 || self.dal_sub_batches > batch_size {
            return Err(Error::Config(format!(
                "dal_sub_batches must be in 1..={batch_size}, got {}",
                self.dal_sub_batches
            )));
        }
        self.dal_discriminator.validate()
    }
}

/// Everything a strategy may look at when choosing a batch.
pub struct SelectionContext<'a> {
    pub pool: &'a Pool,
    pub features: &'a FeatureMatrix,
    pub model: &'a ClassifierState,
    pub config: &'a StrategyConfig,
}

impl SelectionContext<'_> {
    /// Representations used by distance-based strategies and metrics.
    pub fn representations(&self) -> Result<FeatureMatrix> {
        match self.config.representation {
            Representation::Hidden => self.model.hidden_repr(self.features),
            Representation::Raw => Ok(self.features.clone()),
        }
    }
}

/// Run `strategy` for a batch of `batch_size` and stamp it with `iteration`.
pub fn select(
    strategy: Strategy,
    ctx: &SelectionContext<'_>,
    batch_size: usize,
    iteration: usize,
    rng: &mut StreamRng,
) -> Result<QueryBatch> {
    let mut batch = match strategy {
        Strategy::Random => select_random(ctx.pool, batch_size, rng)?,
        Strategy::Entropy => {
            check_request(ctx.pool, batch_size)?;
            let probs = ctx.model.predict_proba(ctx.features)?;
            select_entropy(ctx.pool, &probs, batch_size)?
        }
        Strategy::Egl => select_egl(ctx.pool, ctx.model, ctx.features, batch_size)?,
        Strategy::Dbal => select_dbal(
            ctx.pool,
            ctx.model,
            ctx.features,
            batch_size,
            ctx.config.mc_passes,
            rng,
        )?,
        Strategy::Coreset => {
            check_request(ctx.pool, batch_size)?;
            select_coreset(ctx.pool, &ctx.representations()?, batch_size)?
        }
        Strategy::Dal => {
            check_request(ctx.pool, batch_size)?;
            select_dal(ctx.pool, &ctx.representations()?, batch_size, ctx.config, rng)?
        }
    };
    batch.iteration = iteration;
    Ok(batch)
}

/// Uniform sample without replacement, returned in index order.
pub fn select_random(pool: &Pool, batch_size: usize, rng: &mut StreamRng) -> Result<QueryBatch> {
    check_request(pool, batch_size)?;
    let mut indices = rng.sample(&pool.unlabeled_indices(), batch_size);
    indices.sort_unstable();
    Ok(QueryBatch {
        scores: vec![0.0; indices.len()],
        indices,
        strategy: Strategy::Random.name().into(),
        iteration: 0,
    })
}

pub(crate) fn check_request(pool: &Pool, batch_size: usize) -> Result<()> {
    if batch_size == 0 {
        return Err(Error::Config("batch size must be >= 1".into()));
    }
    if pool.unlabeled().is_empty() {
        return Err(Error::ExhaustedPool);
    }
    Ok(())
}

/// Top `k` of `(index, score)` by descending score, ascending index on ties.
pub(crate) fn top_k(mut scored: Vec<(usize, f64)>, k: usize, strategy: Strategy) -> QueryBatch {
    scored.sort_by(|a, b| b.1.total_cmp(&a.1).then(a.0.cmp(&b.0)));
    scored.truncate(k);
    QueryBatch {
        indices: scored.iter().map(|s| s.0).collect(),
        scores: scored.iter().map(|s| s.1).collect(),
        strategy: strategy.name().into(),
        iteration: 0,
    }
}
