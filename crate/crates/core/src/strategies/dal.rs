use std::collections::BTreeSet;

use super::{check_request, top_k, QueryBatch, Strategy, StrategyConfig};
use crate::data::FeatureMatrix;
use crate::error::{Error, Result};
use crate::model::{train_on_rows, ClassifierConfig, ClassifierState};
use crate::pool::Pool;
use crate::rng::StreamRng;

/// Split `total` into `parts` near-equal sizes, larger ones first.
pub fn sub_batch_sizes(total: usize, parts: usize) -> Vec<usize> {
    let parts = parts.clamp(1, total.max(1));
    let (base, extra) = (total / parts, total % parts);
    (0..parts).map(|i| base + usize::from(i < extra)).collect()
}

/// Binary labeled(0) / unlabeled(1) classifier over `reprs`.
pub fn train_discriminator(
    reprs: &FeatureMatrix,
    labeled: &BTreeSet<usize>,
    unlabeled: &BTreeSet<usize>,
    config: &ClassifierConfig,
    rng: &mut StreamRng,
) -> Result<ClassifierState> {
    let rows: Vec<usize> = labeled.union(unlabeled).copied().collect();
    let labels: Vec<usize> = rows.iter().map(|i| usize::from(unlabeled.contains(i))).collect();
    train_on_rows(reprs, &rows, &labels, 2, config, rng)
}

/// Discriminative active learning.
///
/// The batch is assembled over several rounds. Each round trains a fresh
/// discriminator to tell labeled (plus already chosen) rows from the rest
/// of the pool, then takes the rows it most confidently calls unlabeled.
pub fn select_dal(
    pool: &Pool,
    reprs: &FeatureMatrix,
    batch_size: usize,
    config: &StrategyConfig,
    rng: &mut StreamRng,
) -> Result<QueryBatch> {
    check_request(pool, batch_size)?;
    if pool.labeled().is_empty() {
        return Err(Error::NeedsSeed);
    }
    if reprs.rows() != pool.len() {
        return Err(Error::Shape(format!(
            "{} representation rows for a pool of {}",
            reprs.rows(),
            pool.len()
        )));
    }
    let total = batch_size.min(pool.unlabeled().len());
    let mut labeled = pool.labeled().clone();
    let mut unlabeled = pool.unlabeled().clone();
    let mut indices = Vec::with_capacity(total);
    let mut scores = Vec::with_capacity(total);
    for size in sub_batch_sizes(total, config.dal_sub_batches) {
        let disc = train_discriminator(reprs, &labeled, &unlabeled, &config.dal_discriminator, rng)?;
        let candidates: Vec<usize> = unlabeled.iter().copied().collect();
        let probs = disc.predict_proba(&reprs.select_rows(&candidates))?;
        let scored = candidates
            .iter()
            .enumerate()
            .map(|(k, &i)| (i, probs.row(k)[1]))
            .collect();
        let round = top_k(scored, size, Strategy::Dal);
        for (&i, &s) in round.indices.iter().zip(&round.scores) {
            unlabeled.remove(&i);
            labeled.insert(i);
            indices.push(i);
            scores.push(s);
        }
    }
    Ok(QueryBatch {
        indices,
        scores,
        strategy: Strategy::Dal.name().into(),
        iteration: 0,
    })
}
