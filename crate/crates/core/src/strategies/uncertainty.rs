use super::{check_request, top_k, QueryBatch, Strategy};
use crate::data::FeatureMatrix;
use crate::error::{Error, Result};
use crate::model::{ClassifierState, ProbMatrix};
use crate::pool::Pool;
use crate::rng::StreamRng;

/// Shannon entropy in nats, with `0 ln 0 = 0`.
pub fn entropy(probs: &[f64]) -> f64 {
    let h = -probs
        .iter()
        .filter(|&&p| p > 0.0)
        .map(|&p| p * p.ln())
        .sum::<f64>();
    // A one-hot distribution would otherwise give -0.0.
    h + 0.0
}

/// Highest predictive entropy first.
pub fn select_entropy(pool: &Pool, probs: &ProbMatrix, batch_size: usize) -> Result<QueryBatch> {
    check_request(pool, batch_size)?;
    if probs.rows() != pool.len() {
        return Err(Error::Shape(format!(
            "{} probability rows for a pool of {}",
            probs.rows(),
            pool.len()
        )));
    }
    let scored = pool
        .unlabeled()
        .iter()
        .map(|&i| (i, entropy(probs.row(i))))
        .collect();
    Ok(top_k(scored, batch_size, Strategy::Entropy))
}

/// Max-entropy acquisition on MC-dropout averaged probabilities: the passes
/// are averaged first and the entropy is taken of the mean.
///
/// Only unlabeled rows are pushed through the network.
pub fn select_dbal(
    pool: &Pool,
    state: &ClassifierState,
    features: &FeatureMatrix,
    batch_size: usize,
    mc_passes: usize,
    rng: &mut StreamRng,
) -> Result<QueryBatch> {
    check_request(pool, batch_size)?;
    if features.rows() != pool.len() {
        return Err(Error::Shape(format!(
            "{} feature rows for a pool of {}",
            features.rows(),
            pool.len()
        )));
    }
    let unlabeled = pool.unlabeled_indices();
    let probs = state.predict_proba_mc(&features.select_rows(&unlabeled), mc_passes, rng)?;
    let scored = unlabeled
        .iter()
        .enumerate()
        .map(|(k, &i)| (i, entropy(probs.row(k))))
        .collect();
    Ok(top_k(scored, batch_size, Strategy::Dbal))
}
