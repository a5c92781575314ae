use serde::{Deserialize, Serialize};

use crate::data::LabelDistribution;
use crate::strategies::entropy;

pub const DEFAULT_KL_EPSILON: f64 = 1e-9;

/// Shannon entropy of a label distribution in nats.
pub fn label_entropy(dist: &LabelDistribution) -> f64 {
    entropy(dist.probs())
}

/// `KL(p || q')` where `q' = (q + eps) / sum(q + eps)` keeps zero
/// entries of the selection distribution finite. `p` is the ground truth.
///
/// Panics if the two distributions have different class counts.
pub fn kl_divergence(p: &LabelDistribution, q: &LabelDistribution, epsilon: f64) -> f64 {
    assert_eq!(p.num_classes(), q.num_classes(), "class count mismatch");
    let total: f64 = q.probs().iter().map(|v| v + epsilon).sum();
    let kl: f64 = p
        .probs()
        .iter()
        .zip(q.probs())
        .filter(|(&pc, _)| pc > 0.0)
        .map(|(&pc, &qc)| pc * (pc / ((qc + epsilon) / total)).ln())
        .sum();
    kl.max(0.0)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EntropyAggregates {
    /// Mean label entropy of the individual query batches.
    pub per_query_mean: f64,
    /// Population standard deviation across those batches.
    pub per_query_std: f64,
    /// Label entropy of everything labeled by the end of the run.
    pub final_pool_entropy: f64,
}

/// Panics on an empty `per_iteration` slice.
pub fn aggregate_entropies(per_iteration: &[f64], final_pool: &LabelDistribution) -> EntropyAggregates {
    assert!(!per_iteration.is_empty(), "no per-iteration entropies");
    let (mean, std) = mean_std(per_iteration);
    EntropyAggregates {
        per_query_mean: mean,
        per_query_std: std,
        final_pool_entropy: label_entropy(final_pool),
    }
}

/// Mean and population standard deviation.
pub(crate) fn mean_std(values: &[f64]) -> (f64, f64) {
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / n;
    (mean, var.sqrt())
}
