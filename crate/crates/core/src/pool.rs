//! Labeled/unlabeled partition of a training pool with a simulated oracle.

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use crate::data::LabelDistribution;
use crate::error::{Error, Result};

/// Partition of instance indices `0..N` into labeled and unlabeled sets.
///
/// Both sets are kept sorted so iteration order is deterministic. The ground
/// truth for every instance is held here and revealed only through
/// [`Pool::labeled_labels`] and the class-bias helpers.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Pool {
    labeled: BTreeSet<usize>,
    unlabeled: BTreeSet<usize>,
    oracle_labels: Vec<usize>,
    num_classes: usize,
}

impl Pool {
    /// Everything starts unlabeled.
    pub fn new(oracle_labels: Vec<usize>, num_classes: usize) -> Result<Self> {
        if let Some(&bad) = oracle_labels.iter().find(|&&l| l >= num_classes) {
            return Err(Error::Value(format!(
                "oracle label {bad} out of range for {num_classes} classes"
            )));
        }
        Ok(Self {
            labeled: BTreeSet::new(),
            unlabeled: (0..oracle_labels.len()).collect(),
            oracle_labels,
            num_classes,
        })
    }

    pub fn len(&self) -> usize {
        self.oracle_labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.oracle_labels.is_empty()
    }

    pub fn num_classes(&self) -> usize {
        self.num_classes
    }

    pub fn labeled(&self) -> &BTreeSet<usize> {
        &self.labeled
    }

    pub fn unlabeled(&self) -> &BTreeSet<usize> {
        &self.unlabeled
    }

    pub fn labeled_indices(&self) -> Vec<usize> {
        self.labeled.iter().copied().collect()
    }

    pub fn unlabeled_indices(&self) -> Vec<usize> {
        self.unlabeled.iter().copied().collect()
    }

    pub fn is_labeled(&self, index: usize) -> bool {
        self.labeled.contains(&index)
    }

    pub fn oracle_labels(&self) -> &[usize] {
        &self.oracle_labels
    }

    /// Oracle answers for the labeled set, in index order.
    pub fn labeled_labels(&self) -> Vec<usize> {
        self.labeled.iter().map(|&i| self.oracle_labels[i]).collect()
    }

    /// Ask the oracle for `batch` and return the updated pool.
    pub fn label_instances(&self, batch: &[usize]) -> Result<Pool> {
        let mut seen = BTreeSet::new();
        for &i in batch {
            if !seen.insert(i) {
                return Err(Error::InvalidBatch(format!("index {i} appears twice")));
            }
            if !self.unlabeled.contains(&i) {
                return Err(Error::InvalidBatch(format!("index {i} is not in the unlabeled pool")));
            }
        }
        let mut next = self.clone();
        for i in seen {
            next.unlabeled.remove(&i);
            next.labeled.insert(i);
        }
        Ok(next)
    }

    /// Smoothed class frequencies of the oracle labels at `indices`.
    pub fn empirical_label_distribution(
        &self,
        indices: &[usize],
        smoothing: f64,
    ) -> Result<LabelDistribution> {
        if indices.is_empty() {
            return Err(Error::EmptySelection("no indices to count".into()));
        }
        if !(smoothing >= 0.0 && smoothing.is_finite()) {
            return Err(Error::Value(format!("smoothing must be >= 0, got {smoothing}")));
        }
        let mut counts = vec![0usize; self.num_classes];
        for &i in indices {
            let label = *self
                .oracle_labels
                .get(i)
                .ok_or_else(|| Error::Value(format!("index {i} outside pool of {}", self.len())))?;
            counts[label] += 1;
        }
        let denom = indices.len() as f64 + self.num_classes as f64 * smoothing;
        let probs = counts
            .into_iter()
            .map(|c| (c as f64 + smoothing) / denom)
            .collect();
        LabelDistribution::new(probs)
    }

    /// Class frequencies over the whole pool.
    pub fn ground_truth_distribution(&self) -> LabelDistribution {
        LabelDistribution::from_labels(&self.oracle_labels, self.num_classes)
            .expect("pool is non-empty with in-range labels")
    }
}
