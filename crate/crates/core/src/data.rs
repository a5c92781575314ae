//! Datasets, dense feature matrices and label distributions.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Split {
    Train,
    Validation,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Instance {
    pub text: String,
    pub label: usize,
}

/// A labeled text corpus. Labels are contiguous class indices `0..C`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Dataset {
    instances: Vec<Instance>,
    class_names: Vec<String>,
    split: Split,
}

impl Dataset {
    pub fn new(instances: Vec<Instance>, class_names: Vec<String>, split: Split) -> Result<Self> {
        if class_names.len() < 2 {
            return Err(Error::Format(format!(
                "need at least 2 classes, found {}",
                class_names.len()
            )));
        }
        if instances.is_empty() {
            return Err(Error::Format("dataset has no instances".into()));
        }
        if let Some(bad) = instances.iter().find(|i| i.label >= class_names.len()) {
            return Err(Error::Format(format!(
                "label {} out of range for {} classes",
                bad.label,
                class_names.len()
            )));
        }
        Ok(Self {
            instances,
            class_names,
            split,
        })
    }

    pub fn instances(&self) -> &[Instance] {
        &self.instances
    }

    pub fn len(&self) -> usize {
        self.instances.len()
    }

    pub fn is_empty(&self) -> bool {
        self.instances.is_empty()
    }

    pub fn num_classes(&self) -> usize {
        self.class_names.len()
    }

    pub fn class_names(&self) -> &[String] {
        &self.class_names
    }

    pub fn split(&self) -> Split {
        self.split
    }

    pub fn labels(&self) -> Vec<usize> {
        self.instances.iter().map(|i| i.label).collect()
    }

    pub fn texts(&self) -> impl Iterator<Item = &str> {
        self.instances.iter().map(|i| i.text.as_str())
    }

    /// Re-express labels against another class list (e.g. validation against
    /// the train split's classes). Classes unknown to `class_names` fail.
    pub fn remap_classes(self, class_names: &[String]) -> Result<Self> {
        let lookup: Vec<usize> = self
            .class_names
            .iter()
            .map(|name| {
                class_names
                    .iter()
                    .position(|n| n == name)
                    .ok_or_else(|| Error::Format(format!("class {name:?} not present in training classes")))
            })
            .collect::<Result<_>>()?;
        let instances = self
            .instances
            .into_iter()
            .map(|i| Instance {
                label: lookup[i.label],
                text: i.text,
            })
            .collect();
        Dataset::new(instances, class_names.to_vec(), self.split)
    }
}

/// Dense row-major matrix of finite feature values.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FeatureMatrix {
    rows: usize,
    dim: usize,
    data: Vec<f64>,
}

impl FeatureMatrix {
    pub fn new(rows: usize, dim: usize, data: Vec<f64>) -> Result<Self> {
        if data.len() != rows * dim {
            return Err(Error::Shape(format!(
                "{} values cannot fill a {rows}x{dim} matrix",
                data.len()
            )));
        }
        if let Some(pos) = data.iter().position(|v| !v.is_finite()) {
            return Err(Error::Value(format!(
                "non-finite value at row {}, column {}",
                pos / dim.max(1),
                pos % dim.max(1)
            )));
        }
        Ok(Self { rows, dim, data })
    }

    pub fn zeros(rows: usize, dim: usize) -> Self {
        Self {
            rows,
            dim,
            data: vec![0.0; rows * dim],
        }
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let dim = rows.first().map_or(0, Vec::len);
        if let Some((i, r)) = rows.iter().enumerate().find(|(_, r)| r.len() != dim) {
            return Err(Error::Shape(format!(
                "row {i} has {} columns, expected {dim}",
                r.len()
            )));
        }
        Self::new(rows.len(), dim, rows.concat())
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.dim..(i + 1) * self.dim]
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    pub fn select_rows(&self, indices: &[usize]) -> FeatureMatrix {
        let mut data = Vec::with_capacity(indices.len() * self.dim);
        for &i in indices {
            data.extend_from_slice(self.row(i));
        }
        FeatureMatrix {
            rows: indices.len(),
            dim: self.dim,
            data,
        }
    }

    /// Multiply every entry by `factor` (must keep values finite).
    pub fn scaled(&self, factor: f64) -> Result<FeatureMatrix> {
        Self::new(self.rows, self.dim, self.data.iter().map(|v| v * factor).collect())
    }
}

pub fn euclidean(a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y) * (x - y))
        .sum::<f64>()
        .sqrt()
}

/// A probability vector over classes.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LabelDistribution {
    probs: Vec<f64>,
}

impl LabelDistribution {
    pub const SUM_TOLERANCE: f64 = 1e-9;

    pub fn new(probs: Vec<f64>) -> Result<Self> {
        if probs.is_empty() {
            return Err(Error::Value("empty distribution".into()));
        }
        if probs.iter().any(|p| !p.is_finite() || *p < 0.0) {
            return Err(Error::Value(format!("invalid probabilities {probs:?}")));
        }
        let total: f64 = probs.iter().sum();
        if (total - 1.0).abs() > Self::SUM_TOLERANCE {
            return Err(Error::Value(format!("probabilities sum to {total}, not 1")));
        }
        Ok(Self { probs })
    }

    pub fn uniform(classes: usize) -> Self {
        Self {
            probs: vec![1.0 / classes as f64; classes],
        }
    }

    /// Relative class frequencies of `labels` over `classes` classes.
    pub fn from_labels(labels: &[usize], classes: usize) -> Result<Self> {
        if labels.is_empty() {
            return Err(Error::EmptySelection("no labels to count".into()));
        }
        let mut counts = vec![0usize; classes];
        for &l in labels {
            if l >= classes {
                return Err(Error::Value(format!("label {l} out of range for {classes} classes")));
            }
            counts[l] += 1;
        }
        let n = labels.len() as f64;
        Ok(Self {
            probs: counts.into_iter().map(|c| c as f64 / n).collect(),
        })
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    pub fn num_classes(&self) -> usize {
        self.probs.len()
    }
}
