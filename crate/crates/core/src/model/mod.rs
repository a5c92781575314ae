//! One-hidden-layer softmax classifier with inverted dropout and manual
//! backpropagation.
//!
//! Besides class probabilities the network exposes what the query strategies
//! consume: hidden-layer representations, per-example gradient norms over
//! every parameter, and stochastic dropout-enabled forward passes.

mod linear;
mod network;
mod persist;
mod train;

use serde::{Deserialize, Serialize};

use crate::data::FeatureMatrix;
use crate::error::{Error, Result};

pub use linear::SoftmaxRegression;
pub use network::{ClassifierState, Parameters};
pub use persist::{load_binary, load_json, save_binary, save_json};
pub use train::{train_from_scratch, train_on_rows, ClassifierConfig, Optimizer};

/// Row-stochastic matrix of class probabilities.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProbMatrix {
    rows: usize,
    classes: usize,
    values: Vec<f64>,
}

impl ProbMatrix {
    pub const ROW_TOLERANCE: f64 = 1e-6;

    pub fn new(rows: usize, classes: usize, values: Vec<f64>) -> Result<Self> {
        if values.len() != rows * classes {
            return Err(Error::Shape(format!(
                "{} values cannot fill {rows}x{classes} probabilities",
                values.len()
            )));
        }
        for (i, row) in values.chunks(classes.max(1)).enumerate() {
            let sum: f64 = row.iter().sum();
            if row.iter().any(|p| !(0.0..=1.0).contains(p)) || (sum - 1.0).abs() > Self::ROW_TOLERANCE {
                return Err(Error::Value(format!("row {i} is not a distribution: {row:?}")));
            }
        }
        Ok(Self {
            rows,
            classes,
            values,
        })
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let classes = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|r| r.len() != classes) {
            return Err(Error::Shape("ragged probability rows".into()));
        }
        Self::new(rows.len(), classes, rows.concat())
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn classes(&self) -> usize {
        self.classes
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.values[i * self.classes..(i + 1) * self.classes]
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.values
    }

    /// Most probable class; ties go to the lower index.
    pub fn argmax(&self, i: usize) -> usize {
        argmax(self.row(i))
    }

    pub fn predictions(&self) -> Vec<usize> {
        (0..self.rows).map(|i| self.argmax(i)).collect()
    }
}

pub(crate) fn argmax(values: &[f64]) -> usize {
    let mut best = 0;
    for (i, &v) in values.iter().enumerate().skip(1) {
        if v > values[best] {
            best = i;
        }
    }
    best
}

/// In-place numerically stable softmax.
pub(crate) fn softmax(logits: &mut [f64]) {
    let max = logits.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let mut sum = 0.0;
    for v in logits.iter_mut() {
        *v = (*v - max).exp();
        sum += *v;
    }
    for v in logits.iter_mut() {
        *v /= sum;
    }
}

/// A classifier that can score expected gradient length.
pub trait GradientModel: Sync {
    fn input_dim(&self) -> usize;

    fn num_classes(&self) -> usize;

    fn predict_proba(&self, features: &FeatureMatrix) -> Result<ProbMatrix>;

    /// Class probabilities for `x` and, for every candidate label `y`, the
    /// Euclidean norm of the single-example cross-entropy gradient over all
    /// parameters.
    fn gradient_norms(&self, x: &[f64]) -> (Vec<f64>, Vec<f64>);

    fn per_example_grad_norm(&self, features: &FeatureMatrix, label: usize, row: usize) -> Result<f64> {
        if features.dim() != self.input_dim() {
            return Err(Error::Shape(format!(
                "features have {} columns, model expects {}",
                features.dim(),
                self.input_dim()
            )));
        }
        if row >= features.rows() {
            return Err(Error::Shape(format!("row {row} out of {} rows", features.rows())));
        }
        if label >= self.num_classes() {
            return Err(Error::Value(format!("label {label} out of range")));
        }
        Ok(self.gradient_norms(features.row(row)).1[label])
    }
}
