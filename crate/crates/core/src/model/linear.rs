use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{softmax, GradientModel, ProbMatrix};
use crate::data::FeatureMatrix;
use crate::error::{Error, Result};

/// Multinomial logistic regression `softmax(W^T x + b)`.
///
/// Used as a reference model: its per-example gradient has a closed form,
/// which makes it a convenient fixture for gradient-based strategies.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SoftmaxRegression {
    dim: usize,
    classes: usize,
    /// `dim x classes`, row-major.
    weights: Vec<f64>,
    bias: Vec<f64>,
}

impl SoftmaxRegression {
    pub fn new(dim: usize, classes: usize, weights: Vec<f64>, bias: Vec<f64>) -> Result<Self> {
        if weights.len() != dim * classes || bias.len() != classes {
            return Err(Error::Shape(format!("parameters do not match {dim}x{classes}")));
        }
        Ok(Self {
            dim,
            classes,
            weights,
            bias,
        })
    }

    pub fn zeros(dim: usize, classes: usize) -> Self {
        Self {
            dim,
            classes,
            weights: vec![0.0; dim * classes],
            bias: vec![0.0; classes],
        }
    }

    pub fn proba(&self, x: &[f64]) -> Vec<f64> {
        let mut logits = self.bias.clone();
        for (d, &xd) in x.iter().enumerate() {
            for (l, &w) in logits.iter_mut().zip(&self.weights[d * self.classes..(d + 1) * self.classes]) {
                *l += xd * w;
            }
        }
        softmax(&mut logits);
        logits
    }

    /// Cross-entropy gradient at `(x, label)` as (weights, bias).
    pub fn gradient(&self, x: &[f64], label: usize) -> (Vec<f64>, Vec<f64>) {
        let mut delta = self.proba(x);
        delta[label] -= 1.0;
        let mut gw = vec![0.0; self.dim * self.classes];
        for (d, &xd) in x.iter().enumerate() {
            for (g, &dl) in gw[d * self.classes..(d + 1) * self.classes].iter_mut().zip(&delta) {
                *g = xd * dl;
            }
        }
        (gw, delta)
    }

    pub fn loss(&self, x: &[f64], label: usize) -> f64 {
        -self.proba(x)[label].ln()
    }

    pub fn weights_mut(&mut self) -> &mut [f64] {
        &mut self.weights
    }

    pub fn bias_mut(&mut self) -> &mut [f64] {
        &mut self.bias
    }
}

impl GradientModel for SoftmaxRegression {
    fn input_dim(&self) -> usize {
        self.dim
    }

    fn num_classes(&self) -> usize {
        self.classes
    }

    fn predict_proba(&self, features: &FeatureMatrix) -> Result<ProbMatrix> {
        if features.dim() != self.dim {
            return Err(Error::Shape(format!(
                "features have {} columns, model expects {}",
                features.dim(),
                self.dim
            )));
        }
        let values: Vec<f64> = (0..features.rows())
            .into_par_iter()
            .flat_map_iter(|i| self.proba(features.row(i)))
            .collect();
        ProbMatrix::new(features.rows(), self.classes, values)
    }

    fn gradient_norms(&self, x: &[f64]) -> (Vec<f64>, Vec<f64>) {
        let probs = self.proba(x);
        let norms = (0..self.classes)
            .map(|y| {
                let (gw, gb) = self.gradient(x, y);
                gw.iter().chain(&gb).map(|v| v * v).sum::<f64>().sqrt()
            })
            .collect();
        (probs, norms)
    }
}
