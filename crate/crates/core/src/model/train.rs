use serde::{Deserialize, Serialize};

use super::network::{ClassifierState, Parameters};
use crate::data::FeatureMatrix;
use crate::error::{Error, Result};
use crate::rng::StreamRng;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Optimizer {
    /// Heavy-ball SGD with momentum 0.9.
    SgdMomentum,
    /// Adam with the usual (0.9, 0.999, 1e-8) constants.
    Adam,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClassifierConfig {
    pub hidden_dim: usize,
    pub dropout_rate: f64,
    pub learning_rate: f64,
    pub epochs: usize,
    pub minibatch_size: usize,
    pub l2_penalty: f64,
    pub optimizer: Optimizer,
}

impl Default for ClassifierConfig {
    fn default() -> Self {
        Self {
            hidden_dim: 64,
            dropout_rate: 0.3,
            learning_rate: 1e-3,
            epochs: 30,
            minibatch_size: 32,
            l2_penalty: 1e-4,
            optimizer: Optimizer::Adam,
        }
    }
}

impl ClassifierConfig {
    pub fn validate(&self) -> Result<()> {
        let fail = |m: String| Err(Error::Config(m));
        if self.hidden_dim == 0 {
            return fail("hidden_dim must be >= 1".into());
        }
        if !(0.0..1.0).contains(&self.dropout_rate) {
            return fail(format!("dropout_rate must be in [0, 1), got {}", self.dropout_rate));
        }
        if !(self.learning_rate > 0.0 && self.learning_rate.is_finite()) {
            return fail(format!("learning_rate must be positive, got {}", self.learning_rate));
        }
        if self.epochs == 0 {
            return fail("epochs must be >= 1".into());
        }
        if self.minibatch_size == 0 {
            return fail("minibatch_size must be >= 1".into());
        }
        if !(self.l2_penalty >= 0.0 && self.l2_penalty.is_finite()) {
            return fail(format!("l2_penalty must be >= 0, got {}", self.l2_penalty));
        }
        Ok(())
    }
}

const MOMENTUM: f64 = 0.9;
const BETA1: f64 = 0.9;
const BETA2: f64 = 0.999;
const ADAM_EPS: f64 = 1e-8;

struct OptimizerState {
    kind: Optimizer,
    first: Parameters,
    second: Parameters,
    step: i32,
}

impl OptimizerState {
    fn new(kind: Optimizer, like: &Parameters) -> Self {
        let mut first = like.clone();
        first.fill(0.0);
        let second = first.clone();
        Self {
            kind,
            first,
            second,
            step: 0,
        }
    }

    fn apply(&mut self, params: &mut Parameters, grad: &Parameters, lr: f64) {
        self.step += 1;
        match self.kind {
            Optimizer::SgdMomentum => {
                for ((p, g), v) in params.iter_mut().zip(grad.iter()).zip(self.first.iter_mut()) {
                    *v = MOMENTUM * *v + g;
                    *p -= lr * *v;
                }
            }
            Optimizer::Adam => {
                let c1 = 1.0 - BETA1.powi(self.step);
                let c2 = 1.0 - BETA2.powi(self.step);
                for (((p, g), m), v) in params
                    .iter_mut()
                    .zip(grad.iter())
                    .zip(self.first.iter_mut())
                    .zip(self.second.iter_mut())
                {
                    *m = BETA1 * *m + (1.0 - BETA1) * g;
                    *v = BETA2 * *v + (1.0 - BETA2) * g * g;
                    *p -= lr * (*m / c1) / ((*v / c2).sqrt() + ADAM_EPS);
                }
            }
        }
    }
}

/// Train a freshly initialized network on every row of `features`.
pub fn train_from_scratch(
    features: &FeatureMatrix,
    labels: &[usize],
    classes: usize,
    config: &ClassifierConfig,
    rng: &mut StreamRng,
) -> Result<ClassifierState> {
    if labels.len() != features.rows() {
        return Err(Error::Shape(format!(
            "{} labels for {} feature rows",
            labels.len(),
            features.rows()
        )));
    }
    let rows: Vec<usize> = (0..features.rows()).collect();
    train_on_rows(features, &rows, labels, classes, config, rng)
}

/// Train a freshly initialized network on the subset `rows` of `features`;
/// `labels[k]` is the class of `rows[k]`.
///
/// The stream is consumed in a fixed order: parameter initialization, then
/// per epoch one shuffle followed by the dropout masks of each example.
pub fn train_on_rows(
    features: &FeatureMatrix,
    rows: &[usize],
    labels: &[usize],
    classes: usize,
    config: &ClassifierConfig,
    rng: &mut StreamRng,
) -> Result<ClassifierState> {
    config.validate()?;
    if rows.is_empty() {
        return Err(Error::EmptySelection("no labeled rows to train on".into()));
    }
    if rows.len() != labels.len() {
        return Err(Error::Shape(format!("{} labels for {} rows", labels.len(), rows.len())));
    }
    if classes < 2 {
        return Err(Error::Config(format!("need at least 2 classes, got {classes}")));
    }
    if let Some(&bad) = labels.iter().find(|&&l| l >= classes) {
        return Err(Error::Value(format!("label {bad} out of range for {classes} classes")));
    }
    if let Some(&bad) = rows.iter().find(|&&r| r >= features.rows()) {
        return Err(Error::Shape(format!("row {bad} out of {} rows", features.rows())));
    }

    let mut state = ClassifierState::initialized(features.dim(), classes, config, rng);
    let h = config.hidden_dim;
    let rate = config.dropout_rate;
    let keep = 1.0 / (1.0 - rate);
    let mut grad = state.parameters().clone();
    let mut opt = OptimizerState::new(config.optimizer, &grad);
    let mut order: Vec<usize> = (0..rows.len()).collect();
    let mut mask = vec![1.0; h];

    for epoch in 0..config.epochs {
        rng.shuffle(&mut order);
        let mut epoch_loss = 0.0;
        for chunk in order.chunks(config.minibatch_size) {
            grad.fill(0.0);
            let scale = 1.0 / chunk.len() as f64;
            let mut loss = 0.0;
            for &k in chunk {
                let x = features.row(rows[k]);
                let m = if rate > 0.0 {
                    mask.iter_mut()
                        .for_each(|v| *v = if rng.next_f64() < rate { 0.0 } else { keep });
                    Some(mask.as_slice())
                } else {
                    None
                };
                let act = state.forward(x, m);
                loss -= act.probs[labels[k]].ln() * scale;
                state.backprop_into(x, labels[k], &act, m, scale, &mut grad);
            }
            if config.l2_penalty > 0.0 {
                let params = state.parameters();
                let lambda = config.l2_penalty;
                let mut sq = 0.0;
                for (g, w) in grad.w1.iter_mut().zip(&params.w1).chain(grad.w2.iter_mut().zip(&params.w2)) {
                    *g += lambda * w;
                    sq += w * w;
                }
                loss += 0.5 * lambda * sq;
            }
            if !loss.is_finite() {
                return Err(Error::Divergence { epoch });
            }
            epoch_loss += loss * chunk.len() as f64;
            opt.apply(state.parameters_mut(), &grad, config.learning_rate);
        }
        if !state.parameters().all_finite() {
            return Err(Error::Divergence { epoch });
        }
        log::trace!("epoch {epoch}: mean loss {:.6}", epoch_loss / rows.len() as f64);
    }
    Ok(state)
}
