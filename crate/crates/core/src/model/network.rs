use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::train::ClassifierConfig;
use super::{softmax, GradientModel, ProbMatrix};
use crate::data::FeatureMatrix;
use crate::error::{Error, Result};
use crate::rng::StreamRng;

/// Weights and biases of the network, or a gradient with the same layout.
///
/// `w1` is `input_dim x hidden_dim` and `w2` is `hidden_dim x classes`, both
/// row-major.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Parameters {
    pub w1: Vec<f64>,
    pub b1: Vec<f64>,
    pub w2: Vec<f64>,
    pub b2: Vec<f64>,
}

impl Parameters {
    pub fn zeros(input_dim: usize, hidden_dim: usize, classes: usize) -> Self {
        Self {
            w1: vec![0.0; input_dim * hidden_dim],
            b1: vec![0.0; hidden_dim],
            w2: vec![0.0; hidden_dim * classes],
            b2: vec![0.0; classes],
        }
    }

    pub fn iter(&self) -> impl Iterator<Item = &f64> {
        self.w1.iter().chain(&self.b1).chain(&self.w2).chain(&self.b2)
    }

    pub fn iter_mut(&mut self) -> impl Iterator<Item = &mut f64> {
        self.w1
            .iter_mut()
            .chain(self.b1.iter_mut())
            .chain(self.w2.iter_mut())
            .chain(self.b2.iter_mut())
    }

    pub fn len(&self) -> usize {
        self.w1.len() + self.b1.len() + self.w2.len() + self.b2.len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn norm(&self) -> f64 {
        self.iter().map(|v| v * v).sum::<f64>().sqrt()
    }

    pub fn all_finite(&self) -> bool {
        self.iter().all(|v| v.is_finite())
    }

    pub(crate) fn fill(&mut self, value: f64) {
        self.iter_mut().for_each(|v| *v = value);
    }
}

/// Intermediate values of one forward pass.
pub(crate) struct Activations {
    pub pre: Vec<f64>,
    pub hidden: Vec<f64>,
    pub probs: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClassifierState {
    input_dim: usize,
    hidden_dim: usize,
    classes: usize,
    params: Parameters,
    config: ClassifierConfig,
}

impl ClassifierState {
    pub fn from_parameters(
        input_dim: usize,
        hidden_dim: usize,
        classes: usize,
        params: Parameters,
        config: ClassifierConfig,
    ) -> Result<Self> {
        let expect = Parameters::zeros(input_dim, hidden_dim, classes);
        if params.w1.len() != expect.w1.len()
            || params.b1.len() != expect.b1.len()
            || params.w2.len() != expect.w2.len()
            || params.b2.len() != expect.b2.len()
        {
            return Err(Error::Shape(format!(
                "parameter sizes do not match a {input_dim}-{hidden_dim}-{classes} network"
            )));
        }
        if !params.all_finite() {
            return Err(Error::Value("non-finite parameter".into()));
        }
        Ok(Self {
            input_dim,
            hidden_dim,
            classes,
            params,
            config,
        })
    }

    pub fn zeros(input_dim: usize, hidden_dim: usize, classes: usize, config: ClassifierConfig) -> Self {
        Self {
            input_dim,
            hidden_dim,
            classes,
            params: Parameters::zeros(input_dim, hidden_dim, classes),
            config,
        }
    }

    /// Uniform initialization in `±1/sqrt(fan_in)` for every weight and bias.
    pub(crate) fn initialized(
        input_dim: usize,
        classes: usize,
        config: &ClassifierConfig,
        rng: &mut StreamRng,
    ) -> Self {
        let hidden_dim = config.hidden_dim;
        let mut params = Parameters::zeros(input_dim, hidden_dim, classes);
        let s1 = 1.0 / (input_dim.max(1) as f64).sqrt();
        let s2 = 1.0 / (hidden_dim as f64).sqrt();
        params.w1.iter_mut().for_each(|v| *v = rng.uniform(-s1, s1));
        params.b1.iter_mut().for_each(|v| *v = rng.uniform(-s1, s1));
        params.w2.iter_mut().for_each(|v| *v = rng.uniform(-s2, s2));
        params.b2.iter_mut().for_each(|v| *v = rng.uniform(-s2, s2));
        Self {
            input_dim,
            hidden_dim,
            classes,
            params,
            config: config.clone(),
        }
    }

    pub fn input_dim(&self) -> usize {
        self.input_dim
    }

    pub fn hidden_dim(&self) -> usize {
        self.hidden_dim
    }

    pub fn classes(&self) -> usize {
        self.classes
    }

    pub fn config(&self) -> &ClassifierConfig {
        &self.config
    }

    pub fn parameters(&self) -> &Parameters {
        &self.params
    }

    pub(crate) fn parameters_mut(&mut self) -> &mut Parameters {
        &mut self.params
    }

    fn check_dim(&self, features: &FeatureMatrix) -> Result<()> {
        if features.dim() != self.input_dim {
            return Err(Error::Shape(format!(
                "features have {} columns, model expects {}",
                features.dim(),
                self.input_dim
            )));
        }
        Ok(())
    }

    /// Forward pass for one row. `mask` holds per-hidden-unit multipliers
    /// (0 or `1/(1-rate)`) when dropout is active.
    pub(crate) fn forward(&self, x: &[f64], mask: Option<&[f64]>) -> Activations {
        let h = self.hidden_dim;
        let mut pre = self.params.b1.clone();
        for (d, &xd) in x.iter().enumerate() {
            if xd == 0.0 {
                continue;
            }
            let w = &self.params.w1[d * h..(d + 1) * h];
            for (p, &wv) in pre.iter_mut().zip(w) {
                *p += xd * wv;
            }
        }
        let mut hidden: Vec<f64> = pre.iter().map(|&v| v.max(0.0)).collect();
        if let Some(mask) = mask {
            for (v, m) in hidden.iter_mut().zip(mask) {
                *v *= m;
            }
        }
        let probs = self.logits_from_hidden(&hidden);
        Activations { pre, hidden, probs }
    }

    fn logits_from_hidden(&self, hidden: &[f64]) -> Vec<f64> {
        let c = self.classes;
        let mut logits = self.params.b2.clone();
        for (j, &hv) in hidden.iter().enumerate() {
            if hv == 0.0 {
                continue;
            }
            for (l, &wv) in logits.iter_mut().zip(&self.params.w2[j * c..(j + 1) * c]) {
                *l += hv * wv;
            }
        }
        softmax(&mut logits);
        logits
    }

    /// Accumulate `scale * dLoss/dparams` for cross-entropy at `label` into
    /// `grad`, given the activations of a forward pass on `x`.
    pub(crate) fn backprop_into(
        &self,
        x: &[f64],
        label: usize,
        act: &Activations,
        mask: Option<&[f64]>,
        scale: f64,
        grad: &mut Parameters,
    ) {
        let (h, c) = (self.hidden_dim, self.classes);
        let mut dlogits = act.probs.clone();
        dlogits[label] -= 1.0;
        for (g, &dl) in grad.b2.iter_mut().zip(&dlogits) {
            *g += scale * dl;
        }
        let mut dpre = vec![0.0; h];
        for j in 0..h {
            let row = j * c..(j + 1) * c;
            let hv = act.hidden[j];
            if hv != 0.0 {
                for (g, &dl) in grad.w2[row.clone()].iter_mut().zip(&dlogits) {
                    *g += scale * hv * dl;
                }
            }
            if act.pre[j] > 0.0 {
                let mut back: f64 = self.params.w2[row].iter().zip(&dlogits).map(|(w, d)| w * d).sum();
                if let Some(mask) = mask {
                    back *= mask[j];
                }
                dpre[j] = back;
            }
        }
        for (g, &dp) in grad.b1.iter_mut().zip(&dpre) {
            *g += scale * dp;
        }
        for (d, &xd) in x.iter().enumerate() {
            if xd == 0.0 {
                continue;
            }
            for (g, &dp) in grad.w1[d * h..(d + 1) * h].iter_mut().zip(&dpre) {
                *g += scale * xd * dp;
            }
        }
    }

    /// Single-example cross-entropy `-ln p(label | x)`, dropout off.
    pub fn loss(&self, x: &[f64], label: usize) -> f64 {
        -self.forward(x, None).probs[label].ln()
    }

    /// Full gradient of the single-example cross-entropy, dropout off.
    pub fn gradient(&self, x: &[f64], label: usize) -> Parameters {
        let act = self.forward(x, None);
        let mut grad = Parameters::zeros(self.input_dim, self.hidden_dim, self.classes);
        self.backprop_into(x, label, &act, None, 1.0, &mut grad);
        grad
    }

    /// Deterministic class probabilities with dropout disabled.
    pub fn predict_proba(&self, features: &FeatureMatrix) -> Result<ProbMatrix> {
        self.check_dim(features)?;
        let values: Vec<f64> = (0..features.rows())
            .into_par_iter()
            .flat_map_iter(|i| self.forward(features.row(i), None).probs)
            .collect();
        ProbMatrix::new(features.rows(), self.classes, values)
    }

    fn dropout_masks(&self, rows: usize, rng: &mut StreamRng) -> Vec<f64> {
        let rate = self.config.dropout_rate;
        let keep = 1.0 / (1.0 - rate);
        (0..rows * self.hidden_dim)
            .map(|_| if rng.next_f64() < rate { 0.0 } else { keep })
            .collect()
    }

    /// Individual dropout-enabled forward passes. Masks for a pass are drawn
    /// row by row in index order before the rows are evaluated.
    pub fn mc_dropout_passes(
        &self,
        features: &FeatureMatrix,
        passes: usize,
        rng: &mut StreamRng,
    ) -> Result<Vec<ProbMatrix>> {
        self.check_dim(features)?;
        if passes == 0 {
            return Err(Error::Config("mc passes must be >= 1".into()));
        }
        let h = self.hidden_dim;
        (0..passes)
            .map(|_| {
                let masks = self.dropout_masks(features.rows(), rng);
                let values: Vec<f64> = (0..features.rows())
                    .into_par_iter()
                    .flat_map_iter(|i| {
                        self.forward(features.row(i), Some(&masks[i * h..(i + 1) * h]))
                            .probs
                    })
                    .collect();
                ProbMatrix::new(features.rows(), self.classes, values)
            })
            .collect()
    }

    /// Mean of `passes` stochastic forward passes with dropout enabled.
    pub fn predict_proba_mc(
        &self,
        features: &FeatureMatrix,
        passes: usize,
        rng: &mut StreamRng,
    ) -> Result<ProbMatrix> {
        if passes == 0 {
            return Err(Error::Config("mc passes must be >= 1".into()));
        }
        if self.config.dropout_rate == 0.0 {
            log::warn!("dropout rate is 0; MC dropout passes are deterministic");
            return self.predict_proba(features);
        }
        let all = self.mc_dropout_passes(features, passes, rng)?;
        let mut sum = vec![0.0; features.rows() * self.classes];
        for pass in &all {
            for (s, v) in sum.iter_mut().zip(pass.as_slice()) {
                *s += v;
            }
        }
        let n = passes as f64;
        sum.iter_mut().for_each(|v| *v /= n);
        ProbMatrix::new(features.rows(), self.classes, sum)
    }

    /// Rectified hidden activations with dropout disabled.
    pub fn hidden_repr(&self, features: &FeatureMatrix) -> Result<FeatureMatrix> {
        self.check_dim(features)?;
        let values: Vec<f64> = (0..features.rows())
            .into_par_iter()
            .flat_map_iter(|i| self.forward(features.row(i), None).hidden)
            .collect();
        FeatureMatrix::new(features.rows(), self.hidden_dim, values)
    }

    /// One dropout-enabled sample of the hidden activations.
    pub fn hidden_repr_dropout(&self, features: &FeatureMatrix, rng: &mut StreamRng) -> Result<FeatureMatrix> {
        self.check_dim(features)?;
        let h = self.hidden_dim;
        let masks = self.dropout_masks(features.rows(), rng);
        let values: Vec<f64> = (0..features.rows())
            .flat_map(|i| {
                self.forward(features.row(i), Some(&masks[i * h..(i + 1) * h]))
                    .hidden
            })
            .collect();
        FeatureMatrix::new(features.rows(), h, values)
    }
}

impl GradientModel for ClassifierState {
    fn input_dim(&self) -> usize {
        self.input_dim
    }

    fn num_classes(&self) -> usize {
        self.classes
    }

    fn predict_proba(&self, features: &FeatureMatrix) -> Result<ProbMatrix> {
        ClassifierState::predict_proba(self, features)
    }

    fn gradient_norms(&self, x: &[f64]) -> (Vec<f64>, Vec<f64>) {
        let act = self.forward(x, None);
        let mut grad = Parameters::zeros(self.input_dim, self.hidden_dim, self.classes);
        let norms = (0..self.classes)
            .map(|y| {
                grad.fill(0.0);
                self.backprop_into(x, y, &act, None, 1.0, &mut grad);
                grad.norm()
            })
            .collect();
        (act.probs, norms)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::RngState;

    fn random_state(d: usize, h: usize, c: usize, seed: u64) -> ClassifierState {
        let cfg = ClassifierConfig {
            hidden_dim: h,
            ..Default::default()
        };
        ClassifierState::initialized(d, c, &cfg, &mut RngState::new(seed).stream("test", 0))
    }

    #[test]
    fn zero_network_is_uniform() {
        let s = ClassifierState::zeros(3, 4, 5, ClassifierConfig::default());
        let x = FeatureMatrix::from_rows(&[vec![1.0, -2.0, 3.0]]).unwrap();
        let p = s.predict_proba(&x).unwrap();
        assert!(p.row(0).iter().all(|&v| (v - 0.2).abs() < 1e-15));
        let hid = s.hidden_repr(&x).unwrap();
        assert_eq!(hid.dim(), 4);
        assert!(hid.as_slice().iter().all(|&v| v == 0.0));
    }

    #[test]
    fn zero_input_gives_rectified_bias() {
        let mut s = random_state(4, 6, 3, 11);
        s.parameters_mut().b1 = vec![-1.0, 0.5, 0.0, 2.0, -0.1, 0.3];
        let x = FeatureMatrix::zeros(1, 4);
        let hid = s.hidden_repr(&x).unwrap();
        assert_eq!(hid.row(0), &[0.0, 0.5, 0.0, 2.0, 0.0, 0.3]);
    }

    #[test]
    fn dimension_mismatch_is_shape_error() {
        let s = random_state(4, 3, 2, 1);
        let x = FeatureMatrix::zeros(2, 5);
        assert!(matches!(s.predict_proba(&x), Err(Error::Shape(_))));
        assert!(matches!(s.hidden_repr(&x), Err(Error::Shape(_))));
        assert!(matches!(s.per_example_grad_norm(&x, 0, 0), Err(Error::Shape(_))));
    }

    #[test]
    fn grad_norm_zero_when_prediction_is_one_hot() {
        // Saturated logits make p == e_0 exactly in f64.
        let mut s = ClassifierState::zeros(2, 2, 2, ClassifierConfig::default());
        s.parameters_mut().b2 = vec![1000.0, 0.0];
        let x = FeatureMatrix::from_rows(&[vec![1.0, 1.0]]).unwrap();
        assert_eq!(s.per_example_grad_norm(&x, 0, 0).unwrap(), 0.0);
        assert!(s.per_example_grad_norm(&x, 1, 0).unwrap() > 0.0);
    }

    #[test]
    fn mc_without_dropout_equals_deterministic() {
        let mut s = random_state(5, 4, 3, 2);
        s.config.dropout_rate = 0.0;
        let x = FeatureMatrix::from_rows(&[vec![0.1, 0.2, 0.0, -0.4, 1.0], vec![1.0; 5]]).unwrap();
        let det = s.predict_proba(&x).unwrap();
        let mc = s.predict_proba_mc(&x, 7, &mut RngState::new(3).stream("mc", 0)).unwrap();
        assert_eq!(det, mc);
    }

    #[test]
    fn mc_average_is_mean_of_passes() {
        let s = random_state(5, 8, 3, 4);
        let x = FeatureMatrix::from_rows(&[vec![0.1, 0.2, 0.0, -0.4, 1.0], vec![1.0; 5]]).unwrap();
        let rng = RngState::new(5).stream("mc", 0);
        let avg = s.predict_proba_mc(&x, 6, &mut rng.clone()).unwrap();
        let passes = s.mc_dropout_passes(&x, 6, &mut rng.clone()).unwrap();
        for i in 0..x.rows() {
            for c in 0..3 {
                let mean = passes.iter().map(|p| p.row(i)[c]).sum::<f64>() / 6.0;
                assert!((avg.row(i)[c] - mean).abs() < 1e-15);
            }
        }
        let one_a = s.predict_proba_mc(&x, 1, &mut rng.clone()).unwrap();
        let one_b = s.predict_proba_mc(&x, 1, &mut rng.clone()).unwrap();
        assert_eq!(one_a, one_b);
    }

    #[test]
    fn inverted_dropout_preserves_hidden_expectation() {
        let s = random_state(3, 4, 2, 6);
        let x = FeatureMatrix::from_rows(&[vec![0.5, -1.0, 2.0]]).unwrap();
        let det = s.hidden_repr(&x).unwrap();
        let mut rng = RngState::new(7).stream("mc", 0);
        let passes = 10_000;
        let h = s.hidden_dim();
        let mut sum = vec![0.0; h];
        let mut sq = vec![0.0; h];
        for _ in 0..passes {
            let sample = s.hidden_repr_dropout(&x, &mut rng).unwrap();
            for j in 0..h {
                sum[j] += sample.row(0)[j];
                sq[j] += sample.row(0)[j].powi(2);
            }
        }
        for j in 0..h {
            let mean = sum[j] / passes as f64;
            let var = (sq[j] / passes as f64 - mean * mean).max(0.0);
            let se = (var / passes as f64).sqrt();
            assert!(
                (mean - det.row(0)[j]).abs() <= 3.0 * se + 1e-12,
                "unit {j}: mc mean {mean} vs {} (se {se})",
                det.row(0)[j]
            );
        }
    }
}
