mod common;

use proptest::prelude::*;
use textal::model::{
    load_binary, load_json, save_binary, save_json, train_from_scratch, ClassifierConfig, ClassifierState, Optimizer,
    Parameters, SoftmaxRegression,
};
use textal::{Error, FeatureMatrix, RngState};

use common::rel_err;

const STEP: f64 = 1e-5;

fn network(d: usize, h: usize, c: usize, values: &[f64]) -> ClassifierState {
    let mut params = Parameters::zeros(d, h, c);
    for (p, v) in params.iter_mut().zip(values.iter().cycle()) {
        *p = *v;
    }
    let cfg = ClassifierConfig { hidden_dim: h, ..Default::default() };
    ClassifierState::from_parameters(d, h, c, params, cfg).unwrap()
}

fn away_from_kinks(state: &ClassifierState, x: &[f64]) -> bool {
    let p = state.parameters();
    let h = state.hidden_dim();
    (0..h).all(|j| {
        let pre = p.b1[j] + x.iter().enumerate().map(|(i, v)| v * p.w1[i * h + j]).sum::<f64>();
        pre.abs() >= 1e-3
    })
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 96, failure_persistence: None, ..ProptestConfig::default() })]

    #[test]
    fn network_gradient_matches_central_differences(
        d in 1usize..=8, h in 1usize..=4, c in 2usize..=3,
        values in prop::collection::vec(-1.0f64..1.0, 64),
        x in prop::collection::vec(-2.0f64..2.0, 8),
        label in 0usize..3,
    ) {
        let state = network(d, h, c, &values);
        let x = &x[..d];
        prop_assume!(away_from_kinks(&state, x));
        let label = label % c;
        let analytic = state.gradient(x, label);
        let base = state.parameters().clone();
        for (k, &g) in analytic.iter().enumerate() {
            let loss = |delta: f64| {
                let mut p = base.clone();
                *p.iter_mut().nth(k).unwrap() += delta;
                ClassifierState::from_parameters(d, h, c, p, state.config().clone()).unwrap().loss(x, label)
            };
            let numeric = (loss(STEP) - loss(-STEP)) / (2.0 * STEP);
            prop_assert!(rel_err(g, numeric) <= 1e-4, "param {k}: {g} vs {numeric}");
        }
    }

    #[test]
    fn softmax_regression_gradient_matches_central_differences(
        d in 1usize..=8, c in 2usize..=4,
        w in prop::collection::vec(-2.0f64..2.0, 40),
        x in prop::collection::vec(-2.0f64..2.0, 8),
        label in 0usize..4,
    ) {
        let model = SoftmaxRegression::new(d, c, w[..d * c].to_vec(), w[d * c..d * c + c].to_vec()).unwrap();
        let (x, label) = (&x[..d], label % c);
        let (gw, gb) = model.gradient(x, label);
        for k in 0..d * c + c {
            let loss = |delta: f64| {
                let mut m = model.clone();
                if k < d * c { m.weights_mut()[k] += delta } else { m.bias_mut()[k - d * c] += delta }
                m.loss(x, label)
            };
            let numeric = (loss(STEP) - loss(-STEP)) / (2.0 * STEP);
            let g = if k < d * c { gw[k] } else { gb[k - d * c] };
            prop_assert!(rel_err(g, numeric) <= 1e-4);
        }
    }

    #[test]
    fn probabilities_are_distributions_for_extreme_inputs(
        values in prop::collection::vec(-5.0f64..5.0, 48),
        rows in prop::collection::vec(prop::collection::vec(-1e6f64..1e6, 4), 1..6),
    ) {
        let state = network(4, 3, 4, &values);
        let probs = state.predict_proba(&FeatureMatrix::from_rows(&rows).unwrap()).unwrap();
        for i in 0..probs.rows() {
            let row = probs.row(i);
            prop_assert!(row.iter().all(|p| (0.0..=1.0).contains(p)));
            prop_assert!((row.iter().sum::<f64>() - 1.0).abs() < 1e-9);
        }
    }
}

fn toy_data() -> (FeatureMatrix, Vec<usize>) {
    let rows: Vec<Vec<f64>> = (0..40)
        .map(|i| {
            let c = (i % 3) as f64;
            vec![c + 0.1 * (i as f64).sin(), -c + 0.1 * (i as f64).cos(), 0.5]
        })
        .collect();
    (FeatureMatrix::from_rows(&rows).unwrap(), (0..40).map(|i| i % 3).collect())
}

#[test]
fn training_is_bit_reproducible() {
    let (x, y) = toy_data();
    for optimizer in [Optimizer::Adam, Optimizer::SgdMomentum] {
        let cfg = ClassifierConfig { hidden_dim: 8, epochs: 10, optimizer, ..Default::default() };
        let a = train_from_scratch(&x, &y, 3, &cfg, &mut RngState::new(3).stream("train", 0)).unwrap();
        let b = train_from_scratch(&x, &y, 3, &cfg, &mut RngState::new(3).stream("train", 0)).unwrap();
        assert_eq!(a, b);
        let c = train_from_scratch(&x, &y, 3, &cfg, &mut RngState::new(4).stream("train", 0)).unwrap();
        assert_ne!(a, c);
    }
}

#[test]
fn trained_network_fits_separable_data() {
    let (x, y) = toy_data();
    let cfg = ClassifierConfig { hidden_dim: 16, epochs: 200, learning_rate: 1e-2, dropout_rate: 0.0, ..Default::default() };
    let state = train_from_scratch(&x, &y, 3, &cfg, &mut RngState::new(1).stream("train", 0)).unwrap();
    let predicted = state.predict_proba(&x).unwrap().predictions();
    assert_eq!(predicted, y);
}

#[test]
fn persistence_round_trips_through_files() {
    let (x, y) = toy_data();
    let cfg = ClassifierConfig { hidden_dim: 5, epochs: 3, ..Default::default() };
    let state = train_from_scratch(&x, &y, 3, &cfg, &mut RngState::new(8).stream("train", 0)).unwrap();
    let dir = tempfile::tempdir().unwrap();
    let (jp, bp) = (dir.path().join("m.json"), dir.path().join("m.bin"));
    save_json(&state, &jp).unwrap();
    save_binary(&state, &bp).unwrap();
    let from_json = load_json(&jp).unwrap();
    let from_bin = load_binary(&bp).unwrap();
    assert_eq!(from_json, state);
    assert_eq!(from_bin, state);
    assert_eq!(from_bin.predict_proba(&x).unwrap(), state.predict_proba(&x).unwrap());

    let bytes = std::fs::read(&bp).unwrap();
    std::fs::write(&bp, &bytes[..bytes.len() - 3]).unwrap();
    assert!(load_binary(&bp).is_err());
    std::fs::write(&jp, "{\"format\":\"something-else\"}").unwrap();
    assert!(load_json(&jp).is_err());
    assert!(matches!(load_json(&dir.path().join("missing.json")), Err(Error::Io { .. })));
}
