// Expected gradient length on a softmax-regression model, checked against
// its closed form, then on the hidden-layer network.
//
//     cargo run --example expected_gradient_length

use textal::model::{ClassifierConfig, GradientModel, SoftmaxRegression};
use textal::strategies::select_egl;
use textal::synthetic::gaussian_clusters;
use textal::{FeatureMatrix, Pool, RngState};

fn main() -> textal::Result<()> {
    let model = SoftmaxRegression::new(2, 3, vec![1.0, -0.5, 0.0, 0.3, 0.8, -1.2], vec![0.0, 0.1, -0.1])?;
    let x = FeatureMatrix::from_rows(&[vec![0.0, 0.0], vec![2.0, 1.0], vec![-1.0, 3.0]])?;
    let pool = Pool::new(vec![0, 1, 2], 3)?;
    let batch = select_egl(&pool, &model, &x, 3)?;
    for (&i, &score) in batch.indices.iter().zip(&batch.scores) {
        let row = x.row(i);
        let p = model.proba(row);
        let scale = (row.iter().map(|v| v * v).sum::<f64>() + 1.0).sqrt();
        let closed: f64 = (0..3)
            .map(|y| {
                let dist: f64 = (0..3).map(|c| (p[c] - f64::from(c == y)).powi(2)).sum();
                p[y] * dist.sqrt() * scale
            })
            .sum();
        println!("row {i}: EGL {score:.6}  closed form {closed:.6}");
    }

    // The network version sums over every weight and bias.
    let (x, y) = gaussian_clusters(60, 5, 3, 2.0, 3);
    let config = ClassifierConfig { hidden_dim: 8, epochs: 20, learning_rate: 1e-2, ..Default::default() };
    let net = textal::model::train_from_scratch(&x, &y, 3, &config, &mut RngState::new(3).stream("train", 0))?;
    let (probs, norms) = net.gradient_norms(x.row(0));
    println!("network: p(y|x0) = {probs:.3?}, gradient norm per label = {norms:.3?}");
    let pool = Pool::new(y, 3)?.label_instances(&[0, 1, 2])?;
    let top = select_egl(&pool, &net, &x, 5)?;
    println!("top-5 by EGL: {:?}", top.indices);
    Ok(())
}
