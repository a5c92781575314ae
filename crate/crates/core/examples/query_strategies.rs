// Run all six query strategies against the same pool and model.
//
//     cargo run --example query_strategies

use textal::model::{train_on_rows, ClassifierConfig};
use textal::strategies::{select, SelectionContext, Strategy, StrategyConfig};
use textal::synthetic::gaussian_clusters;
use textal::{Pool, RngState};

fn main() -> textal::Result<()> {
    let (x, y) = gaussian_clusters(300, 8, 3, 2.5, 11);
    let seed = RngState::new(11);

    // Label 15 random points, train on them.
    let all: Vec<usize> = (0..x.rows()).collect();
    let mut labeled = seed.stream("seed_set", 0).sample(&all, 15);
    labeled.sort_unstable();
    let pool = Pool::new(y.clone(), 3)?.label_instances(&labeled)?;
    let labels = pool.labeled_labels();
    let config = ClassifierConfig { hidden_dim: 16, epochs: 40, learning_rate: 1e-2, ..Default::default() };
    let model = train_on_rows(&x, &pool.labeled_indices(), &labels, 3, &config, &mut seed.stream("train", 0))?;

    let strategy_config = StrategyConfig { mc_passes: 10, dal_sub_batches: 2, ..Default::default() };
    let ctx = SelectionContext { pool: &pool, features: &x, model: &model, config: &strategy_config };
    for strategy in Strategy::ALL {
        let mut rng = seed.stream(&format!("strategy/{strategy}"), 0);
        let batch = select(strategy, &ctx, 6, 0, &mut rng)?;
        let classes: Vec<usize> = batch.indices.iter().map(|&i| y[i]).collect();
        println!("{:<8} picked {:?} (classes {:?})", strategy.name(), batch.indices, classes);
        println!("         scores {:.3?}", batch.scores);
    }
    Ok(())
}
