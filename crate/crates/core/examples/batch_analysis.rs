// Score a queried batch: diversity, representativeness, class bias, and
// compare two strategies with the Wilcoxon signed-rank test.
//
//     cargo run --example batch_analysis

use textal::analysis::{
    diversity, kl_divergence, label_entropy, macro_f1, micro_f1, representativeness, wilcoxon_signed_rank,
    DEFAULT_K, DEFAULT_KL_EPSILON,
};
use textal::synthetic::gaussian_clusters;
use textal::{Pool, RngState};

fn main() -> textal::Result<()> {
    let (x, y) = gaussian_clusters(400, 4, 4, 3.0, 5);
    let pool = Pool::new(y.clone(), 4)?.label_instances(&[0, 1, 2, 3])?;
    let rng = RngState::new(5);

    // Two hand-made batches: one spread out, one from a single cluster.
    let spread: Vec<usize> = (10..30).collect();
    let clumped: Vec<usize> = (10..90).step_by(4).collect();
    for (name, batch) in [("spread", &spread), ("clumped", &clumped)] {
        let div = diversity(&x.select_rows(batch), &x, &mut rng.stream("metrics", 0))?;
        let rep = representativeness(batch, &pool, &x, DEFAULT_K, 500, &mut rng.stream("metrics", 1))?;
        let dist = pool.empirical_label_distribution(batch, 0.0)?;
        let kl = kl_divergence(&dist, &pool.ground_truth_distribution(), DEFAULT_KL_EPSILON);
        println!(
            "{name:<8} diversity {div:.3}  representativeness {rep:.3}  label entropy {:.3}  KL {kl:.3}",
            label_entropy(&dist)
        );
    }

    let predicted = [0, 1, 1, 2, 3, 3, 0, 2];
    let actual = [0, 1, 2, 2, 3, 0, 0, 2];
    println!("macro F1 {:.3}, micro F1 {:.3}", macro_f1(&predicted, &actual, 4)?, micro_f1(&predicted, &actual, 4)?);

    // Per-seed mean label entropies of two strategies.
    let a = [1.71, 1.74, 1.69, 1.77, 1.72, 1.75, 1.70, 1.73];
    let b = [1.52, 1.60, 1.58, 1.49, 1.63, 1.55, 1.57, 1.61];
    let w = wilcoxon_signed_rank(&a, &b)?;
    println!("Wilcoxon W = {}, p = {:.4} ({:?}, n = {})", w.statistic, w.p_value, w.method, w.n);
    Ok(())
}
