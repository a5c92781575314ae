// Greedy k-center selection on a handful of 2-D points.
//
//     cargo run --example coreset_selection

use textal::strategies::select_coreset;
use textal::{FeatureMatrix, Pool};

fn main() -> textal::Result<()> {
    let points = vec![
        vec![0.0, 0.0],
        vec![0.1, 0.2],
        vec![5.0, 5.0],
        vec![5.2, 4.9],
        vec![-4.0, 3.0],
        vec![0.3, -0.1],
        vec![9.0, -2.0],
    ];
    let reprs = FeatureMatrix::from_rows(&points)?;
    // Point 0 is the only labeled center.
    let pool = Pool::new(vec![0, 0, 1, 1, 0, 0, 1], 2)?.label_instances(&[0])?;
    let batch = select_coreset(&pool, &reprs, 4)?;
    for (&i, &d) in batch.indices.iter().zip(&batch.scores) {
        println!("pick {i} at {:?}, distance to nearest center {d:.3}", points[i]);
    }
    Ok(())
}
