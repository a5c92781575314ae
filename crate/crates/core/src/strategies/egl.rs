use rayon::prelude::*;

use super::{check_request, top_k, QueryBatch, Strategy};
use crate::data::FeatureMatrix;
use crate::error::{Error, Result};
use crate::model::GradientModel;
use crate::pool::Pool;

/// Expected gradient length: `sum_y p(y|x) * ||grad loss(x, y)||` over all
/// parameters, largest first.
pub fn select_egl<M: GradientModel>(
    pool: &Pool,
    model: &M,
    features: &FeatureMatrix,
    batch_size: usize,
) -> Result<QueryBatch> {
    check_request(pool, batch_size)?;
    if features.rows() != pool.len() {
        return Err(Error::Shape(format!(
            "{} feature rows for a pool of {}",
            features.rows(),
            pool.len()
        )));
    }
    if features.dim() != model.input_dim() {
        return Err(Error::Shape(format!(
            "features have {} columns, model expects {}",
            features.dim(),
            model.input_dim()
        )));
    }
    let unlabeled = pool.unlabeled_indices();
    let scored = unlabeled
        .par_iter()
        .map(|&i| {
            let (probs, norms) = model.gradient_norms(features.row(i));
            let score = probs.iter().zip(&norms).map(|(p, n)| p * n).sum::<f64>();
            (i, score)
        })
        .collect();
    Ok(top_k(scored, batch_size, Strategy::Egl))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::SoftmaxRegression;

    #[test]
    fn uniform_softmax_regression_score_is_one() {
        let model = SoftmaxRegression::zeros(2, 2);
        let x = FeatureMatrix::from_rows(&[vec![1.0, 0.0], vec![0.0, 0.0]]).unwrap();
        let pool = Pool::new(vec![0, 1], 2).unwrap();
        let b = select_egl(&pool, &model, &x, 2).unwrap();
        assert_eq!(b.indices, vec![0, 1]);
        assert!((b.scores[0] - 1.0).abs() < 1e-12);
        // x = 0: only the bias gradient remains, ||p - e_y|| = sqrt(0.5).
        assert!((b.scores[1] - 0.5f64.sqrt()).abs() < 1e-12);
    }

    #[test]
    fn confident_prediction_scores_near_zero() {
        let mut model = SoftmaxRegression::zeros(1, 2);
        model.bias_mut().copy_from_slice(&[40.0, 0.0]);
        let x = FeatureMatrix::from_rows(&[vec![1.0], vec![0.0]]).unwrap();
        let pool = Pool::new(vec![0, 0], 2).unwrap();
        let b = select_egl(&pool, &model, &x, 2).unwrap();
        assert!(b.scores.iter().all(|&s| (0.0..1e-15).contains(&s)), "{:?}", b.scores);
    }
}
