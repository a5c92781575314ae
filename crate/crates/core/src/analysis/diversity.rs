use crate::data::{euclidean, FeatureMatrix};
use crate::error::{Error, Result};
use crate::rng::StreamRng;

/// Pools larger than this are summarized by a random sample of this many rows.
pub const POOL_SAMPLE_ROWS: usize = 2000;

/// Mean Euclidean distance over all unordered pairs of `rows` of `m`.
pub fn mean_pairwise_distance(m: &FeatureMatrix, rows: &[usize]) -> f64 {
    let mut sum = 0.0;
    let mut pairs = 0usize;
    for (a, &i) in rows.iter().enumerate() {
        for &j in &rows[a + 1..] {
            sum += euclidean(m.row(i), m.row(j));
            pairs += 1;
        }
    }
    sum / pairs as f64
}

/// Spread of a batch relative to the pool it came from: mean pairwise
/// distance inside the batch divided by mean pairwise distance inside the
/// pool. The pool term is exact up to [`POOL_SAMPLE_ROWS`] rows and
/// estimated from a sample drawn with `rng` beyond that.
pub fn diversity(batch: &FeatureMatrix, pool: &FeatureMatrix, rng: &mut StreamRng) -> Result<f64> {
    if batch.rows() < 2 {
        return Err(Error::UndefinedMetric("diversity needs a batch of at least 2".into()));
    }
    if pool.rows() < 2 {
        return Err(Error::UndefinedMetric("diversity needs a pool of at least 2".into()));
    }
    if batch.dim() != pool.dim() {
        return Err(Error::Shape(format!(
            "batch dim {} vs pool dim {}",
            batch.dim(),
            pool.dim()
        )));
    }
    let all: Vec<usize> = (0..pool.rows()).collect();
    let pool_rows = if pool.rows() > POOL_SAMPLE_ROWS {
        rng.sample(&all, POOL_SAMPLE_ROWS)
    } else {
        all
    };
    let baseline = mean_pairwise_distance(pool, &pool_rows);
    if baseline == 0.0 {
        return Err(Error::UndefinedMetric("pool points all coincide".into()));
    }
    let batch_rows: Vec<usize> = (0..batch.rows()).collect();
    Ok(mean_pairwise_distance(batch, &batch_rows) / baseline)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::RngState;

    fn rng() -> StreamRng {
        RngState::new(0).stream("div", 0)
    }

    #[test]
    fn coincident_batch_has_zero_diversity() {
        let batch = FeatureMatrix::from_rows(&[vec![1.0, 1.0], vec![1.0, 1.0]]).unwrap();
        let pool = FeatureMatrix::from_rows(&[vec![0.0, 0.0], vec![1.0, 0.0]]).unwrap();
        assert_eq!(diversity(&batch, &pool, &mut rng()).unwrap(), 0.0);
    }

    #[test]
    fn ratio_against_unit_pool() {
        let batch = FeatureMatrix::from_rows(&[vec![0.0, 0.0], vec![0.0, 2.0]]).unwrap();
        let pool = FeatureMatrix::from_rows(&[vec![0.0, 0.0], vec![1.0, 0.0]]).unwrap();
        assert!((diversity(&batch, &pool, &mut rng()).unwrap() - 2.0).abs() < 1e-12);
    }

    #[test]
    fn batch_from_pool_distribution_is_near_one() {
        let mut r = RngState::new(3).stream("points", 0);
        let mut draw = |n: usize| {
            FeatureMatrix::from_rows(&(0..n).map(|_| vec![r.normal(), r.normal(), r.normal()]).collect::<Vec<_>>())
                .unwrap()
        };
        let pool = draw(1000);
        let batch = draw(200);
        let d = diversity(&batch, &pool, &mut rng()).unwrap();
        assert!((d - 1.0).abs() < 0.05, "{d}");
    }

    #[test]
    fn single_row_batch_is_undefined() {
        let one = FeatureMatrix::from_rows(&[vec![0.0]]).unwrap();
        let two = FeatureMatrix::from_rows(&[vec![0.0], vec![1.0]]).unwrap();
        assert!(matches!(diversity(&one, &two, &mut rng()), Err(Error::UndefinedMetric(_))));
    }
}
