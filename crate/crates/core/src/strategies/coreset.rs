use rayon::prelude::*;

use super::{check_request, QueryBatch, Strategy};
use crate::data::{euclidean, FeatureMatrix};
use crate::error::{Error, Result};
use crate::pool::Pool;

/// Greedy k-center (farthest-first traversal) seeded with the labeled set.
///
/// Each step takes the unlabeled point farthest from its nearest center and
/// makes it a center. Scores are the min-distances at the moment of
/// selection, so they never increase within a batch.
pub fn select_coreset(pool: &Pool, reprs: &FeatureMatrix, batch_size: usize) -> Result<QueryBatch> {
    check_request(pool, batch_size)?;
    if pool.labeled().is_empty() {
        return Err(Error::NeedsSeed);
    }
    if reprs.rows() != pool.len() {
        return Err(Error::Shape(format!(
            "{} representation rows for a pool of {}",
            reprs.rows(),
            pool.len()
        )));
    }
    let centers = pool.labeled_indices();
    let candidates = pool.unlabeled_indices();
    let mut min_dist: Vec<f64> = candidates
        .par_iter()
        .map(|&i| {
            centers
                .iter()
                .map(|&c| euclidean(reprs.row(i), reprs.row(c)))
                .fold(f64::INFINITY, f64::min)
        })
        .collect();
    let mut taken = vec![false; candidates.len()];
    let k = batch_size.min(candidates.len());
    let mut indices = Vec::with_capacity(k);
    let mut scores = Vec::with_capacity(k);
    for _ in 0..k {
        let mut best: Option<usize> = None;
        for (slot, &d) in min_dist.iter().enumerate() {
            if taken[slot] {
                continue;
            }
            if best.map_or(true, |b| d > min_dist[b]) {
                best = Some(slot);
            }
        }
        let slot = best.expect("k <= candidates");
        taken[slot] = true;
        indices.push(candidates[slot]);
        scores.push(min_dist[slot]);
        let center = reprs.row(candidates[slot]);
        min_dist
            .par_iter_mut()
            .zip(&candidates)
            .for_each(|(m, &i)| {
                let d = euclidean(reprs.row(i), center);
                if d < *m {
                    *m = d;
                }
            });
    }
    Ok(QueryBatch {
        indices,
        scores,
        strategy: Strategy::Coreset.name().into(),
        iteration: 0,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn fixture() -> (Pool, FeatureMatrix) {
        let reprs = FeatureMatrix::from_rows(&[
            vec![0.0, 0.0],
            vec![1.0, 0.0],
            vec![3.0, 0.0],
            vec![2.0, 2.0],
        ])
        .unwrap();
        let pool = Pool::new(vec![0; 4], 2).unwrap().label_instances(&[0]).unwrap();
        (pool, reprs)
    }

    #[test]
    fn hand_worked_traversal() {
        let (pool, reprs) = fixture();
        let b = select_coreset(&pool, &reprs, 2).unwrap();
        assert_eq!(b.indices, vec![2, 3]);
        assert!((b.scores[0] - 3.0).abs() < 1e-12);
        assert!((b.scores[1] - 5f64.sqrt()).abs() < 1e-12);
    }

    #[test]
    fn coincident_candidate_comes_last() {
        let reprs = FeatureMatrix::from_rows(&[vec![0.0], vec![0.0], vec![1.0], vec![2.0]]).unwrap();
        let pool = Pool::new(vec![0; 4], 2).unwrap().label_instances(&[0]).unwrap();
        let b = select_coreset(&pool, &reprs, 3).unwrap();
        assert_eq!(b.indices, vec![3, 2, 1]);
        assert_eq!(b.scores[2], 0.0);
    }

    #[test]
    fn needs_labeled_seed() {
        let (_, reprs) = fixture();
        let pool = Pool::new(vec![0; 4], 2).unwrap();
        assert!(matches!(select_coreset(&pool, &reprs, 1), Err(Error::NeedsSeed)));
    }
}
