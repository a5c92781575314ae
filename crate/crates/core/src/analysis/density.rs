use rayon::prelude::*;

use crate::data::{euclidean, FeatureMatrix};
use crate::error::{Error, Result};
use crate::pool::Pool;
use crate::rng::StreamRng;

pub const DEFAULT_K: usize = 10;

/// Lower bound on a mean neighbor distance before it is inverted.
pub const DENSITY_FLOOR: f64 = 1e-12;

/// Mean distance from `point` to its `k` nearest rows among `others`.
pub fn mean_knn_distance(point: &[f64], reprs: &FeatureMatrix, others: &[usize], k: usize) -> f64 {
    let dists: Vec<f64> = others.iter().map(|&j| euclidean(point, reprs.row(j))).collect();
    mean_of_smallest(dists, k)
}

fn mean_of_smallest(mut dists: Vec<f64>, k: usize) -> f64 {
    let k = k.min(dists.len());
    if k < dists.len() {
        dists.select_nth_unstable_by(k - 1, f64::total_cmp);
    }
    dists[..k].iter().sum::<f64>() / k as f64
}

/// KNN density `1 / mean k-NN distance`, with the distance floored at
/// [`DENSITY_FLOOR`].
pub fn knn_density(point: &[f64], reprs: &FeatureMatrix, others: &[usize], k: usize) -> f64 {
    let mean = mean_knn_distance(point, reprs, others, k);
    if mean < DENSITY_FLOOR {
        log::warn!("k-NN distance {mean:e} below floor; density clamped");
    }
    1.0 / mean.max(DENSITY_FLOOR)
}

/// Scale-free KNN density of a batch.
///
/// Neighbors are searched in the unlabeled pool with the batch itself
/// removed. The mean density of the batch is multiplied by the mean k-NN
/// distance of the remaining pool (estimated from at most `baseline_rows`
/// points sampled with `rng`), so 1 means "as dense as a typical pool point".
pub fn representativeness(
    batch: &[usize],
    pool: &Pool,
    reprs: &FeatureMatrix,
    k: usize,
    baseline_rows: usize,
    rng: &mut StreamRng,
) -> Result<f64> {
    if batch.is_empty() {
        return Err(Error::UndefinedMetric("representativeness of an empty batch".into()));
    }
    if k == 0 {
        return Err(Error::Config("k must be >= 1".into()));
    }
    if reprs.rows() != pool.len() {
        return Err(Error::Shape(format!(
            "{} representation rows for a pool of {}",
            reprs.rows(),
            pool.len()
        )));
    }
    let others: Vec<usize> = pool
        .unlabeled()
        .iter()
        .copied()
        .filter(|i| !batch.contains(i))
        .collect();
    if others.len() < k + 1 {
        return Err(Error::UndefinedMetric(format!(
            "{} unlabeled neighbors cannot support k = {k}",
            others.len()
        )));
    }
    let density: f64 = batch
        .par_iter()
        .map(|&i| knn_density(reprs.row(i), reprs, &others, k))
        .collect::<Vec<_>>()
        .iter()
        .sum::<f64>()
        / batch.len() as f64;

    let sample = if others.len() > baseline_rows {
        rng.sample(&others, baseline_rows)
    } else {
        others.clone()
    };
    let baseline: f64 = sample
        .par_iter()
        .map(|&i| {
            let dists = others
                .iter()
                .filter(|&&j| j != i)
                .map(|&j| euclidean(reprs.row(i), reprs.row(j)))
                .collect();
            mean_of_smallest(dists, k)
        })
        .collect::<Vec<_>>()
        .iter()
        .sum::<f64>()
        / sample.len() as f64;
    Ok(density * baseline.max(DENSITY_FLOOR))
}
