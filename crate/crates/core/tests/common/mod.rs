//! Independent reference implementations and fixtures shared by the
//! integration tests.
#![allow(dead_code)]

use std::path::{Path, PathBuf};

use textal::featurize::CorpusFormat;
use textal::harness::ExperimentConfig;
use textal::synthetic::{trec_corpus, TREC_TRAIN_COUNTS};

/// Plain farthest-first traversal: every step recomputes each candidate's
/// distance to every current center from scratch.
pub fn coreset_oracle(points: &[Vec<f64>], labeled: &[usize], k: usize) -> Vec<usize> {
    let dist = |a: &[f64], b: &[f64]| a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum::<f64>().sqrt();
    let mut centers: Vec<usize> = labeled.to_vec();
    let mut chosen = Vec::new();
    for _ in 0..k {
        let mut best: Option<(usize, f64)> = None;
        for i in 0..points.len() {
            if centers.contains(&i) {
                continue;
            }
            let d = centers.iter().map(|&c| dist(&points[i], &points[c])).fold(f64::INFINITY, f64::min);
            if best.is_none_or(|(_, bd)| d > bd) {
                best = Some((i, d));
            }
        }
        match best {
            Some((i, _)) => {
                centers.push(i);
                chosen.push(i);
            }
            None => break,
        }
    }
    chosen
}

/// Two-sided Wilcoxon signed-rank p-value by enumerating all 2^n sign
/// assignments of the (average) ranks of the non-zero differences.
pub fn wilcoxon_enumerated(x: &[f64], y: &[f64]) -> (f64, f64) {
    let d: Vec<f64> = x.iter().zip(y).map(|(a, b)| a - b).filter(|v| *v != 0.0).collect();
    let n = d.len();
    let ranks: Vec<f64> = d
        .iter()
        .map(|v| {
            let below = d.iter().filter(|w| w.abs() < v.abs()).count() as f64;
            let equal = d.iter().filter(|w| w.abs() == v.abs()).count() as f64;
            below + (equal + 1.0) / 2.0
        })
        .collect();
    let observed: f64 = ranks.iter().zip(&d).filter(|(_, v)| **v > 0.0).map(|(r, _)| r).sum();
    let (mut le, mut ge) = (0u64, 0u64);
    for mask in 0u64..(1 << n) {
        let w: f64 = (0..n).filter(|b| mask >> b & 1 == 1).map(|b| ranks[b]).sum();
        if w <= observed + 1e-9 {
            le += 1;
        }
        if w >= observed - 1e-9 {
            ge += 1;
        }
    }
    let total = (1u64 << n) as f64;
    let p = (2.0 * (le.min(ge) as f64) / total).min(1.0);
    (observed, p)
}

/// Relative error with a floor on the denominator.
pub fn rel_err(a: f64, b: f64) -> f64 {
    (a - b).abs() / a.abs().max(b.abs()).max(1e-6)
}

/// Write TREC-format train/validation files into `dir`.
pub fn write_trec(dir: &Path, train: &[usize; 6], validation: &[usize; 6], seed: u64) -> (PathBuf, PathBuf) {
    let tp = dir.join("train.label");
    let vp = dir.join("validation.label");
    std::fs::write(&tp, trec_corpus(train, 0.6, seed, 0)).unwrap();
    std::fs::write(&vp, trec_corpus(validation, 0.6, seed, 1)).unwrap();
    (tp, vp)
}

/// Balanced 6-class counts summing to `total`.
pub fn balanced6(total: usize) -> [usize; 6] {
    let mut c = [total / 6; 6];
    for slot in c.iter_mut().take(total % 6) {
        *slot += 1;
    }
    c
}

/// Class proportions of the public TREC-6 training file, scaled to `total`.
pub fn trec_shaped(total: usize) -> [usize; 6] {
    let sum: usize = TREC_TRAIN_COUNTS.iter().sum();
    let mut c = TREC_TRAIN_COUNTS.map(|k| k * total / sum);
    let short = total - c.iter().sum::<usize>();
    c[2] += short;
    c
}

/// A fast configuration over TREC-format files in `dir`.
pub fn small_trec_config(dir: &Path, train: usize, validation: usize, seed: u64) -> ExperimentConfig {
    let (tp, vp) = write_trec(dir, &balanced6(train), &balanced6(validation), seed);
    let mut cfg = ExperimentConfig::new(tp, vp, CorpusFormat::Trec6);
    cfg.featurizer.hash_dim = 256;
    cfg.classifier.hidden_dim = 12;
    cfg.classifier.epochs = 4;
    cfg.batch_size = 8;
    cfg.seed_set_size = 8;
    cfg.iterations = 3;
    cfg.strategy_config.mc_passes = 4;
    cfg.strategy_config.dal_sub_batches = 2;
    cfg.strategy_config.dal_discriminator.hidden_dim = 8;
    cfg.strategy_config.dal_discriminator.epochs = 2;
    cfg.output_dir = dir.join("out");
    cfg
}
