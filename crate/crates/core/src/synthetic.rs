//! Seeded synthetic data for examples, tests and smoke benchmarks.
//!
//! The text generators write files in the exact TREC-6 and AG's News layouts
//! so the real ingestion path is exercised end to end.

use std::fmt::Write as _;

use crate::data::{Dataset, FeatureMatrix, Instance, Split};
use crate::error::Result;
use crate::harness::PreparedData;
use crate::rng::{RngState, StreamRng};

/// Coarse TREC-6 class names.
pub const TREC_CLASSES: [&str; 6] = ["ABBR", "DESC", "ENTY", "HUM", "LOC", "NUM"];

/// Training-split class counts of the public TREC-6 release (5,452 rows).
pub const TREC_TRAIN_COUNTS: [usize; 6] = [86, 1162, 1250, 1223, 835, 896];

/// Isotropic Gaussian blobs with centers drawn on a sphere of radius
/// `separation`; smaller separation means more overlap. Labels cycle through
/// the classes so every class has `n / classes` (+1) points.
pub fn gaussian_clusters(
    n: usize,
    dim: usize,
    classes: usize,
    separation: f64,
    seed: u64,
) -> (FeatureMatrix, Vec<usize>) {
    let state = RngState::new(seed);
    let mut centers_rng = state.stream("synthetic/centers", 0);
    let centers: Vec<Vec<f64>> = (0..classes)
        .map(|_| {
            let v: Vec<f64> = (0..dim).map(|_| centers_rng.normal()).collect();
            let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
            v.into_iter().map(|x| x / norm * separation).collect()
        })
        .collect();
    let mut rng = state.stream("synthetic/points", 0);
    let mut rows = Vec::with_capacity(n);
    let mut labels = Vec::with_capacity(n);
    for i in 0..n {
        let c = i % classes;
        rows.push(centers[c].iter().map(|m| m + rng.normal()).collect::<Vec<f64>>());
        labels.push(c);
    }
    (FeatureMatrix::from_rows(&rows).expect("finite"), labels)
}

/// Train and validation splits drawn from the same clusters, wrapped as
/// [`PreparedData`] with placeholder texts and classes named `c0`, `c1`, ...
pub fn cluster_data(
    train_n: usize,
    validation_n: usize,
    dim: usize,
    classes: usize,
    separation: f64,
    seed: u64,
) -> Result<PreparedData> {
    let (x, y) = gaussian_clusters(train_n + validation_n, dim, classes, separation, seed);
    let names: Vec<String> = (0..classes).map(|c| format!("c{c}")).collect();
    let dataset = |rows: std::ops::Range<usize>, split| {
        let instances = rows.map(|i| Instance { text: format!("point {i}"), label: y[i] }).collect();
        Dataset::new(instances, names.clone(), split)
    };
    let train_rows: Vec<usize> = (0..train_n).collect();
    let validation_rows: Vec<usize> = (train_n..train_n + validation_n).collect();
    PreparedData::from_features(
        dataset(0..train_n, Split::Train)?,
        dataset(train_n..train_n + validation_n, Split::Validation)?,
        x.select_rows(&train_rows),
        x.select_rows(&validation_rows),
    )
}

/// Word generator: each class owns a private vocabulary and all classes share
/// a common one.
struct Vocabulary {
    class_words: Vec<Vec<String>>,
    shared: Vec<String>,
}

const SYLLABLES: [&str; 24] = [
    "ka", "lo", "mi", "ra", "su", "te", "po", "ne", "da", "vi", "bu", "ge", "ho", "ji", "fa", "ze",
    "wu", "chi", "an", "or", "el", "is", "um", "ya",
];

fn word(rng: &mut StreamRng) -> String {
    let len = 2 + rng.below(2);
    (0..len).map(|_| SYLLABLES[rng.below(SYLLABLES.len())]).collect()
}

impl Vocabulary {
    fn new(classes: usize, per_class: usize, shared: usize, rng: &mut StreamRng) -> Self {
        Self {
            class_words: (0..classes)
                .map(|_| (0..per_class).map(|_| word(rng)).collect())
                .collect(),
            shared: (0..shared).map(|_| word(rng)).collect(),
        }
    }

    /// `class_share` of the tokens come from the class vocabulary.
    fn sentence(&self, class: usize, class_share: f64, rng: &mut StreamRng) -> String {
        let len = 6 + rng.below(8);
        let words: Vec<&str> = (0..len)
            .map(|_| {
                if rng.next_f64() < class_share {
                    let v = &self.class_words[class];
                    v[rng.below(v.len())].as_str()
                } else {
                    self.shared[rng.below(self.shared.len())].as_str()
                }
            })
            .collect();
        words.join(" ")
    }
}

/// Labels in a shuffled order with exactly `counts[c]` of class `c`.
fn shuffled_labels(counts: &[usize], rng: &mut StreamRng) -> Vec<usize> {
    let mut labels: Vec<usize> = counts
        .iter()
        .enumerate()
        .flat_map(|(c, &k)| std::iter::repeat(c).take(k))
        .collect();
    rng.shuffle(&mut labels);
    labels
}

/// A corpus in TREC-6 label-file format (`COARSE:fine text ?`).
///
/// The vocabulary depends on `seed` only; `part` selects an independent
/// stream of sentences, so a train and a validation split share words when
/// generated with the same seed and different parts.
pub fn trec_corpus(counts: &[usize; 6], class_share: f64, seed: u64, part: u64) -> String {
    let state = RngState::new(seed);
    let vocab = Vocabulary::new(6, 40, 120, &mut state.stream("synthetic/vocab", 0));
    let mut rng = state.stream("synthetic/trec", part);
    let mut out = String::new();
    for label in shuffled_labels(counts, &mut rng) {
        let text = vocab.sentence(label, class_share, &mut rng);
        writeln!(out, "{}:other {text} ?", TREC_CLASSES[label]).expect("string write");
    }
    out
}

/// A corpus in AG's News CSV format (`"class","title","description"`);
/// `seed` and `part` work as in [`trec_corpus`].
pub fn ag_news_csv(counts: &[usize; 4], class_share: f64, seed: u64, part: u64) -> String {
    let state = RngState::new(seed);
    let vocab = Vocabulary::new(4, 60, 200, &mut state.stream("synthetic/vocab", 0));
    let mut rng = state.stream("synthetic/ag", part);
    let mut out = String::new();
    for label in shuffled_labels(counts, &mut rng) {
        let title = vocab.sentence(label, class_share, &mut rng);
        let body = vocab.sentence(label, class_share, &mut rng);
        writeln!(out, "\"{}\",\"{title}\",\"{body}\"", label + 1).expect("string write");
    }
    out
}
