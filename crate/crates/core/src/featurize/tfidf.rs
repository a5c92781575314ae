use std::hash::Hasher;

use fnv::FnvHasher;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use unicode_segmentation::UnicodeSegmentation;

use crate::data::{Dataset, FeatureMatrix};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FeaturizerMode {
    HashedTfidf,
    Precomputed,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FeaturizerConfig {
    pub mode: FeaturizerMode,
    /// Number of hash buckets; a power of two.
    pub hash_dim: usize,
    pub lowercase: bool,
    /// `1 + ln(count)` instead of the raw count.
    pub sublinear_tf: bool,
    pub l2_normalize: bool,
}

impl Default for FeaturizerConfig {
    fn default() -> Self {
        Self {
            mode: FeaturizerMode::HashedTfidf,
            hash_dim: 4096,
            lowercase: true,
            sublinear_tf: true,
            l2_normalize: true,
        }
    }
}

impl FeaturizerConfig {
    pub fn validate(&self) -> Result<()> {
        if self.hash_dim < 2 || !self.hash_dim.is_power_of_two() {
            return Err(Error::Config(format!(
                "hash_dim must be a power of two >= 2, got {}",
                self.hash_dim
            )));
        }
        Ok(())
    }
}

/// Words of `text` by Unicode word boundaries.
pub fn tokenize(text: &str, lowercase: bool) -> Vec<String> {
    if lowercase {
        text.to_lowercase().unicode_words().map(str::to_string).collect()
    } else {
        text.unicode_words().map(str::to_string).collect()
    }
}

fn bucket(token: &str, hash_dim: usize) -> usize {
    let mut h = FnvHasher::default();
    h.write(token.as_bytes());
    (h.finish() & (hash_dim as u64 - 1)) as usize
}

/// Hashed TF-IDF statistics learned from a training split.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FittedFeaturizer {
    config: FeaturizerConfig,
    documents: usize,
    doc_freq: Vec<u32>,
    idf: Vec<f64>,
}

/// Count per-bucket document frequencies over `train` and derive smoothed
/// IDF weights `ln((1 + N) / (1 + df)) + 1`.
pub fn fit_featurizer(train: &Dataset, config: &FeaturizerConfig) -> Result<FittedFeaturizer> {
    config.validate()?;
    if config.mode != FeaturizerMode::HashedTfidf {
        return Err(Error::Config(
            "only the hashed_tfidf featurizer is fitted; precomputed features are loaded".into(),
        ));
    }
    let mut doc_freq = vec![0u32; config.hash_dim];
    let mut seen = vec![false; config.hash_dim];
    let mut touched = Vec::new();
    for text in train.texts() {
        for token in tokenize(text, config.lowercase) {
            let b = bucket(&token, config.hash_dim);
            if !seen[b] {
                seen[b] = true;
                touched.push(b);
            }
        }
        for b in touched.drain(..) {
            seen[b] = false;
            doc_freq[b] += 1;
        }
    }
    let n = train.len() as f64;
    let idf = doc_freq
        .iter()
        .map(|&df| ((1.0 + n) / (1.0 + df as f64)).ln() + 1.0)
        .collect();
    Ok(FittedFeaturizer {
        config: config.clone(),
        documents: train.len(),
        doc_freq,
        idf,
    })
}

impl FittedFeaturizer {
    pub fn config(&self) -> &FeaturizerConfig {
        &self.config
    }

    pub fn dim(&self) -> usize {
        self.config.hash_dim
    }

    pub fn documents(&self) -> usize {
        self.documents
    }

    pub fn doc_freq(&self) -> &[u32] {
        &self.doc_freq
    }

    pub fn idf(&self) -> &[f64] {
        &self.idf
    }

    pub fn bucket_of(&self, token: &str) -> usize {
        bucket(token, self.config.hash_dim)
    }

    /// Feature row for a single text.
    pub fn transform_text(&self, text: &str) -> Vec<f64> {
        let dim = self.config.hash_dim;
        let mut counts = vec![0u32; dim];
        for token in tokenize(text, self.config.lowercase) {
            counts[bucket(&token, dim)] += 1;
        }
        let mut row: Vec<f64> = counts
            .iter()
            .zip(&self.idf)
            .map(|(&c, &idf)| {
                if c == 0 {
                    0.0
                } else if self.config.sublinear_tf {
                    (1.0 + (c as f64).ln()) * idf
                } else {
                    c as f64 * idf
                }
            })
            .collect();
        if self.config.l2_normalize {
            let norm = row.iter().map(|v| v * v).sum::<f64>().sqrt();
            if norm > 0.0 {
                row.iter_mut().for_each(|v| *v /= norm);
            }
        }
        row
    }

    /// Featurize every instance of `dataset`; never updates the fitted state.
    pub fn transform(&self, dataset: &Dataset) -> FeatureMatrix {
        let texts: Vec<&str> = dataset.texts().collect();
        let rows: Vec<Vec<f64>> = texts.par_iter().map(|t| self.transform_text(t)).collect();
        FeatureMatrix::new(rows.len(), self.dim(), rows.concat()).expect("tf-idf rows are finite")
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::data::{Instance, Split};

    fn corpus(texts: &[&str]) -> Dataset {
        let instances = texts
            .iter()
            .enumerate()
            .map(|(i, t)| Instance {
                text: t.to_string(),
                label: i % 2,
            })
            .collect();
        Dataset::new(instances, vec!["a".into(), "b".into()], Split::Train).unwrap()
    }

    #[test]
    fn single_document_idf_is_one() {
        let f = fit_featurizer(&corpus(&["food"]), &FeaturizerConfig::default()).unwrap();
        let b = f.bucket_of("food");
        assert_eq!(f.doc_freq()[b], 1);
        assert!((f.idf()[b] - 1.0).abs() < 1e-15);
    }

    #[test]
    fn unseen_bucket_idf() {
        let ds = corpus(&["food", "keys", "food keys"]);
        let f = fit_featurizer(&ds, &FeaturizerConfig::default()).unwrap();
        let empty = (0..f.dim()).find(|&b| f.doc_freq()[b] == 0).unwrap();
        assert!((f.idf()[empty] - (4.0f64.ln() + 1.0)).abs() < 1e-15);
    }

    #[test]
    fn repeated_token_counts_once_per_document() {
        let f = fit_featurizer(&corpus(&["food food food", "x"]), &FeaturizerConfig::default()).unwrap();
        assert_eq!(f.doc_freq()[f.bucket_of("food")], 1);
    }

    #[test]
    fn identical_texts_give_identical_rows() {
        let ds = corpus(&["get me dahi 1.5kg", "get me dahi 1.5kg", "3 plate chole bhature"]);
        let f = fit_featurizer(&ds, &FeaturizerConfig::default()).unwrap();
        let m = f.transform(&ds);
        assert_eq!(m.row(0), m.row(1));
    }

    #[test]
    fn empty_text_gives_zero_row_and_others_unit_norm() {
        let ds = corpus(&["", "pick up 1 yellow coloured dress"]);
        let f = fit_featurizer(&ds, &FeaturizerConfig::default()).unwrap();
        let m = f.transform(&ds);
        assert!(m.row(0).iter().all(|&v| v == 0.0));
        let norm = m.row(1).iter().map(|v| v * v).sum::<f64>().sqrt();
        assert!((norm - 1.0).abs() < 1e-6);
    }

    #[test]
    fn sublinear_tf_weights() {
        let cfg = FeaturizerConfig {
            l2_normalize: false,
            ..Default::default()
        };
        // "a" and "b" both appear in one of one document, so IDF(a) = IDF(b) = 1.
        let ds = corpus(&["a a b"]);
        let f = fit_featurizer(&ds, &cfg).unwrap();
        let (ba, bb) = (f.bucket_of("a"), f.bucket_of("b"));
        assert_ne!(ba, bb, "fixture relies on a and b in distinct buckets");
        let row = f.transform_text("a a b");
        assert!((row[ba] - (1.0 + 2f64.ln())).abs() < 1e-12);
        assert!((row[bb] - 1.0).abs() < 1e-12);
    }

    #[test]
    fn transforming_validation_leaves_state_unchanged() {
        let train = corpus(&["food grocery", "keys documents"]);
        let val = corpus(&["medicines food", "clothes"]);
        let f = fit_featurizer(&train, &FeaturizerConfig::default()).unwrap();
        let before = f.clone();
        let _ = f.transform(&val);
        assert_eq!(f, before);
    }

    #[test]
    fn tiny_hash_dim_still_valid() {
        let cfg = FeaturizerConfig {
            hash_dim: 2,
            ..Default::default()
        };
        let ds = corpus(&["many different words here", "and more words"]);
        let f = fit_featurizer(&ds, &cfg).unwrap();
        let m = f.transform(&ds);
        assert_eq!(m.dim(), 2);
        assert!(m.as_slice().iter().all(|v| v.is_finite()));
    }

    #[test]
    fn config_validation() {
        for bad in [0, 1, 3, 100] {
            let cfg = FeaturizerConfig {
                hash_dim: bad,
                ..Default::default()
            };
            assert!(cfg.validate().is_err(), "{bad}");
        }
        let cfg = FeaturizerConfig {
            mode: FeaturizerMode::Precomputed,
            ..Default::default()
        };
        assert!(fit_featurizer(&corpus(&["x"]), &cfg).is_err());
    }

    #[test]
    fn tokenizer_handles_code_mixed_text() {
        assert_eq!(
            tokenize("2254/- pay krke Samaan uthana hai", true),
            vec!["2254", "pay", "krke", "samaan", "uthana", "hai"]
        );
    }
}
