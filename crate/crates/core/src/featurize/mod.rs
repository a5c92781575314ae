//! Corpus ingestion and feature extraction.
//!
//! Text corpora are read from TREC-6 label files, AG's News CSV or generic
//! JSONL, then turned into dense rows either by a hashed TF-IDF featurizer
//! fitted on the training split or by loading externally computed
//! embeddings.

mod corpus;
mod embeddings;
mod tfidf;

pub use corpus::{parse_corpus, parse_corpus_bytes, write_label_map, CorpusFormat, AG_NEWS_CLASSES};
pub use embeddings::load_embeddings;
pub use tfidf::{fit_featurizer, tokenize, FeaturizerConfig, FeaturizerMode, FittedFeaturizer};
