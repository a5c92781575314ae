// Parse a TREC-6 style label file and turn it into hashed TF-IDF features.
//
//     cargo run --example featurize_corpus [PATH]
//
// Without PATH a small synthetic corpus is written to a temporary directory.

use std::path::PathBuf;

use textal::featurize::{fit_featurizer, parse_corpus, tokenize, CorpusFormat, FeaturizerConfig};
use textal::synthetic::trec_corpus;
use textal::Split;

fn main() -> textal::Result<()> {
    let dir = std::env::temp_dir().join(format!("textal-featurize-{}", std::process::id()));
    std::fs::create_dir_all(&dir).map_err(|e| textal::Error::Io { path: dir.clone(), source: e })?;
    let path = match std::env::args().nth(1) {
        Some(p) => PathBuf::from(p),
        None => {
            let p = dir.join("train.label");
            std::fs::write(&p, trec_corpus(&[10, 30, 30, 30, 20, 20], 0.6, 1, 0))
                .map_err(|e| textal::Error::Io { path: p.clone(), source: e })?;
            p
        }
    };

    let train = parse_corpus(&path, CorpusFormat::Trec6, Split::Train)?;
    println!("{} questions, classes {:?}", train.len(), train.class_names());

    let first = &train.instances()[0];
    println!("first: {:?} -> tokens {:?}", first.text, tokenize(&first.text, true));

    let config = FeaturizerConfig { hash_dim: 512, ..Default::default() };
    let featurizer = fit_featurizer(&train, &config)?;
    let x = featurizer.transform(&train);
    let nonzero = x.row(0).iter().filter(|v| **v != 0.0).count();
    println!("feature matrix {}x{}, row 0 has {nonzero} non-zero buckets", x.rows(), x.dim());

    let unseen = featurizer.transform_text("what is the capital of nowhere ?");
    println!("unseen text norm {:.3}", unseen.iter().map(|v| v * v).sum::<f64>().sqrt());
    let _ = std::fs::remove_dir_all(&dir);
    Ok(())
}
