use std::fs;

use textal::featurize::{
    fit_featurizer, load_embeddings, parse_corpus, write_label_map, CorpusFormat, FeaturizerConfig,
};
use textal::synthetic::{ag_news_csv, trec_corpus};
use textal::{Error, Split};

#[test]
fn trec_file_to_features_is_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("train.label");
    fs::write(&path, trec_corpus(&[3, 5, 5, 5, 4, 4], 0.5, 1, 0)).unwrap();
    let data = parse_corpus(&path, CorpusFormat::Trec6, Split::Train).unwrap();
    assert_eq!(data.len(), 26);
    assert_eq!(data.num_classes(), 6);

    let cfg = FeaturizerConfig { hash_dim: 64, ..Default::default() };
    let a = fit_featurizer(&data, &cfg).unwrap().transform(&data);
    let b = fit_featurizer(&data, &cfg).unwrap().transform(&data);
    assert_eq!(a, b);
    for i in 0..a.rows() {
        let norm: f64 = a.row(i).iter().map(|v| v * v).sum::<f64>().sqrt();
        assert!((norm - 1.0).abs() < 1e-12);
    }

    let map = dir.path().join("labels.json");
    write_label_map(&data, &map).unwrap();
    let v: serde_json::Value = serde_json::from_str(&fs::read_to_string(map).unwrap()).unwrap();
    assert_eq!(v["classes"].as_array().unwrap().len(), 6);
}

#[test]
fn two_buckets_are_enough() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("train.csv");
    fs::write(&path, ag_news_csv(&[5, 5, 5, 5], 0.5, 2, 0)).unwrap();
    let data = parse_corpus(&path, CorpusFormat::AgNewsCsv, Split::Train).unwrap();
    assert_eq!(data.class_names(), ["World", "Sports", "Business", "Sci/Tech"]);
    let cfg = FeaturizerConfig { hash_dim: 2, ..Default::default() };
    let x = fit_featurizer(&data, &cfg).unwrap().transform(&data);
    assert_eq!((x.rows(), x.dim()), (20, 2));
    assert!(x.as_slice().iter().all(|v| v.is_finite()));
}

#[test]
fn embeddings_load_from_csv_and_jsonl() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("e.csv");
    let jsonl = dir.path().join("e.jsonl");
    fs::write(&csv, "0.5,1\n-2,3e-1\n").unwrap();
    fs::write(&jsonl, "[0.5, 1]\n[-2, 0.3]\n").unwrap();
    let a = load_embeddings(&csv, 2).unwrap();
    let b = load_embeddings(&jsonl, 2).unwrap();
    assert_eq!(a, b);
    assert!(matches!(load_embeddings(&csv, 3), Err(Error::Shape(_))));
    fs::write(&csv, "1,2\n3\n").unwrap();
    assert!(matches!(load_embeddings(&csv, 2), Err(Error::Shape(_))));
}

#[test]
fn bad_files_report_their_problem() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("bad.label");
    fs::write(&path, "DESC:manner How do I ?\nno colon here\n").unwrap();
    match parse_corpus(&path, CorpusFormat::Trec6, Split::Train) {
        Err(Error::Parse { line, .. }) => assert_eq!(line, 2),
        other => panic!("{other:?}"),
    }
    assert!(matches!(
        parse_corpus(&dir.path().join("absent"), CorpusFormat::Trec6, Split::Train),
        Err(Error::Io { .. })
    ));
}
