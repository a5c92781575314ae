// Train a classifier, save it as JSON and binary, and reload both.
//
//     cargo run --example model_persistence

use textal::model::{load_binary, load_json, save_binary, save_json, train_from_scratch, ClassifierConfig};
use textal::synthetic::gaussian_clusters;
use textal::RngState;

fn main() -> textal::Result<()> {
    let (x, y) = gaussian_clusters(120, 6, 3, 2.5, 9);
    let config = ClassifierConfig { hidden_dim: 12, epochs: 25, learning_rate: 1e-2, ..Default::default() };
    let model = train_from_scratch(&x, &y, 3, &config, &mut RngState::new(9).stream("train", 0))?;

    let dir = std::env::temp_dir().join(format!("textal-persist-{}", std::process::id()));
    std::fs::create_dir_all(&dir).map_err(|e| textal::Error::Io { path: dir.clone(), source: e })?;
    let (json, bin) = (dir.join("model.json"), dir.join("model.bin"));
    save_json(&model, &json)?;
    save_binary(&model, &bin)?;
    let a = load_json(&json)?;
    let b = load_binary(&bin)?;
    println!("reloaded identical: json {}, binary {}", a == model, b == model);
    println!(
        "sizes: json {} bytes, binary {} bytes",
        std::fs::metadata(&json).map(|m| m.len()).unwrap_or(0),
        std::fs::metadata(&bin).map(|m| m.len()).unwrap_or(0)
    );
    let accuracy = b.predict_proba(&x)?.predictions().iter().zip(&y).filter(|(p, t)| p == t).count() as f64 / y.len() as f64;
    println!("training accuracy {accuracy:.3}");
    let _ = std::fs::remove_dir_all(&dir);
    Ok(())
}
