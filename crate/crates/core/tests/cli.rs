mod common;

use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use common::{balanced6, write_trec};

fn textal(args: &[&str], envs: &[(&str, &str)]) -> Output {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_textal"));
    cmd.args(args).env_remove("TEXTAL_OUT_DIR").env_remove("TEXTAL_THREADS");
    for (k, v) in envs {
        cmd.env(k, v);
    }
    cmd.output().unwrap()
}

fn write_config(dir: &Path, extra: &str) -> String {
    write_trec(dir, &balanced6(90), &balanced6(24), 5);
    let path = dir.join("exp.toml");
    fs::write(
        &path,
        format!(
            "train_path = \"train.label\"\nvalidation_path = \"validation.label\"\nhash_dim = 128\nhidden_dim = 8\n\
             epochs = 3\nbatch_size = 6\niterations = 2\nmc_passes = 3\ndal_sub_batches = 2\n\
             strategies = [\"entropy\", \"dal\"]\nseeds = [7, 8]\noutput_dir = \"out\"\n{extra}"
        ),
    )
    .unwrap();
    path.to_string_lossy().into_owned()
}

fn error_line(out: &Output) -> serde_json::Value {
    let stderr = String::from_utf8_lossy(&out.stderr);
    let line = stderr.lines().last().unwrap();
    serde_json::from_str(line).unwrap()
}

#[test]
fn validate_config_reports_dataset() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "");
    let out = textal(&["validate-config", "--config", &cfg], &[]);
    assert!(out.status.success());
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["status"], "ok");
    assert_eq!(v["train_instances"], 90);
    assert_eq!(v["feature_dim"], 128);
}

#[test]
fn run_is_byte_identical_across_repeats_and_threads() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "");
    let mut outputs = Vec::new();
    for (name, threads) in [("a", "1"), ("b", "1"), ("c", "3")] {
        let out_dir = dir.path().join(name);
        let out = textal(
            &["run", "--config", &cfg, "--seed", "8", "--strategy", "dal", "--out", out_dir.to_str().unwrap()],
            &[("TEXTAL_THREADS", threads)],
        );
        assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
        let runs = out_dir.join("runs");
        outputs.push((
            fs::read(runs.join("dal_seed8.records.csv")).unwrap(),
            fs::read(runs.join("dal_seed8.audit.jsonl")).unwrap(),
        ));
        assert!(out_dir.join("manifest.json").exists());
        assert!(!runs.join("entropy_seed7.records.csv").exists());
    }
    assert_eq!(outputs[0], outputs[1]);
    assert_eq!(outputs[0], outputs[2]);
}

#[test]
fn suite_then_report() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "");
    let env_out = dir.path().join("from-env");
    let out = textal(&["suite", "--config", &cfg], &[("TEXTAL_OUT_DIR", env_out.to_str().unwrap())]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let runs = fs::read_dir(env_out.join("runs")).unwrap().count();
    assert_eq!(runs, 4 * 3);
    assert!(!dir.path().join("out").exists());

    let rebuilt = dir.path().join("rebuilt");
    let out = textal(&["report", "--in", env_out.to_str().unwrap(), "--out", rebuilt.to_str().unwrap()], &[]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    assert_eq!(
        fs::read(rebuilt.join("learning_curves.csv")).unwrap(),
        fs::read(env_out.join("learning_curves.csv")).unwrap()
    );
    let manifest: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(rebuilt.join("manifest.json")).unwrap()).unwrap();
    let original: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(env_out.join("manifest.json")).unwrap()).unwrap();
    assert_eq!(manifest["config_hash"], original["config_hash"]);
}

#[test]
fn failures_exit_nonzero_with_json_error() {
    let dir = tempfile::tempdir().unwrap();
    let missing = dir.path().join("missing.toml");
    let out = textal(&["run", "--config", missing.to_str().unwrap()], &[]);
    assert!(!out.status.success());
    assert_eq!(error_line(&out)["error"]["kind"], "io");

    let cfg = write_config(dir.path(), "batch_size = 500\n");
    let out = textal(&["validate-config", "--config", &cfg], &[]);
    assert!(!out.status.success());
    assert_eq!(error_line(&out)["error"]["kind"], "config");

    let cfg = write_config(dir.path(), "");
    let out = textal(&["run", "--config", &cfg, "--strategy", "margin"], &[]);
    assert!(!out.status.success());
    assert_eq!(error_line(&out)["error"]["kind"], "usage");

    let out = textal(&["report", "--in", dir.path().join("nothing").to_str().unwrap(), "--out", "x"], &[]);
    assert!(!out.status.success());
    assert!(error_line(&out)["error"]["message"].is_string());
}
