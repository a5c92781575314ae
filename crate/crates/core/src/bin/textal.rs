//! Command-line front end: `run`, `suite`, `report`, `validate-config`.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use textal::harness::{self, ExperimentConfig};
use textal::strategies::Strategy;
use textal::{Error, Result};

#[derive(Parser)]
#[command(name = "textal", version, about = "Pool-based active learning experiments")]
struct Cli {
    /// Worker threads for numeric kernels (default: all cores).
    #[arg(long, global = true, env = "TEXTAL_THREADS")]
    threads: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run one strategy for one seed.
    Run {
        #[arg(long)]
        config: PathBuf,
        /// Defaults to the first configured seed.
        #[arg(long)]
        seed: Option<u64>,
        /// Defaults to the first configured strategy.
        #[arg(long)]
        strategy: Option<Strategy>,
        #[arg(long, env = "TEXTAL_OUT_DIR")]
        out: Option<PathBuf>,
    },
    /// Run every configured strategy for every configured seed.
    Suite {
        #[arg(long)]
        config: PathBuf,
        #[arg(long, env = "TEXTAL_OUT_DIR")]
        out: Option<PathBuf>,
    },
    /// Rebuild the aggregate reports from existing record files.
    Report {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Parse and check a configuration without running anything.
    ValidateConfig {
        #[arg(long)]
        config: PathBuf,
    },
}

fn run_and_write(config: &ExperimentConfig) -> Result<()> {
    let data = harness::prepare_data(config)?;
    let report = harness::run_suite(config, &data)?;
    let files = harness::write_suite(&report, config, &config.output_dir)?;
    println!(
        "{}",
        serde_json::json!({
            "status": if report.failures.is_empty() { "ok" } else { "partial" },
            "runs": report.runs.len(),
            "failures": report.failures.len(),
            "output_dir": config.output_dir,
            "merged_records": files.merged_records,
        })
    );
    if report.runs.is_empty() {
        let first = &report.failures[0];
        return Err(Error::Config(format!(
            "all runs failed; first: {} seed {}: {}",
            first.strategy, first.seed, first.message
        )));
    }
    Ok(())
}

fn execute(cli: Cli) -> Result<()> {
    if let Some(n) = cli.threads {
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| Error::Config(format!("thread pool: {e}")))?;
    }
    match cli.command {
        Command::Run { config, seed, strategy, out } => {
            let mut cfg = ExperimentConfig::load(&config)?;
            cfg.seeds = vec![seed.unwrap_or(cfg.seeds[0])];
            cfg.strategies = vec![strategy.unwrap_or(cfg.strategies[0])];
            if let Some(out) = out {
                cfg.output_dir = out;
            }
            cfg.validate()?;
            run_and_write(&cfg)
        }
        Command::Suite { config, out } => {
            let mut cfg = ExperimentConfig::load(&config)?;
            if let Some(out) = out {
                cfg.output_dir = out;
            }
            run_and_write(&cfg)
        }
        Command::Report { input, out } => {
            let records = harness::read_records_dir(&input)?;
            let config = std::fs::read_to_string(input.join("config.json"))
                .ok()
                .and_then(|text| serde_json::from_str::<ExperimentConfig>(&text).ok());
            let files = harness::emit_reports(&records, &[], config.as_ref(), &out)?;
            println!(
                "{}",
                serde_json::json!({"status": "ok", "records": records.len(), "manifest": files.manifest})
            );
            Ok(())
        }
        Command::ValidateConfig { config } => {
            let cfg = ExperimentConfig::load(&config)?;
            let data = harness::prepare_data(&cfg)?;
            println!(
                "{}",
                serde_json::json!({
                    "status": "ok",
                    "config_hash": cfg.hash(),
                    "train_instances": data.train.len(),
                    "validation_instances": data.validation.len(),
                    "classes": data.train.class_names(),
                    "feature_dim": data.train_features.dim(),
                })
            );
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) if !e.use_stderr() => {
            print!("{e}");
            return ExitCode::SUCCESS;
        }
        Err(e) => {
            let message = e.to_string();
            eprintln!("{}", serde_json::json!({"error": {"kind": "usage", "message": message.trim()}}));
            return ExitCode::from(2);
        }
    };
    match execute(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("{}", serde_json::json!({"error": {"kind": e.kind(), "message": e.to_string()}}));
            ExitCode::FAILURE
        }
    }
}
