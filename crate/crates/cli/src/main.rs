//! `nlslab <experiment> --config <path> [--out <dir>] [--seed <int>] [--threads <int>]`
//!
//! Exit status: 0 when every record passes its contract, 1 on a contract
//! failure, 2 on a configuration error.

use clap::Parser;
use nlslab::experiments::{exit_code, run_to_dir, Experiment, ExperimentConfig, EXIT_CONFIG_ERROR};
use std::path::PathBuf;
use std::process::ExitCode;

#[derive(Debug, Parser)]
#[command(name = "nlslab", version, about = "Numerical experiments for the cubic NLS with L^p data")]
struct Args {
    /// strichartz | wellposed | illposed-chirp | homogeneous | strichartz-reg | tmax-scan
    experiment: String,
    #[arg(long)]
    config: PathBuf,
    /// Output directory; overrides the config's `output`.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Overrides the config's `seed`.
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    threads: Option<usize>,
}

fn load(args: &Args) -> Result<ExperimentConfig, String> {
    let experiment = Experiment::from_name(&args.experiment).ok_or_else(|| {
        let names: Vec<&str> = Experiment::ALL.iter().map(|e| e.name()).collect();
        format!("unknown experiment `{}`; expected one of {}", args.experiment, names.join(", "))
    })?;
    let mut config = ExperimentConfig::load(&args.config).map_err(|e| format!("{}: {e}", args.config.display()))?;
    if config.experiment != experiment {
        return Err(format!("config describes `{}`, not `{}`", config.experiment.name(), experiment.name()));
    }
    if let Some(seed) = args.seed {
        config.seed = seed;
    }
    Ok(config)
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let args = Args::parse();
    let config = match load(&args) {
        Ok(c) => c,
        Err(msg) => {
            eprintln!("error: {msg}");
            return ExitCode::from(EXIT_CONFIG_ERROR as u8);
        }
    };
    let out = args.out.clone().or_else(|| config.output.clone()).unwrap_or_else(|| PathBuf::from("results"));
    let result = run_to_dir(&config, &out, args.threads);
    match &result {
        Ok(outcome) => {
            for r in outcome.records.iter().filter(|r| !r.pass) {
                log::warn!("contract failed: {} {} = {} ({})", r.experiment, r.value_name, r.value, r.param_json());
            }
            let failed = outcome.records.iter().filter(|r| !r.pass).count();
            println!(
                "{}: {} records, {} failed -> {}",
                config.experiment.name(),
                outcome.records.len(),
                failed,
                outcome.csv_path.display()
            );
        }
        Err(e) => eprintln!("error: {e}"),
    }
    ExitCode::from(exit_code(&result) as u8)
}
