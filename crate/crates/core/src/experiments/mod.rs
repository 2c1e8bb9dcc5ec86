//! Configuration-driven experiment runs with CSV and manifest output.

pub mod config;
pub mod record;
pub mod runners;

pub use config::{Experiment, ExperimentConfig, HomogeneousPart, Thresholds};
pub use record::{write_csv, Manifest, ResultRecord, CSV_COLUMNS};

use crate::error::{Error, Result};
use std::path::{Path, PathBuf};

/// Exit status of a run: all contracts passed.
pub const EXIT_PASS: i32 = 0;
/// At least one record failed its contract.
pub const EXIT_CONTRACT_FAILURE: i32 = 1;
/// The configuration was rejected before or during the run.
pub const EXIT_CONFIG_ERROR: i32 = 2;

/// Errors that point at the configuration rather than the numerics.
pub fn is_config_error(e: &Error) -> bool {
    matches!(e, Error::InvalidParameter(_) | Error::Inadmissible(_) | Error::Format(_) | Error::Io(_) | Error::InvalidGrid(_))
}

pub fn exit_code(result: &Result<RunOutcome>) -> i32 {
    match result {
        Ok(o) if o.passed => EXIT_PASS,
        Ok(_) => EXIT_CONTRACT_FAILURE,
        Err(e) if is_config_error(e) => EXIT_CONFIG_ERROR,
        Err(_) => EXIT_CONTRACT_FAILURE,
    }
}

/// Runs the configured experiment; records come back in sorted parameter
/// order (stable within one parameter tuple).
pub fn run(config: &ExperimentConfig) -> Result<Vec<ResultRecord>> {
    config.validate()?;
    let mut records = match config.experiment {
        Experiment::Strichartz => runners::run_strichartz(config),
        Experiment::Wellposed => runners::run_wellposed(config),
        Experiment::IllposedChirp => runners::run_illposed_chirp(config),
        Experiment::Homogeneous => runners::run_homogeneous(config),
        Experiment::StrichartzReg => runners::run_strichartz_regularity(config),
        Experiment::TmaxScan => runners::run_tmax_scan(config),
    }?;
    records.sort_by_cached_key(|r| r.param_json());
    Ok(records)
}

#[derive(Debug, Clone)]
pub struct RunOutcome {
    pub records: Vec<ResultRecord>,
    pub passed: bool,
    pub csv_path: PathBuf,
    pub manifest_path: PathBuf,
}

/// Runs on a pool of `threads` workers (rayon's default when `None`) and
/// writes `<experiment>.csv` and `<experiment>.manifest.json` into `out_dir`.
pub fn run_to_dir(config: &ExperimentConfig, out_dir: &Path, threads: Option<usize>) -> Result<RunOutcome> {
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(n) = threads {
        if n == 0 {
            return Err(Error::InvalidParameter("thread count must be positive".into()));
        }
        builder = builder.num_threads(n);
    }
    let pool = builder.build().map_err(|e| Error::InvalidParameter(e.to_string()))?;
    let records = pool.install(|| run(config))?;
    std::fs::create_dir_all(out_dir)?;
    let name = config.experiment.name();
    let csv_path = out_dir.join(format!("{name}.csv"));
    write_csv(&records, std::io::BufWriter::new(std::fs::File::create(&csv_path)?))?;
    let failed = records.iter().filter(|r| !r.pass).count();
    let manifest_path = out_dir.join(format!("{name}.manifest.json"));
    Manifest {
        software: env!("CARGO_PKG_NAME"),
        version: env!("CARGO_PKG_VERSION"),
        experiment: name.to_string(),
        seed: config.seed,
        threads,
        config: config.clone(),
        outputs: vec![format!("{name}.csv")],
        records: records.len(),
        failed_records: failed,
        passed: failed == 0,
    }
    .write(&manifest_path)?;
    Ok(RunOutcome { passed: failed == 0, records, csv_path, manifest_path })
}
