//! Experiment harness for the mutual-information lower-bound laboratory.
//!
//! Each experiment reads a TOML config, runs against `mi-sco-core`, and writes
//! `results.csv` (one row per bound report), per-experiment tables, plot data,
//! `notes.txt` and a `manifest.json` with SHA-256 checksums of every file.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod config;
pub mod experiments;
pub mod output;
pub mod suites;

use std::path::{Path, PathBuf};
use std::time::Instant;

use mi_sco_core::parallel::Execution;

use config::{ConfigError, ExperimentConfig};
use experiments::Experiment;
use output::{sha256_hex, write_run, ExperimentOutput, RunManifest};

#[derive(Debug, thiserror::Error)]
pub enum HarnessError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error(transparent)]
    Core(#[from] mi_sco_core::Error),
    #[error("unknown experiment `{0}`")]
    UnknownExperiment(String),
    #[error("config names experiment `{config}` but `{requested}` was requested")]
    ExperimentMismatch { config: String, requested: String },
    #[error("cannot write outputs to {path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
}

#[derive(Debug, Clone)]
pub struct RunOutcome {
    pub output: ExperimentOutput,
    pub manifest: RunManifest,
    pub manifest_path: PathBuf,
}

impl RunOutcome {
    pub fn all_hold(&self) -> bool {
        self.output.all_hold()
    }
}

/// Worker count implied by `exec`.
pub fn thread_count(exec: Execution) -> usize {
    if !exec.is_parallel() {
        return 1;
    }
    #[cfg(feature = "parallel")]
    return rayon::current_num_threads();
    #[cfg(not(feature = "parallel"))]
    1
}

/// Check the config against the requested experiment, run it, and write every
/// output into `out_dir`.
pub fn run_to_dir(
    experiment: Experiment,
    cfg: &ExperimentConfig,
    config_bytes: &[u8],
    exec: Execution,
    out_dir: &Path,
) -> Result<RunOutcome, HarnessError> {
    if let Some(name) = &cfg.experiment {
        if name != experiment.name() {
            return Err(HarnessError::ExperimentMismatch { config: name.clone(), requested: experiment.name().into() });
        }
    }
    cfg.validate()?;
    let start = Instant::now();
    let output = experiment.run(cfg, exec)?;
    let manifest = RunManifest {
        experiment: experiment.name().into(),
        artifact_version: env!("CARGO_PKG_VERSION").into(),
        config_sha256: sha256_hex(config_bytes),
        seed: cfg.seed,
        threads: thread_count(exec),
        wall_clock_seconds: start.elapsed().as_secs_f64(),
        all_hold: output.all_hold(),
        files: Vec::new(),
    };
    let (manifest_path, manifest) =
        write_run(out_dir, &output, manifest).map_err(|source| HarnessError::Io { path: out_dir.to_path_buf(), source })?;
    Ok(RunOutcome { output, manifest, manifest_path })
}
