use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;
use mi_sco_core::parallel::Execution;
use mi_sco_lab::config::{ConfigError, ExperimentConfig};
use mi_sco_lab::experiments::Experiment;
use mi_sco_lab::{run_to_dir, HarnessError};

/// Run one experiment of the mutual-information lower-bound laboratory.
///
/// Set MI_SCO_THREADS to cap the number of worker threads; 1 runs sequentially.
#[derive(Debug, Parser)]
#[command(name = "mi-sco-lab", version)]
struct Cli {
    /// verify-lemmas, fingerprint, xu-check, tradeoff, net-erm, cmi or theorem1
    experiment: String,
    /// TOML experiment config
    #[arg(long)]
    config: PathBuf,
    /// Override the master seed in the config
    #[arg(long)]
    seed: Option<u64>,
    /// Output directory (default: the config's output_dir, else out/<experiment>)
    #[arg(long)]
    out: Option<PathBuf>,
    /// Exit with status 2 if any bound report fails
    #[arg(long)]
    verify: bool,
}

fn execution() -> Result<Execution, String> {
    let Ok(raw) = std::env::var("MI_SCO_THREADS") else {
        return Ok(Execution::Parallel);
    };
    let n: usize = raw.trim().parse().map_err(|_| format!("MI_SCO_THREADS must be a positive integer, got `{raw}`"))?;
    match n {
        0 => Err("MI_SCO_THREADS must be at least 1".into()),
        1 => Ok(Execution::Sequential),
        _ => {
            #[cfg(feature = "parallel")]
            rayon::ThreadPoolBuilder::new().num_threads(n).build_global().map_err(|e| e.to_string())?;
            Ok(Execution::Parallel)
        }
    }
}

fn run(cli: Cli) -> Result<bool, HarnessError> {
    let experiment: Experiment = cli.experiment.parse()?;
    let bytes = std::fs::read(&cli.config).map_err(|source| ConfigError::Read { path: cli.config.clone(), source })?;
    let text = String::from_utf8(bytes.clone()).map_err(|e| ConfigError::Schema(format!("config is not UTF-8: {e}")))?;
    let mut cfg = ExperimentConfig::from_toml(&text)?;
    if let Some(seed) = cli.seed {
        cfg.seed = seed;
    }
    let exec = execution().map_err(ConfigError::Range)?;
    let out_dir = cli
        .out
        .or_else(|| cfg.output_dir.clone())
        .unwrap_or_else(|| PathBuf::from("out").join(experiment.name()));
    let outcome = run_to_dir(experiment, &cfg, &bytes, exec, &out_dir)?;

    let reports = &outcome.output.reports;
    let failures = outcome.output.failures();
    println!(
        "{experiment}: {} reports, {} failed, {:.3}s, wrote {}",
        reports.len(),
        failures.len(),
        outcome.manifest.wall_clock_seconds,
        outcome.manifest_path.display()
    );
    for r in &failures {
        println!("  FAIL {}: lhs {} rhs {} slack {} {}", r.name, r.lhs, r.rhs, r.slack, r.notes.join("; "));
    }
    Ok(!cli.verify || outcome.all_hold())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(1) } else { ExitCode::SUCCESS };
        }
    };
    match run(cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(2),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
    }
}
