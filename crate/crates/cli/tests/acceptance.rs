//! Acceptance suite: one pass/fail line per criterion, nonzero exit on any failure.
//!
//! Run with `cargo test -p mi-sco-lab --test acceptance`.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::{Duration, Instant};

use mi_sco_core::bounds::{mean_learner_risk_check, BoundReport};
use mi_sco_core::parallel::{Execution, MonteCarlo};
use mi_sco_lab::config::ExperimentConfig;
use mi_sco_lab::experiments::Experiment;
use mi_sco_lab::output::ExperimentOutput;
use mi_sco_lab::{run_to_dir, suites};

type Outcome = Result<Vec<BoundReport>, String>;

fn configs_dir() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../configs")
}

fn load(e: Experiment) -> Result<(ExperimentConfig, Vec<u8>), String> {
    let path = configs_dir().join(format!("{}.toml", e.name()));
    let bytes = std::fs::read(&path).map_err(|err| format!("{}: {err}", path.display()))?;
    let cfg = ExperimentConfig::from_toml(std::str::from_utf8(&bytes).map_err(|err| err.to_string())?)
        .map_err(|err| err.to_string())?;
    Ok((cfg, bytes))
}

fn experiment(e: Experiment) -> Outcome {
    let (cfg, _) = load(e)?;
    cfg.validate().map_err(|err| err.to_string())?;
    let out: ExperimentOutput = e.run(&cfg, Execution::Parallel).map_err(|err| err.to_string())?;
    Ok(out.reports)
}

fn require_names(reports: Vec<BoundReport>, names: &[&str]) -> Outcome {
    for n in names {
        if !reports.iter().any(|r| r.name == *n) {
            return Err(format!("report {n} missing"));
        }
    }
    Ok(reports)
}

fn pinsker() -> Outcome {
    Ok(vec![suites::pinsker_suite(1000, 1, Execution::Parallel).map_err(|e| e.to_string())?])
}

fn coupling() -> Outcome {
    suites::coupling_suite(1000, 2, Execution::Parallel).map_err(|e| e.to_string())
}

fn bounded_lemma() -> Outcome {
    Ok(vec![suites::bounded_lemma_suite(1000, 3, Execution::Parallel)])
}

fn subgaussian_lemma() -> Outcome {
    Ok(vec![suites::subgaussian_lemma_suite(200, 4, Execution::Parallel)])
}

fn fingerprint() -> Outcome {
    let reports = experiment(Experiment::Fingerprint)?;
    let mc = reports.iter().filter(|r| r.trials >= 1_000_000 && matches!(r.m, Some(25) | Some(100))).count();
    if mc != 10 {
        return Err(format!("expected 10 Monte Carlo reports at 10^6 trials, found {mc}"));
    }
    Ok(reports)
}

fn xu() -> Outcome {
    require_names(experiment(Experiment::XuCheck)?, &["xu_reference_mi", "xu_reference_gap", "xu_reference_bound"])
}

fn net_erm() -> Outcome {
    require_names(
        experiment(Experiment::NetErm)?,
        &["net_erm_entropy_cap", "net_erm_slack_nonnegative", "net_erm_slack_cap"],
    )
}

fn theorem1() -> Outcome {
    require_names(experiment(Experiment::Theorem1)?, &["theorem1_exact_mi_vs_pipeline", "mi_dimension_slope"])
}

fn cmi() -> Outcome {
    require_names(experiment(Experiment::Cmi)?, &["cmi_bound_covers_gap", "cmi_bound_rate_slope"])
}

fn mean_learner() -> Outcome {
    let (cfg, _) = load(Experiment::VerifyLemmas)?;
    let inst = cfg.instance().map_err(|e| e.to_string())?;
    let mc = MonteCarlo::new(100_000, cfg.seed).with_stream(12);
    mean_learner_risk_check(&inst, cfg.run.m, &mc).map_err(|e| e.to_string())
}

/// Data-file checksums of every shipped config at one worker count.
fn checksums(exec: Execution, threads: usize, root: &Path) -> Result<BTreeMap<String, String>, String> {
    let pool = rayon::ThreadPoolBuilder::new().num_threads(threads).build().map_err(|e| e.to_string())?;
    let mut all = BTreeMap::new();
    for e in Experiment::ALL {
        let (cfg, bytes) = load(e)?;
        let dir = root.join(format!("{}-{threads}", e.name()));
        let run = pool.install(|| run_to_dir(e, &cfg, &bytes, exec, &dir)).map_err(|err| err.to_string())?;
        for f in run.manifest.files {
            all.insert(format!("{}/{}", e.name(), f.path), f.sha256);
        }
    }
    Ok(all)
}

fn determinism() -> Outcome {
    let tmp = tempfile::tempdir().map_err(|e| e.to_string())?;
    let reference = checksums(Execution::Sequential, 1, tmp.path())?;
    let mut mismatched = Vec::new();
    for threads in [2, 5] {
        let other = checksums(Execution::Parallel, threads, tmp.path())?;
        if other.len() != reference.len() {
            mismatched.push(format!("{threads} threads wrote {} files, sequential {}", other.len(), reference.len()));
        }
        for (name, sum) in &reference {
            if other.get(name) != Some(sum) {
                mismatched.push(format!("{name} differs at {threads} threads"));
            }
        }
    }
    let note = format!("{} files compared", reference.len());
    let ok = mismatched.is_empty();
    Ok(vec![BoundReport::flag("byte_identical_outputs", ok).with_note(if ok { note } else { mismatched.join("; ") })])
}

struct Criterion {
    id: usize,
    desc: &'static str,
    limit: Duration,
    run: fn() -> Outcome,
}

const fn secs(s: u64) -> Duration {
    Duration::from_secs(s)
}

fn main() -> ExitCode {
    let criteria = [
        Criterion { id: 1, desc: "Pinsker inequality on 1000 random pairs", limit: secs(5), run: pinsker },
        Criterion { id: 2, desc: "optimal coupling attains TV on 1000 random pairs", limit: secs(10), run: coupling },
        Criterion { id: 3, desc: "bounded-correlation MI lemma on 1000 joints", limit: secs(10), run: bounded_lemma },
        Criterion { id: 4, desc: "sub-Gaussian MI lemma on 200 joints", limit: secs(30), run: subgaussian_lemma },
        Criterion { id: 5, desc: "fingerprinting lemma by quadrature and Monte Carlo", limit: secs(120), run: fingerprint },
        Criterion { id: 6, desc: "MI generalization bound on every enumerable configuration", limit: secs(60), run: xu },
        Criterion { id: 7, desc: "epsilon-net ERM slack and entropy cap", limit: secs(60), run: net_erm },
        Criterion { id: 8, desc: "information lower-bound pipeline and d-scaling", limit: secs(300), run: theorem1 },
        Criterion { id: 9, desc: "CMI cap and subsampling rate", limit: secs(180), run: cmi },
        Criterion { id: 10, desc: "mean learner excess risk (1 - |p|^2/d)/m", limit: secs(60), run: mean_learner },
        Criterion { id: 11, desc: "byte-identical outputs at any worker count", limit: secs(600), run: determinism },
    ];
    let mut failed = 0;
    for c in &criteria {
        let start = Instant::now();
        let outcome = (c.run)();
        let elapsed = start.elapsed();
        let (ok, detail) = match outcome {
            Ok(reports) if reports.is_empty() => (false, "no reports".to_string()),
            Ok(reports) => {
                let bad: Vec<String> = reports
                    .iter()
                    .filter(|r| !r.holds)
                    .map(|r| format!("{} (lhs {:e}, rhs {:e}) {}", r.name, r.lhs, r.rhs, r.notes.join("; ")))
                    .collect();
                let timely = elapsed <= c.limit;
                let mut detail = format!("{} reports", reports.len());
                if !bad.is_empty() {
                    detail = format!("{detail}, failing: {}", bad.join(" | "));
                }
                if !timely {
                    detail = format!("{detail}, over time limit");
                }
                (bad.is_empty() && timely, detail)
            }
            Err(e) => (false, format!("error: {e}")),
        };
        if !ok {
            failed += 1;
        }
        println!(
            "[{}] {:>2} {} ({:.2}s of {}s; {detail})",
            if ok { "PASS" } else { "FAIL" },
            c.id,
            c.desc,
            elapsed.as_secs_f64(),
            c.limit.as_secs()
        );
    }
    println!("{} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed == 0 { ExitCode::SUCCESS } else { ExitCode::FAILURE }
}
