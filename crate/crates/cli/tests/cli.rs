use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use mi_sco_core::bounds::BoundReport;
use mi_sco_lab::output::{MANIFEST_FILE, NOTES_FILE, RESULTS_FILE};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_mi-sco-lab"))
}

fn write_config(dir: &Path, name: &str, text: &str) -> PathBuf {
    let path = dir.join(name);
    std::fs::write(&path, text).unwrap();
    path
}

fn run(args: &[&str], threads: Option<&str>) -> Output {
    let mut cmd = bin();
    cmd.args(args);
    match threads {
        Some(t) => cmd.env("MI_SCO_THREADS", t),
        None => cmd.env_remove("MI_SCO_THREADS"),
    };
    cmd.output().unwrap()
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exited normally")
}

const SMALL_XU: &str = "seed = 5\n[sweep]\nd = [1, 2]\nm = [1, 2]\np = [0.0, 0.25]\n";

const SMALL_TRADEOFF: &str = "experiment = \"tradeoff\"\nseed = 3\n[instance]\nd = 1\np_mode = \"fixed\"\np = [0.2]\n\
[run]\nm = 2\n[sweep]\ndelta = [0.5, 0.25]\nrho = [0.0, 0.5]\n";

const LEMMAS: &str = "[run]\nm = 2\ntrials = 2000\ncases = 100\nsubgaussian_cases = 20\n";

#[test]
fn verify_lemmas_passes_in_verify_mode() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write_config(tmp.path(), "l.toml", LEMMAS);
    let out = tmp.path().join("out");
    let o = run(&["verify-lemmas", "--config", cfg.to_str().unwrap(), "--out", out.to_str().unwrap(), "--verify"], None);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    for f in [RESULTS_FILE, NOTES_FILE, MANIFEST_FILE] {
        assert!(out.join(f).exists(), "{f} missing");
    }
}

#[test]
fn golden_headers() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write_config(tmp.path(), "t.toml", SMALL_TRADEOFF);
    let out = tmp.path().join("out");
    let o = run(&["tradeoff", "--config", cfg.to_str().unwrap(), "--out", out.to_str().unwrap()], None);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let results = std::fs::read_to_string(out.join(RESULTS_FILE)).unwrap();
    assert_eq!(results.lines().next().unwrap(), "name,d,m,epsilon,lhs,rhs,holds,slack,trials,ci_halfwidth,seed");
    assert_eq!(BoundReport::CSV_HEADER, results.lines().next().unwrap());
    let table = std::fs::read_to_string(out.join("tradeoff.csv")).unwrap();
    assert_eq!(table.lines().next().unwrap(), "d,m,delta,rho,mi_nats,excess_risk,xu_bound,pipeline_lb");
    assert_eq!(table.lines().count(), 1 + 2 * 2);
    // 17 significant digits
    let row: Vec<&str> = table.lines().nth(1).unwrap().split(',').collect();
    assert_eq!(row[2], "5.0000000000000000e-1");
    let mantissa = row[4].split('e').next().unwrap();
    assert_eq!(mantissa.chars().filter(char::is_ascii_digit).count(), 17);
}

#[test]
fn manifest_lists_every_data_file() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write_config(tmp.path(), "x.toml", SMALL_XU);
    let out = tmp.path().join("out");
    let o = run(&["xu-check", "--config", cfg.to_str().unwrap(), "--out", out.to_str().unwrap(), "--seed", "99"], None);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let m: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(out.join(MANIFEST_FILE)).unwrap()).unwrap();
    assert_eq!(m["experiment"], "xu-check");
    assert_eq!(m["seed"], 99);
    assert_eq!(m["all_hold"], true);
    assert_eq!(m["config_sha256"], mi_sco_lab::output::sha256_hex(SMALL_XU.as_bytes()));
    let files = m["files"].as_array().unwrap();
    let mut on_disk: Vec<String> = std::fs::read_dir(&out)
        .unwrap()
        .map(|e| e.unwrap().file_name().into_string().unwrap())
        .filter(|n| n != MANIFEST_FILE)
        .collect();
    on_disk.sort();
    let mut listed: Vec<String> = files.iter().map(|f| f["path"].as_str().unwrap().to_string()).collect();
    listed.sort();
    assert_eq!(listed, on_disk);
    for f in files {
        let bytes = std::fs::read(out.join(f["path"].as_str().unwrap())).unwrap();
        assert_eq!(f["sha256"], mi_sco_lab::output::sha256_hex(&bytes));
    }
}

fn data_files(dir: &Path) -> Vec<(String, Vec<u8>)> {
    let mut v: Vec<(String, Vec<u8>)> = std::fs::read_dir(dir)
        .unwrap()
        .map(|e| e.unwrap())
        .filter(|e| e.file_name() != MANIFEST_FILE)
        .map(|e| (e.file_name().into_string().unwrap(), std::fs::read(e.path()).unwrap()))
        .collect();
    v.sort();
    v
}

#[test]
fn outputs_are_identical_across_worker_counts() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write_config(tmp.path(), "l.toml", LEMMAS);
    let mut runs = Vec::new();
    for threads in ["1", "3", "1"] {
        let out = tmp.path().join(format!("out{}", runs.len()));
        let o = run(&["verify-lemmas", "--config", cfg.to_str().unwrap(), "--out", out.to_str().unwrap()], Some(threads));
        assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
        runs.push(data_files(&out));
    }
    assert!(!runs[0].is_empty());
    assert_eq!(runs[0], runs[1]);
    assert_eq!(runs[0], runs[2]);
}

#[test]
fn epsilon_outside_hypothesis_is_a_config_error() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write_config(tmp.path(), "e.toml", "[run]\nepsilon = 0.1\n");
    let o = run(&["theorem1", "--config", cfg.to_str().unwrap(), "--out", tmp.path().join("o").to_str().unwrap()], None);
    assert_eq!(code(&o), 1);
    assert!(String::from_utf8_lossy(&o.stderr).contains("epsilon"));
}

#[test]
fn config_errors_exit_one() {
    let tmp = tempfile::tempdir().unwrap();
    let out = tmp.path().join("o");
    let out = out.to_str().unwrap();
    let unknown_key = write_config(tmp.path(), "u.toml", "seed = 1\ncolour = 3\n");
    let mismatch = write_config(tmp.path(), "m.toml", "experiment = \"cmi\"\n");
    let bad_d = write_config(tmp.path(), "d.toml", "[instance]\nd = 0\n");
    let missing = tmp.path().join("nope.toml");
    let cases: Vec<Vec<&str>> = vec![
        vec!["xu-check", "--config", unknown_key.to_str().unwrap(), "--out", out],
        vec!["xu-check", "--config", mismatch.to_str().unwrap(), "--out", out],
        vec!["xu-check", "--config", bad_d.to_str().unwrap(), "--out", out],
        vec!["xu-check", "--config", missing.to_str().unwrap(), "--out", out],
        vec!["no-such-experiment", "--config", unknown_key.to_str().unwrap(), "--out", out],
        vec!["xu-check"],
        vec!["xu-check", "--config", unknown_key.to_str().unwrap(), "--bogus"],
    ];
    let mut messages = Vec::new();
    for args in cases {
        let o = run(&args, None);
        assert_eq!(code(&o), 1, "{args:?}");
        let msg = String::from_utf8_lossy(&o.stderr).to_string();
        assert!(!msg.is_empty());
        messages.push(msg);
    }
    messages.sort();
    messages.dedup();
    assert_eq!(messages.len(), 7);
    let o = run(&["xu-check", "--config", unknown_key.to_str().unwrap()], Some("zero"));
    assert_eq!(code(&o), 1);
}

#[test]
fn failing_report_exits_two_only_in_verify_mode() {
    let tmp = tempfile::tempdir().unwrap();
    // the mean learner at m = 2 has excess risk near 1/2, far above ε
    let cfg = write_config(
        tmp.path(),
        "t.toml",
        "[instance]\nd = 1\n[learner]\nkind = \"mean\"\n[run]\nm = 2\nepsilon = 0.01\np_draws = 1\n\
         pilot_trials = 100\ntrials = 1000\n[sweep]\nd = [1, 2]\n",
    );
    let out = tmp.path().join("o");
    let args = ["theorem1", "--config", cfg.to_str().unwrap(), "--out", out.to_str().unwrap()];
    let o = run(&args, None);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let mut verify = args.to_vec();
    verify.push("--verify");
    let o = run(&verify, None);
    assert_eq!(code(&o), 2);
    let stdout = String::from_utf8_lossy(&o.stdout);
    assert!(stdout.contains("FAIL theorem1_hypothesis"), "{stdout}");
    let results = std::fs::read_to_string(out.join(RESULTS_FILE)).unwrap();
    assert!(results.lines().any(|l| l.starts_with("theorem1_hypothesis,") && l.contains(",false,")));
}

#[test]
fn help_exits_zero() {
    let o = run(&["--help"], None);
    assert_eq!(code(&o), 0);
    assert!(String::from_utf8_lossy(&o.stdout).contains("--verify"));
}
