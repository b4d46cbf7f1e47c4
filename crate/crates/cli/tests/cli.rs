use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use tempfile::TempDir;

/// The shipped configuration shrunk to 30 rounds, two budgets and two trials.
fn small_config() -> String {
    let path = Path::new(env!("CARGO_MANIFEST_DIR")).join("../../configs/default.toml");
    fs::read_to_string(path)
        .unwrap()
        .replace("rounds = 500", "rounds = 30")
        .replace("nu = [0.01, 0.02, 0.04, 0.08, 0.16]", "nu = [0.02, 0.08]")
        .replace("trials = 100", "trials = 2")
}

fn adascale(args: &[&str], dir: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_adascale"))
        .args(args)
        .current_dir(dir)
        .output()
        .expect("binary runs")
}

fn setup() -> TempDir {
    let dir = tempfile::tempdir().unwrap();
    fs::write(dir.path().join("small.toml"), small_config()).unwrap();
    dir
}

fn lines(path: &Path) -> Vec<String> {
    fs::read_to_string(path).unwrap().lines().map(String::from).collect()
}

#[test]
fn sweep_writes_reports_and_succeeds() {
    let dir = setup();
    let out = adascale(&["sweep", "--config", "small.toml", "--out", "res"], dir.path());
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let res = dir.path().join("res");
    let sweep = lines(&res.join("sweep.csv"));
    assert_eq!(
        sweep[0],
        "nu,method,trial,v,constraint_lhs,total_rdp,mean_rdp,mean_epsilon,best_mean_epsilon,tuning_converged"
    );
    assert_eq!(sweep.len(), 1 + 2 * 4 * 2);
    let certificates = lines(&res.join("certificates.csv"));
    assert_eq!(certificates.len(), 1 + 2 * 2);
    assert!(certificates[1..].iter().all(|l| l.ends_with(",true")));
    assert_eq!(lines(&res.join("offline.csv")).len(), 1 + 2 * 2);
    let summary: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(res.join("summary.json")).unwrap()).unwrap();
    assert_eq!(summary["certificates_passed"], 4);
}

#[test]
fn method_and_budget_flags_override_the_config() {
    let dir = setup();
    let out = adascale(
        &[
            "sweep",
            "--config",
            "small.toml",
            "--out",
            "res",
            "--methods",
            "equalalloc,optimal",
            "--nu",
            "0.05",
        ],
        dir.path(),
    );
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let sweep = lines(&dir.path().join("res/sweep.csv"));
    assert_eq!(sweep.len(), 1 + 2 * 2);
    assert!(sweep[1..]
        .iter()
        .all(|l| l.contains(",equalalloc,") || l.contains(",optimal,")));
    assert!(sweep[1..].iter().all(|l| l.starts_with("5.0000000000000003e-2,")));
}

#[test]
fn seed_flag_changes_the_traces() {
    let dir = setup();
    for (seed, sub) in [("1", "a"), ("1", "b"), ("2", "c")] {
        let out = adascale(
            &[
                "simulate-channels",
                "--config",
                "small.toml",
                "--out",
                sub,
                "--seed",
                seed,
            ],
            dir.path(),
        );
        assert!(out.status.success());
    }
    let read = |sub: &str| fs::read(dir.path().join(sub).join("trace_000.csv")).unwrap();
    assert_eq!(read("a"), read("b"));
    assert_ne!(read("a"), read("c"));
    assert!(dir.path().join("a/trace_001.csv").exists());
}

#[test]
fn run_oracle_account_and_certify() {
    let dir = setup();
    for cmd in ["run", "oracle", "account", "certify"] {
        let out = adascale(&[cmd, "--config", "small.toml", "--out", cmd], dir.path());
        assert!(out.status.success(), "{cmd}: {}", String::from_utf8_lossy(&out.stderr));
    }
    let run = lines(&dir.path().join("run/run_adascale_nu0.csv"));
    assert!(run[0].starts_with("t,Q,x,eta,h_min_sq,constraint_term,rho_dev_0"));
    assert_eq!(run.len(), 1 + 30);
    assert!(dir.path().join("run/run_optimal_nu1.csv").exists());
    assert!(dir.path().join("oracle/oracle.csv").exists());
    assert_eq!(lines(&dir.path().join("oracle/oracle_nu0.csv")).len(), 1 + 30);
    let account = lines(&dir.path().join("account/account.csv"));
    assert_eq!(account[0], "nu,method,device,rdp,epsilon,best_epsilon,best_order");
    assert_eq!(account.len(), 1 + 2 * 4 * 10);
    assert!(dir.path().join("certify/certificates.csv").exists());
    assert!(!dir.path().join("certify/sweep.csv").exists());
}

#[test]
fn train_reports_the_convergence_bound() {
    let dir = setup();
    let out = adascale(
        &["train", "--config", "small.toml", "--out", "train", "--trials", "3"],
        dir.path(),
    );
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    assert_eq!(lines(&dir.path().join("train/train.csv")).len(), 1 + 30);
    let bound = fs::read_to_string(dir.path().join("train/train_bound.txt")).unwrap();
    assert!(bound.contains("holds = true"), "{bound}");
}

#[test]
fn invalid_config_is_rejected_with_every_problem() {
    let dir = setup();
    let bad = small_config()
        .replace("devices = 10", "devices = 0")
        .replace("delta = 1e-5", "delta = 2.0")
        .replace("tau_rel = 1e-10", "tau_rel = -1.0");
    fs::write(dir.path().join("bad.toml"), bad).unwrap();
    let out = adascale(&["sweep", "--config", "bad.toml", "--out", "res"], dir.path());
    assert_eq!(out.status.code(), Some(2));
    let stderr = String::from_utf8_lossy(&out.stderr);
    for key in ["system.devices", "system.delta", "controller.tau_rel"] {
        assert!(stderr.contains(key), "{key} missing from: {stderr}");
    }
    assert!(!dir.path().join("res/sweep.csv").exists());
}

#[test]
fn bad_flags_fail() {
    let dir = setup();
    let out = adascale(&["sweep", "--config", "small.toml", "--nu", "0"], dir.path());
    assert_eq!(out.status.code(), Some(2));
    let out = adascale(&["sweep", "--methods", "nonsense"], dir.path());
    assert!(!out.status.success());
    let out = adascale(&["sweep", "--config", "missing.toml"], dir.path());
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn replayed_trace_matches_the_generated_one() {
    let dir = setup();
    for args in [
        &["simulate-channels", "--config", "small.toml", "--out", "traces"][..],
        &["run", "--config", "small.toml", "--out", "direct"],
        &[
            "run",
            "--config",
            "small.toml",
            "--out",
            "replay",
            "--trace",
            "traces/trace_000.csv",
        ],
    ] {
        let out = adascale(args, dir.path());
        assert!(
            out.status.success(),
            "{args:?}: {}",
            String::from_utf8_lossy(&out.stderr)
        );
    }
    for method in ["adascale", "equalalloc", "estimfuture", "optimal"] {
        let name = format!("run_{method}_nu1.csv");
        assert_eq!(
            fs::read(dir.path().join("direct").join(&name)).unwrap(),
            fs::read(dir.path().join("replay").join(&name)).unwrap(),
            "{method}"
        );
    }
    let out = adascale(
        &[
            "certify",
            "--config",
            "small.toml",
            "--out",
            "cert",
            "--trace",
            "traces/trace_001.csv",
        ],
        dir.path(),
    );
    assert!(out.status.success());
    assert_eq!(lines(&dir.path().join("cert/certificates.csv")).len(), 1 + 2);
}
