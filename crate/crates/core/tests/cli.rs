use std::path::PathBuf;
use std::process::{Command, Output};

use deltaflow::runner::{parse_config, run, RunConfig, Status};

fn deltaflow(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_deltaflow")).args(args).output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn scratch(name: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("deltaflow-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    dir.join(name)
}

#[test]
fn selftest_passes() {
    let out = scratch("selftest.json");
    let o = deltaflow(&["selftest", "--p", "5,7", "--samples", "5", "--out", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    let report: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&out).unwrap()).unwrap();
    assert_eq!(report["summary"]["fail"], 0);
    assert!(report["summary"]["pass"].as_u64().unwrap() >= 13);
    assert!(report["rng"].as_str().unwrap().starts_with("ChaCha8"));
}

#[test]
fn perturbed_flow_fails_with_witnesses() {
    let o = deltaflow(&["euler", "verify", "--p", "5", "--perturb"]);
    assert_eq!(o.status.code(), Some(1));
    let text = stdout(&o);
    assert!(text.contains("FAIL") && text.contains("witness"), "{text}");
}

#[test]
fn usage_and_config_errors_exit_2() {
    assert_eq!(deltaflow(&["hasse", "--p", "4"]).status.code(), Some(2));
    assert_eq!(deltaflow(&["frobnicate"]).status.code(), Some(2));
    assert_eq!(deltaflow(&["lax", "verify", "--checks", "nonsense"]).status.code(), Some(2));
    let cfg = scratch("bad.cfg");
    std::fs::write(&cfg, "colour = blue\n").unwrap();
    assert_eq!(deltaflow(&["run", "--config", cfg.to_str().unwrap()]).status.code(), Some(2));
}

#[test]
fn empty_selection_is_a_pass() {
    let o = deltaflow(&["selftest", "--checks", "none"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("0 checks"));
}

#[test]
fn config_file_and_flag_override() {
    let cfg = scratch("run.cfg");
    std::fs::write(
        &cfg,
        "# arithmetic Euler at p = 7\n[euler]\np = 7\na = 1,2,4\nc = sample:3\nchecks = euler.build, hasse\nprec = 3\n",
    )
    .unwrap();
    let out = scratch("run.json");
    let o = deltaflow(&["run", "--config", cfg.to_str().unwrap(), "--prec", "4", "--out", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    let report: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&out).unwrap()).unwrap();
    assert_eq!(report["config"]["prec"], 4);
    let ids: Vec<&str> = report["checks"].as_array().unwrap().iter().map(|c| c["id"].as_str().unwrap()).collect();
    assert_eq!(ids, ["euler.build", "hasse"]);
}

#[test]
fn jet_prolong_prints_relations() {
    let o = deltaflow(&["jet", "prolong", "--poly", "x^2", "--p", "3"]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    assert!(text.contains("2*x^3*x'") || text.contains("2x^3x'"), "{text}");
    let o = deltaflow(&["jet", "prolong", "--poly", "x^3", "--order", "2", "--flavor", "classical"]);
    assert!(stdout(&o).contains("x''"));
}

#[test]
fn reports_are_reproducible() {
    let mut cfg = RunConfig::default();
    cfg.set("p", "5,7").unwrap();
    cfg.set("checks", "padic,ap,lax,euler.verify").unwrap();
    cfg.set("samples", "4").unwrap();
    cfg.set("seed", "17").unwrap();
    let cfg = cfg.normalize().unwrap();
    let a = run(&cfg).unwrap();
    let b = run(&cfg).unwrap();
    assert_eq!(a.without_timings(), b.without_timings());
    assert!(a.checks.iter().all(|c| c.status == Status::Pass));
    assert_eq!(a.exit_code(), 0);
}

#[test]
fn config_parsing() {
    let cfg = parse_config("p = 13, 5, 5\n[lax]\nchecks = lax\n").unwrap();
    assert_eq!(cfg.primes, vec![5, 13]);
    assert_eq!(cfg.checks, vec!["lax.star", "lax.starstar", "lax.spectrum"]);
    assert!(parse_config("p = 5\nprec = x\n").is_err());
    // arithmetic Euler checks need three digits
    assert!(parse_config("checks = euler\nprec = 2\n").is_err());
}
