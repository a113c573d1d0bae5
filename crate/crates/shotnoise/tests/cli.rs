use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use shotnoise::Experiment;

fn shotnoise(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_shotnoise"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn report(dir: &Path) -> serde_json::Value {
    let text = fs::read_to_string(dir.join("report.json")).expect("report.json written");
    serde_json::from_str(&text).expect("valid json")
}

#[test]
fn list_prints_every_experiment() {
    let out = shotnoise(&["list"]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    assert_eq!(text.lines().count(), Experiment::ALL.len());
    for e in Experiment::ALL {
        assert!(text.lines().any(|l| l.starts_with(e.name())), "{e} missing");
    }
}

#[test]
fn describe_shows_defaults() {
    let out = shotnoise(&["describe", "fdd-inverse"]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("u = 0.5,1,2"));
    assert_eq!(shotnoise(&["describe", "nope"]).status.code(), Some(2));
}

#[test]
fn unknown_experiment_exits_2() {
    let out = shotnoise(&["run", "--experiment", "bogus"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("bogus"));
}

#[test]
fn usage_errors_exit_2() {
    assert_eq!(shotnoise(&[]).status.code(), Some(2));
    assert_eq!(shotnoise(&["run", "--no-such-flag"]).status.code(), Some(2));
    assert_eq!(shotnoise(&["--help"]).status.code(), Some(0));
}

#[test]
fn invalid_configurations_exit_2() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().to_str().unwrap();
    let cases: [&[&str]; 6] = [
        &["--u", "2,1"],
        &["--u", "1,x"],
        &["--replicas", "50"],
        &["--tau", "-1"],
        &["--L", "logpow:0"],
        &["--tol", "d_renewal=-1"],
    ];
    for extra in cases {
        let mut args = vec!["run", "--experiment", "nu-exponential", "--out", out];
        args.extend_from_slice(extra);
        assert_eq!(shotnoise(&args).status.code(), Some(2), "{extra:?}");
    }
    assert!(!dir.path().join("report.json").exists());
}

#[test]
fn unrepresentable_levels_are_a_config_error() {
    let out = shotnoise(&["run", "--experiment", "last-overshoot", "--L", "loglog", "--tau", "1e3"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("not representable"));
}

#[test]
fn end_to_end_run_writes_artifacts() {
    let dir = tempfile::tempdir().unwrap();
    let out_dir = dir.path().join("r");
    let out = shotnoise(&[
        "run",
        "--experiment",
        "nu-exponential",
        "--tau",
        "1e4",
        "--replicas",
        "10000",
        "--L",
        "logpow:1",
        "--seed",
        "42",
        "--out",
        out_dir.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let stdout = String::from_utf8(out.stdout).unwrap();
    assert!(stdout.lines().last().unwrap().starts_with("verdict: pass"));
    let r = report(&out_dir);
    assert_eq!(r["experiment"], "nu-exponential");
    assert_eq!(r["verdict"], "pass");
    assert_eq!(r["provenance"]["seed"], 42);
    assert!(r["wall_clock_seconds"].as_f64().unwrap() >= 0.0);
    let csv = fs::read_to_string(out_dir.join("samples_nu.csv")).unwrap();
    assert_eq!(csv.lines().next(), Some("replica,nu_over_tau_u1"));
    assert_eq!(csv.lines().count(), 10_001);
}

#[test]
fn flags_override_config_file() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.cfg");
    fs::write(
        &cfg,
        "# desk run\nexperiment = darling\ntau = 500\nreplicas = 300\nseed = 7\ntol.d_renewal = 0.2\n",
    )
    .unwrap();
    let out_dir = dir.path().join("out");
    let out = shotnoise(&[
        "run",
        "--config",
        cfg.to_str().unwrap(),
        "--seed",
        "9",
        "--out",
        out_dir.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let r = report(&out_dir);
    assert_eq!(r["experiment"], "darling");
    assert_eq!(r["config"]["tau"], 500.0);
    assert_eq!(r["config"]["replicas"], 300);
    assert_eq!(r["config"]["seed"], 9);
    assert_eq!(r["config"]["tolerances"]["d_renewal"], 0.2);
}

#[test]
fn bad_config_file_exits_2() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("bad.cfg");
    fs::write(&cfg, "experiment = darling\ncolour = blue\n").unwrap();
    let out = shotnoise(&["run", "--config", cfg.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    let missing = dir.path().join("missing.cfg");
    assert_eq!(shotnoise(&["run", "--config", missing.to_str().unwrap()]).status.code(), Some(2));
}

#[test]
fn failing_run_exits_1() {
    let dir = tempfile::tempdir().unwrap();
    let out = shotnoise(&[
        "run",
        "--experiment",
        "darling",
        "--tau",
        "100",
        "--replicas",
        "200",
        "--tol",
        "d_renewal=1e-9",
        "--out",
        dir.path().to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(1));
    assert_eq!(report(dir.path())["verdict"], "fail");
}
