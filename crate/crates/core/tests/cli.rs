//! End-to-end runs of the binary: exit statuses, report shape, config files, reproducibility.

use std::process::{Command, Output};

use serde_json::Value;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_golden-frames"))
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn report(out: &Output) -> Value {
    assert!(out.status.success(), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_slice(&out.stdout).expect("JSON report")
}

#[test]
fn lattice_count_reports_points() {
    let r = report(&run(&["lattice", "count", "--rect", "-0.5,0.5,-0.5,0.5", "--beta", "1"]));
    assert_eq!(r["schema_version"], 1);
    assert_eq!(r["command"], "lattice count");
    assert_eq!(r["result"]["count"], 1);
    assert_eq!(r["result"]["points"][0]["n"], 0);
    assert_eq!(r["config"]["seed"], 24301);
    assert_eq!(r["config"]["beta"], 1.0);
}

#[test]
fn large_counts_omit_the_point_list() {
    let r = report(&run(&["lattice", "count", "--rect", "0,30,0,30", "--beta", "1"]));
    assert!(r["result"]["count"].as_u64().unwrap() > 100);
    assert!(r["result"]["points"].is_null());
}

#[test]
fn usage_errors_exit_with_one() {
    for args in [
        &["lattice", "count", "--rect", "1,0,0,1"][..],
        &["lattice", "count", "--rect", "0,1,0,1", "--beta", "0"],
        &["lattice", "audit", "--mode", "min", "--area", "-1"],
        &["cover", "audit", "--delta", "0"],
        &["wavelet", "check", "--family", "unknown"],
        &["frame", "estimate", "--scheme", "dyadic", "--a", "2"],
        &["frame", "estimate", "--delta", "0.5", "--n", "1000"],
        &["--format", "csv", "lattice", "audit", "--mode", "min", "--area", "golden2"],
        &["lattice"],
        &["teleport"],
    ] {
        let out = run(args);
        assert_eq!(out.status.code(), Some(1), "{args:?}");
        assert!(out.stdout.is_empty(), "{args:?}");
    }
}

#[test]
fn help_exits_with_zero() {
    assert_eq!(run(&["--help"]).status.code(), Some(0));
}

#[test]
fn rank_deficiency_is_a_numerical_failure() {
    let out = run(&["frame", "estimate", "--delta", "0.35", "--region", "0,10,0.001,0.04"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("A = 0: rank-deficient"));
}

#[test]
fn lattice_audits_pass() {
    let r = report(&run(&["lattice", "audit", "--mode", "min", "--area", "golden2", "--trials", "2000"]));
    assert_eq!(r["result"]["pass"], true);
    assert!(r["result"]["audit"]["min_count"].as_u64().unwrap() >= 1);
    let r = report(&run(&["lattice", "audit", "--mode", "max", "--area", "inv3p2a", "--trials", "2000"]));
    assert_eq!(r["result"]["pass"], true);
    assert!(r["result"]["audit"]["max_count"].as_u64().unwrap() <= 1);
}

#[test]
fn sparse_cover_reports_empty_cells() {
    let out = run(&["cover", "audit", "--delta", "0.5", "--beta", "10", "--k", "-20:20", "--l", "-3:3"]);
    let r = report(&out);
    assert_eq!(r["result"]["beta_rule"], "explicit");
    assert!(r["result"]["empty_cell_count"].as_u64().unwrap() > 0);
    assert_eq!(r["result"]["within_bounds"], false);
}

#[test]
fn area_matched_cover_is_within_bounds() {
    let r = report(&run(&["cover", "audit", "--delta", "0.5", "--area-matched", "--k", "-50:50", "--l", "-5:5"]));
    assert_eq!(r["result"]["within_bounds"], true);
}

#[test]
fn wavelet_checks() {
    let r = report(&run(&["wavelet", "check", "--family", "cauchy", "--order", "6"]));
    assert_eq!(r["result"]["status"], "checked");
    assert_eq!(r["result"]["pass"], true);
    assert!((r["result"]["admissibility"]["value"].as_f64().unwrap() - 1.0).abs() < 1e-6);
    let r = report(&run(&["wavelet", "check", "--order", "3"]));
    assert_eq!(r["result"]["status"], "hypothesis_violated");
    assert_eq!(r["result"]["pass"], false);
}

#[test]
fn frame_estimate_reports_bounds() {
    let r = report(&run(&["frame", "estimate", "--delta", "0.5", "--n", "1024"]));
    let e = &r["result"]["estimate"];
    assert_eq!(e["converged"], true);
    assert!(e["lower"].as_f64().unwrap() > 0.0);
    assert!(e["ratio"].as_f64().unwrap() >= 1.0);
    assert_eq!(r["config"]["band"], Value::Null);
    assert_eq!(r["result"]["band"]["first"], 16);
}

#[test]
fn frame_compare_table_shape() {
    let out = run(&["--format", "csv", "frame", "compare", "--deltas", "1.0,0.7,0.5,0.35", "--n", "4096"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(!text.contains('\r'));
    let lines: Vec<_> = text.lines().collect();
    assert_eq!(lines.len(), 9);
    assert_eq!(lines[0], "delta,scheme,beta_or_ab,points,A,B,ratio,iters,converged");
    assert_eq!(lines.iter().skip(1).filter(|l| l.contains(",golden,")).count(), 4);
}

#[test]
fn config_file_is_overridden_by_flags() {
    let dir = tempfile::tempdir().unwrap();
    let conf = dir.path().join("run.conf");
    std::fs::write(&conf, "# cover run\ndelta = 0.25\nseed = 11\nk = -5:5\nl = -2:2\n").unwrap();
    let path = conf.to_str().unwrap();
    let r = report(&run(&["--config", path, "cover", "audit", "--delta", "1"]));
    assert_eq!(r["config"]["delta"], 1.0);
    assert_eq!(r["config"]["seed"], 11);
    assert_eq!(r["config"]["k_range"]["lo"], -5);
    let r = report(&run(&["--config", path, "--seed", "3", "cover", "audit"]));
    assert_eq!(r["config"]["delta"], 0.25);
    assert_eq!(r["config"]["seed"], 3);
    std::fs::write(&conf, "warp = 9\n").unwrap();
    assert_eq!(run(&["--config", path, "cover", "audit", "--delta", "1"]).status.code(), Some(1));
}

#[test]
fn output_file_matches_stdout_and_is_reproducible() {
    let dir = tempfile::tempdir().unwrap();
    let file = dir.path().join("out.json");
    let args = ["--seed", "5", "lattice", "audit", "--mode", "max", "--area", "0.3", "--trials", "500"];
    let first = run(&args);
    let second = run(&args);
    assert!(first.status.success());
    assert_eq!(first.stdout, second.stdout);
    let mut with_file: Vec<&str> = vec!["--output", file.to_str().unwrap()];
    with_file.extend(args);
    let out = run(&with_file);
    assert!(out.status.success() && out.stdout.is_empty());
    let written: Value = serde_json::from_slice(&std::fs::read(&file).unwrap()).unwrap();
    let printed: Value = serde_json::from_slice(&first.stdout).unwrap();
    assert_eq!(written["result"], printed["result"]);
    let other = run(&["--seed", "6", "lattice", "audit", "--mode", "max", "--area", "0.3", "--trials", "500"]);
    assert_ne!(report(&other)["result"]["audit"]["seed"], printed["result"]["audit"]["seed"]);
}

#[test]
fn thread_cap_does_not_change_results() {
    let args = ["frame", "estimate", "--delta", "0.7", "--n", "512"];
    let base = report(&run(&args));
    let mut capped = vec!["--threads", "1"];
    capped.extend(args);
    let one = report(&run(&capped));
    assert_eq!(base["result"], one["result"]);
}
