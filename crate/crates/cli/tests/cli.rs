use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use guardfree::netlist::parse_netlist;
use serde_json::Value;

fn guardfree(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_guardfree"))
        .current_dir(dir)
        .args(args)
        .output()
        .expect("binary runs")
}

fn ok(dir: &Path, args: &[&str]) -> String {
    let out = guardfree(dir, args);
    assert!(
        out.status.success(),
        "{args:?} failed: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    String::from_utf8(out.stdout).unwrap()
}

fn gen(dir: &Path, bench: &str) {
    ok(dir, &["gen", "--benchmark", bench, "--vectors", "500"]);
}

const SMALL: &[&str] = &["--opt-vectors", "3000", "--eval-vectors", "3000", "--population", "16", "--generations", "10"];

fn optimize(dir: &Path, extra: &[&str]) -> Output {
    let mut args = vec!["optimize", "--netlist", "rca8.v", "--timing", "cells.timing"];
    args.extend_from_slice(SMALL);
    args.extend_from_slice(extra);
    guardfree(dir, &args)
}

#[test]
fn gen_writes_reparsable_artifacts() {
    let d = tempfile::tempdir().unwrap();
    gen(d.path(), "mul4");
    let n = parse_netlist(&fs::read_to_string(d.path().join("mul4.v")).unwrap()).unwrap();
    assert_eq!(n.name(), "mul4");
    let hex = fs::read_to_string(d.path().join("mul4.hex")).unwrap();
    assert_eq!(hex.lines().count(), 500);
    assert!(fs::read_to_string(d.path().join("cells.timing")).unwrap().contains("XOR2"));
    let bad = guardfree(d.path(), &["gen", "--benchmark", "fft8"]);
    assert_eq!(bad.status.code(), Some(2));
}

#[test]
fn sta_reports_both_corners() {
    let d = tempfile::tempdir().unwrap();
    gen(d.path(), "rca8");
    let text = ok(d.path(), &["sta", "--netlist", "rca8.v", "--timing", "cells.timing"]);
    assert!(text.contains("fresh cpd 0.65"));
    assert!(text.lines().any(|l| l.starts_with("aged path ")));
    let json: Value = serde_json::from_str(&ok(d.path(), &["sta", "--netlist", "rca8.v", "--json", "--corner", "aged"])).unwrap();
    assert_eq!(json.as_array().unwrap().len(), 1);
    assert_eq!(json[0]["corner"], "aged");
    assert!(json[0]["cpd"].as_f64().unwrap() > 0.65);
}

#[test]
fn missing_timing_file_is_an_input_error_naming_the_path() {
    let d = tempfile::tempdir().unwrap();
    gen(d.path(), "rca8");
    let out = guardfree(d.path(), &["sta", "--netlist", "rca8.v", "--timing", "nowhere.timing"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("nowhere.timing"));
    let out = guardfree(d.path(), &["optimize", "--netlist", "missing.v"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("missing.v"));
}

#[test]
fn optimize_writes_report_history_and_netlist() {
    let d = tempfile::tempdir().unwrap();
    gen(d.path(), "rca8");
    let out = optimize(d.path(), &["--out-dir", "run"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    assert!(String::from_utf8_lossy(&out.stderr).contains("seed 20190325"));
    let run = d.path().join("run");
    let report: Value = serde_json::from_str(&fs::read_to_string(run.join("report.json")).unwrap()).unwrap();
    for key in [
        "circuit",
        "fresh_cpd",
        "aged_cpd_baseline",
        "aged_cpd_approx",
        "feasible",
        "chromosome",
        "approx",
        "approx_timed",
        "baseline_aged",
        "candidate_mix",
        "selected_mix",
        "timing_exact",
        "metric",
        "ga",
    ] {
        assert!(report.get(key).is_some(), "report lacks {key}");
    }
    assert_eq!(report["feasible"], true);
    assert_eq!(report["ga"]["population_size"], 16);
    assert!(report["aged_cpd_approx"].as_f64().unwrap() <= report["fresh_cpd"].as_f64().unwrap());
    let history = fs::read_to_string(run.join("history.csv")).unwrap();
    assert!(history.starts_with("generation,best_fitness,mean_fitness,diversity,mutation_prob,best_nmed,best_aged_cpd\n"));
    assert_eq!(history.lines().count(), 11);
    let approx = parse_netlist(&fs::read_to_string(run.join("rca8_approx.v")).unwrap()).unwrap();
    let sta = ok(d.path(), &["sta", "--netlist", "run/rca8_approx.v", "--timing", "cells.timing", "--corner", "aged"]);
    let cpd: f64 = sta.lines().next().unwrap().rsplit(' ').next().unwrap().parse().unwrap();
    assert_eq!(cpd, report["aged_cpd_approx"].as_f64().unwrap());
    assert!(approx.gate_count() <= 37);
    let cands = fs::read_to_string(run.join("candidates.txt")).unwrap();
    assert_eq!(cands.lines().count() as u64, report["eligible_nets"].as_u64().unwrap());
}

#[test]
fn identical_runs_give_identical_reports_for_any_thread_count() {
    let d = tempfile::tempdir().unwrap();
    gen(d.path(), "rca8");
    assert!(optimize(d.path(), &["--out-dir", "a", "--threads", "1"]).status.success());
    assert!(optimize(d.path(), &["--out-dir", "b", "--threads", "3"]).status.success());
    for f in ["report.json", "history.csv", "candidates.txt", "rca8_approx.v"] {
        let a = fs::read(d.path().join("a").join(f)).unwrap();
        let b = fs::read(d.path().join("b").join(f)).unwrap();
        assert_eq!(a, b, "{f} differs");
    }
}

#[test]
fn unit_aging_factor_keeps_the_netlist() {
    let d = tempfile::tempdir().unwrap();
    gen(d.path(), "rca8");
    let out = optimize(d.path(), &["--aging-factor", "1.0", "--out-dir", "o"]);
    assert_eq!(out.status.code(), Some(0));
    let a = parse_netlist(&fs::read_to_string(d.path().join("rca8.v")).unwrap()).unwrap();
    let b = parse_netlist(&fs::read_to_string(d.path().join("o/rca8_approx.v")).unwrap()).unwrap();
    assert_eq!(a.structure(), b.structure());
}

#[test]
fn impossible_target_exits_infeasible() {
    let d = tempfile::tempdir().unwrap();
    gen(d.path(), "rca8");
    let out = optimize(d.path(), &["--delay-target", "0.01", "--out-dir", "o"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("infeasible"));
    // the artifacts are still written for inspection
    assert!(d.path().join("o/report.json").exists());
}

#[test]
fn config_file_values_yield_to_flags() {
    let d = tempfile::tempdir().unwrap();
    gen(d.path(), "rca8");
    fs::write(
        d.path().join("run.cfg"),
        "# small run\npopulation = 12\ngenerations = 4\nopt_vectors = 2000\neval-vectors = 2000\nseed = 5\n",
    )
    .unwrap();
    ok(d.path(), &["optimize", "--netlist", "rca8.v", "--config", "run.cfg", "--generations", "6", "--out-dir", "c"]);
    let report: Value = serde_json::from_str(&fs::read_to_string(d.path().join("c/report.json")).unwrap()).unwrap();
    assert_eq!(report["ga"]["population_size"], 12);
    assert_eq!(report["ga"]["generations"], 6);
    assert_eq!(report["seed"], 5);
    assert_eq!(report["eval_vectors"], 2000);

    fs::write(d.path().join("bad.cfg"), "populaton = 3\n").unwrap();
    let out = guardfree(d.path(), &["optimize", "--netlist", "rca8.v", "--config", "bad.cfg"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("populaton"));
}

#[test]
fn simulate_streams_reload_in_evaluate() {
    let d = tempfile::tempdir().unwrap();
    gen(d.path(), "rca8");
    let common = ["--netlist", "rca8.v", "--stimuli", "rca8.hex"];
    ok(d.path(), &[&["simulate"][..], &common, &["--out", "func.csv"]].concat());
    ok(
        d.path(),
        &[&["simulate"][..], &common, &["--mode", "timing", "--timing", "cells.timing", "--out", "timed.csv"]].concat(),
    );
    let func = fs::read_to_string(d.path().join("func.csv")).unwrap();
    assert!(func.starts_with("vector,value\n"));
    assert_eq!(func.lines().count(), 501);
    let m: Value = serde_json::from_str(&ok(
        d.path(),
        &["evaluate", "--golden", "func.csv", "--observed", "timed.csv", "--width", "9"],
    ))
    .unwrap();
    let nmed = m["nmed"].as_f64().unwrap();
    assert!(nmed > 0.0 && nmed < 0.1, "aged timing errors at the fresh clock: {nmed}");
    let same: Value = serde_json::from_str(&ok(
        d.path(),
        &["evaluate", "--golden", "func.csv", "--observed", "func.csv", "--width", "9"],
    ))
    .unwrap();
    assert_eq!(same["nmed"], 0.0);
    let nets: Value = serde_json::from_str(&ok(
        d.path(),
        &["evaluate", "--netlist", "rca8.v", "--approx", "rca8.v", "--stimuli", "rca8.hex"],
    ))
    .unwrap();
    assert_eq!(nets["nmed"], 0.0);
    assert_eq!(nets["vectors"], 500);
    let missing = guardfree(d.path(), &["evaluate", "--golden", "func.csv", "--observed", "func.csv"]);
    assert_eq!(missing.status.code(), Some(2));
}

#[test]
fn baselines_candidates_montecarlo_and_experiment_run() {
    let d = tempfile::tempdir().unwrap();
    gen(d.path(), "rca8");
    let vec = ["--opt-vectors", "2000", "--eval-vectors", "2000"];
    for m in ["glp", "aps"] {
        let j: Value = serde_json::from_str(&ok(
            d.path(),
            &[&["baseline", "--netlist", "rca8.v", "--method", m, "--out-dir", "b"][..], &vec].concat(),
        ))
        .unwrap();
        assert!(j["aged_cpd"].as_f64().unwrap() <= j["delay_target"].as_f64().unwrap());
        assert!(d.path().join(format!("b/rca8_{m}.v")).exists());
    }
    let c = ok(d.path(), &["candidates", "--netlist", "rca8.v", "--opt-vectors", "2000"]);
    assert!(c.lines().count() > 0);

    let out = optimize(d.path(), &["--out-dir", "o"]);
    assert!(out.status.success());
    let mc = ok(
        d.path(),
        &["montecarlo", "--netlist", "rca8.v", "--approx", "o/rca8_approx.v", "--samples", "8", "--mc-vectors", "500", "--out-dir", "mc"],
    );
    assert!(mc.starts_with("circuit,variant,min,q1,median,q3,max\n"));
    assert_eq!(fs::read_to_string(d.path().join("mc/montecarlo_samples.csv")).unwrap().lines().count(), 9);

    let csv = ok(
        d.path(),
        &[&["experiment", "--benchmark", "rca4,mul3", "--out-dir", "e", "--generations", "5"][..], &vec].concat(),
    );
    assert_eq!(csv.lines().count(), 3);
    assert!(d.path().join("e/mul3_approx.v").exists());
}
