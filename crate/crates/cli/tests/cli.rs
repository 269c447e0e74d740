use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use tempfile::TempDir;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_codedcache"))
}

fn write(dir: &TempDir, name: &str, body: &str) -> PathBuf {
    let path = dir.path().join(name);
    std::fs::write(&path, body).unwrap();
    path
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().unwrap()
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

fn stdout_json(out: &Output) -> serde_json::Value {
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_slice(&out.stdout).unwrap()
}

const UNIFORM_4_8: &str = r#"{"K":4,"N":8,"M":2,"popularity":{"type":"zipf","gamma":0}}"#;
const ZIPF_3_4: &str = r#"{"K":3,"N":4,"M":1.5,"popularity":{"type":"zipf","gamma":1.2}}"#;

#[test]
fn optimize_reports_closed_form_value() {
    let dir = TempDir::new().unwrap();
    let c = write(&dir, "c.json", UNIFORM_4_8);
    for program in ["ordered", "uniform", "closed-form"] {
        let v = stdout_json(&run(&["optimize", "--config", s(&c), "--program", program]));
        assert!((v["value"].as_f64().unwrap() - 1.5).abs() < 1e-9, "{program}");
    }
}

#[test]
fn optimized_partition_round_trips_through_evaluate_and_simulate() {
    let dir = TempDir::new().unwrap();
    let c = write(&dir, "c.json", ZIPF_3_4);
    let v = stdout_json(&run(&["optimize", "--config", s(&c)]));
    let value = v["value"].as_f64().unwrap();
    let p = write(&dir, "y.json", &v["partition"].to_string());
    for method in ["bruteforce", "symmetric", "monotone"] {
        let out = run(&["evaluate", "--partition", s(&p), "--config", s(&c), "--method", method]);
        assert!(out.status.success());
        let load: f64 = String::from_utf8(out.stdout).unwrap().trim().parse().unwrap();
        assert!((load - value).abs() < 1e-9, "{method}: {load} vs {value}");
    }
    let out = run(&["evaluate", "--partition", s(&p), "--config", s(&c), "--method", "uniform"]);
    assert_eq!(out.status.code(), Some(2));

    for delivery in ["zero-pad", "hcd"] {
        let sim = stdout_json(&run(&[
            "simulate", "--config", s(&c), "--partition", s(&p), "--F", "1000", "--seed", "7", "--demands", "all",
            "--delivery", delivery,
        ]));
        assert_eq!(sim["decoded"], true);
        assert_eq!(sim["demands"].as_array().unwrap().len(), 64);
        let per_s: u64 = sim["per_s_totals"].as_array().unwrap().iter().map(|v| v.as_u64().unwrap()).sum();
        assert_eq!(per_s, sim["total_units"].as_u64().unwrap());
    }
}

#[test]
fn simulate_explicit_demands() {
    let dir = TempDir::new().unwrap();
    let c = write(&dir, "c.json", r#"{"K":2,"N":2,"M":1,"popularity":{"type":"zipf","gamma":0}}"#);
    let p = write(&dir, "z.json", r#"{"type":"uniform","z":[0,0.5,0]}"#);
    let sim = stdout_json(&run(&["simulate", "--config", s(&c), "--partition", s(&p), "--F", "2", "--demands", "1,2;2,2"]));
    assert_eq!(sim["total_units"], 2);
    assert_eq!(sim["demands"][0]["demand"], serde_json::json!([1, 2]));
    let out = run(&["simulate", "--config", s(&c), "--partition", s(&p), "--F", "2", "--demands", "1,3"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn bound_json_shape() {
    let dir = TempDir::new().unwrap();
    let c = write(&dir, "c.json", UNIFORM_4_8);
    let v = stdout_json(&run(&["bound", "--config", s(&c)]));
    assert_eq!(v["lb_genie"], v["lb_uniform"]);
    assert_eq!(v["argmax_n"], 8);
    assert_eq!(v["lb_uniform_terms"].as_array().unwrap().len(), 4);
}

fn read_csv(path: &Path) -> Vec<Vec<f64>> {
    let text = std::fs::read_to_string(path).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next().unwrap(), "var,optimized_load,baseline_mn_load,lb_genie,lb_uniform");
    lines.map(|l| l.split(',').map(|v| v.parse().unwrap()).collect()).collect()
}

#[test]
fn memory_sweep_matches_closed_form_under_uniform_popularity() {
    let dir = TempDir::new().unwrap();
    let c = write(&dir, "c.json", UNIFORM_4_8);
    let out = dir.path().join("curve.csv");
    // M = N/K .. N in steps of N/K
    let status = run(&["sweep", "--config", s(&c), "--var", "M", "--from", "2", "--to", "8", "--steps", "4", "--out", s(&out)]);
    assert!(status.status.success());
    let rows = read_csv(&out);
    assert_eq!(rows.len(), 4);
    for r in rows {
        let expected = 4.0 * (1.0 - r[0] / 8.0) / (1.0 + r[0] / 2.0);
        assert!((r[1] - expected).abs() < 1e-9);
    }
}

#[test]
fn gamma_sweep_rows_are_ordered_and_reproducible() {
    let dir = TempDir::new().unwrap();
    let c = write(&dir, "c.json", ZIPF_3_4);
    let a = dir.path().join("a.csv");
    let b = dir.path().join("b.csv");
    for (out, jobs) in [(&a, "1"), (&b, "0")] {
        let o = run(&["--jobs", jobs, "sweep", "--config", s(&c), "--var", "gamma", "--from", "0", "--to", "2", "--steps", "9", "--out", s(out)]);
        assert!(o.status.success());
    }
    assert_eq!(std::fs::read(&a).unwrap(), std::fs::read(&b).unwrap());
    let rows = read_csv(&a);
    for r in &rows {
        assert!(r[3] <= r[1] + 1e-7 && r[1] <= r[2] + 1e-7, "{r:?}");
        assert_eq!(r[2], rows[0][2]);
    }
}

#[test]
fn error_exit_codes() {
    let dir = TempDir::new().unwrap();
    let bad = write(&dir, "bad.json", r#"{"K":2,"N":2,"popularity":{"type":"zipf","gamma":1}}"#);
    let out = run(&["bound", "--config", s(&bad)]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("missing field `M`"));

    let big = write(&dir, "big.json", r#"{"K":8,"N":10,"M":1,"popularity":{"type":"zipf","gamma":1}}"#);
    let out = run(&["optimize", "--config", s(&big), "--program", "full"]);
    assert_eq!(out.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&out.stderr).contains("cap is 5000"));

    let missing = dir.path().join("nope.json");
    assert_eq!(run(&["bound", "--config", s(&missing)]).status.code(), Some(2));
}
