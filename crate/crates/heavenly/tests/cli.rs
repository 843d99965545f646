use std::process::{Command, Output};

use serde_json::Value;

fn heavenly(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_heavenly")).args(args).output().expect("binary runs")
}

fn json(o: &Output) -> Value {
    serde_json::from_slice(&o.stdout).unwrap_or_else(|e| panic!("{e}: {}", String::from_utf8_lossy(&o.stdout)))
}

#[test]
fn lax_closure_passes_with_zero_residual() {
    let o = heavenly(&["verify", "lax-closure", "--lambdas", "0,1,2,3"]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let v = json(&o);
    assert_eq!(v["status"], "pass");
    assert_eq!(v["suites"][0]["name"], "lax-closure");
    assert_eq!(v["suites"][0]["residual"], "0");
}

#[test]
fn eval_frame_on_quadratic() {
    let o = heavenly(&["eval", "frame", "--solution", "quadratic", "--point", "1,0,0,0"]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    assert_eq!(json(&o)["matrix"][1][0], "1/6");
}

#[test]
fn eval_metric_is_symmetric() {
    let o = heavenly(&["eval", "metric", "--solution", "linear-generic", "--point", "1,-1/2,0,2", "--metric", "web"]);
    assert_eq!(o.status.code(), Some(0));
    let m = json(&o)["matrix"].clone();
    for i in 0..4 {
        for j in 0..4 {
            assert_eq!(m[i][j], m[j][i]);
        }
    }
}

#[test]
fn float_lambdas_rejected() {
    let o = heavenly(&["verify", "gauge", "--lambdas", "0,0.5,2,3"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("0.5"));
    let o = heavenly(&["verify", "gauge", "--lambdas", "0,1,1,3"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn failing_suite_exits_one() {
    // The displayed co-frame does not make the leaves null.
    let o = heavenly(&["verify", "nullity", "--metric", "printed"]);
    assert_eq!(o.status.code(), Some(1));
    let v = json(&o);
    assert_eq!(v["status"], "fail");
    assert_eq!(v["suites"][0]["status"], "fail");
    let o = heavenly(&["verify", "nullity", "--metric", "web"]);
    assert_eq!(o.status.code(), Some(0));
}

#[test]
fn markdown_has_one_section_per_suite() {
    let o = heavenly(&["verify", "gauge", "recursion", "--format", "markdown"]);
    assert_eq!(o.status.code(), Some(0));
    let md = String::from_utf8(o.stdout).unwrap();
    assert_eq!(md.matches("\n## ").count(), 2);
    assert!(md.contains("## gauge") && md.contains("## recursion"));
}

#[test]
fn config_file_overrides_flags() {
    let dir = std::env::temp_dir().join(format!("heavenly-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let toml = dir.join("run.toml");
    std::fs::write(&toml, "lambdas = [\"0\", \"1/2\", \"2\", \"-3\"]\nseed = 7\n").unwrap();
    let o = heavenly(&["verify", "gauge", "--lambdas", "0,1,2,3", "--config", toml.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let v = json(&o);
    assert_eq!(v["config"]["lambdas"], serde_json::json!(["0", "1/2", "2", "-3"]));
    assert_eq!(v["config"]["seed"], 7);
    let js = dir.join("run.json");
    std::fs::write(&js, r#"{"lambdas": [0.5, 1, 2, 3]}"#).unwrap();
    let o = heavenly(&["verify", "gauge", "--config", js.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    let out = dir.join("report.json");
    let o = heavenly(&["verify", "gauge", "--out", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    assert!(o.stdout.is_empty());
    assert!(std::fs::read_to_string(&out).unwrap().contains("\"gauge\""));
    std::fs::remove_dir_all(&dir).unwrap();
}

#[test]
fn byte_stable_without_timings() {
    let args = ["verify", "nullity", "connection", "--metric", "web", "--seed", "3"];
    let a = heavenly(&args);
    let b = heavenly(&args);
    assert_eq!(a.stdout, b.stdout);
    assert!(!String::from_utf8_lossy(&a.stdout).contains("timing_ms"));
    let t = heavenly(&["verify", "gauge", "--timings"]);
    assert!(String::from_utf8_lossy(&t.stdout).contains("timing_ms"));
}

#[test]
fn covering_export_lists_rules() {
    let o = heavenly(&["covering", "export", "--depth", "1"]);
    assert_eq!(o.status.code(), Some(0));
    let v = json(&o);
    let rules = v["rules"].as_array().unwrap();
    assert!(rules.iter().any(|r| r["direction"] == 3) && rules.iter().any(|r| r["direction"] == 4));
}

#[test]
fn recursion_command() {
    let o = heavenly(&["recursion", "--seed-char", "translation-3", "--times", "2"]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stdout));
    assert_eq!(json(&o)["steps"].as_array().unwrap().len(), 3);
    let o = heavenly(&["recursion", "--seed-char", "bogus"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn unknown_suite_rejected() {
    assert_eq!(heavenly(&["verify", "bogus"]).status.code(), Some(2));
}
