//! The `tm` binary: exit codes and outputs.

use std::process::{Command, Output};

fn tm(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_tm")).args(args).output().expect("tm runs")
}

fn path(rel: &str) -> String {
    format!("{}/{rel}", env!("CARGO_MANIFEST_DIR"))
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

#[test]
fn corpus_files_validate() {
    for f in ["heating_water", "reservation_view", "dough_cookie", "tendering"] {
        let o = tm(&["validate", &path(&format!("corpus/{f}.tm"))]);
        assert_eq!(o.status.code(), Some(0), "{f}: {}", stdout(&o));
        let report: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
        assert_eq!(report["ok"], true);
    }
}

#[test]
fn validation_errors_exit_one_with_report() {
    let o = tm(&["validate", &path("tests/fixtures/flow_illegal.tm")]);
    assert_eq!(o.status.code(), Some(1));
    let report: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(report["ok"], false);
    assert_eq!(report["diagnostics"][0]["code"], "FLOW_ILLEGAL");

    let o = tm(&["simulate", &path("tests/fixtures/ref_unresolved.tm")]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn usage_and_syntax_errors_exit_two() {
    let o = tm(&["validate"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("Usage: tm"));

    assert_eq!(tm(&["frobnicate", "x.tm"]).status.code(), Some(2));
    assert_eq!(tm(&["simulate", "x.tm", "--policy", "lifo"]).status.code(), Some(2));

    let dir = std::env::temp_dir().join(format!("tm-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let bad = dir.join("bad.tm");
    std::fs::write(&bad, "thimac A {\n  create\n}\n").unwrap();
    let o = tm(&["validate", bad.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains(":3:1: expected `;`"));
}

#[test]
fn dough_cookie_trace_fires_e1_e2_e3() {
    let o = tm(&["simulate", &path("corpus/dough_cookie.tm"), "--policy", "fifo"]);
    assert_eq!(o.status.code(), Some(0));
    let fired: Vec<String> = stdout(&o)
        .lines()
        .map(|l| serde_json::from_str::<serde_json::Value>(l).unwrap())
        .filter(|r| r["kind"] == "event-fired")
        .map(|r| r["id"].as_str().unwrap().to_string())
        .filter(|id| id.starts_with('E') && !id.contains('.'))
        .collect();
    assert_eq!(fired, ["E1", "E2", "E3"]);
}

#[test]
fn output_flag_writes_a_file() {
    let out = std::env::temp_dir().join(format!("tm-cli-out-{}.dot", std::process::id()));
    let o = tm(&["render", &path("corpus/heating_water.tm"), "--output", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    assert!(o.stdout.is_empty());
    assert!(std::fs::read_to_string(&out).unwrap().starts_with("digraph tm {"));
    let _ = std::fs::remove_file(out);
}

#[test]
fn every_command_runs_on_the_corpus() {
    for cmd in ["validate", "events", "simulate", "simplify", "render", "fmt"] {
        let o = tm(&[cmd, &path("corpus/tendering.tm")]);
        assert_eq!(o.status.code(), Some(0), "{cmd}");
        assert!(!o.stdout.is_empty(), "{cmd}");
    }
    let o = tm(&["render", &path("corpus/tendering.tm"), "--format", "json"]);
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["events"].as_array().unwrap().len(), 7);
}
