use std::path::Path;
use std::process::{Command, Output};

use fuelgan_core::metrics::EvalReport;
use fuelgan_core::ProcessedDataset;

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_fuelgan"))
        .args(args)
        .env_remove("FUELGAN_CONFIG")
        .output()
        .expect("spawn fuelgan")
}

fn ok(args: &[&str]) {
    let out = run(args);
    assert!(out.status.success(), "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
}

fn p(path: &Path) -> &str {
    path.to_str().unwrap()
}

fn stderr(out: &Output) -> String {
    String::from_utf8_lossy(&out.stderr).into_owned()
}

fn quick_config(dir: &Path) -> std::path::PathBuf {
    let cfg = dir.join("quick.json");
    std::fs::write(&cfg, r#"{"gan": {"iterations": 20}}"#).unwrap();
    cfg
}

#[test]
fn missing_input_is_io_error() {
    let dir = tempfile::tempdir().unwrap();
    let out = run(&["preprocess", "--in", p(&dir.path().join("nope.csv")), "--out", p(&dir.path().join("x.csv"))]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).starts_with("error category=io message="));
    assert_eq!(stderr(&out).lines().count(), 1);
}

#[test]
fn bad_configuration_exits_3() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("bad.json");
    std::fs::write(&cfg, r#"{"test_fraction": 1.5}"#).unwrap();
    let out = run(&["--config", p(&cfg), "config"]);
    assert_eq!(out.status.code(), Some(3));
    assert!(stderr(&out).starts_with("error category=config"));

    std::fs::write(&cfg, "{not json").unwrap();
    assert_eq!(run(&["--config", p(&cfg), "config"]).status.code(), Some(3));

    let out = run(&["synth"]);
    assert_eq!(out.status.code(), Some(3));
    assert!(stderr(&out).starts_with("error category=config"));
}

#[test]
fn conflicting_threshold_flags_rejected() {
    let out = run(&["evaluate", "--in", "a", "--model", "b", "--out", "c", "--threshold", "0.4", "--calibrate"]);
    assert_eq!(out.status.code(), Some(3));
}

#[test]
fn unknown_plot_kind_is_domain_error() {
    let dir = tempfile::tempdir().unwrap();
    let raw = dir.path().join("raw.csv");
    let ds = dir.path().join("ds.csv");
    ok(&["synth", "--out", p(&raw)]);
    ok(&["preprocess", "--in", p(&raw), "--out", p(&ds)]);
    let out = run(&["plot", "--in", p(&ds), "--kind", "histogram", "--out", p(&dir.path().join("plot.csv"))]);
    assert_eq!(out.status.code(), Some(4));
    assert!(stderr(&out).contains("unknown plot kind"));
    ok(&["plot", "--in", p(&ds), "--kind", "scatter-running-time", "--out", p(&dir.path().join("plot.csv"))]);
}

#[test]
fn seed_flag_and_env_config_change_the_fingerprint() {
    let dir = tempfile::tempdir().unwrap();
    let fp = |out: &Output| -> String {
        let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
        v["seed"].to_string()
    };
    let default = run(&["config"]);
    assert!(default.status.success());
    assert_eq!(fp(&default), "42");
    assert_eq!(fp(&run(&["--seed", "9", "config"])), "9");

    let cfg = dir.path().join("env.json");
    std::fs::write(&cfg, r#"{"seed": 17}"#).unwrap();
    let out = Command::new(env!("CARGO_BIN_EXE_fuelgan"))
        .arg("config")
        .env("FUELGAN_CONFIG", &cfg)
        .output()
        .unwrap();
    assert_eq!(fp(&out), "17");

    let a = dir.path().join("a.csv");
    let b = dir.path().join("b.csv");
    ok(&["synth", "--out", p(&a)]);
    ok(&["--seed", "9", "synth", "--out", p(&b)]);
    let head = |path: &Path| std::fs::read_to_string(path).unwrap().lines().next().unwrap().to_string();
    assert!(head(&a).starts_with("# config_fingerprint: "));
    assert_ne!(head(&a), head(&b));
}

#[test]
fn preprocess_writes_rejections_and_fingerprints() {
    let dir = tempfile::tempdir().unwrap();
    let raw = dir.path().join("raw.csv");
    let ds = dir.path().join("ds.csv");
    let rej = dir.path().join("rej.csv");
    ok(&["synth", "--out", p(&raw)]);
    assert!(dir.path().join("raw.csv.meta.json").exists());
    ok(&["preprocess", "--in", p(&raw), "--out", p(&ds), "--rejections-out", p(&rej)]);
    let dataset = ProcessedDataset::read_csv(&ds).unwrap();
    assert_eq!(dataset.len(), 5905);
    let rejections = std::fs::read_to_string(&rej).unwrap();
    let data_lines = rejections.lines().filter(|l| !l.starts_with('#')).count();
    assert_eq!(data_lines, 105 + 1);
    assert!(std::fs::read_to_string(&ds).unwrap().starts_with("# "));
}

#[test]
fn short_chain_with_scores_and_comparison() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = quick_config(dir.path());
    let c = p(&cfg);
    let f = |name: &str| dir.path().join(name);
    ok(&["--config", c, "synth", "--out", p(&f("raw.csv"))]);
    ok(&["--config", c, "preprocess", "--in", p(&f("raw.csv")), "--out", p(&f("ds.csv"))]);
    ok(&["--config", c, "train", "--in", p(&f("ds.csv")), "--model-out", p(&f("m.json")), "--trace-out", p(&f("t.csv"))]);
    let trace = std::fs::read_to_string(f("t.csv")).unwrap();
    assert_eq!(trace.lines().filter(|l| !l.starts_with('#')).count(), 21);
    ok(&["--config", c, "evaluate", "--in", p(&f("ds.csv")), "--model", p(&f("m.json")), "--threshold", "0.5", "--out", p(&f("e.json"))]);
    let report: EvalReport = serde_json::from_str(&std::fs::read_to_string(f("e.json")).unwrap()).unwrap();
    assert_eq!(report.confusion.total(), 1181);
    assert_eq!(report.config_fingerprint.len(), 16);
    ok(&["--config", c, "score", "--in", p(&f("ds.csv")), "--model", p(&f("m.json")), "--out", p(&f("s.csv"))]);
    let scores = std::fs::read_to_string(f("s.csv")).unwrap();
    assert_eq!(scores.lines().filter(|l| !l.starts_with('#')).count(), 5905 + 1);
    ok(&["compare", "--report-a", p(&f("e.json")), "--report-b", p(&f("e.json")), "--out", p(&f("cmp.csv"))]);
    let cmp = std::fs::read_to_string(f("cmp.csv")).unwrap();
    assert!(cmp.contains("Metrics,Without Augmentation,With Augmentation"));
    assert!(cmp.contains("F1 Score"));
}

#[test]
fn compare_refuses_mixed_label_rules() {
    let dir = tempfile::tempdir().unwrap();
    let f = |name: &str| dir.path().join(name);
    let r1 = f("r1.json");
    std::fs::write(&r1, r#"{"gan": {"iterations": 0}, "labels": {"rules": [{"rule": "running_time_per_day_above", "hours": 24.0}]}}"#).unwrap();
    let quick = f("q.json");
    std::fs::write(&quick, r#"{"gan": {"iterations": 0}}"#).unwrap();
    for (cfg, tag) in [(&quick, "a"), (&r1, "b")] {
        let c = p(cfg);
        let ds = f(&format!("{tag}.csv"));
        ok(&["--config", c, "synth", "--out", p(&f("raw.csv"))]);
        ok(&["--config", c, "preprocess", "--in", p(&f("raw.csv")), "--out", p(&ds)]);
        ok(&["--config", c, "train", "--in", p(&ds), "--model-out", p(&f("m.json")), "--trace-out", p(&f("t.csv"))]);
        ok(&["--config", c, "evaluate", "--in", p(&ds), "--model", p(&f("m.json")), "--calibrate", "--out", p(&f(&format!("{tag}.json")))]);
    }
    let out = run(&["compare", "--report-a", p(&f("a.json")), "--report-b", p(&f("b.json")), "--out", p(&f("cmp.csv"))]);
    assert_eq!(out.status.code(), Some(4));
    assert!(stderr(&out).contains("different label rules"));
}
