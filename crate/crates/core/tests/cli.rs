use std::path::Path;
use std::process::{Command, Output};

use geolayout::io::{load_graph, load_layout_document, save_layout};
use geolayout::layout::{InitMode, LayoutState};
use geolayout::LayoutParams;
use serde_json::Value;

fn geolayout(args: &[&str], dir: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_geolayout"))
        .args(args)
        .current_dir(dir)
        .env_remove("GEOLAYOUT_GEO_WEIGHT")
        .env("RUST_LOG", "warn")
        .output()
        .unwrap()
}

fn ok(out: &Output) {
    assert!(out.status.success(), "stderr: {}", String::from_utf8_lossy(&out.stderr));
}

#[test]
fn generate_type1_has_exact_edge_count() {
    let dir = tempfile::tempdir().unwrap();
    ok(&geolayout(&["generate", "type1", "--n", "100", "--p", "0.5", "--out", "g.json"], dir.path()));
    let g = load_graph(&std::fs::read(dir.path().join("g.json")).unwrap()).unwrap();
    assert_eq!(g.edge_count(), 2475);
}

#[test]
fn exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let missing = geolayout(&["layout", "nowhere.json"], dir.path());
    assert_eq!(missing.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&missing.stderr).contains("nowhere.json"));

    assert_eq!(geolayout(&["layout"], dir.path()).status.code(), Some(2));
    assert_eq!(geolayout(&["frobnicate"], dir.path()).status.code(), Some(2));
    assert_eq!(geolayout(&["generate", "type1", "--n", "ten", "--p", "0.5"], dir.path()).status.code(), Some(2));

    // infeasible spec and invalid document are validation errors
    assert_eq!(geolayout(&["generate", "type2", "--n", "10", "--c", "50"], dir.path()).status.code(), Some(3));
    std::fs::write(dir.path().join("bad.json"), r#"{"format_version":"1.0","nodes":[],"edges":[{"source":"a","target":"b","weight":0.5}]}"#).unwrap();
    assert_eq!(geolayout(&["layout", "bad.json"], dir.path()).status.code(), Some(3));
    ok(&geolayout(&["generate", "expert", "--out", "e.json"], dir.path()));
    assert_eq!(geolayout(&["layout", "e.json", "--alpha", "1.5"], dir.path()).status.code(), Some(3));

    // unwritable output is a runtime failure
    let out = geolayout(&["generate", "expert", "--out", "no/such/dir/e.json"], dir.path());
    assert_eq!(out.status.code(), Some(4));
}

#[test]
fn help_lists_defaults() {
    let out = geolayout(&["layout", "--help"], Path::new("."));
    ok(&out);
    let text = String::from_utf8(out.stdout).unwrap();
    for flag in ["--k", "--geo-weight", "--temperature", "--alpha", "--iterations", "--seed", "--weighted-attraction"] {
        let line = text.lines().find(|l| l.trim_start().starts_with(flag)).unwrap_or_else(|| panic!("{flag}"));
        assert!(line.contains("[default:"), "{line}");
    }
}

#[test]
fn layout_embeds_metrics_and_metrics_reads_them_back() {
    let dir = tempfile::tempdir().unwrap();
    ok(&geolayout(&["generate", "expert", "--out", "e.json"], dir.path()));
    ok(&geolayout(&["layout", "e.json", "--iterations", "50", "--out", "l.json"], dir.path()));
    let doc = load_layout_document(&std::fs::read(dir.path().join("l.json")).unwrap()).unwrap();
    assert_eq!(doc.iteration, 50);
    let embedded = doc.metrics.clone().unwrap();

    let out = geolayout(&["metrics", "e.json", "l.json"], dir.path());
    ok(&out);
    let printed: geolayout::MetricsReport = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(printed, embedded);
    assert!(out.stderr.is_empty() || !String::from_utf8_lossy(&out.stderr).contains("error"));
}

#[test]
fn metrics_of_an_on_anchor_layout_is_zero_offset() {
    let dir = tempfile::tempdir().unwrap();
    ok(&geolayout(&["generate", "expert", "--out", "e.json"], dir.path()));
    let graph = load_graph(&std::fs::read(dir.path().join("e.json")).unwrap()).unwrap();
    let mut params = LayoutParams::for_graph(&graph);
    params.init_mode = InitMode::AtAnchors;
    let state = LayoutState::initialize(&graph, &params).unwrap();
    std::fs::write(dir.path().join("l.json"), save_layout(&state, &params, None).unwrap()).unwrap();
    let out = geolayout(&["metrics", "e.json", "l.json"], dir.path());
    ok(&out);
    let v: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["m_mlo"], 0.0);
}

#[test]
fn parameter_precedence() {
    let dir = tempfile::tempdir().unwrap();
    ok(&geolayout(&["generate", "type2", "--n", "20", "--c", "3", "--out", "g.json"], dir.path()));
    std::fs::write(dir.path().join("p.json"), r#"{"geo_weight": 7, "cooling_alpha": 0.05, "n_iterations": 3}"#).unwrap();
    let run = |extra: &[&str], env: Option<(&str, &str)>| {
        let mut cmd = Command::new(env!("CARGO_BIN_EXE_geolayout"));
        cmd.args(["layout", "g.json"]).args(extra).current_dir(dir.path());
        if let Some((k, v)) = env {
            cmd.env(k, v);
        }
        let out = cmd.output().unwrap();
        ok(&out);
        load_layout_document(&out.stdout).unwrap().params
    };
    let env = Some(("GEOLAYOUT_GEO_WEIGHT", "9"));
    assert_eq!(run(&["--iterations", "3"], env).geo_weight, 9.0);
    let p = run(&["--params", "p.json"], env);
    assert_eq!((p.geo_weight, p.cooling_alpha, p.n_iterations), (7.0, 0.05, 3));
    assert_eq!(run(&["--params", "p.json", "--geo-weight", "1"], env).geo_weight, 1.0);
    assert_eq!(run(&["--iterations", "3"], None).geo_weight, 5.0);
}

#[test]
fn bench_writes_one_row_per_cell() {
    let dir = tempfile::tempdir().unwrap();
    let out = geolayout(
        &[
            "bench", "--sizes", "20,40,80", "--type1", "0.05,0.5", "--type2", "5", "--repetitions", "2",
            "--iterations", "2", "--out", "b.csv",
        ],
        dir.path(),
    );
    ok(&out);
    let csv = std::fs::read_to_string(dir.path().join("b.csv")).unwrap();
    let mut lines = csv.lines();
    assert!(lines.next().unwrap().starts_with("family,n,p_or_c,seed,repetitions,median_seconds"));
    assert_eq!(lines.count(), 9);
    let meta: Value = serde_json::from_slice(&std::fs::read(dir.path().join("b.csv.meta.json")).unwrap()).unwrap();
    assert_eq!(meta["parallel"], false);
    assert!(meta["scaling_exponents"]["type1(p=0.5)"]["exponent"].is_number());
}

#[test]
fn bench_default_grid_has_fifteen_rows() {
    let dir = tempfile::tempdir().unwrap();
    let out = geolayout(&["bench", "--repetitions", "1", "--iterations", "1", "--out", "b.csv"], dir.path());
    ok(&out);
    let csv = std::fs::read_to_string(dir.path().join("b.csv")).unwrap();
    assert_eq!(csv.lines().count(), 16);
}
