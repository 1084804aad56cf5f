use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn etquant(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_etquant")).args(args).output().expect("binary runs")
}

fn json_ok(args: &[&str]) -> Value {
    let out = etquant(args);
    assert!(out.status.success(), "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_slice(&out.stdout).unwrap()
}

fn path_str(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn classify_direction_in_cone() {
    let v = json_ok(&["classify", "--direction", "1,-0.5"]);
    assert_eq!(v["classification"]["kind"], "InteriorCone");
    assert_eq!(v["classification"]["k"], 3);
    assert_eq!(v["class"], "turan");
    assert_eq!(v["parameters"]["classes"], 4);
}

#[test]
fn classify_critical_ray_with_base_point() {
    let v = json_ok(&["classify", "--direction", "1,-0.75", "--beta", "20,-80"]);
    assert_eq!(v["classification"]["kind"], "CriticalRay");
    assert_eq!(v["classification"]["k"], 1);
    assert_eq!(v["side"], -1);
    assert_eq!(v["parameters"]["classes"], 2);
    let v = json_ok(&["classify", "--direction", "1,-3/4", "--beta", "10,-6"]);
    assert_eq!((v["side"].as_i64(), v["parameters"]["classes"].as_u64()), (Some(1), Some(3)));
}

#[test]
fn classify_line_attractive_tie() {
    let v = json_ok(&["classify", "--line", "-1,0", "--limit", "+inf"]);
    assert_eq!(v["class"], "empty_or_complete");
    let v = json_ok(&["classify", "--line", "-5/2,0", "--limit", "-inf"]);
    assert_eq!(v["parameters"]["classes"], 8);
}

#[test]
fn usage_errors_exit_with_two() {
    assert_eq!(etquant(&["classify", "--direction", "0,0"]).status.code(), Some(2));
    assert_eq!(etquant(&["classify", "--direction", "1,1", "--bogus"]).status.code(), Some(2));
    assert_eq!(etquant(&["classify", "--line", "1,0"]).status.code(), Some(2));
    assert_eq!(etquant(&["verify", "--suite", "nope"]).status.code(), Some(2));
    assert_eq!(etquant(&["classify", "--line", "1,0", "--limit", "sideways"]).status.code(), Some(2));
}

#[test]
fn boundary_csv_marks_turan_rows() {
    let dir = tempfile::tempdir().unwrap();
    let csv_path = dir.path().join("b.csv");
    let svg_path = dir.path().join("b.svg");
    let out = etquant(&["boundary", "--resolution", "7", "--out", path_str(&csv_path), "--svg", path_str(&svg_path)]);
    assert!(out.status.success());
    let text = std::fs::read_to_string(&csv_path).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("e,lower,upper,vertex"));
    let rows: Vec<Vec<String>> = lines.map(|l| l.split(',').map(String::from).collect()).collect();
    let marked: Vec<&str> = rows.iter().filter(|r| !r[3].is_empty()).map(|r| r[3].as_str()).collect();
    assert_eq!(marked, ["0", "1", "2", "3", "4", "5"]);
    let v2 = rows.iter().find(|r| r[3] == "2").unwrap();
    assert_eq!(v2[1].parse::<f64>().unwrap(), 2.0 / 9.0);
    assert!(std::fs::read_to_string(&svg_path).unwrap().starts_with("<svg"));

    assert_eq!(etquant(&["boundary", "--resolution", "1", "--out", path_str(&csv_path)]).status.code(), Some(1));
    let bad = dir.path().join("missing").join("b.csv");
    let out = etquant(&["boundary", "--resolution", "5", "--out", path_str(&bad)]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("cannot write"));
}

#[test]
fn sample_is_byte_deterministic_and_presets_apply() {
    let dir = tempfile::tempdir().unwrap();
    let presets = dir.path().join("presets.txt");
    std::fs::write(&presets, "# test presets\nsmall = --n 8 --beta 0.2,-0.1 --steps 4000 --thin 100 --init random:0.5 --seed 9\n").unwrap();
    let run = |name: &str, extra: &[&str]| {
        let out = dir.path().join(name);
        let mut args = vec!["sample", "--preset-file", path_str(&presets), "--preset", "small", "--out", path_str(&out)];
        args.extend_from_slice(extra);
        let o = etquant(&args);
        assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
        std::fs::read(out).unwrap()
    };
    let a = run("a.csv", &[]);
    let b = run("b.csv", &[]);
    assert_eq!(a, b);
    let text = String::from_utf8(a.clone()).unwrap();
    assert!(text.starts_with("step,e,t,accepted_frac\n"));
    assert_eq!(text.lines().count(), 1 + 41);
    let c = run("c.csv", &["--seed", "10"]);
    assert_ne!(a, c);
    let d = run("d.csv", &["--steps", "200"]);
    assert_eq!(String::from_utf8(d).unwrap().lines().count(), 1 + 3);

    let out = etquant(&["sample", "--preset-file", path_str(&presets), "--preset", "large", "--out", "x.csv"]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn sample_writes_graph_report_and_plot() {
    let dir = tempfile::tempdir().unwrap();
    let p = |n: &str| dir.path().join(n);
    let out = etquant(&[
        "sample", "--n", "30", "--beta", "80,-40", "--init", "turan:4", "--steps", "2000", "--thin", "500",
        "--out", path_str(&p("t.csv")), "--graph-out", path_str(&p("g.txt")), "--report", path_str(&p("r.json")),
        "--svg", path_str(&p("t.svg")),
    ]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let report: Value = serde_json::from_str(&std::fs::read_to_string(p("r.json")).unwrap()).unwrap();
    assert_eq!(report["final_counts"], serde_json::json!([337, 1680]));
    assert_eq!(report["partition"]["misfit_pairs"], 0);
    assert!(report["metadata"]["rng"].as_str().unwrap().contains("ChaCha8"));
    let g = etquant::graph::Graph::read_edge_list(std::io::BufReader::new(std::fs::File::open(p("g.txt")).unwrap())).unwrap();
    assert_eq!(g.edge_count(), 337);
    assert!(std::fs::read_to_string(p("t.svg")).unwrap().contains("<circle"));
}

#[test]
fn sample_rejects_bad_config() {
    let out = etquant(&["sample", "--n", "5", "--beta", "0,0", "--steps", "0", "--out", "/dev/null"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("steps"));
}

#[test]
fn figure_experiment_report() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("fig2.json");
    let o = etquant(&["sample", "--figure", "fig2", "--steps", "3000", "--seed", "4", "--out", path_str(&out)]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let v: Value = serde_json::from_str(&std::fs::read_to_string(&out).unwrap()).unwrap();
    assert_eq!(v["mode_check"]["r_star"], 2);
    assert_eq!(v["chains"].as_array().unwrap().len(), 7);
}

#[test]
fn enumerate_then_family_from_table() {
    let dir = tempfile::tempdir().unwrap();
    let table = dir.path().join("s5.csv");
    assert!(etquant(&["enumerate", "-n", "5", "--out", path_str(&table)]).status.success());
    let from_table = json_ok(&["family", "-n", "5", "--beta", "0.5,-1", "--table", path_str(&table)]);
    let on_the_fly = json_ok(&["family", "-n", "5", "--beta", "0.5,-1"]);
    assert_eq!(from_table, on_the_fly);
    let total: f64 = from_table["distribution"].as_array().unwrap().iter().map(|e| e["prob"].as_f64().unwrap()).sum();
    assert!((total - 1.0).abs() < 1e-12);
    assert_eq!(etquant(&["family", "-n", "6", "--beta", "0,0", "--table", path_str(&table)]).status.code(), Some(1));
    assert_eq!(etquant(&["enumerate", "-n", "8", "--out", path_str(&table)]).status.code(), Some(1));
}

#[test]
fn family_kinds() {
    let v = json_ok(&["family", "-n", "6", "--beta", "1,-1", "--kind", "edge-complete"]);
    let probs: Vec<f64> = v["distribution"].as_array().unwrap().iter().map(|e| e["prob"].as_f64().unwrap()).collect();
    assert!((probs[1] - 10f64.exp() / (1.0 + 10f64.exp())).abs() <= 1e-15);
    let v = json_ok(&["family", "-n", "6", "--beta", "0,0", "--kind", "two-point", "--k", "1"]);
    assert_eq!(v["counts"], serde_json::json!(["10", "15"]));
    let v = json_ok(&["family", "-n", "6", "--beta", "1,1", "--closure", "1,-3/4", "--radii", "5,40"]);
    let steps = v["closure"].as_array().unwrap();
    assert_eq!(steps.len(), 2);
    assert!(steps[1]["tv"].as_f64().unwrap() < 2.33e-8);
}

#[test]
fn mode_check_and_cones() {
    for (fig, r) in [("fig4", 4), ("fig2", 2), ("fig3_1", 3), ("fig3_2", 3)] {
        assert_eq!(json_ok(&["mode-check", "--figure", fig])["r_star"], r);
    }
    assert_eq!(json_ok(&["mode-check", "--beta", "80,-40"])["r_star"], 4);
    let cones = json_ok(&["cones", "--k-max", "3"]);
    assert_eq!(cones.as_array().unwrap().len(), 4);
    assert_eq!(cones[2]["apex"], serde_json::json!([2.0 / 3.0, 2.0 / 9.0]));
}

#[test]
fn verify_geometry_suite() {
    let out = etquant(&["verify", "--suite", "geometry"]);
    assert!(out.status.success());
    let v: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["suite"], "geometry");
    assert_eq!(v["passed"], true);
    assert!(v["checks"].as_array().unwrap().iter().all(|c| c["passed"] == true));
}

#[test]
fn outputs_are_byte_deterministic() {
    let a = etquant(&["classify", "--direction", "2,-1.5", "--beta", "0,0"]).stdout;
    let b = etquant(&["classify", "--direction", "2,-1.5", "--beta", "0,0"]).stdout;
    assert_eq!(a, b);
    let a = etquant(&["family", "-n", "5", "--beta", "0.3,-0.2"]).stdout;
    let b = etquant(&["family", "-n", "5", "--beta", "0.3,-0.2"]).stdout;
    assert_eq!(a, b);
}
