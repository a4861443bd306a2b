use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::{Command, Output, Stdio};

use momentcut::polytope::io::parse_polytope;

fn data(name: &str) -> String {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../data").join(name).to_string_lossy().into_owned()
}

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_momentcut")).args(args).output().expect("binary runs")
}

fn run_stdin(args: &[&str], input: &str) -> Output {
    let mut child = Command::new(env!("CARGO_BIN_EXE_momentcut"))
        .args(args)
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .stderr(Stdio::piped())
        .spawn()
        .expect("binary runs");
    child.stdin.take().unwrap().write_all(input.as_bytes()).unwrap();
    child.wait_with_output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn temp(name: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("momentcut-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    dir.join(name)
}

#[test]
fn validate_square() {
    let o = run(&["validate", "--in", &data("square.json")]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o).trim(), "valid");
}

#[test]
fn invalid_polytope_exits_1() {
    let bad = r#"{"dim": 2, "facets": [{"normal": [1, 0], "offset": "1", "label": 1}]}"#;
    let o = run_stdin(&["validate"], bad);
    assert_eq!(o.status.code(), Some(1));
    assert!(stdout(&o).starts_with("invalid"));
}

#[test]
fn reduce_at_vertex_level_exits_2() {
    let o = run(&["reduce", "--level", "0", "--in", &data("square.json")]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("not regular"));
}

#[test]
fn decimal_flag_is_a_usage_error() {
    let o = run(&["cut", "--level", "0.5", "--in", &data("square.json")]);
    assert_eq!(o.status.code(), Some(1));
    let err = String::from_utf8_lossy(&o.stderr);
    assert!(err.contains("--level") && err.contains("1/2"), "{err}");
}

#[test]
fn unknown_flag_is_a_usage_error() {
    let o = run(&["dh", "--bogus"]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn reduce_reports_stabilizers() {
    let o = run(&["reduce", "--level", "1/2", "--in", &data("pex2.json"), "--json"]);
    assert_eq!(o.status.code(), Some(0));
    let p = parse_polytope(&stdout(&o)).unwrap();
    assert_eq!(p.dim(), 1);
    let report: serde_json::Value = serde_json::from_slice(&o.stderr).unwrap();
    let orders: Vec<&str> =
        report["stabilizers"].as_array().unwrap().iter().map(|s| s["order"]["finite"].as_str().unwrap()).collect();
    assert_eq!(orders, ["2", "2"]);
}

#[test]
fn pipeline_composes_through_stdin() {
    let cut = run(&["cut", "--level", "1/2", "--in", &data("square.json")]);
    assert_eq!(cut.status.code(), Some(0));
    let rev = run_stdin(&["reverse"], &stdout(&cut));
    let back = run_stdin(&["reverse"], &stdout(&rev));
    let a = parse_polytope(&stdout(&cut)).unwrap();
    let b = parse_polytope(&stdout(&back)).unwrap();
    assert!(a.canonical_equal(&b));
    assert_eq!(stdout(&cut), stdout(&back));
}

#[test]
fn outputs_are_byte_identical() {
    let args = ["add-fixed-points", "--eps", "1/4", "--in", &data("pex2.json"), "--json"];
    let a = run(&args);
    let b = run(&args);
    assert_eq!(a.stdout, b.stdout);
    assert_eq!(a.stderr, b.stderr);
    let lm = ["local-model", "cut-identity", "--seed", "3", "--trials", "50"];
    assert_eq!(run(&lm).stdout, run(&lm).stdout);
}

#[test]
fn facets_are_written_sorted() {
    let o = run(&["add-fixed-points", "--eps", "1/4", "--in", &data("pex2.json")]);
    let p = parse_polytope(&stdout(&o)).unwrap();
    let facets = p.facets().to_vec();
    let mut sorted = facets.clone();
    sorted.sort();
    assert_eq!(facets, sorted);
}

#[test]
fn blowup_ledger_chains() {
    let first = temp("first.json");
    let ledger = temp("ledger.json");
    let o = run(&[
        "blowup",
        "--vertex-index",
        "0",
        "--depth",
        "1/4",
        "--in",
        &data("square.json"),
        "--out",
        first.to_str().unwrap(),
        "--ledger-out",
        ledger.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let info = run(&["info", "--in", first.to_str().unwrap(), "--json"]);
    let info: serde_json::Value = serde_json::from_slice(&info.stdout).unwrap();
    let last = info["vertices"].as_array().unwrap().len() - 1;
    let o = run(&[
        "blowup",
        "--vertex-index",
        &last.to_string(),
        "--depth",
        "1/8",
        "--in",
        first.to_str().unwrap(),
        "--ledger-in",
        ledger.to_str().unwrap(),
        "--ledger-out",
        ledger.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let l: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&ledger).unwrap()).unwrap();
    let terms = l["terms"].as_array().unwrap();
    assert_eq!(terms.len(), 2);
    let p = parse_polytope(&stdout(&o)).unwrap();
    for t in terms {
        let f = p.facet(t["facet"].as_u64().unwrap() as usize);
        assert_eq!(f.normal.iter().filter(|x| **x != 0.into()).count(), 2, "exceptional facets are diagonal");
    }
}

#[test]
fn blowup_vertex_out_of_range_exits_2() {
    let o = run(&["blowup", "--vertex-index", "9", "--depth", "1/4", "--in", &data("square.json")]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn dh_csv_and_reports() {
    let csv = temp("dh.csv");
    let o = run(&[
        "dh",
        "--in",
        &data("delta3.json"),
        "--csv",
        csv.to_str().unwrap(),
        "--samples",
        "5",
        "--check-log-concavity",
        "--local-minima",
    ]);
    assert_eq!(o.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["walls"], serde_json::json!(["-1", "0", "1"]));
    assert_eq!(v["log_concavity"]["log_concave"], true);
    assert_eq!(v["strict_local_minima"], serde_json::json!([]));
    let text = std::fs::read_to_string(&csv).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "s,mu");
    assert_eq!(lines.len(), 6);
    assert!(lines[1..].iter().all(|l| !l.contains('.')));
}

#[test]
fn wall_check_default_window() {
    let o = run(&["wall-check", "--wall", "0", "--in", &data("delta3.json")]);
    assert_eq!(o.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["window"], "1");
    assert_eq!(v["verified"], true);
}

#[test]
fn wall_check_off_a_wall_exits_2() {
    let o = run(&["wall-check", "--wall", "1/3", "--window", "1/8", "--in", &data("delta3.json")]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn info_lists_classes() {
    let o = run(&["info", "--in", &data("pex2.json"), "--json"]);
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    let kinds: Vec<&str> = v["vertices"].as_array().unwrap().iter().map(|x| x["kind"].as_str().unwrap()).collect();
    assert_eq!(kinds, ["other_orbifold", "z2_singular", "z2_singular"]);
    assert_eq!(v["fixed_components"].as_array().unwrap().len(), 2);
}

#[test]
fn compactify_half_strip() {
    let strip = r#"{"dim": 2, "facets": [
        {"normal": [-1, 0], "offset": "0", "label": 1},
        {"normal": [0, -1], "offset": "0", "label": 1},
        {"normal": [0, 1], "offset": "1", "label": 1}]}"#;
    let o = run_stdin(&["compactify", "--min", "1", "--max", "3"], strip);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let p = parse_polytope(&stdout(&o)).unwrap();
    assert_eq!(p.volume().unwrap(), momentcut::lattice::rat(2, 1));
}

#[test]
fn local_model_reports() {
    for check in ["monotone", "solve", "membership", "npm", "psh", "cut-identity", "blowup-potential"] {
        let o = run(&["local-model", check, "--trials", "40", "--seed", "1"]);
        assert_eq!(o.status.code(), Some(0), "{check}: {}", String::from_utf8_lossy(&o.stderr));
        let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
        assert_eq!(v["failed"], 0, "{check}");
        assert_eq!(v["trials"], 40);
    }
    let o = run(&["local-model", "npm", "--weights", "-2,1,3", "--trials", "40"]);
    assert_eq!(o.status.code(), Some(0));
    let o = run(&["local-model", "convexity", "--trials", "30"]);
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["report"]["re_entries"], 0);
    assert_eq!(o.status.code(), Some(0));
}

#[test]
fn local_model_bad_radii_exit_2() {
    let o = run(&["local-model", "convexity", "--eps", "0.5", "--eps-prime", "0.6"]);
    assert_eq!(o.status.code(), Some(2));
}
