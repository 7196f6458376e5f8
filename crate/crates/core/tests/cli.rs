use std::fs;
use std::process::Command;

use hannerlab::cli::{run, EXIT_FAIL, EXIT_OK, EXIT_USAGE};
use serde_json::Value;

fn call(args: &[&str]) -> (i32, String, String) {
    let mut out = Vec::new();
    let mut err = Vec::new();
    let code = run(std::iter::once("hannerlab").chain(args.iter().copied()), &mut out, &mut err);
    (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
}

fn write_graph(dir: &tempfile::TempDir, name: &str, text: &str) -> String {
    let p = dir.path().join(name);
    fs::write(&p, text).unwrap();
    p.to_str().unwrap().to_string()
}

#[test]
fn build_square_bundle() {
    let (code, out, _) = call(&["build", "--expr", "(I1 +inf I2)"]);
    assert_eq!(code, EXIT_OK);
    let v: Value = serde_json::from_str(&out).unwrap();
    assert_eq!(v["tree"], "(I1 +inf I2)");
    assert_eq!(v["counts"]["vertices"], 4);
    assert_eq!(v["counts"]["facets"], 4);
    assert_eq!(v["vertices"].as_array().unwrap().len(), 4);
    assert_eq!(v["graph"]["edges"].as_array().unwrap().len(), 0);
}

#[test]
fn build_from_graph_gives_the_decomposition() {
    let dir = tempfile::tempdir().unwrap();
    let p = write_graph(&dir, "g.json", r#"{"n": 4, "edges": [[1, 2], [3, 4]]}"#);
    let (code, out, _) = call(&["build", "--graph", &p]);
    assert_eq!(code, EXIT_OK);
    let v: Value = serde_json::from_str(&out).unwrap();
    assert_eq!(v["tree"], "((I1 +1 I2) +inf (I3 +1 I4))");
}

#[test]
fn p4_graph_is_rejected_with_its_path() {
    let dir = tempfile::tempdir().unwrap();
    let p = write_graph(&dir, "p4.json", r#"{"n": 4, "edges": [[1, 2], [2, 3], [3, 4]]}"#);
    let (code, _, err) = call(&["build", "--graph", &p]);
    assert_ne!(code, EXIT_OK);
    assert!(err.contains("induced path 1-2-3-4"), "{err}");
    let (code, out, _) = call(&["graph", "--graph", &p]);
    assert_eq!(code, EXIT_FAIL);
    let v: Value = serde_json::from_str(&out).unwrap();
    assert_eq!(v["p4_free"], false);
}

#[test]
fn verify_cube_and_all_small_trees() {
    let (code, out, _) = call(&["verify", "--expr", "((I1 +inf I2) +inf I3)"]);
    assert_eq!(code, EXIT_OK, "{out}");
    assert_eq!(out.lines().filter(|l| l.starts_with("PASS")).count(), 4);
    let (code, out, _) = call(&["verify", "--trees", "4", "--suite", "all"]);
    assert_eq!(code, EXIT_OK, "{out}");
    assert!(!out.contains("FAIL"));
}

#[test]
fn injected_centroid_fails_equal_volumes_naming_a_flag() {
    let (code, out, _) = call(&["verify", "--expr", "((I1 +inf I2) +inf I3)", "--suite", "equal-volumes", "--inject-bug", "centroid"]);
    assert_eq!(code, EXIT_FAIL);
    let line = out.lines().find(|l| l.starts_with("FAIL")).expect("a failing line");
    assert!(line.contains("equal-volumes") && line.contains("chain ["), "{line}");
}

#[test]
fn dimension_guard() {
    let e = "((I1 +1 I2) +inf ((I3 +1 I4) +inf I5))";
    let (code, _, err) = call(&["experiment", "--expr", e, "--delta", "1/100"]);
    assert_eq!(code, EXIT_USAGE);
    assert!(err.contains("--max-dim"));
    let (code, _, _) = call(&["faces", "--expr", "(I1 +1 I2)", "--max-dim", "1"]);
    assert_eq!(code, EXIT_USAGE);
}

#[test]
fn bad_arguments() {
    assert_eq!(call(&["verify", "--expr", "(I1 +inf I2)", "--suite", "nope"]).0, EXIT_USAGE);
    assert_eq!(call(&["experiment", "--expr", "(I1 +inf I2)", "--delta", "x/y"]).0, EXIT_USAGE);
    assert_eq!(call(&["experiment", "--expr", "(I1 +inf I2)", "--delta", "1/100", "--trials", "0"]).0, EXIT_USAGE);
    assert_eq!(call(&["build", "--expr", "(I1 +inf I1)"]).0, EXIT_USAGE);
    assert_eq!(call(&["--help"]).0, EXIT_OK);
}

#[test]
fn experiment_on_the_cube() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path().to_str().unwrap();
    let (code, out, _) = call(&["experiment", "--expr", "((I1 +inf I2) +inf I3)", "--delta", "1/100", "--trials", "10", "--seed", "4", "--out", d]);
    assert_eq!(code, EXIT_OK, "{out}");
    assert!(out.contains("min_gap ≥ 0: true"), "{out}");
    let csv = fs::read_to_string(dir.path().join("experiment.csv")).unwrap();
    assert_eq!(csv.lines().count(), 11);
}

#[test]
fn zero_delta_gives_zero_gaps() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path().to_str().unwrap();
    let (code, _, _) = call(&["experiment", "--expr", "((I1 +1 I2) +inf I3)", "--delta", "0", "--trials", "3", "--out", d, "--format", "json"]);
    assert_eq!(code, EXIT_OK);
    let v: Value = serde_json::from_str(&fs::read_to_string(dir.path().join("experiment.json")).unwrap()).unwrap();
    for row in v["rows"].as_array().unwrap() {
        assert_eq!(row["gap"], "0/1");
        assert_eq!(row["dx"], "0/1");
    }
}

#[test]
fn ladder_prints_three_rows() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path().to_str().unwrap();
    let (code, out, _) = call(&["experiment", "--expr", "(I1 +inf I2)", "--delta", "1/50", "--trials", "3", "--ladder", "--out", d]);
    assert_eq!(code, EXIT_OK, "{out}");
    let rows: Vec<&str> = out.lines().filter(|l| l.starts_with("1/")).collect();
    assert_eq!(rows.len(), 3, "{out}");
    assert!(rows[0].starts_with("1/50\t") && rows[2].starts_with("1/200\t"));
    for k in 0..3 {
        assert!(dir.path().join(format!("experiment_{k}.csv")).exists());
    }
    assert!(dir.path().join("ladder.txt").exists());
}

#[test]
fn same_seed_gives_identical_files() {
    let bin = env!("CARGO_BIN_EXE_hannerlab");
    let mut texts = Vec::new();
    for _ in 0..2 {
        let dir = tempfile::tempdir().unwrap();
        let st = Command::new(bin)
            .args(["experiment", "--expr", "((I1 +1 I2) +inf I3)", "--delta", "1/64", "--trials", "4", "--seed", "9"])
            .arg("--out")
            .arg(dir.path())
            .env("HANNERLAB_THREADS", "2")
            .output()
            .unwrap();
        assert!(st.status.success());
        texts.push((fs::read(dir.path().join("experiment.csv")).unwrap(), st.stdout));
    }
    assert_eq!(texts[0], texts[1]);
}

#[test]
fn faces_and_flags_reports() {
    let (code, out, _) = call(&["faces", "--expr", "(I1 +1 I2)"]);
    assert_eq!(code, EXIT_OK);
    let v: Value = serde_json::from_str(&out).unwrap();
    assert_eq!(v["f_vector"], serde_json::json!([4, 4]));
    let (code, out, _) = call(&["flags", "--expr", "((I1 +1 I2) +inf I3)"]);
    assert_eq!(code, EXIT_OK);
    let v: Value = serde_json::from_str(&out).unwrap();
    assert_eq!(v["flags"], 48);
    assert_eq!(v["volume_product"], "32/3");
}
