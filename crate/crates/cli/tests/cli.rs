use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use mtstab_cli::matrix::{MatrixResult, PairStatus};
use mtstab_core::io::{field_to_json, TreeBundle, TreePairFile};
use mtstab_core::stability::{counterexample_fields, CounterexampleFamily};
use mtstab_core::{AbstractMergeTree, MetricId, ScalarField};
use tempfile::TempDir;

fn mtstab(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_mtstab")).args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

fn write(dir: &Path, name: &str, text: &str) -> PathBuf {
    let p = dir.join(name);
    std::fs::write(&p, text).unwrap();
    p
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

const GRID: &str = r#"{"rows": 3, "cols": 3, "values": [0.1, 0.9, 0.3, 0.5, 0.0, 0.7, 0.8, 0.2, 0.6]}"#;

fn grid_values(shift: f64) -> String {
    let v: Vec<f64> = [0.1, 0.9, 0.3, 0.5, 0.0, 0.7, 0.8, 0.2, 0.6].iter().map(|x| x + shift).collect();
    serde_json::json!({"rows": 3, "cols": 3, "values": v}).to_string()
}

#[test]
fn build_tree_prints_all_three_dumps() {
    let d = TempDir::new().unwrap();
    let f = write(d.path(), "f.json", GRID);
    let o = mtstab(&["build-tree", s(&f)]);
    assert!(o.status.success(), "{}", stderr(&o));
    let b: TreeBundle = serde_json::from_str(&stdout(&o)).unwrap();
    assert!(!b.tree.nodes.is_empty());
    assert_eq!(b.bdt.branches.len(), b.obdt.branches.len());
    let leaves = b.tree.nodes.iter().filter(|n| !b.tree.nodes.iter().any(|m| m.parent == Some(n.vertex))).count();
    assert_eq!(b.bdt.branches.len(), leaves);
}

#[test]
fn exit_codes() {
    let d = TempDir::new().unwrap();
    let dup = write(d.path(), "dup.json", r#"{"values": [0, 1, 1], "edges": [[0, 1], [1, 2]]}"#);
    let o = mtstab(&["build-tree", s(&dup)]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("share the value"), "{}", stderr(&o));

    let o = mtstab(&["build-tree", s(&d.path().join("missing.json"))]);
    assert_eq!(o.status.code(), Some(1));

    let bad = write(d.path(), "bad.json", "{\"values\": [0, 1,\n");
    let o = mtstab(&["build-tree", s(&bad)]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("line 2"), "{}", stderr(&o));

    assert_eq!(mtstab_cli::CliError::from(mtstab_core::Error::Guard { what: "x", count: 2, limit: 1 }).code(), 3);
}

#[test]
fn identical_fields_give_a_zero_matrix() {
    let d = TempDir::new().unwrap();
    write(d.path(), "a.json", GRID);
    write(d.path(), "b.json", GRID);
    let o = mtstab(&["matrix", s(d.path()), "--metric", "w"]);
    assert!(o.status.success(), "{}", stderr(&o));
    assert_eq!(stdout(&o), "a,b\n0,0\n0,0\n");
}

#[test]
fn near_identical_fields_form_a_block() {
    let d = TempDir::new().unwrap();
    write(d.path(), "a.json", &grid_values(0.0));
    write(d.path(), "b.json", &grid_values(0.01));
    write(
        d.path(),
        "c.json",
        r#"{"rows": 3, "cols": 3, "values": [0.0, 3.0, 0.5, 2.0, 0.2, 2.5, 1.0, 0.3, 0.4]}"#,
    );
    let json = d.path().join("m.json");
    let o = mtstab(&["matrix", s(d.path()), "--metric", "l", "--json", s(&json)]);
    assert!(o.status.success(), "{}", stderr(&o));
    let m: MatrixResult = serde_json::from_str(&std::fs::read_to_string(&json).unwrap()).unwrap();
    assert_eq!(m.members, ["a", "b", "c"]);
    let v = |i: usize, j: usize| m.values[i][j].unwrap();
    // a shift leaves every edge length alone
    assert!(v(0, 1) < 1e-9);
    assert!(v(0, 2) > 1.0 && v(1, 2) > 1.0);
    for i in 0..3 {
        assert_eq!(v(i, i), 0.0);
        for j in 0..3 {
            assert_eq!(m.values[i][j], m.values[j][i]);
        }
    }
}

#[test]
fn oversized_pairs_are_skipped() {
    let d = TempDir::new().unwrap();
    write(d.path(), "a.json", GRID);
    write(d.path(), "b.json", &grid_values(0.5));
    let csv = d.path().join("m.csv");
    let o = mtstab(&["matrix", s(d.path()), "--metric", "e", "--deform-edges", "1", "--csv", s(&csv)]);
    assert!(o.status.success(), "{}", stderr(&o));
    assert!(stderr(&o).contains("1 pair(s) skipped"));
    let m = MatrixResult::from_csv(MetricId::E, &std::fs::read_to_string(&csv).unwrap()).unwrap();
    assert_eq!(m.status[0][1], PairStatus::GuardSkipped);
    assert_eq!(m.values[0][1], None);
    assert_eq!(m.values[0][0], Some(0.0));
}

#[test]
fn empty_directory_is_rejected() {
    let d = TempDir::new().unwrap();
    let o = mtstab(&["matrix", s(d.path()), "--metric", "e"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn csv_round_trip() {
    let d = TempDir::new().unwrap();
    write(d.path(), "a.json", &grid_values(0.0));
    write(d.path(), "b.json", &grid_values(0.3));
    write(d.path(), "c.json", r#"{"values": [0.0, 2.718281828459045, 1.4142135623730951], "edges": [[0, 2], [2, 1]]}"#);
    let o = mtstab(&["matrix", s(d.path()), "--metric", "w"]);
    assert!(o.status.success(), "{}", stderr(&o));
    let text = stdout(&o);
    let m = MatrixResult::from_csv(MetricId::W, &text).unwrap();
    assert_eq!(m.to_csv(), text);
    let again = MatrixResult::from_csv(MetricId::W, &m.to_csv()).unwrap();
    assert_eq!(again, m);
    // bit-stable across runs
    assert_eq!(stdout(&mtstab(&["matrix", s(d.path()), "--metric", "w"])), text);
}

fn field_pair(dir: &Path, fam: CounterexampleFamily) -> (PathBuf, PathBuf) {
    let (f, g) = counterexample_fields(fam, 10.0, 0.1).unwrap();
    (
        write(dir, &format!("{fam}-a.json"), &field_to_json(&f)),
        write(dir, &format!("{fam}-b.json"), &field_to_json(&g)),
    )
}

#[test]
fn classify_names_the_class() {
    let d = TempDir::new().unwrap();
    for (fam, want) in [
        (CounterexampleFamily::EdgeSplit, "EdgeSplit"),
        (CounterexampleFamily::Vertical, "VerticalSwap"),
        (CounterexampleFamily::Horizontal, "UnorderedHorizontalSwap"),
    ] {
        let (a, b) = field_pair(d.path(), fam);
        let o = mtstab(&["classify", "--field-a", s(&a), "--field-b", s(&b)]);
        assert!(o.status.success(), "{}", stderr(&o));
        let out = stdout(&o);
        assert_eq!(out.lines().next(), Some(want), "{out}");
        assert!(out.contains("shape consistent with class: true"), "{out}");
    }
    let (a, _) = field_pair(d.path(), CounterexampleFamily::EdgeSplit);
    let o = mtstab(&["classify", "--field-a", s(&a), "--field-b", s(&a), "--json"]);
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["class"], "SimpleChange");
}

#[test]
fn perturb_modes() {
    let d = TempDir::new().unwrap();
    let f = write(d.path(), "f.json", r#"{"values": [0, 3, 1, 2], "edges": [[0, 2], [2, 1], [2, 3]]}"#);
    let o = mtstab(&["perturb", "--field", s(&f), "--vertex", "3"]);
    assert!(o.status.success(), "{}", stderr(&o));
    let list: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert!(!list.as_array().unwrap().is_empty());

    let o = mtstab(&["perturb", "--field", s(&f), "--vertex", "3", "--to", "2.5"]);
    assert!(o.status.success(), "{}", stderr(&o));
    let g: ScalarField = mtstab_core::io::parse_field(&stdout(&o)).unwrap();
    assert_eq!(g.values(), &[0.0, 3.0, 1.0, 2.5]);

    // passes two vertices at once
    let o = mtstab(&["perturb", "--field", s(&f), "--vertex", "0", "--to", "2.5"]);
    assert_eq!(o.status.code(), Some(2));

    let t = write(d.path(), "t.json", r#"{"values": [0, 1.5, 1, 2.5], "edges": [[0, 2], [2, 1], [2, 3]]}"#);
    let o = mtstab(&["perturb", "--field", s(&f), "--target", s(&t)]);
    assert!(o.status.success(), "{}", stderr(&o));
    let seq: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(seq["steps"].as_array().unwrap().len(), 3);
}

#[test]
fn counterexample_round_trips() {
    let o = mtstab(&["counterexample", "--family", "horizontal", "--x", "10", "--eps", "0.1"]);
    assert!(o.status.success(), "{}", stderr(&o));
    let p: TreePairFile = serde_json::from_str(&stdout(&o)).unwrap();
    let (t1, t2): (AbstractMergeTree, AbstractMergeTree) = (p.t1.to_tree().unwrap(), p.t2.to_tree().unwrap());
    assert_eq!((t1.len(), t2.len()), (6, 6));
    let o = mtstab(&["counterexample", "--family", "horizontal", "--x", "0.1", "--eps", "0.1"]);
    assert_eq!(o.status.code(), Some(2));
    let o = mtstab(&["counterexample", "--family", "sideways", "--x", "10", "--eps", "0.1"]);
    assert!(!o.status.success());
}

#[test]
fn stability_run_is_deterministic() {
    let d = TempDir::new().unwrap();
    let run = |name: &str| {
        let out = d.path().join(name);
        let o = mtstab(&[
            "stability-run", "--seed", "5", "--trials", "15", "--grid", "3", "--metrics", "e,w,l", "--eps", "0.05",
            "--out", s(&out),
        ]);
        assert!(o.status.success(), "{}", stderr(&o));
        assert!(stderr(&o).contains("metric"));
        std::fs::read_to_string(out).unwrap()
    };
    let a = run("a.json");
    assert_eq!(a, run("b.json"));
    let v: serde_json::Value = serde_json::from_str(&a).unwrap();
    assert_eq!(v["suite"]["config"]["trials"], 15);
    assert!(v["finite"]["stats"].is_array());
}
