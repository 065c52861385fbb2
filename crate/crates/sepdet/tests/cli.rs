use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use sepdet::descriptor::{parse_json, FunctionDescriptor, ProblemDescriptor, SpaceDescriptor};
use sepdet_core::harness::generate::{random_finite_metric, MetricMethod};
use sepdet_core::{ExtReal, MetricSpace, PointId};
use serde_json::Value;

fn sepdet(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_sepdet")).args(args).output().unwrap()
}

fn write(dir: &Path, name: &str, text: &str) -> PathBuf {
    let path = dir.join(name);
    std::fs::write(&path, text).unwrap();
    path
}

fn line(dir: &Path, xs: &[f64]) -> PathBuf {
    let points: Vec<Value> =
        xs.iter().enumerate().map(|(i, x)| serde_json::json!({"label": format!("p{i}"), "coords": [x]})).collect();
    let text = serde_json::json!({"kind": "finite", "metric": "euclidean", "points": points}).to_string();
    write(dir, &format!("line{}.json", xs.len()), &text)
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).unwrap()
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn asymmetric_matrix_is_rejected_naming_the_pair() {
    let dir = tempfile::tempdir().unwrap();
    let space = write(
        dir.path(),
        "asym.json",
        r#"{"kind":"finite","metric":"matrix","points":["a","b","c"],"matrix":[[0,1,2],[1,0,1],[2,1.5,0]]}"#,
    );
    let out = sepdet(&["validate", "--space", s(&space)]);
    assert_eq!(out.status.code(), Some(2));
    let err = String::from_utf8(out.stderr).unwrap();
    assert!(err.contains("(b, c)"), "{err}");
}

#[test]
fn malformed_inputs_exit_with_two_and_name_the_field() {
    let dir = tempfile::tempdir().unwrap();
    let bad = write(dir.path(), "bad.json", r#"{"kind":"finite","metric":"euclidan","points":[]}"#);
    let out = sepdet(&["validate", "--space", s(&bad)]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8(out.stderr).unwrap().contains("`metric`"));

    let space = line(dir.path(), &[0.0, 1.0, 3.0]);
    let out = sepdet(&["validate", "--space", s(&space), "--fn", "cosine"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8(out.stderr).unwrap().contains("unknown function name \"cosine\""));

    let short = write(dir.path(), "short.json", r#"{"values": [1, 2]}"#);
    let out = sepdet(&["validate", "--space", s(&space), "--fn", s(&short)]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8(out.stderr).unwrap().contains("fn.values"));

    assert_eq!(sepdet(&["suite", "--name", "thm-9.9"]).status.code(), Some(2));
    assert_eq!(sepdet(&["reduce", "--space", s(&space), "--fn", "coord"]).status.code(), Some(2));
    assert_eq!(sepdet(&["slope", "--space", s(&space), "--fn", "coord", "--param", "1"]).status.code(), Some(2));
}

#[test]
fn tiny_sup_suite_passes() {
    let dir = tempfile::tempdir().unwrap();
    let report = dir.path().join("report.json");
    let out =
        sepdet(&["suite", "--name", "thm-2.1", "--n", "5", "--instances", "3", "--seed", "1", "--out", s(&report)]);
    assert_eq!(out.status.code(), Some(0));
    let v: Value = serde_json::from_str(&std::fs::read_to_string(&report).unwrap()).unwrap();
    assert_eq!(v["instances"], 3);
    assert_eq!(v["passed"], 3);
    assert_eq!(v["failed"], 0);
    assert!(String::from_utf8(out.stdout).unwrap().starts_with("suite"));
}

#[test]
fn suite_reports_are_byte_identical() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a.json");
    let b = dir.path().join("b.json");
    let args = ["suite", "--name", "thm-4.2", "--n", "6,11", "--instances", "6", "--seed", "3"];
    assert_eq!(sepdet(&[&args[..], &["--jobs", "1", "--out", s(&a)]].concat()).status.code(), Some(0));
    assert_eq!(sepdet(&[&args[..], &["--jobs", "4", "--out", s(&b)]].concat()).status.code(), Some(0));
    assert_eq!(std::fs::read(a).unwrap(), std::fs::read(b).unwrap());
}

#[test]
fn failing_suite_exits_with_one_and_still_writes_the_report() {
    let dir = tempfile::tempdir().unwrap();
    let report = dir.path().join("report.json");
    let out = sepdet(&[
        "suite",
        "--name",
        "thm-2.1",
        "--n",
        "8,12",
        "--instances",
        "10",
        "--eps",
        "100",
        "--out",
        s(&report),
    ]);
    assert_eq!(out.status.code(), Some(1));
    let v: Value = serde_json::from_str(&std::fs::read_to_string(&report).unwrap()).unwrap();
    assert!(v["failed"].as_u64().unwrap() > 0);
    assert!(v["failures"][0]["instance"]["space"].is_object());
}

#[test]
fn slope_on_the_three_point_line() {
    let dir = tempfile::tempdir().unwrap();
    let space = line(dir.path(), &[0.0, 1.0, 3.0]);
    let out = sepdet(&["slope", "--space", s(&space), "--fn", "coord", "--x", "p0"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert_eq!(v["values"][0]["full"], 0.0);
    assert_eq!(v["values"][0]["restricted"], 0.0);
    let out = sepdet(&["slope", "--space", s(&space), "--fn", "coord", "--x", "p1"]);
    assert_eq!(json(&out)["values"][0]["full"], 1.0);
    // Shell (0.5, 3.5) around p1 holds p0 and p2: sup of (1 − 0)/1 and 0.
    let out = sepdet(&["slope", "--space", s(&space), "--fn", "coord", "--x", "p1", "--param", "0.5,3.5"]);
    assert_eq!(json(&out)["values"][0]["full"], 1.0);
}

#[test]
fn lip_of_a_doubled_coordinate() {
    let dir = tempfile::tempdir().unwrap();
    let space = line(dir.path(), &[0.0, 1.0, 3.0, 4.0]);
    let f = write(dir.path(), "f.json", r#"{"shape": "linear", "slope": 2, "intercept": 0}"#);
    let out = sepdet(&["lip", "--space", s(&space), "--fn", s(&f)]);
    assert_eq!(out.status.code(), Some(0));
    for value in json(&out)["values"].as_array().unwrap() {
        assert_eq!(value["full"], 2.0);
        assert_eq!(value["agree"], true);
    }
    let out = sepdet(&["lip", "--space", s(&space), "--fn", s(&f), "--x", "p0", "--param", "0.5"]);
    assert_eq!(json(&out)["values"][0]["full"], 0.0);
}

#[test]
fn check_passes_on_closures_and_fails_with_loose_selection() {
    let dir = tempfile::tempdir().unwrap();
    let space = line(dir.path(), &[0.0, 1.0, 2.5, 4.0, 4.5, 7.0, 9.0, 12.0]);
    let f = write(dir.path(), "f.json", r#"[3, -1, 2, "+inf", 0.5, 4, -2, 1]"#);
    for problem in ["ball-pairs", "torus-slope", "punctured-ball"] {
        for mode in ["sup", "inf"] {
            let out = sepdet(&[
                "check",
                "--space",
                s(&space),
                "--fn",
                s(&f),
                "--problem",
                problem,
                "--mode",
                mode,
                "--x",
                "p0",
            ]);
            assert_eq!(out.status.code(), Some(0), "{problem} {mode}");
            let v = json(&out);
            assert_eq!(v["summary"]["failed"], 0);
            assert!(v["closure"]["fixed_point"].as_bool().unwrap());
        }
    }
    let out = sepdet(&[
        "check",
        "--space",
        s(&space),
        "--fn",
        s(&f),
        "--problem",
        "punctured-ball",
        "--x",
        "p0",
        "--eps",
        "1000",
    ]);
    assert_eq!(out.status.code(), Some(1));
    assert!(json(&out)["summary"]["failed"].as_u64().unwrap() > 0);
}

#[test]
fn pinned_parameters_close_and_check() {
    let dir = tempfile::tempdir().unwrap();
    let space = line(dir.path(), &[0.0, 1.0, 2.5, 4.0, 4.5, 7.0]);
    let out = sepdet(&["reduce", "--space", s(&space), "--fn", "square", "--x", "p5", "--param", "1.6"]);
    assert_eq!(out.status.code(), Some(0));
    // Nothing lies within 1.6 of 7, so the seed is already closed.
    assert_eq!(json(&out)["closure"]["points"], serde_json::json!(["p5"]));
    // Within 3 of 7 lies 4.5, and around 4.5 the steepest pair of squares is
    // still (4.5, 7): (49 − 20.25) / 2.5 beats 8.5, 6.5, 7 and 9.5.
    let out = sepdet(&["reduce", "--space", s(&space), "--fn", "square", "--x", "p5", "--param", "3"]);
    assert_eq!(json(&out)["closure"]["points"], serde_json::json!(["p4", "p5"]));
    let out = sepdet(&[
        "check",
        "--space",
        s(&space),
        "--fn",
        "square",
        "--problem",
        "torus-slope",
        "--x",
        "p5",
        "--param",
        "0.75,3",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let out = sepdet(&["check", "--space", s(&space), "--fn", "square", "--x", "p5", "--q-density", "1"]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(json(&out)["problem"]["truncation"]["rule"], "dyadic");
}

#[test]
fn descriptors_roundtrip() {
    for method in [MetricMethod::Euclidean, MetricMethod::ShortestPath] {
        let space = random_finite_metric(12, 5, method);
        let text = serde_json::to_string(&SpaceDescriptor::from_space(&space)).unwrap();
        let back = parse_json::<SpaceDescriptor>("space", &text).unwrap().build().unwrap();
        for a in 0..12 {
            for b in 0..12 {
                assert_eq!(back.raw_distance(PointId(a), PointId(b)), space.raw_distance(PointId(a), PointId(b)));
            }
            assert_eq!(back.label(PointId(a)), space.label(PointId(a)));
        }
    }
    let f: FunctionDescriptor = parse_json("fn", r#"{"values": [1, "+inf", -0.5]}"#).unwrap();
    assert_eq!(
        f,
        FunctionDescriptor::Table { values: vec![ExtReal::Finite(1.0), ExtReal::PosInf, ExtReal::Finite(-0.5)] }
    );
    let p: ProblemDescriptor = parse_json("problem", r#"{"family": "torus-slope", "levels": "function"}"#).unwrap();
    assert_eq!(p.family.name(), "torus-slope");
    assert!(parse_json::<ProblemDescriptor>("problem", r#"{"family": "torus"}"#).is_err());
}
