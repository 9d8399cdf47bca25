use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use conefix::cli::{builtin, parse_instance, ParseError, BUILTIN_NAMES};
use conefix::cone_space::{ConeFamily, Point};
use conefix::contractions::{ClassSpec, MapFamily};

fn fixture(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("fixtures")
        .join(format!("{name}.json"))
}

fn fixture_text(name: &str) -> String {
    std::fs::read_to_string(fixture(name)).unwrap()
}

fn conefix(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_conefix"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn instance_json(name: &str) -> serde_json::Value {
    serde_json::from_str(&fixture_text(name)).unwrap()
}

fn problems_of(v: &serde_json::Value) -> Vec<String> {
    match parse_instance(&v.to_string()) {
        Err(ParseError::Invalid(p)) => p,
        other => panic!("expected accumulated problems, got {other:?}"),
    }
}

#[test]
fn fixtures_match_builtins_and_round_trip() {
    for name in BUILTIN_NAMES {
        let inst = builtin(name).unwrap();
        assert_eq!(inst.emit(), fixture_text(name), "{name} fixture is stale");
        let parsed = parse_instance(&fixture_text(name)).unwrap();
        assert_eq!(parsed, inst);
        assert_eq!(parse_instance(&parsed.emit()).unwrap(), parsed);
    }
}

#[test]
fn instance_a_parses_to_the_halving_map() {
    let inst = parse_instance(&fixture_text("instance_a")).unwrap();
    assert_eq!(inst.space.cone().dimension(), 2);
    assert_eq!(inst.space.cone().family(), &ConeFamily::Orthant);
    assert_eq!(inst.maps.t, MapFamily::Identity);
    assert_eq!(
        inst.maps.s,
        MapFamily::Affine {
            alpha: 0.5,
            beta: 0.0
        }
    );
    assert_eq!(inst.class, Some(ClassSpec::Tb { a: 0.5 }));
    let d = inst
        .space
        .distance(&Point::scalar(0.25), &Point::scalar(1.0))
        .unwrap();
    assert_eq!(d.coords(), &[0.75, 1.5]);
}

#[test]
fn out_of_range_constant_is_rejected() {
    let mut v = instance_json("instance_a");
    v["class"]["a"] = 1.0.into();
    assert_eq!(problems_of(&v), vec!["a must be in [0,1)".to_string()]);
}

#[test]
fn problems_accumulate() {
    let mut v = instance_json("instance_a");
    v["cone"]["family"] = "polyhedral".into();
    v["cone"]["matrix"] = serde_json::json!([[1.0, 0.0, 0.0], [0.0, 1.0, 0.0]]);
    v["class"] = serde_json::json!({ "class": "tk", "b": 0.5 });
    v["run"]["stopping"]["epsilon"] = (-1.0).into();
    let p = problems_of(&v);
    assert!(p.len() >= 3, "{p:?}");
    assert!(p.iter().any(|m| m.contains("matrix")), "{p:?}");
    assert!(p.iter().any(|m| m == "b must be in [0,1/2)"), "{p:?}");
    assert!(p.iter().any(|m| m.contains("epsilon")), "{p:?}");
}

#[test]
fn unknown_keys_are_rejected() {
    let mut v = instance_json("instance_c");
    v["cone"]["colour"] = "red".into();
    assert!(matches!(
        parse_instance(&v.to_string()),
        Err(ParseError::Syntax { .. })
    ));
}

#[test]
fn syntax_errors_carry_a_position() {
    let text = fixture_text("instance_b").replacen("\"grid\": 101", "\"grid\": 101,,", 1);
    match parse_instance(&text) {
        Err(ParseError::Syntax { line, column, .. }) => {
            let bad = text.lines().nth(line - 1).unwrap();
            assert!(bad.contains("grid"), "line {line}: {bad}");
            assert!(column > 0);
        }
        other => panic!("{other:?}"),
    }
}

#[test]
fn exit_codes() {
    let a = fixture("instance_a");
    let a = a.to_str().unwrap();
    let d = fixture("instance_d");
    let d = d.to_str().unwrap();
    for cmd in ["verify", "solve", "fit"] {
        let mut args = vec![cmd, "--instance", a];
        if cmd == "fit" {
            args.extend(["--class", "tb"]);
        }
        let out = conefix(&args);
        assert_eq!(out.status.code(), Some(0), "{cmd}: {out:?}");
    }
    assert_eq!(conefix(&["oracle", "--instance", d]).status.code(), Some(0));
    // the oracle needs a finite carrier
    assert_eq!(conefix(&["oracle", "--instance", a]).status.code(), Some(2));
    assert_eq!(
        conefix(&["verify", "--instance", "/no/such/file.json"])
            .status
            .code(),
        Some(2)
    );
    assert_eq!(conefix(&["frobnicate"]).status.code(), Some(2));
}

#[test]
fn violated_claim_exits_one() {
    let dir = tempfile::tempdir().unwrap();
    let mut v = instance_json("instance_a");
    v["class"]["a"] = 0.25.into();
    let path = dir.path().join("tight.json");
    std::fs::write(&path, v.to_string()).unwrap();
    let out = conefix(&["verify", "--instance", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
    let report: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(report["passed"], false);
}

#[test]
fn solve_writes_the_trace_and_is_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let a = fixture("instance_a");
    let run = |tag: &str, threads: &str| {
        let trace = dir.path().join(format!("{tag}.csv"));
        let report = dir.path().join(format!("{tag}.json"));
        let out = Command::new(env!("CARGO_BIN_EXE_conefix"))
            .env("CONEFIX_THREADS", threads)
            .args(["solve", "--instance"])
            .arg(&a)
            .arg("--out")
            .arg(&trace)
            .arg("--report")
            .arg(&report)
            .output()
            .unwrap();
        assert_eq!(out.status.code(), Some(0), "{out:?}");
        (
            std::fs::read(&trace).unwrap(),
            std::fs::read(&report).unwrap(),
        )
    };
    let first = run("one", "1");
    let second = run("two", "4");
    assert_eq!(first, second);
    let csv = String::from_utf8(first.0).unwrap();
    let mut lines = csv.lines();
    assert_eq!(
        lines.next(),
        Some("n,x_n,gap_vector,gap_norm,cumulative_bound")
    );
    assert_eq!(lines.count(), 41);
}

#[test]
fn json_trace_round_trips_floats() {
    let dir = tempfile::tempdir().unwrap();
    let trace = dir.path().join("trace.json");
    let out = Command::new(env!("CARGO_BIN_EXE_conefix"))
        .args(["solve", "--format", "json", "--instance"])
        .arg(fixture("instance_b"))
        .arg("--out")
        .arg(&trace)
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0), "{out:?}");
    let v: serde_json::Value = serde_json::from_slice(&std::fs::read(&trace).unwrap()).unwrap();
    let rows = v["rows"].as_array().unwrap();
    // x_n = 4⁻ⁿ is exact in binary, so every parsed value must be too
    for (n, row) in rows.iter().enumerate().take(20) {
        let x = row["x_n"][0].as_f64().unwrap();
        assert_eq!(x, 0.25f64.powi(n as i32), "row {n}");
    }
}

#[test]
fn fit_with_pinned_delta() {
    let out = conefix(&[
        "fit",
        "--instance",
        fixture("instance_c").to_str().unwrap(),
        "--class",
        "tw",
        "--pin",
        "0.9",
    ]);
    assert_eq!(out.status.code(), Some(0), "{out:?}");
    let report: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    let text = report.to_string();
    assert!(text.contains("\"delta\":0.9"), "{text}");
}
