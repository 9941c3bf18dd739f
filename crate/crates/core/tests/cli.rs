// Copyright 2026 The conebound Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.


//! Drives the `conebound` binary and checks the exit-code contract.

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_conebound"))
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn problem(name: &str) -> String {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../problems").join(name).to_string_lossy().into_owned()
}

fn write(dir: &Path, name: &str, text: &str) -> PathBuf {
    let p = dir.join(name);
    std::fs::write(&p, text).unwrap();
    p
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).expect("stdout is JSON")
}

#[test]
fn classify_worked_files() {
    for (file, case) in [("t51.json", "T51"), ("t52iii.json", "T52iii"), ("t53ii.json", "T53ii"), ("t53iii.json", "T53iii")] {
        let out = run(&["classify", "--quiet", "--problem", &problem(file)]);
        assert_eq!(out.status.code(), Some(0), "{file}");
        assert_eq!(json(&out)["case"], case);
    }
}

#[test]
fn classify_exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let bad = write(dir.path(), "bad.json", r#"{"A": [[1], [0]], "b": [0, 0, 0], "cone": {"kind": "second_order", "m": 2}}"#);
    let out = run(&["classify", "--problem", bad.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("b: has length 3"));

    let typo = write(dir.path(), "typo.json", r#"{"A": [[1]], "b": [0], "cone": {"kind": "second_order", "m": 2}, "nmae": "x"}"#);
    let out = run(&["classify", "--problem", typo.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("nmae"));

    let out = run(&["classify", "--quiet", "--eps", "0.1", "--problem", &problem("t53ii.json")]);
    assert_eq!(out.status.code(), Some(2));
    assert_eq!(json(&out)["case"], "Indeterminate");

    let infeasible = write(
        dir.path(),
        "infeasible.json",
        r#"{"A": [[0], [1], [0]], "b": [-1, 0, 0], "cone": {"kind": "second_order", "m": 3}}"#,
    );
    let out = run(&["classify", "--quiet", "--problem", infeasible.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(3));

    let out = run(&["classify", "--problem", "/nonexistent/problem.json"]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn certify_hints_and_trace() {
    let dir = tempfile::tempdir().unwrap();
    let trace = dir.path().join("trace.csv");
    let out = run(&[
        "certify",
        "--quiet",
        "--problem",
        &problem("t51.json"),
        "--samples",
        "50",
        "--no-tau",
        "--trace",
        trace.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0));
    let report = json(&out);
    assert_eq!(report["certification"]["hint"], "BoundedEvidence");
    assert_eq!(report["classification"]["case"], "T51");
    let text = std::fs::read_to_string(&trace).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("radius,sample_id,dist,residual,ratio"));
    assert_eq!(lines.count(), 5 * 50);

    let out = run(&["certify", "--quiet", "--problem", &problem("t52iii.json"), "--samples", "50", "--no-tau"]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(json(&out)["certification"]["hint"], "DivergenceEvidence");
}

#[test]
fn certify_unwritable_trace_is_an_input_error() {
    let out = run(&["certify", "--problem", &problem("t51.json"), "--trace", "/nonexistent/dir/trace.csv"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("trace.csv"));
}

#[test]
fn certify_is_reproducible_apart_from_timings() {
    let args = ["certify", "--quiet", "--problem", &problem("t53iii.json"), "--samples", "40", "--seed", "7", "--center", "0"];
    let mut a = json(&run(&args));
    let mut b = json(&run(&args));
    a.as_object_mut().unwrap().remove("wall_clock_seconds");
    b.as_object_mut().unwrap().remove("wall_clock_seconds");
    assert_eq!(a, b);
    assert_eq!(a["seed"], 7);
}

#[test]
fn cone_commands() {
    let out = run(&["cone", "project", "--kind", "second_order", "--m", "2", "--point", "0,1"]);
    assert_eq!(out.status.code(), Some(0));
    let v: Vec<f64> = serde_json::from_slice(&out.stdout).unwrap();
    assert!((v[0] - 0.5).abs() < 1e-15 && (v[1] - 0.5).abs() < 1e-15);

    let out = run(&["cone", "member", "--kind", "p_cone", "--m", "2", "--p", "3", "--point", "2,0"]);
    assert_eq!(json(&out)["class"], "Interior");

    let out = run(&["cone", "distance", "--kind", "second_order", "--m", "3", "--point", "-1,0,0"]);
    let d: f64 = serde_json::from_slice(&out.stdout).unwrap();
    assert!((d - 1.0).abs() < 1e-15);

    for bad in [
        vec!["cone", "project", "--kind", "orthant", "--m", "3", "--point", "1,2,3"],
        vec!["cone", "project", "--kind", "p_cone", "--m", "3", "--p", "1", "--point", "1,2,3"],
        vec!["cone", "project", "--kind", "circular", "--m", "3", "--theta", "2", "--point", "1,2,3"],
        vec!["cone", "project", "--kind", "second_order", "--m", "3", "--point", "1,2"],
    ] {
        assert_eq!(run(&bad).status.code(), Some(1), "{bad:?}");
    }
}

#[test]
fn example51_report() {
    let out = run(&["example51", "--quiet", "--seed", "42"]);
    assert_eq!(out.status.code(), Some(0));
    let r = json(&out);
    assert_eq!(r["scq_witness"]["interior"], true);
    assert_eq!(r["concavity"]["pass"], true);
    assert_eq!(r["residual_identity"]["pass"], true);
}

#[test]
fn selftest_quick_passes_and_fault_injection_fails() {
    let out = run(&["selftest", "--quick", "--quiet"]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    assert_eq!(json(&out)["passed"], true);

    let out = run(&["selftest", "--quick", "--quiet", "--exponent-rule", "sum-two"]);
    assert_eq!(out.status.code(), Some(5));
    let stderr = String::from_utf8_lossy(&out.stderr);
    assert!(stderr.contains("polar-pairing"), "{stderr}");
    let failing: Vec<String> = json(&out)["suites"]
        .as_array()
        .unwrap()
        .iter()
        .filter(|s| s["passed"] == false)
        .map(|s| s["name"].as_str().unwrap().to_string())
        .collect();
    assert_eq!(failing, ["polar-pairing"]);
}

#[test]
fn bad_flags_exit_one() {
    assert_eq!(run(&["classify"]).status.code(), Some(1));
    assert_eq!(run(&["frobnicate"]).status.code(), Some(1));
    assert_eq!(run(&["--help"]).status.code(), Some(0));
}
