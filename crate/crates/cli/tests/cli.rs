use std::path::Path;
use std::process::{Command, Output};

use obstructor::descriptor::graph_to_json;
use obstructor::obstruction::loop_oracle_stabilized;
use obstructor::sample::{random_graph, rng, GraphShape};
use serde_json::Value;

fn obstructor(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_obstructor"))
        .args(args)
        .env_remove("OBSTRUCTOR_SEED")
        .output()
        .expect("binary runs")
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).unwrap_or_else(|e| {
        panic!(
            "stdout is not JSON ({e}): {}\nstderr: {}",
            String::from_utf8_lossy(&out.stdout),
            String::from_utf8_lossy(&out.stderr)
        )
    })
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exited normally")
}

fn write(dir: &Path, name: &str, text: &str) -> String {
    let path = dir.join(name);
    std::fs::write(&path, text).unwrap();
    path.to_str().unwrap().to_string()
}

#[test]
fn verify_g2_reports_chain_and_ramification() {
    let out = obstructor(&["verify", "--g", "2", "--p", "2"]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let v = json(&out);
    let run = &v["runs"][0];
    assert_eq!(run["closure_dim"], 16);
    assert_eq!(run["generates"], true);
    assert_eq!(v["ramification"]["ramified"], serde_json::json!(["2", "inf"]));
    assert_eq!(v["divisor_example"]["splitting"], "PASS");
    assert_eq!(v["discrepancies"], 2);
    let statuses: Vec<&str> = run["identities"]
        .as_array()
        .unwrap()
        .iter()
        .map(|c| c["status"].as_str().unwrap())
        .collect();
    assert!(!statuses.contains(&"FAIL"));
    assert!(statuses.contains(&"PAPER-DISCREPANCY"));
}

#[test]
fn strict_makes_the_sign_discrepancy_fatal() {
    let out = obstructor(&["verify", "--g", "2", "--p", "2", "--strict"]);
    assert_eq!(code(&out), 1);
    assert_eq!(json(&out)["passed"], false);
}

#[test]
fn verify_g1_is_the_expected_failure_to_generate() {
    let out = obstructor(&["verify", "--g", "1", "--p", "3"]);
    assert_eq!(code(&out), 0);
    let v = json(&out);
    assert_eq!(v["runs"][0]["status"], "PASS");
    assert_eq!(v["runs"][0]["impossibility"]["generated"], 0);
}

#[test]
fn usage_errors_exit_2() {
    for args in [
        &["verify", "--g", "0", "--p", "2"][..],
        &["verify", "--g", "2", "--p", "4"],
        &["verify"],
        &["divisor", "--r", "3"],
        &["obstruction", "--vertex", "1"],
        &["hilbert", "--a", "0", "--b", "1"],
        &["divisor", "--poly", "x1^2 + y1", "--r", "1"],
        &["divisor", "--poly", "x1 +", "--r", "1"],
        &["nonsense"],
    ] {
        let out = obstructor(args);
        assert_eq!(code(&out), 2, "{args:?}");
        assert!(out.stdout.is_empty(), "{args:?}");
    }
    assert_eq!(code(&obstructor(&["--help"])), 0);
}

#[test]
fn output_is_byte_identical_across_runs() {
    for args in [
        &["verify", "--g", "3", "--p", "5"][..],
        &["find-generator", "--g", "2", "--p", "3", "--seed", "11"],
        &["construct", "--kind", "r4", "--g", "2", "--p", "2"],
    ] {
        let a = obstructor(args);
        let b = obstructor(args);
        assert_eq!(code(&a), 0, "{args:?}");
        assert_eq!(a.stdout, b.stdout, "{args:?}");
    }
}

#[test]
fn seed_comes_from_the_environment_unless_given() {
    let run = |env: Option<&str>, extra: &[&str]| {
        let mut cmd = Command::new(env!("CARGO_BIN_EXE_obstructor"));
        cmd.args(["find-generator", "--g", "2", "--p", "2"]).args(extra);
        match env {
            Some(s) => cmd.env("OBSTRUCTOR_SEED", s),
            None => cmd.env_remove("OBSTRUCTOR_SEED"),
        };
        json(&cmd.output().unwrap())
    };
    assert_eq!(run(None, &[])["seed"], obstructor::witness::DEFAULT_SEED);
    assert_eq!(run(Some("7"), &[])["seed"], 7);
    assert_eq!(run(Some("7"), &["--seed", "8"])["seed"], 8);
    assert_ne!(run(Some("7"), &[])["element"], run(Some("8"), &[])["element"]);
}

#[test]
fn generator_not_found_is_a_verification_failure() {
    // with coefficients in {-1, 0, 1} and a single try, some seed fails
    let failed = (0..50).any(|s| {
        let out = obstructor(&[
            "find-generator", "--g", "2", "--p", "2", "--tries", "1", "--bound", "1", "--seed", &s.to_string(),
        ]);
        code(&out) == 1 && json(&out)["found"] == false
    });
    assert!(failed);
}

#[test]
fn obstruction_on_constructed_and_empty_graphs() {
    let dir = tempfile::tempdir().unwrap();
    let built = obstructor(&["construct", "--kind", "r3", "--g", "2", "--p", "2"]);
    assert_eq!(code(&built), 0);
    let r3 = write(dir.path(), "r3.json", std::str::from_utf8(&built.stdout).unwrap());
    let v = json(&obstructor(&["obstruction", "--graph", &r3, "--vertex", "1"]));
    assert_eq!(v["e_dim"], 16);
    assert_eq!(v["is_full"], true);
    assert_eq!(v["verdict"], "OBSTRUCTED");
    assert_eq!(v["is_corner"], true);
    assert!(v["rounds"].as_u64().unwrap() >= 1);

    let empty = write(
        dir.path(),
        "empty.json",
        r#"{"base":{"kind":"quaternion_for_prime","p":3},"r":3,"sizes":[1,2,1]}"#,
    );
    let v = json(&obstructor(&["obstruction", "--graph", &empty, "--vertex", "2"]));
    assert_eq!(v["e_dim"], 0);
    assert_eq!(v["verdict"], "NOT-OBSTRUCTED");

    let out = obstructor(&["obstruction", "--graph", &empty, "--vertex", "4"]);
    assert_eq!(code(&out), 2);
}

#[test]
fn oracle_flag_agrees_on_random_graphs() {
    let dir = tempfile::tempdir().unwrap();
    let base = std::sync::Arc::new(obstructor::algebra::quaternion_for_prime(2).unwrap());
    let shape = GraphShape {
        max_r: 3,
        max_g: 1,
        ..GraphShape::default()
    };
    let mut rng = rng(5);
    for k in 0..3 {
        let graph = random_graph(&mut rng, &base, &shape).unwrap();
        let (_, len) = loop_oracle_stabilized(&graph, 1).unwrap();
        let file = write(dir.path(), &format!("g{k}.json"), &graph_to_json(&graph).unwrap());
        let out = obstructor(&["obstruction", "--graph", &file, "--vertex", "1", "--oracle-len", &len.to_string()]);
        assert_eq!(code(&out), 0);
        assert_eq!(json(&out)["oracle_equal"], true);
    }
}

#[test]
fn malformed_graph_names_the_field() {
    let dir = tempfile::tempdir().unwrap();
    let bad = write(
        dir.path(),
        "bad.json",
        r#"{"base":{"kind":"quaternion","a":"-1","b":"one"},"r":2,"sizes":[1,1]}"#,
    );
    let out = obstructor(&["obstruction", "--graph", &bad, "--vertex", "1"]);
    assert_eq!(code(&out), 2);
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("at base") && err.contains("`one`"), "{err}");
}

#[test]
fn corner_of_an_idempotent_line() {
    let dir = tempfile::tempdir().unwrap();
    // e(1,1) M_2(Q) e(1,1) is one-dimensional
    let input = write(
        dir.path(),
        "corner.json",
        r#"{"algebra":{"kind":"split","g":1},"span":[["1","0","0","0"]]}"#,
    );
    let v = json(&obstructor(&["corner", "--input", &input]));
    assert_eq!(v["corner"]["is_corner"], true);
    assert_eq!(v["corner"]["factor_dim"], 1);
    assert_eq!(v["corner"]["idempotent"], serde_json::json!(["1", "0", "0", "0"]));
}

#[test]
fn hilbert_table() {
    let v = json(&obstructor(&["hilbert", "--a", "-1", "--b", "-1"]));
    assert_eq!(v["ramified"], serde_json::json!(["2", "inf"]));
    assert_eq!(v["product"], 1);
    let v = json(&obstructor(&["hilbert", "--a", "-2", "--b", "-5", "--place", "5"]));
    assert_eq!(v["symbols"][0]["symbol"], -1);
    assert!(v.get("product").is_none());
    let v = json(&obstructor(&["hilbert", "--a", "3/4", "--b", "-7"]));
    assert_eq!(v["product"], 1);
}

#[test]
fn divisor_example_end_to_end() {
    let f = "x1*x2*x3 - y1*y2*y3";
    let out = obstructor(&["divisor", "--poly", f, "--r", "3", "--fiber", "1:[0:1]", "2:[1:0]"]);
    let v = json(&out);
    assert_eq!(v["contains"], true);
    assert_eq!(v["multidegree"], serde_json::json!([1, 1, 1]));

    let v = json(&obstructor(&["divisor", "--poly", f, "--r", "3", "--fiber", "1:[1:1]", "2:[1:1]"]));
    assert_eq!(v["contains"], false);

    let factors = "x1*x2*x3 - y1*y2*y3,x1*x2*x3 + y1*y2*y3";
    let out = obstructor(&["divisor", "--poly", f, "--r", "3", "--subst", "2,2,2", "--factors", factors]);
    assert_eq!(code(&out), 0);
    assert_eq!(json(&out)["splitting_verified"], true);

    let wrong = "x1*x2*x3 - y1*y2*y3,x1*x2*x3 - y1*y2*y3";
    let out = obstructor(&["divisor", "--poly", f, "--r", "3", "--subst", "2,2,2", "--factors", wrong]);
    assert_eq!(code(&out), 1);
    assert_eq!(json(&out)["splitting_verified"], false);
}
