use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn mrlab(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_mrlab"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).expect("stdout is JSON")
}

fn write_fixture(dir: &Path, name: &str, args: &[&str]) -> String {
    let path = dir.join(name);
    let mut full = vec!["gen"];
    full.extend_from_slice(args);
    let out = mrlab(&full);
    assert_eq!(out.status.code(), Some(0));
    std::fs::write(&path, &out.stdout).unwrap();
    path.to_str().unwrap().to_string()
}

#[test]
fn delta_dim_lines_on_collinear_fixture() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_fixture(dir.path(), "c.json", &["collinear", "--sizes", "3,3"]);

    let out = mrlab(&["delta", &cfg]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(json(&out)["delta_star"], "2/3");

    let out = mrlab(&["dim", &cfg]);
    let v = json(&out);
    assert_eq!(v["affine_dim"], 1);
    assert_eq!(v["linear_dim"], 1);

    let out = mrlab(&["lines", &cfg]);
    assert_eq!(json(&out)["total"], 1);
}

#[test]
fn bound_exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_fixture(dir.path(), "c.json", &["collinear", "--sizes", "3,3"]);
    let out = mrlab(&["bound", &cfg, "--eps", "1/3"]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(json(&out)["report"]["holds"], true);

    let out = mrlab(&["bound", &cfg, "--optimize", "--grid", "4"]);
    assert_eq!(out.status.code(), Some(0));

    // δ above the measured value is a failed hypothesis
    let out = mrlab(&["bound", &cfg, "--eps", "1/3", "--delta", "3/4"]);
    assert_eq!(out.status.code(), Some(1));
    assert_eq!(json(&out)["status"], "hypothesis-failed");

    let grid = write_fixture(dir.path(), "g.json", &["grid", "--side", "3", "--coloring", "parity"]);
    let out = mrlab(&["bound", &grid, "--eps", "1/3"]);
    assert_eq!(out.status.code(), Some(1));

    let out = mrlab(&["bound", &cfg, "--eps", "one half"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn usage_and_parse_errors_exit_two() {
    assert_eq!(mrlab(&["frobnicate"]).status.code(), Some(2));
    assert_eq!(mrlab(&["delta", "--bogus"]).status.code(), Some(2));
    assert_eq!(mrlab(&["delta", "/nonexistent/config.json"]).status.code(), Some(2));

    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.json");
    std::fs::write(&bad, r#"{"dim": 2, "colors": [[["0","0"],["0","0"]]]}"#).unwrap();
    let out = mrlab(&["delta", bad.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("duplicate"));
}

#[test]
fn verify_subcommands() {
    let out = mrlab(&["verify", "triples", "--r", "7"]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(json(&out)["triples"], 42);

    let out = mrlab(&["verify", "tail", "--sizes", "8,4,2,1", "--delta", "3/4", "--eps", "1/4"]);
    assert_eq!(out.status.code(), Some(0));

    let out = mrlab(&["verify", "coarse", "--eps", "1/2"]);
    assert_eq!(out.status.code(), Some(0));

    let dir = tempfile::tempdir().unwrap();
    let cfg = write_fixture(dir.path(), "c.json", &["collinear", "--sizes", "3,3"]);
    let out = mrlab(&["verify", "lemma31", &cfg, "--x", "0", "--y", "2", "--c1", "1/2", "--c2", "1/3"]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stdout));

    // c2 too large for the tail inequality: hypotheses fail
    let out = mrlab(&["verify", "lemma31", &cfg, "--x", "0", "--y", "1", "--c1", "1/2", "--c2", "2/3"]);
    assert_eq!(out.status.code(), Some(1));
    assert_eq!(json(&out)["report"]["verdict"], "hypotheses-failed");

    let out = mrlab(&["design-audit", &cfg, "--x", "0", "--y", "2"]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(json(&out)["params"]["q"], 3);

    let matrix = dir.path().join("m.txt");
    std::fs::write(&matrix, "3 3 rational\n0 0 1\n1 1 1\n2 2 1\n").unwrap();
    let out = mrlab(&["verify", "thm22", matrix.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(json(&out)["rank"], 3);
}

#[test]
fn outputs_are_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_fixture(dir.path(), "g.json", &["grid", "--side", "4", "--coloring", "blocks"]);
    for args in [vec!["lines", &cfg], vec!["delta", &cfg], vec!["design-audit", &cfg, "--x", "1", "--y", "3"]] {
        let a = mrlab(&args);
        let b = mrlab(&args);
        assert_eq!(a.stdout, b.stdout);
        assert!(serde_json::from_slice::<Value>(&a.stdout).is_ok());
    }
}

#[test]
fn search_small_archive() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("a.jsonl");
    let out = mrlab(&[
        "search", "--iterations", "0", "--seed", "5", "--out", path.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0));
    let text = std::fs::read_to_string(&path).unwrap();
    assert_eq!(text.lines().count(), 1);
    let checks = mrlab::search::reverify_archive(&text).unwrap();
    assert!(checks.iter().all(|c| c.holds()));

    let out = mrlab(&["search", "--colors", "3", "--budget", "2"]);
    assert_eq!(out.status.code(), Some(2));
}
