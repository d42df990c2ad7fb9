use std::io::Write;
use std::process::{Command, Output};

use matorbit::{run_with, EXIT_INCONSISTENT, EXIT_OK, EXIT_PARSE, EXIT_SOLVER, EXIT_USAGE};
use serde_json::Value;

fn bin(args: &[&str], config: Option<&std::path::Path>) -> Output {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_matorbit"));
    cmd.args(args).env_remove("MATORBIT_CONFIG");
    if let Some(p) = config {
        cmd.env("MATORBIT_CONFIG", p);
    }
    cmd.output().unwrap()
}

/// In-process run: (exit code, stdout, stderr).
fn run(args: &[&str]) -> (i32, String, String) {
    let (mut out, mut err) = (Vec::new(), Vec::new());
    let argv = std::iter::once("matorbit").chain(args.iter().copied());
    let code = run_with(argv, None, &mut out, &mut err);
    (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
}

fn report(args: &[&str]) -> Value {
    let (code, out, err) = run(args);
    assert_eq!(code, EXIT_OK, "{args:?}: {err}");
    serde_json::from_str(&out).unwrap()
}

#[test]
fn documented_examples() {
    let r = report(&["solve", "(X^2-I)^2 = [[1,0],[0,0]]"]);
    assert_eq!(r["count"], 6);
    assert_eq!(r["route"], "iterated_square");

    let r = report(&["analyze", "X^2 - I = O"]);
    let orbits = r["orbits"].as_array().unwrap();
    assert_eq!(orbits.len(), 3);
    assert_eq!(orbits[2], serde_json::json!({ "kind": "Split", "p": -1.0, "q": 1.0 }));

    let r = report(&["verify", "X^2 - I = O", "--matrix", "[[0,1],[1,0]]"]);
    assert!(r["residual"].as_f64().unwrap() <= 1e-12);
    assert_eq!(r["orbit_label"], "Split(-1,1)");
    assert_eq!(r["is_solution"], true);
}

#[test]
fn reports_carry_the_common_keys() {
    for args in [
        &["solve", "X^2 = [[1,0],[0,2]]"][..],
        &["solve", "X^2 - I = O"],
        &["oracle", "X^2 = [[1,0],[0,2]]", "--starts", "200"],
        &["sample", "X^2 + I = O", "--orbit", "Rotation(0,1)", "--count", "4"],
    ] {
        let r = report(args);
        for key in ["command", "equation", "orbits", "solutions", "count", "residuals", "tolerances", "seed"] {
            assert!(r.get(key).is_some(), "{args:?} lacks {key}");
        }
        for m in r["solutions"].as_array().unwrap() {
            assert_eq!(m.as_array().unwrap().len(), 4);
        }
    }
}

#[test]
fn solutions_are_row_major() {
    let r = report(&["solve", "X^2 = [[4,0],[1,9]]"]);
    // Lower triangular C has lower triangular square roots.
    for m in r["solutions"].as_array().unwrap() {
        assert_eq!(m[1].as_f64().unwrap(), 0.0, "{m}");
    }
    let r = report(&["verify", "X^2 = [[1,0],[0,0]]", "--matrix", "[[1,2],[3,4]]"]);
    assert_eq!(r["matrix"], serde_json::json!([1.0, 2.0, 3.0, 4.0]));
    assert_eq!(r["is_solution"], false);
}

#[test]
fn numbers_round_trip_exactly() {
    let r = report(&["solve", "X^2 = [[1,0],[0,2]]"]);
    let xs = r["solutions"].as_array().unwrap();
    assert!(xs.iter().flat_map(|m| m.as_array().unwrap()).any(|v| v.as_f64() == Some(2f64.sqrt())));
    let r = report(&["solve", "X^2 + 0.1*X - 0.3*I = [[0.7,0.2],[0.1,0.3]]"]);
    for m in r["solutions"].as_array().unwrap() {
        let text = m.to_string();
        let back: Vec<f64> = serde_json::from_str(&text).unwrap();
        let orig: Vec<f64> = m.as_array().unwrap().iter().map(|v| v.as_f64().unwrap()).collect();
        assert_eq!(back, orig);
    }
}

#[test]
fn output_is_deterministic() {
    for args in [
        &["oracle", "X^3 - X = [[2,1],[0,1]]", "--starts", "300", "--seed", "5"][..],
        &["sample", "X^2 - I = O", "--orbit", "Split(-1,1)", "--count", "20", "--seed", "11"],
        &["solve", "X^2 - I = [[1,1],[0,0]]"],
    ] {
        let a = bin(args, None);
        let b = bin(args, None);
        assert!(a.status.success());
        assert_eq!(a.stdout, b.stdout, "{args:?}");
    }
    let a = report(&["sample", "X^2 - I = O", "--orbit", "Split(-1,1)", "--seed", "1"]);
    let b = report(&["sample", "X^2 - I = O", "--orbit", "Split(-1,1)", "--seed", "2"]);
    assert_ne!(a["solutions"], b["solutions"]);
}

#[test]
fn exit_codes() {
    let (code, out, err) = run(&["solve", "X^2 + = O"]);
    assert_eq!(code, EXIT_PARSE);
    assert!(out.is_empty());
    let e: Value = serde_json::from_str(&err).unwrap();
    assert_eq!(e["error"]["kind"], "parse");

    assert_eq!(run(&["solve", "X^2 + [[1,0],[0,1]]*X = O"]).0, EXIT_PARSE);
    assert_eq!(run(&["verify", "X^2 = O", "--matrix", "[[1,2]]"]).0, EXIT_PARSE);
    assert_eq!(run(&["sample", "X^2 - I = O", "--orbit", "Jordan(1)"]).0, EXIT_PARSE);
    assert_eq!(run(&["analyze", "X^2 = [[1,0],[0,2]]"]).0, EXIT_PARSE);

    let (code, _, err) = run(&["solve", "X^3 = [[1,2],[3,4]]"]);
    assert_eq!(code, EXIT_SOLVER);
    assert_eq!(serde_json::from_str::<Value>(&err).unwrap()["error"]["kind"], "solver");
    assert_eq!(run(&["solve", "X^2 = [[1,0],[0,1]] + I"]).0, EXIT_PARSE);

    let (code, _, err) = run(&["solve", "X^2 = O", "--bogus"]);
    assert_eq!(code, EXIT_USAGE);
    assert_eq!(serde_json::from_str::<Value>(&err).unwrap()["error"]["kind"], "usage");
    assert_eq!(run(&["--help"]).0, EXIT_OK);
    assert_eq!(EXIT_INCONSISTENT, 4);
}

#[test]
fn config_file_sits_between_flags_and_defaults() {
    let mut file = tempfile::NamedTempFile::new().unwrap();
    writeln!(file, "# run settings\nseed = 17\neps_residual = 1e-7\noutput = json").unwrap();

    let out = bin(&["solve", "X^2 = [[1,0],[0,2]]"], Some(file.path()));
    let r: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(r["seed"], 17);
    assert_eq!(r["tolerances"]["eps_residual"], 1e-7);
    assert_eq!(r["tolerances"]["eps_disc"], 1e-9);

    let out = bin(&["solve", "X^2 = [[1,0],[0,2]]", "--seed", "3"], Some(file.path()));
    let r: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(r["seed"], 3);
    assert_eq!(r["tolerances"]["eps_residual"], 1e-7);

    let out = bin(&["solve", "X^2 = [[1,0],[0,2]]"], None);
    let r: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(r["seed"], 0);

    let mut bad = tempfile::NamedTempFile::new().unwrap();
    writeln!(bad, "eps_disc = -1").unwrap();
    let out = bin(&["solve", "X^2 = O"], Some(bad.path()));
    assert_eq!(out.status.code(), Some(EXIT_PARSE));
    let e: Value = serde_json::from_slice(&out.stderr).unwrap();
    assert_eq!(e["error"]["kind"], "config");
}

#[test]
fn text_output() {
    let (code, out, _) = run(&["--output", "text", "solve", "X^2 = [[1,1],[0,0]]"]);
    assert_eq!(code, EXIT_OK);
    assert!(out.lines().any(|l| l == "count: 2"), "{out}");
    assert!(out.lines().any(|l| l == "route: sqrt"));
}

#[test]
fn solve_routes() {
    let route = |eq: &str| report(&["solve", eq])["route"].as_str().unwrap().to_string();
    assert_eq!(route("X = [[1,2],[3,4]]"), "linear");
    assert_eq!(route("X^2 = [[1,0],[0,2]]"), "sqrt");
    assert_eq!(route("X^2 + X = [[1,0],[0,2]]"), "shifted_quadratic");
    assert_eq!(route("X^2 = O"), "homogeneous");
    assert_eq!(route("X^3 - X = [[2,0],[0,2]]"), "scalar_rhs");
    assert_eq!(route("(X^2 + I)^2 = [[0,1],[0,0]]"), "iterated_square");
    assert_eq!(route("(X^2 + I)*(X^2 + 2*X + 5*I)*(X^2+4*I) = [[1,1],[1,1]]"), "certificate");

    let r = report(&["solve", "X^3 - X = [[2,0],[0,2]]"]);
    assert_eq!(r["outcome"], "family");
    assert!(r["count"].is_null());

    let r = report(&["solve", "X^2 = [[0,-1],[1,0]]"]);
    assert_eq!(r["count"], 2);
    assert_eq!(r["notes"].as_array().unwrap().len(), 1);
}

#[test]
fn oracle_command_flags_disagreement_through_the_exit_code() {
    let (code, out, _) = run(&["oracle", "X^2 - I = [[1,1],[0,0]]", "--starts", "2000", "--seed", "1"]);
    assert_eq!(code, EXIT_OK);
    let r: Value = serde_json::from_str(&out).unwrap();
    assert_eq!(r["crosscheck"]["consistent"], true);
    assert_eq!(r["count"], 4);
    // One start cannot find all four roots.
    let (code, out, _) = run(&["oracle", "X^2 = [[1,0],[0,2]]", "--starts", "1"]);
    assert_eq!(code, EXIT_INCONSISTENT);
    let r: Value = serde_json::from_str(&out).unwrap();
    assert_eq!(r["crosscheck"]["consistent"], false);
}
