use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn symbsm(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_symbsm")).args(args).output().expect("binary runs")
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exit code")
}

fn json(o: &Output) -> serde_json::Value {
    serde_json::from_slice(&o.stdout).expect("stdout is JSON")
}

#[test]
fn symmetries_pass_for_each_class() {
    for case in ["const", "hyp", "hyp-g0"] {
        let o = symbsm(&["verify-symmetries", "--case", case, "--format", "json"]);
        assert_eq!(code(&o), 0, "{case}");
        let v = json(&o);
        let want = if case == "const" { 6 } else { 5 };
        assert_eq!(v["results"][0]["generators"].as_array().unwrap().len(), want);
    }
}

#[test]
fn injected_non_symmetry_fails() {
    let o = symbsm(&["verify-symmetries", "--case", "const", "--inject", "y-dy"]);
    assert_eq!(code(&o), 2);
    assert!(String::from_utf8_lossy(&o.stderr).contains("y∂y"));
}

#[test]
fn bracket_tables() {
    assert_eq!(code(&symbsm(&["brackets", "--case", "const"])), 0);
    assert_eq!(code(&symbsm(&["brackets", "--case", "hyp-g0"])), 0);
    // the printed combination in the g ≠ 0 table disagrees with [X4, X5]
    let o = symbsm(&["brackets", "--case", "hyp"]);
    assert_eq!(code(&o), 2);
    assert!(String::from_utf8_lossy(&o.stderr).contains("[X4, X5]"));
}

#[test]
fn solution_exit_codes() {
    assert_eq!(code(&symbsm(&["solutions", "--case", "2.1-2"])), 0);
    assert_eq!(code(&symbsm(&["solutions", "--case", "2.1-5"])), 3);
    let o = symbsm(&["solutions", "--all", "--format", "csv"]);
    assert_eq!(code(&o), 3);
    assert_eq!(String::from_utf8_lossy(&o.stdout).lines().count(), 16);
}

#[test]
fn convergence_study() {
    let o = symbsm(&["converge", "--format", "json"]);
    assert_eq!(code(&o), 0);
    let orders = json(&o)["results"][0]["claim"]["orders"].clone();
    for v in orders.as_array().unwrap() {
        assert!((1.8..=2.2).contains(&v.as_f64().unwrap()));
    }
    let o = symbsm(&["converge", "--case", "u=x", "--format", "json"]);
    assert_eq!(code(&o), 0);
    assert_eq!(json(&o)["results"][0]["claim"]["kind"], "exact");
}

#[test]
fn usage_errors_exit_one() {
    assert_eq!(code(&symbsm(&["verify-symmetries"])), 1);
    assert_eq!(code(&symbsm(&["verify-symmetries", "--case", "nope"])), 1);
    assert_eq!(code(&symbsm(&["frobnicate"])), 1);
    assert_eq!(code(&symbsm(&["solutions", "--case", "9.9-9"])), 1);
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("p.toml");
    fs::write(&bad, "sigma = 0.2\n").unwrap();
    assert_eq!(
        code(&symbsm(&["brackets", "--case", "const", "--params", bad.to_str().unwrap()])),
        1
    );
    assert_eq!(code(&symbsm(&["--help"])), 0);
}

#[test]
fn params_file_is_applied_and_recorded() {
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path().join("p.json");
    fs::write(&p, r#"{"r": 0.07, "f0": 0.45}"#).unwrap();
    let o = symbsm(&[
        "verify-symmetries",
        "--case",
        "const",
        "--params",
        p.to_str().unwrap(),
        "--format",
        "json",
        "--seed",
        "7",
    ]);
    assert_eq!(code(&o), 0);
    let v = json(&o);
    assert_eq!(v["params"]["const"]["r"], 0.07);
    assert_eq!(v["params"]["const"]["f0"], 0.45);
    assert_eq!(v["seed"], 7);
    assert!(v["tolerances"]["relative_residual"].is_number());
    assert!(v["version"].is_string());
}

fn run_into(dir: &Path, args: &[&str]) -> Vec<u8> {
    let mut full: Vec<&str> = args.to_vec();
    let d = dir.to_str().unwrap();
    full.extend(["--out", d, "--format", "json"]);
    let o = symbsm(&full);
    assert!(matches!(code(&o), 0 | 2 | 3));
    fs::read(dir.join(format!("{}.json", args[0]))).unwrap()
}

#[test]
fn reports_are_byte_identical_across_runs() {
    for args in [
        &["verify-symmetries", "--all"][..],
        &["brackets", "--all"][..],
        &["solutions", "--all"][..],
        &["converge", "--all", "--finest", "40"][..],
    ] {
        let (a, b) = (tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap());
        assert_eq!(run_into(a.path(), args), run_into(b.path(), args), "{args:?}");
    }
}

#[test]
fn artifacts_are_written() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path().to_str().unwrap();
    assert_eq!(code(&symbsm(&["solutions", "--case", "2.1-2", "--out", d, "--samples", "3"])), 0);
    let csv = fs::read_to_string(dir.path().join("solution_2.1-2.csv")).unwrap();
    assert_eq!(csv.lines().count(), 1 + 27);
    assert_eq!(code(&symbsm(&["converge", "--case", "u=x", "--finest", "16", "--out", d])), 0);
    let fd = fs::read_to_string(dir.path().join("fd_u_x.csv")).unwrap();
    assert!(fd.starts_with("t,x,y,u\n"));
}
