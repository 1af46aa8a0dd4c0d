use std::process::{Command, Output};

fn xtel(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_xtel")).args(args).output().expect("binary runs")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exited normally")
}

#[test]
fn rz_writes_json_report() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("rz.json");
    let out = xtel(&["rz", "--trials", "2000", "--max-cycles", "3", "--out", path.to_str().unwrap()]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stdout));
    let report: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
    assert_eq!(report["config"]["subcommand"], "rz");
    assert_eq!(report["config"]["seed"], 42);
    assert_eq!(report["verdict"], "pass");
    let success = report["rows"].as_array().unwrap().iter().find(|r| r["quantity"] == "success_rate").unwrap();
    assert!((success["exact"].as_f64().unwrap() - 0.875).abs() < 1e-12);
}

#[test]
fn same_seed_gives_same_report() {
    let dir = tempfile::tempdir().unwrap();
    let run = |name: &str| {
        let path = dir.path().join(name);
        assert_eq!(code(&xtel(&["rx", "--trials", "1500", "--seed", "7", "--out", path.to_str().unwrap()])), 0);
        let mut v: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap();
        v["wall_clock_seconds"] = serde_json::Value::Null;
        v.to_string()
    };
    assert_eq!(run("a.json"), run("b.json"));
}

#[test]
fn csv_report_lists_rows() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("tree.csv");
    assert_eq!(code(&xtel(&["tree", "--axis", "x", "--cycles", "4", "--out", path.to_str().unwrap()])), 0);
    let text = std::fs::read_to_string(path).unwrap();
    assert!(text.starts_with("quantity,"));
    assert!(text.lines().any(|l| l.starts_with("measurements_per_cycle_reference,1")));
}

#[test]
fn compile_accepts_matrix_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("h.txt");
    let r = std::f64::consts::FRAC_1_SQRT_2;
    std::fs::write(&path, format!("{r} 0 {r} 0\n{r} 0 {} 0\n", -r)).unwrap();
    let out = xtel(&["compile", "--target", path.to_str().unwrap()]);
    assert_eq!(code(&out), 0);
    assert!(String::from_utf8_lossy(&out.stdout).contains("verdict: Pass"));
}

#[test]
fn usage_errors_exit_one() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.txt");
    std::fs::write(&bad, "1 0 1 0 0 0 1 0").unwrap();
    for args in [
        vec!["frobnicate"],
        vec!["rz", "--trials", "0"],
        vec!["rz", "--correction", "sometimes"],
        vec!["rz", "--out", "report.txt"],
        vec!["rz", "--correction", "zz", "--model", "heisenberg"],
        vec!["tree", "--cycles", "13"],
        vec!["compile", "--target", bad.to_str().unwrap()],
        vec!["compile", "--target", "not-a-gate"],
        vec!["compile", "--target", "h", "--tolerance", "-1"],
    ] {
        assert_eq!(code(&xtel(&args)), 1, "{args:?}");
    }
    assert_eq!(code(&xtel(&["--help"])), 0);
}

#[test]
fn residual_failure_exits_three() {
    let out = xtel(&["compile", "--target", "h", "--tolerance", "1e-300"]);
    assert_eq!(code(&out), 3);
}

#[test]
fn statistical_failure_exits_two() {
    // Seed 11232 puts all seven Bell outcomes in one branch.
    let out = xtel(&["teleport", "--trials", "7", "--seed", "11232"]);
    assert_eq!(code(&out), 2);
}

#[test]
fn other_subcommands_pass() {
    for args in [
        vec!["dgb", "--phi", "0.9", "--trials", "2000"],
        vec!["teleport", "--trials", "2000", "--unitary", "h"],
        vec!["gate-teleport", "--unitary", "t", "--trials", "2000"],
        vec!["rz", "--correction", "zz", "--trials", "1000"],
        vec!["rx", "--phi-z0", "0.4", "--trials", "1000", "--max-cycles", "2"],
    ] {
        let out = xtel(&args);
        assert_eq!(code(&out), 0, "{args:?}\n{}", String::from_utf8_lossy(&out.stdout));
    }
}
