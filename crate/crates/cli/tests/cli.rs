use std::process::{Command, Output};

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_gapfredholm"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

/// Data rows of a CSV table (comment and header stripped), split into cells.
fn rows(o: &Output) -> Vec<Vec<String>> {
    stdout(o)
        .lines()
        .skip(2)
        .map(|l| l.split(',').map(str::to_string).collect())
        .collect()
}

fn num(cell: &str) -> f64 {
    cell.parse().unwrap()
}

#[test]
fn ginibre_first_eigenvalue() {
    let o = run(&["lambda", "--ensemble", "ginibre2", "--x", "1"]);
    assert!(o.status.success());
    let text = stdout(&o);
    assert!(text.starts_with("# command=lambda"));
    assert_eq!(text.lines().nth(1), Some("x,j,lambda,one_minus_lambda"));
    let r = &rows(&o)[0];
    assert_eq!(r[1], "0");
    assert!((num(&r[2]) - (1.0 - (-1.0f64).exp())).abs() < 1e-15);
}

#[test]
fn chiral_empty_sum_case() {
    let o = run(&["lambda", "--ensemble", "chiral2", "--nu", "0", "--x", "1", "--count-eigs", "1"]);
    assert!(o.status.success());
    // K_1(1) from tables
    let k1 = 0.601_907_230_197_234_6;
    assert!((num(&rows(&o)[0][2]) - (1.0 - k1)).abs() < 1e-14);
}

#[test]
fn malformed_ensemble_exits_two_with_usage() {
    let o = run(&["lambda", "--ensemble", "wishart", "--x", "1"]);
    assert_eq!(o.status.code(), Some(2));
    let err = String::from_utf8(o.stderr).unwrap();
    assert!(err.contains("Usage"));
}

#[test]
fn bad_grid_and_tolerance_exit_two() {
    assert_eq!(run(&["gap", "--x", "2,1"]).status.code(), Some(2));
    assert_eq!(run(&["gap", "--x", "1", "--eps", "2"]).status.code(), Some(2));
    assert_eq!(run(&["gap", "--ensemble", "ginibre2", "--nu", "1", "--x", "1"]).status.code(), Some(2));
}

#[test]
fn gap_at_zero_radius() {
    let o = run(&["gap", "--ensemble", "chiral4", "--nu", "1", "--x", "0,1", "--kmax", "2"]);
    assert!(o.status.success());
    let r = rows(&o);
    assert_eq!(num(&r[0][1]), 1.0);
    let total: f64 = r[1][1..4].iter().map(|c| num(c)).sum();
    assert!((total - 1.0).abs() < 1e-12);
}

#[test]
fn pk_tracks_density() {
    let o = run(&["pk", "--ensemble", "chiral2", "--nu", "0", "--min", "0", "--max", "1.5", "--count", "4"]);
    assert!(o.status.success());
    let header = stdout(&o).lines().nth(1).unwrap().to_string();
    assert_eq!(header, "s,p_1,p_2,p_3,p_4,p_5,partial_sum,density");
    let r = rows(&o);
    assert_eq!(num(&r[0][0]), 0.0);
    for row in &r {
        assert!((num(&row[6]) - num(&row[7])).abs() < 1e-2);
    }
}

#[test]
fn output_is_deterministic() {
    let args = ["asympt", "--ensemble", "ginibre4", "--min", "100", "--max", "1000", "--count", "5", "--log"];
    assert_eq!(stdout(&run(&args)), stdout(&run(&args)));
}

#[test]
fn thread_cap_does_not_change_output() {
    let args = ["gap", "--ensemble", "chiral2", "--nu", "1", "--min", "0.5", "--max", "5", "--count", "8"];
    let one = Command::new(env!("CARGO_BIN_EXE_gapfredholm"))
        .args(args)
        .env("GAPFREDHOLM_THREADS", "1")
        .output()
        .unwrap();
    assert!(one.status.success());
    assert_eq!(stdout(&one), stdout(&run(&args)));
    let bad = Command::new(env!("CARGO_BIN_EXE_gapfredholm"))
        .args(args)
        .env("GAPFREDHOLM_THREADS", "zero")
        .output()
        .unwrap();
    assert_eq!(bad.status.code(), Some(2));
}

#[test]
fn asympt_partition_column() {
    let o = run(&["asympt", "--ensemble", "chiral4", "--nu", "2", "--x", "500"]);
    assert!(o.status.success());
    assert!(num(&rows(&o)[0][8]) < 1e-9);
}

#[test]
fn constants_json() {
    let o = run(&["constants", "--format", "json"]);
    assert!(o.status.success());
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["columns"][0], "name");
    let m = v["rows"][0][1].as_f64().unwrap();
    let c = v["rows"][1][1].as_f64().unwrap();
    assert!((m - 0.478).abs() < 1e-3 && (c + 0.716).abs() < 1e-3);
}

#[test]
fn conjecture_large_x() {
    let o = run(&["conjecture", "--x", "200000"]);
    assert!(o.status.success());
    assert!((num(&rows(&o)[0][1]) - 0.996).abs() < 2e-3);
    assert!(String::from_utf8(o.stderr).unwrap().contains("x = 200000"));
}

#[test]
fn elliptic_rotational_column() {
    let o = run(&["elliptic", "--finite-n", "--ensemble", "chiral2", "--mu", "1", "--n", "3", "--x", "0.2,0.6"]);
    assert!(o.status.success());
    for r in rows(&o) {
        assert!((num(&r[1]) - num(&r[3])).abs() < 1e-8);
        assert!((num(&r[1]) - num(&r[2])).abs() < 1e-8);
    }
    let missing = run(&["elliptic", "--ensemble", "chiral2", "--mu", "1", "--n", "3", "--x", "0.2"]);
    assert_eq!(missing.status.code(), Some(2));
    let ginibre = run(&["elliptic", "--finite-n", "--mu", "0.5", "--n", "3", "--x", "0.2"]);
    assert_eq!(ginibre.status.code(), Some(2));
}

#[test]
fn out_file() {
    let dir = std::env::temp_dir().join(format!("gapfredholm-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("gap.csv");
    let o = run(&["gap", "--x", "1", "--out", path.to_str().unwrap()]);
    assert!(o.status.success() && o.stdout.is_empty());
    assert!(std::fs::read_to_string(&path).unwrap().contains("E_0"));
    std::fs::remove_dir_all(&dir).unwrap();
}

#[test]
fn selfcheck_passes_and_detects_violation() {
    let ok = run(&["selfcheck"]);
    assert_eq!(ok.status.code(), Some(0));
    let bad = run(&["selfcheck", "--tolerance-scale", "0"]);
    assert_eq!(bad.status.code(), Some(1));
    let err = String::from_utf8(bad.stderr).unwrap();
    assert!(err.contains("FAIL wronskian"));
}
