use std::path::Path;
use std::process::{Command, Output};

fn bin(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_minimax-bid"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

fn field(out: &Output, key: &str) -> f64 {
    let text = stdout(out);
    text.lines()
        .find_map(|l| l.strip_prefix(&format!("{key}=")))
        .unwrap_or_else(|| panic!("{key} missing from\n{text}"))
        .parse()
        .unwrap()
}

fn read_rows(path: &Path) -> (String, Vec<Vec<String>>) {
    let text = std::fs::read_to_string(path).unwrap();
    let mut lines = text.lines();
    let header = lines.next().unwrap().to_string();
    let rows = lines.map(|l| l.split(',').map(str::to_string).collect()).collect();
    (header, rows)
}

#[test]
fn solve_examples() {
    let out = bin(&["solve", "--dist", "point 1", "--grid", "10000"]);
    assert!(out.status.success());
    assert!((field(&out, "minimax_regret") - 0.367879).abs() <= 1e-6);

    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("qstar.csv");
    let out = bin(&["solve", "--dist", "uniform 0 1", "--out", path.to_str().unwrap()]);
    assert!(out.status.success());
    let (header, rows) = read_rows(&path);
    assert_eq!(header, "t,Q,G");
    assert_eq!(rows.len(), 20_001);
    let parsed: Vec<(f64, f64, f64)> = rows
        .iter()
        .map(|r| (r[0].parse().unwrap(), r[1].parse().unwrap(), r[2].parse().unwrap()))
        .collect();
    assert_eq!(parsed[0].1, 0.0);
    for w in parsed.windows(2) {
        assert!(w[1].1 > w[0].1 && w[1].1 < w[1].0);
        assert!(w[1].2 >= w[0].2);
    }
    assert_eq!(parsed.last().unwrap().2, 1.0);

    let out = bin(&["solve", "--dist", "mix 0.3 point 0 + 0.7 uniform 0 1"]);
    let (overall, cond) = (field(&out, "minimax_regret"), field(&out, "conditional_regret"));
    assert!((overall - 0.7 * cond).abs() <= 1e-6);
}

#[test]
fn regret_examples() {
    let out = bin(&["regret", "--dist", "uniform 0 1", "--strategy", "shade:0.5"]);
    assert!(out.status.success());
    assert_eq!(field(&out, "worst_h"), 0.0);
    assert_eq!(field(&out, "worst_regret"), 0.25);
    assert_eq!(field(&out, "closed_form_regret"), 0.25);

    let out = bin(&["regret", "--dist", "uniform 0 1", "--strategy", "qstar"]);
    assert!((field(&out, "worst_regret") - 0.1506).abs() <= 5e-3);

    let out = bin(&["regret", "--dist", "point 1", "--strategy", "shade:0.5"]);
    assert!((field(&out, "worst_regret") - 0.5).abs() <= 1e-6);
}

#[test]
fn regret_curve_and_file_inputs() {
    let dir = tempfile::tempdir().unwrap();
    let schedule = dir.path().join("half.csv");
    let mut csv = String::from("t,Q\n");
    for i in 0..=100 {
        let t = i as f64 / 100.0;
        csv.push_str(&format!("{t},{}\n", 0.5 * t));
    }
    std::fs::write(&schedule, csv).unwrap();
    let cdf = dir.path().join("identity.csv");
    std::fs::write(&cdf, "x,F\n0,0\n1,1\n").unwrap();
    let curve = dir.path().join("curve.csv");

    let strategy = format!("file:{}", schedule.display());
    let dist = format!("cdf {}", cdf.display());
    let out = bin(&[
        "regret", "--dist", &dist, "--strategy", &strategy, "--curve", "--out", curve.to_str().unwrap(),
    ]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    assert!((field(&out, "worst_regret") - 0.25).abs() <= 1e-9);
    let (header, rows) = read_rows(&curve);
    assert_eq!(header, "h,regret");
    assert!(rows.len() >= 20_001);
}

#[test]
fn sweep_examples() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("sweep.csv");
    let out = bin(&[
        "sweep", "--family", "uniform-a", "--as", "0,0.25,0.5,0.75", "--strategies", "shade:0.5,qstar",
        "--out", path.to_str().unwrap(),
    ]);
    assert!(out.status.success());
    let (header, rows) = read_rows(&path);
    assert_eq!(header, "param,strategy,worst_h,worst_regret,reason");
    let column = |label: &str| -> Vec<(f64, f64)> {
        rows.iter()
            .filter(|r| r[1] == label)
            .map(|r| (r[0].parse().unwrap(), r[3].parse().unwrap()))
            .collect()
    };
    for (a, r) in column("shade:0.5") {
        assert!((r - (0.25 + 0.25 * a)).abs() <= 1e-6, "a={a}: {r}");
    }
    let qstar = column("qstar");
    assert_eq!(qstar.len(), 4);
    assert!(qstar.windows(2).all(|w| w[1].1 > w[0].1));

    let out = bin(&["sweep", "--family", "beta-sym", "--rhos", "1", "--strategies", "best-alpha"]);
    let text = stdout(&out);
    let row: Vec<&str> = text.lines().nth(1).unwrap().split(',').collect();
    let alpha: f64 = row[1].strip_prefix("best-alpha:").unwrap().parse().unwrap();
    assert!((0.37..=0.40).contains(&alpha), "{alpha}");
}

#[test]
fn sweep_rows_report_failures() {
    let out = bin(&["sweep", "--family", "uniform-a", "--as", "0.5,1.5", "--strategies", "shade:0.5"]);
    assert!(out.status.success());
    let text = stdout(&out);
    let failed = text.lines().nth(2).unwrap();
    assert!(failed.starts_with("1.50000000,shade:0.5,NaN,NaN,\""), "{failed}");
}

#[test]
fn oracle_examples() {
    let out = bin(&["oracle", "--dist", "point 1", "--grid", "200", "--compare"]);
    assert!(out.status.success());
    assert!((field(&out, "value") - 0.3679).abs() <= 5e-3);
    assert!(field(&out, "delta") <= 5e-3);

    let out = bin(&["oracle", "--dist", "uniform 0 1", "--grid", "200", "--compare"]);
    assert!(field(&out, "delta") <= 5e-3);

    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("oracle.csv");
    let out = bin(&["oracle", "--dist", "point 1", "--grid", "2", "--out", path.to_str().unwrap()]);
    assert!(out.status.success());
    assert_eq!(field(&out, "value"), 0.0);
    let (header, rows) = read_rows(&path);
    assert_eq!(header, "grid,value,gap,iters");
    assert_eq!(rows[0][0], "2");
}

#[test]
fn audit_examples() {
    let out = bin(&["audit", "--dist", "point 1"]);
    assert!(out.status.success());
    assert!(field(&out, "flatness_spread") <= 1e-6);
    for spec in ["uniform 0 1", "beta 2 2"] {
        let out = bin(&["audit", "--dist", spec]);
        assert!(out.status.success(), "{spec}: {}", stdout(&out));
        assert!(stdout(&out).contains("passed=true"));
    }
}

#[test]
fn exit_codes() {
    assert_eq!(bin(&["solve", "--dist", "gamma 2 2"]).status.code(), Some(2));
    assert_eq!(bin(&["solve", "--grid", "99"]).status.code(), Some(2));
    assert_eq!(bin(&["regret", "--strategy", "shade:2"]).status.code(), Some(2));
    assert_eq!(bin(&["solve", "--dist", "point 0"]).status.code(), Some(2));
    assert_eq!(bin(&["frobnicate"]).status.code(), Some(2));
    let out = bin(&["oracle", "--grid", "50", "--max-iters", "2", "--tol", "1e-12"]);
    assert_eq!(out.status.code(), Some(4));
    let out = bin(&["audit", "--dist", "uniform 0 1", "--grid", "1000", "--tol", "1e-300"]);
    assert_eq!(out.status.code(), Some(5));
    let text = stdout(&out);
    assert!(text.contains("best_response_ok=false") && text.contains("passed=false"), "{text}");
}
