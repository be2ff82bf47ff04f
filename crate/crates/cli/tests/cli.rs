use std::fs;
use std::process::{Command, Output};

use serde_json::Value;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_xxz-ness"))
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).expect("stdout is JSON")
}

fn csv_rows(text: &str) -> Vec<Vec<String>> {
    text.lines()
        .skip(1)
        .map(|l| l.split(',').map(str::to_string).collect())
        .collect()
}

#[test]
fn verify_example_passes() {
    let out = run(&[
        "verify",
        "--regime",
        "epr",
        "--eta",
        "0.3",
        "--lambda-log",
        "0.9",
        "--z",
        "1",
        "--w",
        "0.5",
        "--n",
        "5",
    ]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let v = json(&out);
    let residuals = v["residuals"].as_array().unwrap();
    assert!(residuals.len() >= 5);
    assert!(residuals.iter().all(|r| r["passed"] == Value::Bool(true)));
    for key in ["trace", "purity", "min_eig", "sigma_plus_site1", "f1", "f2"] {
        assert!(v["results"].get(key).is_some(), "missing {key}");
    }
}

#[test]
fn helix_example_is_pure() {
    let out = run(&["ness", "--n", "3", "--helix"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    let purity = v["results"]["purity"].as_f64().unwrap();
    assert!((purity - 1.0).abs() < 1e-12, "purity {purity}");
    assert!(v["results"]["f1"].as_f64().unwrap().abs() < 1e-12);
}

#[test]
fn scan_example_has_helix_zeros() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("scan.csv");
    let out = run(&[
        "scan",
        "--n",
        "11",
        "--z",
        "1",
        "--lambda-log",
        "0.9",
        "--w-resonant",
        "--grid",
        "2001",
        "-o",
        path.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0));
    let text = fs::read_to_string(&path).unwrap();
    assert!(text.starts_with("eta_over_pi,f1,f2,re_sigma_plus,im_sigma_plus,status\n"));
    assert!(!text.contains('\r'));
    let rows = csv_rows(&text);
    assert_eq!(rows.len(), 2001);
    for k in 1..6 {
        let target = k as f64 / 6.0;
        let row = rows
            .iter()
            .min_by(|a, b| {
                let da = (a[0].parse::<f64>().unwrap() - target).abs();
                let db = (b[0].parse::<f64>().unwrap() - target).abs();
                da.partial_cmp(&db).unwrap()
            })
            .unwrap();
        assert_eq!(row[5], "ok");
        assert!(
            row[1].parse::<f64>().unwrap().abs() < 1e-8,
            "f1 at {target}: {}",
            row[1]
        );
        assert!(
            row[2].parse::<f64>().unwrap().abs() < 1e-8,
            "f2 at {target}: {}",
            row[2]
        );
    }
    let meta: Value =
        serde_json::from_str(&fs::read_to_string(dir.path().join("scan.csv.meta.json")).unwrap()).unwrap();
    assert_eq!(meta["grid"]["points"], 2001);
}

#[test]
fn scan_output_is_byte_identical_across_thread_counts() {
    let args = [
        "scan",
        "--n",
        "7",
        "--z",
        "0.6-0.4i",
        "--lambda-log",
        "0.5",
        "--w",
        "1.2",
        "--grid",
        "101",
    ];
    let one = bin().args(args).env("NESS_MPA_THREADS", "1").output().unwrap();
    let four = bin().args(args).env("NESS_MPA_THREADS", "4").output().unwrap();
    let auto = bin().args(args).env("NESS_MPA_THREADS", "0").output().unwrap();
    assert_eq!(one.status.code(), Some(0));
    assert_eq!(one.stdout, four.stdout);
    assert_eq!(one.stdout, auto.stdout);
    let bad = bin().args(args).env("NESS_MPA_THREADS", "many").output().unwrap();
    assert_eq!(bad.status.code(), Some(2));
}

#[test]
fn scan_rows_carry_17_significant_digits() {
    let out = run(&["scan", "--n", "5", "--grid", "9", "--w-resonant"]);
    let text = String::from_utf8(out.stdout).unwrap();
    for row in csv_rows(&text) {
        for field in &row[..5] {
            let mantissa = field
                .split('e')
                .next()
                .unwrap()
                .trim_start_matches('-')
                .replace('.', "");
            assert_eq!(mantissa.len(), 17, "{field}");
        }
    }
}

#[test]
fn scan_json_format() {
    let out = run(&["scan", "--n", "3", "--grid", "5", "--w-resonant", "--format", "json"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert_eq!(v["rows"].as_array().unwrap().len(), 5);
}

#[test]
fn ness_csv_and_matrix() {
    let out = run(&["ness", "--n", "3", "--format", "csv"]);
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.starts_with("quantity,value\n"));
    assert!(text.contains("\nresults.purity,"));
    let out = run(&["ness", "--n", "3", "--matrix"]);
    let v = json(&out);
    assert_eq!(v["results"]["matrix"].as_array().unwrap().len(), 8);
    assert_eq!(run(&["ness", "--n", "9", "--matrix"]).status.code(), Some(2));
}

#[test]
fn hybrid_and_angle_inputs() {
    let out = run(&[
        "ness",
        "--regime",
        "ear",
        "--n",
        "3",
        "--q",
        "1.3",
        "--lambda-phase",
        "0.6",
        "--z-theta",
        "1.1",
        "--z-phi",
        "-0.4",
        "--alpha",
        "0.3",
        "--beta",
        "0.5",
        "--gamma",
        "0.7",
    ]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let v = json(&out);
    assert_eq!(v["params"]["drive"]["kind"], "hybrid");
    assert!(v["results"]["f1"].is_null());
}

#[test]
fn oracle_agrees() {
    let out = run(&["oracle", "--n", "5", "--eta", "1.3", "--lambda-log", "2.5"]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let v = json(&out);
    assert!(v["residuals"][0]["residual"].as_f64().unwrap() < 1e-8);
}

#[test]
fn failures_exit_with_one() {
    // ill-conditioned right boundary in double precision
    let out = run(&[
        "verify",
        "--regime",
        "ear",
        "--q",
        "3",
        "--lambda-phase",
        "0.7",
        "--n",
        "15",
    ]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("FAIL right_boundary"));
    let out = run(&["oracle", "--n", "5", "--max-iter", "3"]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn invalid_input_exits_with_two() {
    let cases: &[&[&str]] = &[
        &["ness", "--q", "0.5", "--eta", "0.3"],
        &["ness", "--lambda-phase", "0.3"],
        &["ness", "--regime", "ear", "--eta", "0.3"],
        &["ness", "--regime", "ear", "--lambda-log", "0.3"],
        &["ness", "--regime", "ear", "--q", "1+1i"],
        &["ness", "--n", "4"],
        &["ness", "--z", "1+x"],
        &["ness", "--z", "0"],
        &["ness", "--z", "1", "--z-theta", "0.3", "--z-phi", "0.1"],
        &["ness", "--z-theta", "0.3"],
        &["ness", "--w", "2", "--w-resonant"],
        &["ness", "--helix", "--alpha", "0.2"],
        &["ness", "--kinks", "1"],
        &["ness", "--n", "3", "--helix", "--kinks", "3"],
        &["scan", "--eta", "0.3"],
        &["scan", "--regime", "ear"],
        &["oracle", "--n", "11"],
        &["oracle", "--tol", "0"],
        &["frobnicate"],
    ];
    for args in cases {
        let out = run(args);
        assert_eq!(
            out.status.code(),
            Some(2),
            "{args:?}: {}",
            String::from_utf8_lossy(&out.stderr)
        );
        assert!(!out.stderr.is_empty());
    }
}
