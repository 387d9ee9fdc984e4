use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn mgshift(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_mgshift"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn is_rational(s: &str) -> bool {
    let mut parts = s.splitn(2, '/');
    let num = parts.next().unwrap_or("");
    let den = parts.next().unwrap_or("1");
    let num = num.strip_prefix('-').unwrap_or(num);
    !num.is_empty() && num.bytes().all(|b| b.is_ascii_digit()) && den.bytes().all(|b| b.is_ascii_digit())
}

#[test]
fn dims_json_carries_rational_endpoints() {
    let o = mgshift(&["--format", "json", "dims"]);
    assert_eq!(o.status.code(), Some(0));
    let v: Value = serde_json::from_str(&stdout(&o)).unwrap();
    for (key, value) in [("p", 0.569840290998), ("s", 0.811370462752), ("dim_m", 0.824293605712)] {
        let rec = &v[key];
        assert!(is_rational(rec["lo"].as_str().unwrap()), "{key} lo");
        assert!(is_rational(rec["hi"].as_str().unwrap()), "{key} hi");
        let lo = rec["lo_approx"].as_f64().unwrap();
        let hi = rec["hi_approx"].as_f64().unwrap();
        assert!(lo - 1e-12 <= value && value <= hi + 1e-12, "{key}: [{lo}, {hi}]");
    }
    assert!(v["p"]["width"].as_f64().unwrap() < 1e-30);
}

#[test]
fn dims_csv_has_three_rows() {
    let o = mgshift(&["--format", "csv", "dims"]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    let rows: Vec<&str> = text.lines().filter(|l| !l.starts_with('#')).collect();
    assert_eq!(rows[0], "quantity,lo,hi,lo_approx,hi_approx,width");
    assert_eq!(rows.len(), 4);
}

#[test]
fn tau_exit_codes() {
    let ok = mgshift(&["tau"]);
    assert_eq!(ok.status.code(), Some(0));
    assert!(stdout(&ok).contains("tau > 0 CERTIFIED"));
    let short = mgshift(&["tau", "--terms", "3"]);
    assert_eq!(short.status.code(), Some(1));
    let zero = mgshift(&["tau", "--terms", "0"]);
    assert_eq!(zero.status.code(), Some(2));
}

#[test]
fn measure_values() {
    let o = mgshift(&["measure", "--mu", "0.5", "01"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).lines().next().unwrap().ends_with("log2 P = -2"));

    let o = mgshift(&["--format", "json", "measure", "--pmu", "11"]);
    let v: Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["log2_probability"], "ZERO");

    let o = mgshift(&["--format", "json", "measure", "--mu", "0.5", "0100"]);
    let v: Value = serde_json::from_str(&stdout(&o)).unwrap();
    let total = v["log2_probability"].as_f64().unwrap();
    let by_chain: f64 = v["chains"]
        .as_array()
        .unwrap()
        .iter()
        .map(|c| c["log2_probability"].as_f64().unwrap())
        .sum();
    assert!((total - by_chain).abs() < 1e-12);
}

#[test]
fn usage_errors_exit_two() {
    assert_eq!(mgshift(&["measure", "--pmu", "01x"]).status.code(), Some(2));
    assert_eq!(mgshift(&["measure", "01"]).status.code(), Some(2));
    assert_eq!(mgshift(&["measure", "--mu", "1.5", "01"]).status.code(), Some(2));
    assert_eq!(mgshift(&["sample", "--n", "16"]).status.code(), Some(2));
    assert_eq!(mgshift(&["experiment", "lower", "--seeds", "2"]).status.code(), Some(2));
    assert_eq!(mgshift(&["experiment", "nonsense"]).status.code(), Some(2));
}

#[test]
fn sample_is_multiplicative_and_seeded() {
    let a = mgshift(&["--seed", "9", "sample", "--n", "256"]);
    let b = mgshift(&["--seed", "9", "sample", "--n", "256"]);
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
    let word = stdout(&a);
    let bits: Vec<u8> = word.trim().bytes().collect();
    assert_eq!(bits.len(), 256);
    for k in 1..=128 {
        assert!(
            !(bits[k - 1] == b'1' && bits[2 * k - 1] == b'1'),
            "x_{k} = x_{} = 1",
            2 * k
        );
    }
}

fn run_to(dir: &Path, name: &str, args: &[&str]) -> (Output, Vec<u8>) {
    let path = dir.join(name);
    let mut full: Vec<&str> = args.to_vec();
    let p = path.to_str().unwrap().to_owned();
    full.extend(["--out", p.as_str()]);
    let o = mgshift(&full);
    let bytes = std::fs::read(&path).unwrap_or_default();
    (o, bytes)
}

#[test]
fn experiments_are_byte_reproducible() {
    let dir = tempfile::tempdir().unwrap();
    let cases: [&[&str]; 3] = [
        &[
            "--seed",
            "5",
            "--format",
            "json",
            "experiment",
            "density",
            "--seeds",
            "4",
            "--n-grid",
            "16,64,256,1024",
        ],
        &[
            "--seed",
            "5",
            "--format",
            "csv",
            "experiment",
            "ldev2",
            "--trials",
            "500",
        ],
        &[
            "--seed",
            "5",
            "--format",
            "json",
            "experiment",
            "telescope",
            "--ell-max",
            "10",
        ],
    ];
    for (i, args) in cases.iter().enumerate() {
        let (o1, b1) = run_to(dir.path(), &format!("a{i}"), args);
        let (o2, b2) = run_to(dir.path(), &format!("b{i}"), args);
        assert_eq!(o1.status.code(), Some(0), "{}", String::from_utf8_lossy(&o1.stderr));
        assert!(!b1.is_empty());
        assert_eq!(b1, b2, "case {i}");
        assert_eq!(o1.stdout, o2.stdout);
    }
}

#[test]
fn persisted_verdict_rederives() {
    let dir = tempfile::tempdir().unwrap();
    let cases: [&[&str]; 4] = [
        &[
            "--seed",
            "1",
            "--format",
            "json",
            "experiment",
            "density",
            "--seeds",
            "4",
            "--n-grid",
            "16,64,256,1024",
        ],
        &[
            "--seed",
            "1",
            "--format",
            "json",
            "experiment",
            "lower",
            "--seeds",
            "4",
            "--n-grid",
            "16,64,256,1024",
        ],
        &[
            "--seed",
            "1",
            "--format",
            "json",
            "experiment",
            "hoeffding",
            "--trials",
            "500",
        ],
        &["--format", "json", "experiment", "boxdim", "--n", "1024"],
    ];
    for (i, args) in cases.iter().enumerate() {
        let (o, bytes) = run_to(dir.path(), &format!("r{i}.json"), args);
        assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
        let text = String::from_utf8(bytes).unwrap();
        let v: Value = serde_json::from_str(&text).unwrap();
        let stored = v["verdict"].as_str().unwrap().to_owned();
        let derived = mgshift::report::verdict_from_json(&text).unwrap();
        assert!(stored.starts_with(&derived), "{stored} vs {derived}");
        assert!(stdout(&o).contains(&derived));
        assert_eq!(
            v["config"]["seed"].as_u64(),
            args.iter().position(|a| *a == "--seed").map(|_| 1)
        );
    }
}

#[test]
fn cover_at_minkowski_dimension_stays_near_zero() {
    let o = mgshift(&[
        "--format",
        "json",
        "experiment",
        "cover",
        "--n-grid",
        "16,256,4096,65536",
    ]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    let v: Value = serde_json::from_str(&text).unwrap();
    for row in v["rows"].as_array().unwrap() {
        let n = row["n"].as_f64().unwrap();
        assert!(row["value"].as_f64().unwrap().abs() <= n.log2().powi(2), "{row}");
    }
}
