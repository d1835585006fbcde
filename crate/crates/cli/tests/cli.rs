use std::process::{Command, Output};

use serde_json::Value;

fn superfid(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_superfid"))
        .args(args)
        .env_remove("SUPERFID_SEED")
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

#[test]
fn sample_csv_layout() {
    let o = superfid(&["sample", "--measure", "hs", "--dim", "3", "--count", "4", "--seed", "2", "--full-matrix"]);
    assert!(o.status.success());
    let text = stdout(&o);
    let lines: Vec<&str> = text.lines().filter(|l| !l.starts_with('#')).collect();
    assert_eq!(lines.len(), 5);
    let header: Vec<&str> = lines[0].split(',').collect();
    assert_eq!(&header[..4], ["lambda_1", "lambda_2", "lambda_3", "purity"]);
    assert_eq!(header.len(), 4 + 18);
    assert_eq!(header[4], "re_1_1");
    for row in &lines[1..] {
        let v: Vec<f64> = row.split(',').map(|x| x.parse().unwrap()).collect();
        assert_eq!(v.len(), header.len());
        assert!((v[0] + v[1] + v[2] - 1.0).abs() < 1e-12);
        assert!(v[0] >= v[1] && v[1] >= v[2]);
    }
    assert!(text.contains("# seed=2\n"));
}

#[test]
fn sample_json_reports_rejection() {
    let o = superfid(&["sample", "--measure", "g", "--dim", "3", "--count", "50", "--format", "json"]);
    assert!(o.status.success());
    let v: Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["schema_version"], 1);
    assert_eq!(v["measure"], "g");
    assert_eq!(v["records"].as_array().unwrap().len(), 50);
    assert_eq!(v["rejection"]["accepted"], 50);
    assert!(v["rejection"]["proposed"].as_u64().unwrap() >= 50);
}

#[test]
fn seed_from_environment() {
    let args = ["sample", "--measure", "bures", "--dim", "2", "--count", "5"];
    let with_env = Command::new(env!("CARGO_BIN_EXE_superfid")).args(args).env("SUPERFID_SEED", "42").output().unwrap();
    let mut explicit = args.to_vec();
    explicit.extend(["--seed", "42"]);
    assert_eq!(with_env.stdout, superfid(&explicit).stdout);
    assert_ne!(with_env.stdout, superfid(&args).stdout);
}

#[test]
fn workers_recorded_in_metadata() {
    let a = superfid(&["sample", "--measure", "hs", "--dim", "2", "--count", "10", "--workers", "1"]);
    let b = superfid(&["sample", "--measure", "hs", "--dim", "2", "--count", "10", "--workers", "2"]);
    assert!(a.status.success() && b.status.success());
    assert!(stdout(&b).contains("# workers=2\n"));
}

#[test]
fn estimate_kinds() {
    let o = superfid(&["estimate", "--dim", "4", "--method", "jensen"]);
    let v: Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["kind"], "upper_bound");
    let o = superfid(&["estimate", "--dim", "2", "--method", "exact"]);
    let v: Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["kind"], "value");
    assert!((v["value"].as_f64().unwrap() - 0.900316316157106).abs() < 1e-12);
    let o = superfid(&["estimate", "--dim", "2", "--method", "series", "--moments", "closed", "--k-max", "2"]);
    let v: Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["partial_sums"].as_array().unwrap().len(), 3);
}

#[test]
fn grid_csv() {
    let o = superfid(&["grid", "--dim", "3", "--resolution", "10"]);
    assert!(o.status.success());
    let text = stdout(&o);
    let rows: Vec<&str> = text.lines().filter(|l| !l.starts_with('#')).skip(1).collect();
    assert_eq!(rows.len(), 11 * 12 / 2);
    assert_eq!(rows.iter().filter(|r| r.ends_with(",1")).count(), 3);
}

#[test]
fn exit_codes() {
    assert_eq!(superfid(&["estimate", "--dim", "4", "--method", "exact"]).status.code(), Some(2));
    assert_eq!(superfid(&["estimate", "--dim", "4", "--method", "series", "--moments", "closed", "--k-max", "3"]).status.code(), Some(2));
    assert_eq!(superfid(&["grid", "--dim", "4"]).status.code(), Some(2));
    assert_eq!(superfid(&["verify", "nonsense"]).status.code(), Some(2));
    assert_eq!(superfid(&["sample", "--measure", "g", "--dim", "6", "--count", "1"]).status.code(), Some(2));
    let budget = superfid(&["sample", "--measure", "g", "--dim", "3", "--count", "200", "--max-proposals", "1"]);
    assert_eq!(budget.status.code(), Some(3));
}

#[test]
fn verify_metric_passes() {
    let dir = tempfile::tempdir().unwrap();
    let report = dir.path().join("r.json");
    let o = superfid(&["verify", "metric", "--report", report.to_str().unwrap()]);
    assert!(o.status.success());
    assert!(stdout(&o).lines().all(|l| l.starts_with("PASS ")));
    let v: Value = serde_json::from_str(&std::fs::read_to_string(report).unwrap()).unwrap();
    assert_eq!(v["passed"], true);
}
