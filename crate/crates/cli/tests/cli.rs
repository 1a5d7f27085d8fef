use std::process::{Command, Output};

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_spinboson")).args(args).output().expect("spawn spinboson")
}

fn stdout(args: &[&str]) -> String {
    let out = run(args);
    assert!(out.status.success(), "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
    String::from_utf8(out.stdout).unwrap()
}

fn rows(csv: &str) -> (Vec<String>, Vec<Vec<String>>) {
    let mut lines = csv.lines();
    let header = lines.next().unwrap().split(',').map(str::to_string).collect();
    let body = lines.map(|l| l.split(',').map(str::to_string).collect()).collect();
    (header, body)
}

#[test]
fn first_crossing_column_is_analytic() {
    let (header, body) = rows(&stdout(&["phase-diagram", "--r-range=-0.9:3:40", "--lambda-max", "1"]));
    assert_eq!(header, ["r", "kappa_-1", "kappa_0", "kappa_1"]);
    assert_eq!(body.len(), 40);
    for row in &body {
        let r: f64 = row[0].parse().unwrap();
        let k: f64 = row[1].parse().unwrap();
        assert!((k - ((1.0 + r) / 2.0).sqrt()).abs() < 1e-8, "r={r}: {k}");
    }
}

#[test]
fn output_is_deterministic_across_execution_modes() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a.csv");
    let b = dir.path().join("b.csv");
    let args = ["concurrence", "--n-spins", "3", "--r", "0.7", "--kappa-range", "0:3:200"];
    for (path, extra) in [(&a, None), (&b, Some("--sequential"))] {
        let mut full: Vec<&str> = args.to_vec();
        full.extend(["--out", path.to_str().unwrap()]);
        full.extend(extra);
        let out = run(&full);
        assert!(out.status.success());
        assert!(out.stdout.is_empty());
    }
    assert_eq!(std::fs::read(&a).unwrap(), std::fs::read(&b).unwrap());
    assert_eq!(stdout(&args).as_bytes(), std::fs::read(&a).unwrap());
}

#[test]
fn json_mirrors_csv() {
    let args = ["gsi", "--r", "0.3", "--lambda-max", "3"];
    let (header, body) = rows(&stdout(&args));
    let mut json_args = args.to_vec();
    json_args.extend(["--format", "json"]);
    let v: serde_json::Value = serde_json::from_str(&stdout(&json_args)).unwrap();
    let objs = v.as_array().unwrap();
    assert_eq!(objs.len(), body.len());
    for (obj, row) in objs.iter().zip(&body) {
        let keys: Vec<&String> = obj.as_object().unwrap().keys().collect();
        assert_eq!(keys, header.iter().collect::<Vec<_>>());
        let k: f64 = row[2].parse().unwrap();
        assert_eq!(obj["kappa_tilde"].as_f64().unwrap(), k);
    }
}

#[test]
fn two_mode_spectrum_starts_at_lowest_block() {
    let (_, body) = rows(&stdout(&["spectrum", "--rb", "1", "--kappa-b", "0.4", "--kappa-range", "0:0.2:3", "--lambda-max", "1"]));
    assert_eq!(body.len(), 9);
    for chunk in body.chunks(3) {
        let lambdas: Vec<&str> = chunk.iter().map(|r| r[1].as_str()).collect();
        assert_eq!(lambdas, ["-1", "0", "1"]);
        // the fully polarized block stays the ground state at weak coupling
        assert_eq!(chunk[0][3], "true");
    }
}

#[test]
fn resonant_concurrence_jumps_only_at_crossings() {
    let (header, body) = rows(&stdout(&["concurrence", "--r", "0", "--kappa-range", "0:1.9:400"]));
    assert_eq!(header, ["kappa", "lambda_star", "energy", "concurrence", "marker"]);
    let mut jumps = 0;
    for w in body.windows(2) {
        let (c0, c1): (f64, f64) = (w[0][3].parse().unwrap(), w[1][3].parse().unwrap());
        if (c0 - c1).abs() > 1e-12 {
            jumps += 1;
            assert_eq!(w[1][4], "gsi");
        }
    }
    assert_eq!(jumps, 4);
    assert_eq!(body.iter().filter(|r| r[4] == "gsi").count(), 4);
}

#[test]
fn table_run_reports_failures_in_exit_code() {
    let out = run(&["table", "--table", "5"]);
    let csv = String::from_utf8(out.stdout).unwrap();
    let (header, body) = rows(&csv);
    assert_eq!(header.last().unwrap(), "pass");
    let all_pass = body.iter().all(|r| r.last().unwrap() == "true");
    assert_eq!(out.status.success(), all_pass);
    if !all_pass {
        assert!(!out.stderr.is_empty());
    }
}

#[test]
fn usage_errors() {
    for args in [
        &["gsi", "--kappa-b", "1"][..],
        &["gsi", "--ra", "0.2"],
        &["phase-diagram", "--r-range", "1:0:3"],
        &["concurrence", "--kappa-range", "0:1"],
        &["table", "--table", "7"],
        &["certify", "--r", "0", "--r-range", "0:1:2"],
        &["gsi", "--n-spins", "2", "--lambda-max", "1/2"],
    ] {
        let out = run(args);
        assert!(!out.status.success(), "{args:?} should fail");
        assert!(out.stdout.is_empty(), "{args:?}");
        assert!(!out.stderr.is_empty(), "{args:?}");
    }
}
