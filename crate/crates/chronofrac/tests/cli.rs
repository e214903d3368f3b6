//! End-to-end tests of the chronofrac binary: exit codes, output formats,
//! CSV ingestion, and determinism.

use std::io::Write;
use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_chronofrac"))
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

#[test]
fn deriv_paper_example() {
    let out = run(&[
        "deriv", "--scale", "Z", "--fn", "t^2", "--order", "1/2", "--at", "4",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let line = stdout(&out);
    let row: serde_json::Value = serde_json::from_str(line.trim()).unwrap();
    assert_eq!(row["t"], 4.0);
    assert_eq!(row["value"], 9.0);
    assert_eq!(row["method"], "ClosedFormScattered");
    assert_eq!(row["error_estimate"], 0.0);
}

#[test]
fn deriv_higher_order_grid() {
    let out = run(&[
        "deriv", "--scale", "hZ:1", "--fn", "t^2", "--order", "1.3", "--at", "5",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let row: serde_json::Value = serde_json::from_str(stdout(&out).trim()).unwrap();
    assert_eq!(row["value"], 2.0);
}

#[test]
fn deriv_constant_on_reals() {
    let out = run(&[
        "deriv", "--scale", "R", "--fn", "7", "--order", "1/3", "--at", "0",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let row: serde_json::Value = serde_json::from_str(stdout(&out).trim()).unwrap();
    assert_eq!(row["value"].as_f64().unwrap(), 0.0);
    assert_eq!(row["method"], "TwoSidedLimit");
    assert!(row["error_estimate"].as_f64().unwrap() <= 1e-9);
}

#[test]
fn integ_paper_examples() {
    for order in ["1/2", "0.25"] {
        let out = run(&[
            "integ", "--scale", "Z", "--fn", "t", "--order", order, "--from", "1", "--to", "10",
        ]);
        assert_eq!(out.status.code(), Some(0), "order={order}");
        let row: serde_json::Value = serde_json::from_str(stdout(&out).trim()).unwrap();
        assert_eq!(row["value"], 9.0, "order={order}");
    }
    let out = run(&[
        "integ", "--scale", "Z", "--fn", "t", "--order", "1/2", "--from", "3", "--to", "3",
    ]);
    let row: serde_json::Value = serde_json::from_str(stdout(&out).trim()).unwrap();
    assert_eq!(row["value"], 0.0);
}

#[test]
fn chain_paper_example() {
    let out = run(&[
        "chain", "--scale", "Z", "--outer", "t^2", "--fn", "2*t", "--order", "1/2", "--at", "4",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let row: serde_json::Value = serde_json::from_str(stdout(&out).trim()).unwrap();
    assert!((row["witness"].as_f64().unwrap() - 4.5).abs() <= 1e-9);
}

#[test]
fn info_examples_and_exit_codes() {
    let out = run(&["info", "--scale", "cantor:3", "--at", "1/3"]);
    assert_eq!(out.status.code(), Some(0));
    let row: serde_json::Value = serde_json::from_str(stdout(&out).trim()).unwrap();
    assert!((row["sigma"].as_f64().unwrap() - 2.0 / 3.0).abs() <= 1e-12);
    assert!((row["graininess"].as_f64().unwrap() - 1.0 / 3.0).abs() <= 1e-12);
    assert_eq!(row["class"], "right-scattered,left-dense");

    let out = run(&["info", "--scale", "Z", "--at", "0"]);
    let row: serde_json::Value = serde_json::from_str(stdout(&out).trim()).unwrap();
    assert_eq!(row["class"], "isolated");

    let out = run(&["info", "--scale", "Z", "--at", "0.5"]);
    assert_eq!(out.status.code(), Some(2));

    let out = run(&["deriv", "--scale", "Z", "--fn", "t"]);
    assert_eq!(out.status.code(), Some(64));

    let out = run(&["laws", "--cases", "0"]);
    assert_eq!(out.status.code(), Some(64));
}

#[test]
fn json_and_csv_payloads_agree() {
    let args = [
        "deriv", "--scale", "hZ:0.5", "--fn", "t^3", "--order", "2/3", "--grid", "1",
        "--window", "0,3",
    ];
    let json_out = run(&args);
    let mut csv_args = args.to_vec();
    csv_args.extend(["--format", "csv"]);
    let csv_out = run(&csv_args);
    assert_eq!(json_out.status.code(), Some(0));
    assert_eq!(csv_out.status.code(), Some(0));
    let json_text = stdout(&json_out);
    let csv_text = stdout(&csv_out);
    let json_rows: Vec<serde_json::Value> = json_text
        .lines()
        .map(|l| serde_json::from_str(l).unwrap())
        .collect();
    let csv_rows: Vec<Vec<&str>> = csv_text.lines().skip(1).map(|l| l.split(',').collect()).collect();
    assert_eq!(json_rows.len(), csv_rows.len());
    assert!(!json_rows.is_empty());
    for (j, c) in json_rows.iter().zip(&csv_rows) {
        // Same numbers after round-trip, regardless of the printed form.
        assert_eq!(j["t"].as_f64().unwrap(), c[0].parse::<f64>().unwrap());
        assert_eq!(j["value"].as_f64().unwrap(), c[1].parse::<f64>().unwrap());
    }
}

#[test]
fn output_is_deterministic() {
    let args = ["laws", "--seed", "1", "--cases", "20"];
    let first = run(&args);
    let second = run(&args);
    assert_eq!(first.status.code(), Some(0));
    assert_eq!(first.stdout, second.stdout);
    assert!(!first.stdout.is_empty());
}

#[test]
fn laws_inject_fault_fails() {
    let out = run(&["laws", "--cases", "5", "--inject-fault"]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn csv_ingestion_end_to_end() {
    let mut file = tempfile::NamedTempFile::new().unwrap();
    writeln!(file, "t,value\n0,0\n0.5,0.25\n1.7,2.89\n3,9").unwrap();
    let path = file.path().to_str().unwrap();
    let out = run(&["deriv", "--csv", path, "--order", "1/2", "--at", "0.5"]);
    assert_eq!(out.status.code(), Some(0));
    let row: serde_json::Value = serde_json::from_str(stdout(&out).trim()).unwrap();
    // (f(1.7) - f(0.5)) / 1.2^(1/2)
    let expected = (2.89 - 0.25) / 1.2f64.sqrt();
    assert!((row["value"].as_f64().unwrap() - expected).abs() <= 1e-12);

    let mut bad = tempfile::NamedTempFile::new().unwrap();
    writeln!(bad, "1,5\n1,6").unwrap();
    let out = run(&["deriv", "--csv", bad.path().to_str().unwrap(), "--order", "1/2", "--at", "1"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn tolerance_env_override() {
    // A loose tolerance makes the dense limit stop earlier, which shows up
    // in the reported error estimate.
    let args = [
        "deriv", "--scale", "R", "--fn", "t^2", "--order", "1/2", "--at", "1",
    ];
    let strict = run(&args);
    let loose = bin()
        .args(args)
        .env("CHRONOFRAC_TOL", "1e-2")
        .output()
        .unwrap();
    assert_eq!(strict.status.code(), Some(0));
    assert_eq!(loose.status.code(), Some(0));
    let strict_row: serde_json::Value = serde_json::from_str(stdout(&strict).trim()).unwrap();
    let loose_row: serde_json::Value = serde_json::from_str(stdout(&loose).trim()).unwrap();
    let strict_err = strict_row["error_estimate"].as_f64().unwrap();
    let loose_err = loose_row["error_estimate"].as_f64().unwrap();
    assert!(loose_err > strict_err, "{loose_err} vs {strict_err}");
    // The --tol flag takes precedence over the environment.
    let flagged = bin()
        .args(args)
        .args(["--tol", "1e-9"])
        .env("CHRONOFRAC_TOL", "1e-2")
        .output()
        .unwrap();
    assert_eq!(flagged.stdout, strict.stdout);
}
