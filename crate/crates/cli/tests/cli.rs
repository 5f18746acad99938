//! End-to-end checks of the command-line surface: spec grammar, JSON
//! payloads, determinism, and the exit-code contract (0 ok, 1 verification
//! failure, 2 spec/usage, 3 numeric).

use std::io::Write;
use std::process::{Command, Output};

fn genjs(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_genjs"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout_json(out: &Output) -> serde_json::Value {
    assert!(
        out.status.success(),
        "stderr: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    serde_json::from_slice(&out.stdout).expect("stdout is one JSON value")
}

#[test]
fn harmonic_js_between_cauchys() {
    let out = genjs(&[
        "div", "--d", "js", "--m", "harmonic", "--alpha", "0.5", "cauchy:0.1", "cauchy:0.5",
    ]);
    let v = stdout_json(&out);
    assert!((v["value"].as_f64().unwrap() - 0.176).abs() <= 1e-3);
    assert_eq!(v["method"], "closed_form");
}

#[test]
fn kl_of_identical_files_is_zero() {
    let mut f = tempfile::NamedTempFile::with_suffix(".json").unwrap();
    writeln!(f, r#"{{"family":"cauchy","gamma":0.3}}"#).unwrap();
    let path = f.path().to_str().unwrap();
    let out = genjs(&["div", "--d", "kl", path, path]);
    let v = stdout_json(&out);
    assert_eq!(v["value"].as_f64().unwrap(), 0.0);
}

#[test]
fn gjs_reproduces_the_reference_gaussian_values() {
    let mut f1 = tempfile::NamedTempFile::with_suffix(".json").unwrap();
    writeln!(
        f1,
        r#"{{"chart":"ordinary","mu":[0.0,0.0],"sigma":[[1.0,0.0],[0.0,1.0]]}}"#
    )
    .unwrap();
    let mut f2 = tempfile::NamedTempFile::with_suffix(".json").unwrap();
    writeln!(
        f2,
        r#"{{"chart":"ordinary","mu":[1.0,2.0],"sigma":[[1.0,-1.0],[-1.0,2.0]]}}"#
    )
    .unwrap();
    let (p1, p2) = (f1.path().to_str().unwrap(), f2.path().to_str().unwrap());

    let v = stdout_json(&genjs(&["div", "--d", "gjs", "--alpha", "0.5", p1, p2]));
    assert!((v["value"].as_f64().unwrap() - 1.26343).abs() <= 1e-4);

    let v = stdout_json(&genjs(&["div", "--d", "gjs-dual", "--alpha", "0.5", p1, p2]));
    assert!((v["value"].as_f64().unwrap() - 0.86157).abs() <= 1e-4);

    // the mvn:@file indirection resolves to the same density
    let spec1 = format!("mvn:@{p1}");
    let v = stdout_json(&genjs(&["div", "--d", "kl", &spec1, p1]));
    assert_eq!(v["value"].as_f64().unwrap(), 0.0);
}

#[test]
fn output_is_byte_identical_across_runs() {
    let args = [
        "div", "--d", "js", "--m", "geometric", "--alpha", "0.3", "--seed", "5", "cauchy:0.2",
        "normal:0,1",
    ];
    let a = genjs(&args);
    let b = genjs(&args);
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
}

#[test]
fn chernoff_on_equal_variance_gaussians() {
    let out = genjs(&["chernoff", "normal:0,1", "normal:1,1"]);
    let v = stdout_json(&out);
    assert!((v["alpha_star"].as_f64().unwrap() - 0.5).abs() <= 1e-4);
    assert!((v["value"].as_f64().unwrap() - 0.125).abs() <= 1e-6);
}

#[test]
fn spec_errors_exit_two_with_json_on_stderr() {
    for args in [
        vec!["div", "--d", "kl", "cauchy:-1", "cauchy:0.5"],
        vec!["div", "--d", "nope", "cauchy:0.1", "cauchy:0.5"],
        vec!["div", "--d", "gjs", "cauchy:0.1", "cauchy:0.5"],
        vec!["div", "--d", "kl", "missing.json", "cauchy:0.5"],
        vec!["verify", "unknown-suite"],
    ] {
        let out = genjs(&args);
        assert_eq!(out.status.code(), Some(2), "args {args:?}");
        assert!(out.stdout.is_empty(), "stdout must stay clean");
        let err: serde_json::Value = serde_json::from_slice(&out.stderr).unwrap();
        assert_eq!(err["error"]["kind"], "spec");
    }
}

#[test]
fn verify_suite_passes_and_loose_tolerance_fails_with_exit_one() {
    let out = genjs(&["verify", "hjs-cauchy", "--pairs", "3"]);
    assert_eq!(out.status.code(), Some(0));
    let lines: Vec<serde_json::Value> = String::from_utf8_lossy(&out.stdout)
        .lines()
        .map(|l| serde_json::from_str(l).unwrap())
        .collect();
    assert_eq!(lines.len(), 7); // 2 cases per pair + summary
    assert!(lines[..6].iter().all(|c| c["pass"] == true));
    assert_eq!(lines[6]["failures"], 0);

    // degrading the quadrature tolerance far enough must surface as a
    // verification failure, not a silent pass
    let out = genjs(&["verify", "hjs-cauchy", "--pairs", "3", "--tol", "1e-1"]);
    assert_eq!(out.status.code(), Some(1));
    let err: serde_json::Value = serde_json::from_slice(&out.stderr).unwrap();
    assert_eq!(err["error"]["kind"], "verification");
}

#[test]
fn cluster_runs_on_csv_and_json() {
    let mut csv = tempfile::NamedTempFile::with_suffix(".csv").unwrap();
    writeln!(csv, "raw.x0,raw.x1").unwrap();
    for row in ["0.0,0.0", "0.4,0.2", "5.0,5.0", "5.2,4.9"] {
        writeln!(csv, "{row}").unwrap();
    }
    let out = genjs(&[
        "cluster",
        "--input",
        csv.path().to_str().unwrap(),
        "--k",
        "2",
        "--seed",
        "7",
    ]);
    let v = stdout_json(&out);
    assert_eq!(v["centers"].as_array().unwrap().len(), 2);
    assert_eq!(v["assignment"].as_array().unwrap().len(), 4);
    let trace = v["objective_trace"].as_array().unwrap();
    let vals: Vec<f64> = trace.iter().map(|t| t.as_f64().unwrap()).collect();
    assert!(vals.windows(2).all(|w| w[1] <= w[0] + 1e-12));

    let mut json = tempfile::NamedTempFile::with_suffix(".json").unwrap();
    writeln!(
        json,
        r#"{{"family":"mvn_natural","points":[[0.0,0.5],[0.2,0.6],[3.0,1.5],[3.2,1.4]],"k":2,"divergence":"kl"}}"#
    )
    .unwrap();
    let out = genjs(&["cluster", "--input", json.path().to_str().unwrap()]);
    let v = stdout_json(&out);
    assert_eq!(v["centers"].as_array().unwrap().len(), 2);

    // identical seeds give identical bytes
    let rerun = genjs(&["cluster", "--input", json.path().to_str().unwrap()]);
    assert_eq!(out.stdout, rerun.stdout);
}

#[test]
fn paper_table_passes_in_both_formats() {
    let out = genjs(&["paper-table"]);
    assert_eq!(out.status.code(), Some(0));
    assert!(String::from_utf8_lossy(&out.stdout).contains("G-JSD"));

    let out = genjs(&["paper-table", "--json"]);
    assert_eq!(out.status.code(), Some(0));
    for line in String::from_utf8_lossy(&out.stdout).lines() {
        let row: serde_json::Value = serde_json::from_str(line).unwrap();
        assert_eq!(row["pass"], true, "row {row}");
    }
}

#[test]
fn bhat_and_k_divergence_run_through_the_oracle() {
    let v = stdout_json(&genjs(&["div", "--d", "bhat", "--alpha", "0.3", "cauchy:0.2", "normal:0,1"]));
    assert!(v["value"].as_f64().unwrap() > 0.0);
    assert_eq!(v["method"], "oracle");

    let v = stdout_json(&genjs(&["div", "--d", "k-div", "--alpha", "1.0", "cauchy:0.1", "cauchy:0.5"]));
    assert!((v["value"].as_f64().unwrap() - 0.587786664902119).abs() <= 1e-7);
}
