//! Binary-level tests: exit-code contract, output schemas, determinism.

use std::io::Write;
use std::process::{Command, Output};

fn genw(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_genw"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout_str(out: &Output) -> String {
    String::from_utf8_lossy(&out.stdout).into_owned()
}

#[test]
fn coeffs_classical_csv() {
    let out = genw(&["coeffs", "--n", "4", "--format", "csv"]);
    assert_eq!(out.status.code(), Some(0));
    let text = stdout_str(&out);
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "n,re_c,im_c,re_F,im_F");
    let want = [1.0, -1.0, 1.5, -8.0 / 3.0];
    for (i, &w) in want.iter().enumerate() {
        let fields: Vec<&str> = lines[i + 1].split(',').collect();
        assert_eq!(fields[0], (i + 1).to_string());
        let got: f64 = fields[1].parse().unwrap();
        assert!((got - w).abs() <= 1e-13 * w.abs(), "row {}: {got} vs {w}", i + 1);
    }
}

#[test]
fn invert_classical_at_e() {
    let out = genw(&["invert", "--w", "2.718281828459045,0", "--n", "30"]);
    assert_eq!(out.status.code(), Some(0));
    let doc: serde_json::Value = serde_json::from_str(&stdout_str(&out)).unwrap();
    let z = doc["z"].as_array().unwrap();
    assert!((z[0].as_f64().unwrap() - 1.0).abs() < 1e-10);
    assert!(z[1].as_f64().unwrap().abs() < 1e-10);
    assert!(doc["residual"].as_f64().unwrap() < 1e-12);
    assert_eq!(doc["converged"].as_bool(), Some(true));
}

#[test]
fn eval_reports_round_trip_residual() {
    let out = genw(&["eval", "--x", "0.1,0", "--n", "30"]);
    assert_eq!(out.status.code(), Some(0));
    let doc: serde_json::Value = serde_json::from_str(&stdout_str(&out)).unwrap();
    let z = doc["z"].as_array().unwrap();
    assert!((z[0].as_f64().unwrap() - 0.09127652716086226).abs() < 1e-12);
    assert!(doc["residual"].as_f64().unwrap() < 1e-12);
}

#[test]
fn radius_report_contains_known_saddles() {
    let out = genw(&["radius", "--t", "-1,1", "--p", "-1,1", "--n", "60"]);
    assert_eq!(out.status.code(), Some(0));
    let doc: serde_json::Value = serde_json::from_str(&stdout_str(&out)).unwrap();
    let saddles = doc["saddles"].as_array().unwrap();
    assert_eq!(saddles.len(), 2);
    let close = |v: &serde_json::Value, re: f64, im: f64| {
        let a = v.as_array().unwrap();
        (a[0].as_f64().unwrap() - re).abs() < 1e-9 && (a[1].as_f64().unwrap() - im).abs() < 1e-9
    };
    assert!(saddles.iter().any(|s| close(&s["lambda"][0], 0.0, -1.0)));
    assert!(saddles.iter().any(|s| close(&s["lambda"][0], 1.0, 1.0)));
}

#[test]
fn radius_plot_format() {
    let out = genw(&["radius", "--t", "1,0", "--p", "1,0", "--n", "60", "--format", "plot"]);
    assert_eq!(out.status.code(), Some(0));
    let text = stdout_str(&out);
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "n,log_abs_c,n_log_inv_r");
    assert_eq!(lines.len(), 61);
}

#[test]
fn verify_passes_and_is_deterministic() {
    let a = genw(&["verify", "--seed", "7", "--n", "80", "--format", "csv"]);
    assert_eq!(a.status.code(), Some(0), "stderr: {}", String::from_utf8_lossy(&a.stderr));
    let b = genw(&["verify", "--seed", "7", "--n", "80", "--format", "csv"]);
    assert_eq!(a.stdout, b.stdout, "same config + seed must be byte-identical");
    let c = genw(&["verify", "--seed", "8", "--n", "80", "--format", "csv"]);
    assert_eq!(c.status.code(), Some(0));
}

#[test]
fn verify_failure_exits_2() {
    // an unreachable tolerance forces counted failures
    let out = genw(&["verify", "--seed", "7", "--n", "40", "--tol", "1e-300"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn validation_errors_exit_1() {
    // mismatched inline factors
    let out = genw(&["coeffs", "--t", "1,0"]);
    assert_eq!(out.status.code(), Some(1));
    // malformed complex literal
    let out = genw(&["eval", "--x", "nope"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("--x"));
    // unknown flag via clap
    let out = genw(&["coeffs", "--bogus"]);
    assert_eq!(out.status.code(), Some(1));
    // zero root rejected by the parameter validator
    let out = genw(&["coeffs", "--t", "0,0", "--p", "1,0"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("t[0]"));
}

#[test]
fn params_file_roundtrip_and_diagnostics() {
    let dir = std::env::temp_dir();
    let good = dir.join("genw_params_ok.json");
    let bad = dir.join("genw_params_bad.json");
    std::fs::File::create(&good)
        .and_then(|mut f| f.write_all(br#"{"t":[[1.0,0.0]],"p":[[1.0,0.0]]}"#))
        .unwrap();
    std::fs::File::create(&bad)
        .and_then(|mut f| f.write_all(br#"{"t":[[1.0,0.0]]}"#))
        .unwrap();

    let out = genw(&["coeffs", "--params", good.to_str().unwrap(), "--n", "3", "--format", "csv"]);
    assert_eq!(out.status.code(), Some(0));

    let out = genw(&["coeffs", "--params", bad.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
    // the diagnostic names the missing field
    assert!(String::from_utf8_lossy(&out.stderr).contains("`p`"));
}

#[test]
fn asymptotics_table_runs() {
    let out = genw(&["asymptotics", "--t", "1,0", "--p", "1,0", "--format", "csv"]);
    assert_eq!(out.status.code(), Some(0));
    let text = stdout_str(&out);
    assert!(text.lines().count() >= 4);
    assert!(text.starts_with("quantity,n,"));
    // every tabulated ratio error stays small
    for line in text.lines().skip(1) {
        let err: f64 = line.rsplit(',').next().unwrap().parse().unwrap();
        assert!(err < 0.05, "line {line}");
    }
}

#[test]
fn output_file_flag() {
    let path = std::env::temp_dir().join("genw_out_test.csv");
    let _ = std::fs::remove_file(&path);
    let out = genw(&[
        "coeffs", "--n", "3", "--format", "csv", "--out", path.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0));
    assert!(out.stdout.is_empty());
    let text = std::fs::read_to_string(&path).unwrap();
    assert_eq!(text.lines().count(), 4);
    let _ = std::fs::remove_file(&path);
}
