//! End-to-end checks of the `cliquet` binary: exit codes, report
//! determinism, and the validate suite.

use std::io::Write;
use std::process::Command;

const CONFIG: &str = r#"{
  "model": {
    "r": 0.03, "sigma": 0.2, "lambda": 0.5,
    "jump": { "kind": "normal", "mu": -0.1, "delta": 0.15 }
  },
  "contract": {
    "K": 1000.0, "T": 1.0833333333333333, "g": 0.0, "c": 0.01,
    "n": 12, "t0": 0.0833333333333333, "tau": 0.0833333333333333
  },
  "policy": { "series_eps": 1e-12, "quad_tol": 1e-8, "max_terms": 200 },
  "mc": { "n_paths": 60000, "seed": 11, "antithetic": true }
}"#;

fn write_config(text: &str) -> tempfile_path::TempPath {
    tempfile_path::TempPath::new(text)
}

// minimal scoped temp file helper
mod tempfile_path {
    use std::path::PathBuf;

    pub struct TempPath(pub PathBuf);

    impl TempPath {
        pub fn new(content: &str) -> Self {
            let mut p = std::env::temp_dir();
            let unique = format!(
                "cliquet-test-{}-{:x}.json",
                std::process::id(),
                std::time::SystemTime::now()
                    .duration_since(std::time::UNIX_EPOCH)
                    .unwrap()
                    .as_nanos()
            );
            p.push(unique);
            let mut f = std::fs::File::create(&p).unwrap();
            super::Write::write_all(&mut f, content.as_bytes()).unwrap();
            TempPath(p)
        }

        pub fn as_str(&self) -> &str {
            self.0.to_str().unwrap()
        }
    }

    impl Drop for TempPath {
        fn drop(&mut self) {
            let _ = std::fs::remove_file(&self.0);
        }
    }
}

fn run(args: &[&str]) -> std::process::Output {
    Command::new(env!("CARGO_BIN_EXE_cliquet"))
        .args(args)
        .output()
        .expect("binary runs")
}

#[test]
fn price_report_round_trips_and_is_byte_identical() {
    let cfg = write_config(CONFIG);
    let a = run(&["--config", cfg.as_str(), "price"]);
    let b = run(&["--config", cfg.as_str(), "price"]);
    assert!(a.status.success());
    assert_eq!(
        a.stdout, b.stdout,
        "identical specs must give identical bytes"
    );
    let v: serde_json::Value = serde_json::from_slice(&a.stdout).expect("report re-parses");
    let results = v["results"].as_array().unwrap();
    assert_eq!(results.len(), 2);
    let p0 = results[0]["price"].as_f64().unwrap();
    let p1 = results[1]["price"].as_f64().unwrap();
    assert!((p0 - p1).abs() / p0 < 1e-5);
}

#[test]
fn degenerate_guarantee_prices_exactly() {
    let cfg = write_config(&CONFIG.replace("\"g\": 0.0", "\"g\": 0.12"));
    let out = run(&["--config", cfg.as_str(), "price"]);
    assert!(out.status.success());
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    let price = v["results"][0]["price"].as_f64().unwrap();
    let expect = 1000.0 * (-0.03f64 * 13.0 / 12.0).exp() * 1.12;
    assert!((price - expect).abs() / expect < 1e-12);
}

#[test]
fn malformed_config_exits_2_with_field_message() {
    let cfg = write_config(&CONFIG.replace("\"c\": 0.01", "\"c\": -0.01"));
    let out = run(&["--config", cfg.as_str(), "price"]);
    assert_eq!(out.status.code(), Some(2));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(
        err.contains("contract"),
        "stderr should name the offending section: {err}"
    );
    assert!(
        err.contains("config"),
        "stderr should carry the error kind: {err}"
    );
}

#[test]
fn missing_config_file_exits_2() {
    let out = run(&["--config", "/nonexistent/nowhere.json", "price"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn grid_sweep_and_csv_output() {
    let cfg = write_config(CONFIG);
    let out = run(&[
        "--config",
        cfg.as_str(),
        "--output",
        "csv",
        "--grid",
        "sigma=0.1:0.3:3",
        "price",
    ]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    let lines: Vec<&str> = text.trim().lines().collect();
    assert_eq!(lines.len(), 1 + 6, "header plus 3 sigmas x 2 methods");
    assert!(lines[0].starts_with("sigma,method,price"));
    let bad = run(&[
        "--config",
        cfg.as_str(),
        "--grid",
        "nonsense=0:1:2",
        "price",
    ]);
    assert_eq!(bad.status.code(), Some(2));
}

#[test]
fn mc_respects_seed_and_path_overrides() {
    let cfg = write_config(CONFIG);
    let a = run(&[
        "--config",
        cfg.as_str(),
        "--seed",
        "99",
        "--paths",
        "20000",
        "mc",
    ]);
    let b = run(&[
        "--config",
        cfg.as_str(),
        "--seed",
        "99",
        "--paths",
        "20000",
        "mc",
    ]);
    let c = run(&[
        "--config",
        cfg.as_str(),
        "--seed",
        "100",
        "--paths",
        "20000",
        "mc",
    ]);
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
    assert_ne!(a.stdout, c.stdout);
    let v: serde_json::Value = serde_json::from_slice(&a.stdout).unwrap();
    assert_eq!(v["results"][0]["n_paths"].as_u64(), Some(20_000));
    assert_eq!(v["results"][0]["seed"].as_u64(), Some(99));
}

#[test]
fn validate_passes_on_reference_configuration() {
    let cfg = write_config(CONFIG);
    let out = run(&["--config", cfg.as_str(), "validate"]);
    let text = String::from_utf8_lossy(&out.stdout);
    assert!(
        out.status.success(),
        "validate failed; stdout:\n{text}\nstderr:\n{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let v: serde_json::Value = serde_json::from_str(&text).unwrap();
    let rows = v["results"].as_array().unwrap();
    assert!(rows.len() >= 12);
    for row in rows {
        assert_eq!(
            row["passed"].as_bool(),
            Some(true),
            "check {} failed: observed {} vs threshold {}",
            row["check"],
            row["observed"],
            row["threshold"]
        );
    }
}

#[test]
fn unattainable_tolerance_exits_3() {
    let cfg = write_config(&CONFIG.replace("\"quad_tol\": 1e-8", "\"quad_tol\": 1e-30"));
    let out = run(&["--config", cfg.as_str(), "price"]);
    assert_eq!(out.status.code(), Some(3));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(
        err.contains("numerical"),
        "stderr should carry the error kind: {err}"
    );
}

#[test]
fn density_query_supports_exponential_jumps() {
    let cfg = write_config(&CONFIG.replace(
        "{ \"kind\": \"normal\", \"mu\": -0.1, \"delta\": 0.15 }",
        "{ \"kind\": \"exponential\", \"alpha\": 5.0 }",
    ));
    let out = run(&["--config", cfg.as_str(), "density"]);
    assert!(out.status.success());
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    let rows = v["results"].as_array().unwrap();
    assert_eq!(rows.len(), 25);
    assert!(rows[12]["density_fourier"].as_f64().unwrap() > 0.0);
    // the series density is absent for exponential amplitudes
    assert!(rows[0].get("density_series").is_none());
    // but pricing must refuse
    let priced = run(&["--config", cfg.as_str(), "price"]);
    assert_eq!(priced.status.code(), Some(2));
    // simulation still works; the analytic reference column becomes null
    let mc = run(&["--config", cfg.as_str(), "--paths", "20000", "mc"]);
    assert!(mc.status.success());
    let v: serde_json::Value = serde_json::from_slice(&mc.stdout).unwrap();
    assert!(v["results"][0]["mean"].as_f64().unwrap() > 0.0);
    assert!(v["results"][0]["analytic"].is_null());
}
