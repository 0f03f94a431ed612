use std::process::{Command, Output};

use serde_json::Value;

fn lapconv(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_lapconv"))
        .args(args)
        .env_remove("LAPCONV_ZEROS")
        .output()
        .expect("binary runs")
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).expect("one JSON line")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

#[test]
fn verify_commands_pass() {
    let out = lapconv(&["verify", "prop22", "--N", "5000", "--lambda", "50", "--weight", "cesaro:3", "--tol", "1e-8"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert_eq!(v["pass"], true);
    assert_eq!(v["identity"], "prop22");
    let out = lapconv(&["verify", "cor24", "--d", "3", "--N", "2000", "--lambda", "20", "--weight", "cesaro:4"]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(json(&out)["params"]["d"], 3);
}

#[test]
fn impossible_tolerance_is_a_check_failure() {
    let out = lapconv(&["verify", "prop22", "--N", "2000", "--lambda", "20", "--weight", "cesaro:2", "--tol", "1e-300"]);
    let report = json(&out);
    if report["rel_err"].as_f64().unwrap() > 1e-300 {
        assert_eq!(out.status.code(), Some(1));
        assert_eq!(report["pass"], false);
    }
}

#[test]
fn precondition_violations_exit_2() {
    let missing = lapconv(&["explicit", "mgoldbach", "--x", "100", "--zeros", "/nonexistent/zeros.txt"]);
    assert_eq!(missing.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&missing.stderr).contains("zeros"));
    let env_missing = Command::new(env!("CARGO_BIN_EXE_lapconv"))
        .args(["explicit", "zlambda", "--lambda", "10"])
        .env("LAPCONV_ZEROS", "/nonexistent/zeros.txt")
        .output()
        .unwrap();
    assert_eq!(env_missing.status.code(), Some(2));
    assert_eq!(lapconv(&["explicit", "cesaro", "--lambda", "3"]).status.code(), Some(2));
    assert_eq!(lapconv(&["series", "dirichlet", "--s", "1.5"]).status.code(), Some(2));
    assert_eq!(lapconv(&["verify", "prop22", "--b", "0.5"]).status.code(), Some(2));
    assert_eq!(lapconv(&["verify", "prop22", "--weight", "gauss:1"]).status.code(), Some(2));
    assert_eq!(lapconv(&["explicit", "zlambda", "--lambda", "10", "--K", "5000"]).status.code(), Some(2));
}

#[test]
fn explicit_cesaro_reports_residual() {
    let zeros = concat!(env!("CARGO_MANIFEST_DIR"), "/../../data/zeros100.txt");
    let out = lapconv(&["explicit", "cesaro", "--lambda", "1000", "--k", "2", "--zeros", zeros, "--K", "100"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert_eq!(v["truncation_k"], 100);
    let exact = v["exact"]["re"].as_f64().unwrap();
    let explicit = v["explicit_value"]["re"].as_f64().unwrap();
    let residual = v["residual"]["re"].as_f64().unwrap();
    assert!((exact - explicit - residual).abs() <= 1e-9 * exact.abs());
    // M0 = λ²/Γ(5)
    assert!((v["m0"]["re"].as_f64().unwrap() - 1e6 / 24.0).abs() < 1e-6);
}

#[test]
fn zero_zeros_give_empty_sums() {
    let out = lapconv(&["explicit", "zlambda", "--lambda", "10", "--w", "2", "--K", "0"]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(json(&out)["value"]["re"], 0.0);
    let out = lapconv(&["explicit", "mgoldbach", "--x", "100", "--K", "0"]);
    let v = json(&out);
    assert_eq!(v["m1"]["re"], 0.0);
    assert_eq!(v["m2"]["re"], 0.0);
    let out = lapconv(&["series", "dirichlet", "--s", "3", "--K", "0"]);
    assert_eq!(json(&out)["explicit_value"]["re"], 2.0);
}

#[test]
fn zlambda_is_real_for_real_w() {
    let out = lapconv(&["explicit", "zlambda", "--lambda", "10", "--w", "2"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert_eq!(v["formula"], "z_lambda");
    let re = v["value"]["re"].as_f64().unwrap();
    assert!(v["value"]["im"].as_f64().unwrap().abs() <= 1e-9 * (1.0 + re.abs()));
}

#[test]
fn series_exp_comparison() {
    let out = lapconv(&["series", "exp", "--y", "0.01", "--N", "5000"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert_eq!(v["series"], "goldbach_exp");
    assert_eq!(v["truncation"]["N_sum"], 5000);
    assert!(v["residual"].as_f64().unwrap() <= 500.0);
}

#[test]
fn ratio_csv() {
    let out = lapconv(&["ratio", "--xmax", "10000", "--step", "1000"]);
    assert_eq!(out.status.code(), Some(0));
    let text = stdout(&out);
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "x,ratio_quadratic,ratio_cubic");
    assert_eq!(lines.len(), 11);
    assert!(lines[10].starts_with("10000.0,"));
}

#[test]
fn dump_conv_csv() {
    let out = lapconv(&["dump", "conv", "--g1", "lambda", "--g2", "lambda", "--N", "1000"]);
    assert_eq!(out.status.code(), Some(0));
    let text = stdout(&out);
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "n,G_n");
    assert_eq!(lines.len(), 1001);
    assert_eq!(lines[1], "1,0.0");
    let r5: f64 = lines[5].split(',').nth(1).unwrap().parse().unwrap();
    assert!((r5 - 2.0 * 2f64.ln() * 3f64.ln()).abs() < 1e-13);
}

#[test]
fn output_file_matches_stdout() {
    let dir = std::env::temp_dir().join(format!("lapconv-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("seq.csv");
    let args = ["dump", "seq", "--g", "r2", "--N", "50"];
    let direct = lapconv(&args);
    let mut with_file: Vec<&str> = args.to_vec();
    let p = path.to_str().unwrap();
    with_file.extend(["--output", p]);
    assert_eq!(lapconv(&with_file).status.code(), Some(0));
    assert_eq!(std::fs::read(&path).unwrap(), direct.stdout);
    std::fs::remove_dir_all(&dir).unwrap();
}
