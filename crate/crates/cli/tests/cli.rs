use std::io::Write;
use std::process::{Command, Output, Stdio};

use serde_json::Value;

fn monop(args: &[&str], stdin: Option<&str>) -> Output {
    let mut child = Command::new(env!("CARGO_BIN_EXE_monop"))
        .args(args)
        .env_remove("MONOP_TOL")
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .stderr(Stdio::piped())
        .spawn()
        .expect("binary starts");
    {
        let mut pipe = child.stdin.take().unwrap();
        if let Some(text) = stdin {
            pipe.write_all(text.as_bytes()).unwrap();
        }
    }
    child.wait_with_output().unwrap()
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exited normally")
}

fn json(o: &Output) -> Value {
    serde_json::from_slice(&o.stdout).unwrap_or_else(|e| panic!("{e}: {}", String::from_utf8_lossy(&o.stdout)))
}

fn csv_column(o: &Output, col: usize) -> Vec<f64> {
    String::from_utf8_lossy(&o.stdout)
        .lines()
        .skip(1)
        .map(|l| l.split(',').nth(col).unwrap().parse().unwrap())
        .collect()
}

fn temp_file(text: &str) -> tempfile::NamedTempFile {
    let mut f = tempfile::NamedTempFile::new().unwrap();
    f.write_all(text.as_bytes()).unwrap();
    f
}

fn seq_json(p: impl Fn(usize) -> f64, len: usize) -> String {
    let items: Vec<String> = (0..len).map(|n| format!("[{},0]", p(n))).collect();
    items.join(",")
}

#[test]
fn pick_check_flat_shift_is_feasible() {
    let input = format!(r#"{{"p":[{}],"sizes":[5,20]}}"#, seq_json(|n| n as f64 + 1.0, 20));
    let file = temp_file(&input);
    let out = monop(&["pick-check", file.path().to_str().unwrap()], None);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let v = json(&out);
    let rows = v.as_array().unwrap();
    assert_eq!(rows.len(), 2);
    for (row, size) in rows.iter().zip([5, 20]) {
        assert_eq!(row["size"], size);
        assert_eq!(row["status"], "psd");
    }
}

#[test]
fn pick_check_shifted_down_sequence_fails_with_witness() {
    let input = format!(r#"{{"p":[{}],"sizes":[2]}}"#, seq_json(|n| n as f64 - 0.3, 2));
    let out = monop(&["pick-check", "-"], Some(&input));
    assert_eq!(code(&out), 2);
    let row = &json(&out)[0];
    assert_eq!(row["status"], "notpsd");
    assert!(row["min_eig"].as_f64().unwrap() < 0.0);
    assert_eq!(row["witness"].as_array().unwrap().len(), 2);
}

#[test]
fn pick_check_names_missing_field() {
    let out = monop(&["pick-check", "-"], Some(r#"{"sizes":[2]}"#));
    assert_eq!(code(&out), 1);
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("`p`"), "{err}");
    assert!(out.stdout.is_empty());
}

#[test]
fn apply_builtins() {
    let x2 = r#"{"terms":[{"coeff":[1,0],"exp":[2,0]}]}"#;
    let out = monop(&["apply", "--builtin", "hardy", "--f", "-"], Some(x2));
    assert_eq!(code(&out), 0);
    let t = &json(&out)["terms"][0];
    assert!((t["coeff"][0].as_f64().unwrap() - 1.0 / 3.0).abs() < 1e-15);
    assert_eq!(t["exp"][0], 2.0);

    let one = r#"{"terms":[{"coeff":[1,0],"exp":[0,0]}]}"#;
    let out = monop(&["apply", "--builtin", "volterra", "--f", "-"], Some(one));
    let t = &json(&out)["terms"][0];
    assert_eq!(t["coeff"][0], 1.0);
    assert_eq!(t["exp"][0], 1.0);
}

#[test]
fn apply_with_spec_file() {
    let spec = temp_file(r#"{"beta":{"kind":"flat","tau":[1,0]},"g":{"kind":"expr","text":"1/(s+2)"}}"#);
    let out = monop(
        &["apply", "--spec", spec.path().to_str().unwrap(), "--f", "-"],
        Some(r#"{"terms":[{"coeff":[2,0],"exp":[1,0]}]}"#),
    );
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let t = &json(&out)["terms"][0];
    // V(2x) = x²
    assert!((t["coeff"][0].as_f64().unwrap() - 1.0).abs() < 1e-15);
    assert_eq!(t["exp"][0], 2.0);
}

#[test]
fn norm_curves() {
    let out = monop(&["norm", "--builtin", "identity", "--n", "1,5,20"], None);
    assert_eq!(code(&out), 0);
    assert!(String::from_utf8_lossy(&out.stdout).starts_with("N,estimate\n"));
    assert_eq!(csv_column(&out, 1), vec![1.0, 1.0, 1.0]);

    let out = monop(&["norm", "--builtin", "hardy", "--n", "10,50,200"], None);
    let v = csv_column(&out, 1);
    assert!(v[0] > 1.0 && v[0] < v[1] && v[1] < v[2] && v[2] < 2.0, "{v:?}");

    let out = monop(&["--out", "json", "norm", "--builtin", "hardy", "--n", "1"], None);
    let x = json(&out)[0]["estimate"].as_f64().unwrap();
    assert!((x - (1.0 + 3f64.sqrt()) / 2.0).abs() < 1e-14);
}

#[test]
fn norm_of_unitary_spec_is_one() {
    let build = monop(&["unitary", "--theta", "0.4", "--a", "0.5,-0.2", "build"], None);
    assert_eq!(code(&build), 0);
    let spec = temp_file(&String::from_utf8_lossy(&build.stdout));
    let out = monop(&["norm", "--spec", spec.path().to_str().unwrap(), "--n", "3,10"], None);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    for v in csv_column(&out, 1) {
        assert!((v - 1.0).abs() < 1e-8, "{v}");
    }
}

#[test]
fn flat_check_verdicts() {
    let out = monop(&["flat-check", "--g", "1/(s+1/2)^0.3", "--tau", "1"], None);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    assert_eq!(json(&out)["status"], "bounded");

    let sweep = tempfile::NamedTempFile::new().unwrap();
    let out = monop(
        &["flat-check", "--g", "1/(s+1/2)^0.3", "--tau", "0", "--sweep", sweep.path().to_str().unwrap()],
        None,
    );
    assert_eq!(code(&out), 2);
    let v = json(&out);
    assert_eq!(v["status"], "unbounded");
    assert_eq!(v["witness"].as_array().unwrap().len(), 2);
    let csv = std::fs::read_to_string(sweep.path()).unwrap();
    assert!(csv.starts_with("sigma,t,value\n"));
    assert!(csv.lines().count() > 1);
}

#[test]
fn flat_check_negative_shift_is_an_error() {
    let out = monop(&["flat-check", "--g", "1", "--tau", "-0.5"], None);
    assert_eq!(code(&out), 1);
    assert!(String::from_utf8_lossy(&out.stderr).contains("pick-check"));
}

#[test]
fn flat_check_rejects_unknown_scan_fields() {
    let scan = temp_file(r#"{"n_t": 5, "bogus": 1}"#);
    let out = monop(&["flat-check", "--g", "1", "--tau", "1", "--scan", scan.path().to_str().unwrap()], None);
    assert_eq!(code(&out), 1);
    assert!(String::from_utf8_lossy(&out.stderr).contains("bogus"));
}

#[test]
fn unitary_commands() {
    let out = monop(&["unitary", "--theta", "0", "--a", "0", "check", "--pairs", "50"], None);
    assert_eq!(code(&out), 0);
    assert_eq!(json(&out)["isometry_residual"], 0.0);

    let out = monop(&["unitary", "--theta", "0", "--a", "0", "build"], None);
    assert_eq!(json(&out)["provenance"]["builtin"], "identity");

    let out = monop(&["unitary", "--theta", "0", "--a", "0.5", "check"], None);
    assert_eq!(code(&out), 0);
    let v = json(&out);
    assert_eq!(v["status"], "unitary");
    assert!(v["isometry_residual"].as_f64().unwrap() < 1e-10);

    let out = monop(&["unitary", "--theta", "0", "--a", "1", "build"], None);
    assert_eq!(code(&out), 1);
    assert!(out.stdout.is_empty());
}

#[test]
fn np_interp_round_trip_and_infeasible_data() {
    let input = r#"{"nodes":[[0,0],[1,0]],"targets":[[0.5,0],[0.9,0.1]],"eval":[[1,0]]}"#;
    let out = monop(&["np-interp", "-"], Some(input));
    assert_eq!(code(&out), 0);
    let v = json(&out);
    assert!(v["node_residual"].as_f64().unwrap() < 1e-12);
    assert!((v["values"][0][0].as_f64().unwrap() - 0.9).abs() < 1e-12);
    assert!((v["values"][0][1].as_f64().unwrap() - 0.1).abs() < 1e-12);

    let out = monop(&["np-interp", "-"], Some(r#"{"nodes":[[0,0],[1,0]],"targets":[[5,0],[0,0]]}"#));
    assert_eq!(code(&out), 2);
    assert_eq!(json(&out)["status"], "not_interpolable");
}

#[test]
fn poisson_sweep_csv() {
    let out = monop(&["poisson-sweep", "--g", "1/(s+1)", "--sigma", "0.5", "--t", "0,1"], None);
    assert_eq!(code(&out), 0);
    let v = csv_column(&out, 2);
    // |g|² = 1/(1/4 + y²) has Poisson extension (1/b)(b+σ)/((b+σ)² + t²) with b = 1/2
    assert!((v[0] - 2.0).abs() < 1e-8);
    assert!((v[1] - 1.0).abs() < 1e-8);
}

#[test]
fn tolerance_env_and_flag() {
    let out = Command::new(env!("CARGO_BIN_EXE_monop"))
        .args(["unitary", "--theta", "0", "--a", "0.5", "check"])
        .env("MONOP_TOL", "1e-30")
        .output()
        .unwrap();
    assert_eq!(code(&out), 2);
    let out = monop(&["--tol", "-1", "norm", "--builtin", "identity", "--n", "1"], None);
    assert_eq!(code(&out), 1);
}

#[test]
fn commands_are_deterministic() {
    let args = ["--seed", "9", "unitary", "--theta", "1", "--a", "0.3,0.4", "check", "--pairs", "200"];
    let a = monop(&args, None);
    let b = monop(&args, None);
    assert_eq!(a.stdout, b.stdout);
    let args = ["--jobs", "3", "poisson-sweep", "--g", "1/(s+2)", "--sigma", "0.1,1", "--t", "-1,3"];
    assert_eq!(monop(&args, None).stdout, monop(&args[2..], None).stdout);
}

#[test]
fn usage_errors_exit_one() {
    assert_eq!(code(&monop(&["norm", "--builtin", "hardy"], None)), 1);
    assert_eq!(code(&monop(&["frobnicate"], None)), 1);
    assert_eq!(code(&monop(&["--help"], None)), 0);
}
