use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn entanglab(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_entanglab"))
        .args(args)
        .env_remove("ENTANGLAB_SEED")
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn write_config(dir: &Path, name: &str, body: &str) -> std::path::PathBuf {
    let p = dir.join(name);
    fs::write(&p, body).unwrap();
    p
}

#[test]
fn gauge_of_centred_bell_state() {
    let dir = tempfile::tempdir().unwrap();
    let input = dir.path().join("bell.json");
    fs::write(
        &input,
        r#"{"real": [[0.5, 0, 0, 0.5], [0, 0, 0, 0], [0, 0, 0, 0], [0.5, 0, 0, 0.5]]}"#,
    )
    .unwrap();
    let path = input.to_str().unwrap();
    let o = entanglab(&["gauge", "--input", path, "--body", "s0", "--center"]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert!((v["value"].as_f64().unwrap() - 3.0).abs() < 1e-6, "{v}");

    let o = entanglab(&["gauge", "--input", path, "--body", "ppt0", "--center"]);
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert!((v["value"].as_f64().unwrap() - 3.0).abs() < 1e-9, "{v}");

    // a state has trace one, so without --center it is rejected
    let o = entanglab(&["gauge", "--input", path, "--body", "s0"]);
    assert!(!o.status.success());
}

#[test]
fn run_writes_csv_and_sidecar() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("scan.csv");
    let cfg = write_config(
        dir.path(),
        "scan.json",
        &format!(
            r#"{{"experiment": "threshold_scan", "dims": [2, 2], "s_values": {{"start": 2, "stop": 10, "step": 4}},
  "trials": 200, "master_seed": 5, "criterion": "exact", "output": {:?}}}"#,
            out.to_str().unwrap()
        ),
    );
    let o = entanglab(&["run", cfg.to_str().unwrap()]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let csv = fs::read_to_string(&out).unwrap();
    let mut lines = csv.lines();
    assert_eq!(lines.next(), Some("s,trials,successes,p_hat,ci_low,ci_high"));
    assert_eq!(lines.count(), 3);
    let side: serde_json::Value = serde_json::from_str(&fs::read_to_string(out.with_extension("json")).unwrap()).unwrap();
    assert_eq!(side["experiment"], "threshold_scan");
    assert_eq!(side["master_seed"], 5);
    assert_eq!(side["rows"], 3);
}

#[test]
fn exact_criterion_on_qutrits_is_a_config_error() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(
        dir.path(),
        "bad.json",
        r#"{"experiment": "threshold_scan",
  "dims": [3, 3],
  "s_values": [4, 8],
  "trials": 10,
  "master_seed": 1,
  "criterion": "exact",
  "output": "never.csv"}"#,
    );
    let o = entanglab(&["run", cfg.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    let err = String::from_utf8_lossy(&o.stderr);
    assert!(err.contains("line 6"), "{err}");
    assert!(!dir.path().join("never.csv").exists());
}

#[test]
fn same_seed_gives_identical_output() {
    let args = ["scan-threshold", "--dims", "2,2", "--s", "2,4,8", "--trials", "300", "--criterion", "exact"];
    let a = entanglab(&[&["--seed", "11"][..], &args[..]].concat());
    let b = entanglab(&[&["--seed", "11"][..], &args[..]].concat());
    let c = entanglab(&[&["--seed", "12"][..], &args[..]].concat());
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
    assert_ne!(a.stdout, c.stdout);
}

#[test]
fn binary_sample_round_trips_through_gauge() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("rho.bin");
    let o = entanglab(&[
        "sample", "--ensemble", "induced", "--n", "4", "--s", "3", "--format", "binary", "--out",
        out.to_str().unwrap(),
    ]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let bytes = fs::read(&out).unwrap();
    assert_eq!(bytes.len(), 16 + 16 * 16);
    assert_eq!(&bytes[..8], &4u64.to_le_bytes());
    let o = entanglab(&["gauge", "--input", out.to_str().unwrap(), "--body", "d0", "--center"]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    // rank 3 of 4, so λ_min(ρ) = 0 and the D₀ gauge of ρ − Id/4 is exactly 1
    assert!((v["value"].as_f64().unwrap() - 1.0).abs() < 1e-9, "{v}");
}

#[test]
fn geometry_check_emits_rows() {
    let o = entanglab(&["geometry", "--check", "vrad", "--n", "2,64", "--format", "csv"]);
    assert!(o.status.success());
    let text = stdout(&o);
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("n,vrad,vrad_sqrt_n_e_quarter"));
    assert!(lines.next().unwrap().starts_with("2,0.7071067811865"));
}

#[test]
fn invalid_arguments_exit_nonzero() {
    assert!(!entanglab(&["sample", "--ensemble", "gue", "--n", "0"]).status.success());
    assert!(!entanglab(&["estimate-s0", "--d", "3", "--trials", "10"]).status.success());
}
