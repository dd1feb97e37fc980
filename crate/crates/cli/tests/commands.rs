use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn smallball(args: &[&str], env_dir: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_smallball"))
        .args(args)
        .env("SMALLBALL_OUT_DIR", env_dir)
        .output()
        .expect("binary runs")
}

fn manifest(dir: &Path) -> Value {
    serde_json::from_slice(&std::fs::read(dir.join("manifest.json")).unwrap()).unwrap()
}

#[test]
fn constants_subordinator() {
    let tmp = tempfile::tempdir().unwrap();
    let out = tmp.path().join("c");
    let o = smallball(
        &["constants", "--alpha", "0.5", "--kappa", "1", "--subordinator", "--p", "2", "--out", out.to_str().unwrap()],
        tmp.path(),
    );
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let report: Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(report["closed_form_constant"].as_f64().unwrap(), 0.25);
    assert_eq!(manifest(&out)["status"], "complete");
}

#[test]
fn constants_domain_error_exits_2() {
    let tmp = tempfile::tempdir().unwrap();
    let o = smallball(&["constants", "--alpha", "1", "--p", "0.5"], tmp.path());
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("p <= alpha"));
    // the default directory lives under the environment's parent
    let runs: Vec<_> = std::fs::read_dir(tmp.path()).unwrap().collect();
    assert_eq!(runs.len(), 1);
    let dir = runs[0].as_ref().unwrap().path();
    assert_eq!(manifest(&dir)["status"], "failed");
}

#[test]
fn simulate_single_step() {
    let tmp = tempfile::tempdir().unwrap();
    let out = tmp.path().join("s");
    let o = smallball(&["simulate", "--alpha", "1.5", "--n", "1", "--seed", "4", "--out", out.to_str().unwrap()], tmp.path());
    assert!(o.status.success());
    let text = std::fs::read_to_string(out.join("path.csv")).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines.len(), 3);
    assert_eq!(lines[0], "t,value");
    assert!(lines[1].starts_with("0.0000000000000000e0,0.0000000000000000e0"));
    assert_eq!(manifest(&out)["outputs"][0], "path.csv");
}

#[test]
fn simulate_is_reproducible_and_jumps_need_alpha_below_two() {
    let tmp = tempfile::tempdir().unwrap();
    let read = |name: &str| {
        let out = tmp.path().join(name);
        let o = smallball(
            &["simulate", "--alpha", "0.7", "--route", "jumps", "--n", "64", "--seed", "9", "--out", out.to_str().unwrap()],
            tmp.path(),
        );
        assert!(o.status.success());
        std::fs::read(out.join("path.csv")).unwrap()
    };
    assert_eq!(read("a"), read("b"));
    let o = smallball(&["simulate", "--alpha", "2", "--route", "jumps"], tmp.path());
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn pvar_of_monotone_csv() {
    let tmp = tempfile::tempdir().unwrap();
    let input = tmp.path().join("path.csv");
    std::fs::write(&input, "t,value\n0,0\n0.5,0.4\n1,1.5\n").unwrap();
    let o = smallball(&["pvar", "--input", input.to_str().unwrap(), "--p", "2"], tmp.path());
    assert!(o.status.success());
    let r: Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(r["pvar"].as_f64().unwrap(), 2.25);

    let o = smallball(&["pvar", "--input", input.to_str().unwrap(), "--p", "0.5"], tmp.path());
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("pure jump"));

    std::fs::write(&input, "t,value\n0,zero\n").unwrap();
    let o = smallball(&["pvar", "--input", input.to_str().unwrap(), "--p", "2"], tmp.path());
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn missing_input_is_an_io_error() {
    let tmp = tempfile::tempdir().unwrap();
    let o = smallball(&["pvar", "--input", "/nonexistent/x.csv", "--p", "2"], tmp.path());
    assert_eq!(o.status.code(), Some(4));
}

#[test]
fn infeasible_epsilons_exit_3() {
    let tmp = tempfile::tempdir().unwrap();
    let o = smallball(
        &[
            "smallball", "--alpha", "0.5", "--subordinator", "--p", "2", "--epsilons", "1e-4", "--n-paths", "2000",
        ],
        tmp.path(),
    );
    assert_eq!(o.status.code(), Some(3), "{}", String::from_utf8_lossy(&o.stderr));
}

#[test]
fn smallball_from_config_with_flag_override() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = tmp.path().join("run.json");
    std::fs::write(
        &cfg,
        r#"{"alpha": 0.5, "subordinator": true, "p": 2, "epsilons": [0.3, 0.6], "n_paths": 4000, "seed": 1}"#,
    )
    .unwrap();
    let out = tmp.path().join("sb");
    let o = smallball(
        &["smallball", "--config", cfg.to_str().unwrap(), "--seed", "2", "--out", out.to_str().unwrap()],
        tmp.path(),
    );
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let m = manifest(&out);
    assert_eq!(m["status"], "complete");
    assert_eq!(m["master_seed"], 2);
    assert_eq!(m["outputs"], serde_json::json!(["estimate.json", "table.csv"]));
    let table = std::fs::read_to_string(out.join("table.csv")).unwrap();
    assert!(table.starts_with("epsilon,hits,p_hat,se,p_lo,p_hi,k_hat,k_lo,k_hi\n"));
    assert_eq!(table.lines().count(), 3);
}

#[test]
fn verify_dp_suite() {
    let tmp = tempfile::tempdir().unwrap();
    let o = smallball(&["verify", "--suite", "dp", "--n-paths", "100"], tmp.path());
    assert!(o.status.success());
    assert!(String::from_utf8_lossy(&o.stdout).starts_with("PASS"));
}
