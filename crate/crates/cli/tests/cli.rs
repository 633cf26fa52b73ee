//! End-to-end tests driving the installed binary.

use std::path::Path;
use std::process::{Command, Output};

fn rodwave(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_rodwave"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).expect("utf-8 stdout")
}

fn stderr(out: &Output) -> String {
    String::from_utf8(out.stderr.clone()).expect("utf-8 stderr")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exit code")
}

// -------------------- system --------------------

#[test]
fn system_mefm_order_one_matches_prediction() {
    let out = rodwave(&["system", "mefm", "1", "full"]);
    assert_eq!(code(&out), 0);
    assert_eq!(
        stdout(&out),
        "equations: 8 (predicted 8), unknowns: 8 (predicted 8)\n"
    );
}

#[test]
fn system_sg_reports_nine_equations() {
    let out = rodwave(&["system", "sg"]);
    assert_eq!(code(&out), 0);
    assert!(stdout(&out).contains("equations: 9"));
}

#[test]
fn system_higher_orders_report_measured_counts() {
    // the generated systems outgrow the predicted counts; the command
    // reports both rather than papering over the mismatch
    let out = rodwave(&["system", "mefm", "2", "full"]);
    assert_eq!(code(&out), 0);
    assert!(stdout(&out).contains("equations: 11 (predicted 9)"));
    let out = rodwave(&["system", "mefm", "3", "full"]);
    assert_eq!(code(&out), 0);
    assert!(stdout(&out).contains("equations: 14 (predicted 10)"));
}

#[test]
fn system_rejects_unsupported_order() {
    let out = rodwave(&["system", "mefm", "4", "full"]);
    assert_eq!(code(&out), 2);
    assert!(stderr(&out).contains("unsupported order"));
}

#[test]
fn system_check_accepts_case_13_against_sigma0() {
    let out = rodwave(&["system", "mefm", "1", "sigma0", "--check", "mefm.case13"]);
    assert_eq!(code(&out), 0, "stderr: {}", stderr(&out));
    assert!(stdout(&out).contains("all residuals identically zero"));
}

#[test]
fn system_check_rejects_mismatched_kind() {
    let out = rodwave(&["system", "sg", "--check", "mefm.case13"]);
    assert_eq!(code(&out), 2);
}

#[test]
fn system_json_carries_equations() {
    let out = rodwave(&["--json", "system", "mefm", "1", "full"]);
    assert_eq!(code(&out), 0);
    let v: serde_json::Value = serde_json::from_str(&stdout(&out)).expect("json");
    assert_eq!(v["equations"].as_array().expect("array").len(), 8);
    assert_eq!(v["predicted_equations"], 8);
}

// -------------------- params --------------------

#[test]
fn params_prints_exact_reference_fractions() {
    let out = rodwave(&["params"]);
    assert_eq!(code(&out), 0);
    let text = stdout(&out);
    assert!(text.contains("\"alpha2\": \"38065/55296\""), "{text}");
    assert!(text.contains("\"alpha1\": \"95/768\""), "{text}");
    assert!(text.contains("\"beta1\": \"96/5\""), "{text}");
}

#[test]
fn params_accepts_a_material_config() {
    let dir = tempfile::tempdir().expect("tempdir");
    let path = dir.path().join("b.json");
    std::fs::write(
        &path,
        r#"{"material": {"lambda1": "3/4", "mu1": "5/4", "nu1": "1", "nu2": "2",
            "nu4": "4", "rho": "5/2", "c": "7/2", "delta": "1", "epsilon": "2"}}"#,
    )
    .expect("write config");
    let out = rodwave(&["--config", path.to_str().expect("utf-8"), "params"]);
    assert_eq!(code(&out), 0, "stderr: {}", stderr(&out));
    assert!(stdout(&out).contains("\"alpha1\": \"19/196\""));
}

#[test]
fn params_rejects_zero_shear_coupling() {
    let dir = tempfile::tempdir().expect("tempdir");
    let path = dir.path().join("zero.json");
    std::fs::write(
        &path,
        r#"{"material": {"lambda1": "0", "mu1": "5/2", "nu1": "2", "nu2": "3",
            "nu4": "5", "rho": "3", "c": "4", "delta": "5/2", "epsilon": "7/2"}}"#,
    )
    .expect("write config");
    let out = rodwave(&["--config", path.to_str().expect("utf-8"), "params"]);
    assert_eq!(code(&out), 2);
    assert!(stderr(&out).contains("ZeroPoissonRatio"));
}

// -------------------- list --------------------

#[test]
fn list_covers_the_registry() {
    let out = rodwave(&["list"]);
    assert_eq!(code(&out), 0);
    let text = stdout(&out);
    assert!(text.contains("sg.case1.tanh.plus"));
    assert!(text.contains("mefm.case15.rational.plus"));
    let out = rodwave(&["--json", "list"]);
    let rows: serde_json::Value = serde_json::from_str(&stdout(&out)).expect("json");
    assert!(rows.as_array().expect("array").len() >= 30);
}

// -------------------- eval --------------------

#[test]
fn eval_reports_value_and_wave_constants() {
    let out = rodwave(&[
        "eval",
        "--family",
        "sg.case1.tanh.plus",
        "--x",
        "1.0",
        "--t",
        "0.5",
    ]);
    assert_eq!(code(&out), 0, "stderr: {}", stderr(&out));
    let text = stdout(&out);
    assert!(text.contains("u      ="));
    assert!(text.contains("lambda ="));
}

#[test]
fn eval_family_can_come_from_config_with_overrides() {
    let dir = tempfile::tempdir().expect("tempdir");
    let path = dir.path().join("f.json");
    std::fs::write(
        &path,
        r#"{"family": "sg.case1.tanh.plus", "inputs": {"mu": 0.3}}"#,
    )
    .expect("write config");
    let out = rodwave(&[
        "--config",
        path.to_str().expect("utf-8"),
        "eval",
        "--x",
        "0.5",
        "--t",
        "0.0",
    ]);
    assert_eq!(code(&out), 0, "stderr: {}", stderr(&out));
}

#[test]
fn eval_rejects_unknown_family() {
    let out = rodwave(&[
        "eval",
        "--family",
        "sg.case99.tanh.plus",
        "--x",
        "0",
        "--t",
        "0",
    ]);
    assert_eq!(code(&out), 2);
}

#[test]
fn eval_json_round_trips() {
    let out = rodwave(&[
        "--json",
        "eval",
        "--family",
        "mefm.case13.exp.plus",
        "--x",
        "2.0",
        "--t",
        "1.0",
    ]);
    assert_eq!(code(&out), 0);
    let v: serde_json::Value = serde_json::from_str(&stdout(&out)).expect("json");
    assert_eq!(v["family"], "mefm.case13.exp.plus");
    assert!(v["re"].is_number());
}

// -------------------- verify --------------------

#[test]
fn verify_hand_checked_family_passes() {
    let out = rodwave(&["verify", "--family", "sg.case1.tanh.plus"]);
    assert_eq!(code(&out), 0, "stderr: {}", stderr(&out));
    assert!(stdout(&out).contains("PASS"));
}

#[test]
fn verify_unreachable_tolerance_exits_one() {
    let out = rodwave(&["verify", "--family", "sg.case1.tanh.plus", "--tol", "1e-30"]);
    assert_eq!(code(&out), 1);
}

#[test]
fn verify_catalog_flags_errata_unless_allowed() {
    let out = rodwave(&["verify"]);
    assert_eq!(code(&out), 1);
    assert!(stdout(&out).contains("FLAGGED_ERRATUM"));
    let out = rodwave(&["verify", "--allow-errata"]);
    assert_eq!(code(&out), 0, "stderr: {}", stderr(&out));
}

#[test]
fn verify_json_emits_one_object_per_entry() {
    let out = rodwave(&["--json", "verify", "--allow-errata"]);
    assert_eq!(code(&out), 0);
    let rows: serde_json::Value = serde_json::from_str(&stdout(&out)).expect("json");
    let rows = rows.as_array().expect("array");
    assert!(rows.len() >= 30);
    for row in rows {
        assert!(row["family"].is_string());
        assert!(row["status"].is_string());
    }
}

#[test]
fn verify_accepts_a_grid_spec() {
    let out = rodwave(&[
        "verify",
        "--family",
        "sg.case2.tanh.plus",
        "--grid",
        "-2:2:20",
    ]);
    assert_eq!(code(&out), 0, "stderr: {}", stderr(&out));
    assert!(stdout(&out).contains("20"));
}

#[test]
fn verify_rejects_a_malformed_grid() {
    let out = rodwave(&["verify", "--grid", "abc"]);
    assert_eq!(code(&out), 2);
}

// -------------------- figure --------------------

#[test]
fn figure_emits_csv_series_and_manifest() {
    let dir = tempfile::tempdir().expect("tempdir");
    let out_dir = dir.path().to_str().expect("utf-8");
    let out = rodwave(&["figure", "fig1", "--out", out_dir]);
    assert_eq!(code(&out), 0, "stderr: {}", stderr(&out));
    let manifest = std::fs::read_to_string(Path::new(out_dir).join("fig1_manifest.json"))
        .expect("manifest written");
    let v: serde_json::Value = serde_json::from_str(&manifest).expect("json");
    assert_eq!(v["series"].as_array().expect("array").len(), 5);
    let first = std::fs::read_to_string(Path::new(out_dir).join("fig1_mu0.25.csv"))
        .expect("series written");
    assert!(first.starts_with("x,re,im\n"));
    assert!(!first.contains('\r'));
}

#[test]
fn figure_rejects_unknown_preset() {
    let dir = tempfile::tempdir().expect("tempdir");
    let out = rodwave(&[
        "figure",
        "fig99",
        "--out",
        dir.path().to_str().expect("utf-8"),
    ]);
    assert_eq!(code(&out), 2);
}

#[test]
fn figure_manifest_residuals_match_a_fresh_verification() {
    // the manifest's residual statistics are recomputed facts, not
    // copied constants: a verify run over the same family at the same
    // tolerance must agree that the family is sound
    let dir = tempfile::tempdir().expect("tempdir");
    let out_dir = dir.path().to_str().expect("utf-8");
    let out = rodwave(&["--json", "figure", "fig1", "--out", out_dir]);
    assert_eq!(code(&out), 0);
    let v: serde_json::Value = serde_json::from_str(&stdout(&out)).expect("json");
    for series in v["series"].as_array().expect("array") {
        let max = series["residual"]["max_abs_pde_residual"]
            .as_f64()
            .expect("number");
        assert!(max < 1e-9, "series {} residual {max}", series["label"]);
    }
    let family = v["series"][0]["family"].as_str().expect("family id");
    let out = rodwave(&["verify", "--family", family]);
    assert_eq!(code(&out), 0);
}
