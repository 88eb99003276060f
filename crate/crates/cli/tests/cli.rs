use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn transflow(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_transflow"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exit code")
}

fn write_config(dir: &Path, name: &str, doc: &Value) -> String {
    let path = dir.join(name);
    std::fs::write(&path, serde_json::to_string_pretty(doc).unwrap()).unwrap();
    path.to_string_lossy().into_owned()
}

fn heat_config(out: &Path, t_end: f64) -> Value {
    serde_json::json!({
        "domain": { "kind": "interval", "bounds": [[0, 1]], "resolution": 41 },
        "operator": { "family": "trace" },
        "boundary": { "kind": "flux1d", "alpha": 0, "beta": 1 },
        "initial": { "kind": "cosine", "amplitude": 0.1 },
        "time": { "t_end": t_end },
        "tolerances": { "tol_osc": 1e-6, "tol_speed": 1e-5, "obliqueness_floor": 0.5 },
        "output": { "dir": out }
    })
}

#[test]
fn presets_lists_five_entries() {
    let out = transflow(&["presets"]);
    assert_eq!(code(&out), 0);
    let text = String::from_utf8(out.stdout).unwrap();
    assert_eq!(text.lines().count(), 5);
    for name in ["heat-1d", "heat-1d-mode1", "ma-logdet-disk", "slag-disk-tau-pi2", "slag-disk-tau"] {
        assert!(text.contains(name), "{text}");
    }
}

#[test]
fn heat_preset_converges_and_writes_outputs() {
    let dir = tempfile::tempdir().unwrap();
    let out = transflow(&["preset", "heat-1d", "--out", dir.path().to_str().unwrap()]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stdout));
    let series = std::fs::read_to_string(dir.path().join("series.csv")).unwrap();
    assert_eq!(
        series.lines().next().unwrap(),
        "t,osc_w,speed_estimate,sup_ut_minus_speed,min_obliqueness,max_boundary_residual,sup_ut,max_grad,max_hess"
    );
    assert_eq!(series.lines().count(), 33);
    let profile = std::fs::read_to_string(dir.path().join("profile.csv")).unwrap();
    assert_eq!(profile.lines().next().unwrap(), "x1,u_tilde");
    assert_eq!(profile.lines().count(), 202);
    let report: Value =
        serde_json::from_str(&std::fs::read_to_string(dir.path().join("report.json")).unwrap()).unwrap();
    assert_eq!(report["exit_code"], 0);
    let c = report["result"]["c_inf"].as_f64().unwrap();
    assert!((c - 1.0).abs() < 1e-3);
}

#[test]
fn short_run_is_not_converged() {
    let dir = tempfile::tempdir().unwrap();
    let out = transflow(&[
        "preset",
        "heat-1d",
        "--out",
        dir.path().to_str().unwrap(),
        "--override",
        "time.t_end=0.125",
    ]);
    assert_eq!(code(&out), 2);
}

#[test]
fn degenerate_target_condition_exits_with_error() {
    let dir = tempfile::tempdir().unwrap();
    let doc = serde_json::json!({
        "domain": { "kind": "disk", "bounds": [[-1, 1], [-1, 1]], "resolution": 21 },
        "operator": { "family": "tau", "tau": "pi/2" },
        "boundary": { "kind": "target_disk", "radius": 1 },
        "initial": { "kind": "constant", "amplitude": 1 },
        "time": { "t_end": 1 },
        "tolerances": { "tol_osc": 1e-6, "tol_speed": 1e-5, "obliqueness_floor": 0.5 },
        "output": { "dir": dir.path().join("out") }
    });
    let cfg = write_config(dir.path(), "degenerate.json", &doc);
    let out = transflow(&["run", &cfg]);
    assert_eq!(code(&out), 1);
    let stdout = String::from_utf8(out.stdout).unwrap();
    assert!(stdout.contains("degenerate"), "{stdout}");
    let report: Value = serde_json::from_str(
        &std::fs::read_to_string(dir.path().join("out/report.json")).unwrap(),
    )
    .unwrap();
    assert_eq!(report["exit_code"], 1);
}

#[test]
fn unknown_key_is_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let mut doc = heat_config(&dir.path().join("out"), 1.0);
    doc["operator"]["viscosity"] = serde_json::json!(2.0);
    let cfg = write_config(dir.path(), "bad.json", &doc);
    let out = transflow(&["run", &cfg]);
    assert_eq!(code(&out), 1);
    assert!(String::from_utf8(out.stderr).unwrap().contains("viscosity"));
}

#[test]
fn runs_are_bit_identical() {
    let dir = tempfile::tempdir().unwrap();
    let mut csv = Vec::new();
    for k in 0..2 {
        let out_dir = dir.path().join(format!("run{k}"));
        let cfg = write_config(dir.path(), &format!("c{k}.json"), &heat_config(&out_dir, 0.5));
        let out = transflow(&["run", &cfg]);
        assert_ne!(code(&out), 1);
        csv.push((
            std::fs::read(out_dir.join("series.csv")).unwrap(),
            std::fs::read(out_dir.join("profile.csv")).unwrap(),
        ));
    }
    assert_eq!(csv[0], csv[1]);
}

#[test]
fn oracle_compare_on_heat_and_refusal_elsewhere() {
    let dir = tempfile::tempdir().unwrap();
    let out_dir = dir.path().join("oracle");
    let cfg = write_config(dir.path(), "heat.json", &heat_config(&out_dir, 2.0));
    let out = transflow(&["oracle-compare", &cfg]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stdout));
    let oracle = std::fs::read_to_string(out_dir.join("oracle.csv")).unwrap();
    assert_eq!(oracle.lines().next().unwrap(), "t,max_error");
    assert_eq!(oracle.lines().count(), 33);

    let mut disk = heat_config(&out_dir, 1.0);
    disk["domain"] = serde_json::json!({ "kind": "disk", "bounds": [[-1, 1], [-1, 1]], "resolution": 21 });
    disk["boundary"] = serde_json::json!({ "kind": "target_disk", "radius": 1 });
    let cfg = write_config(dir.path(), "disk.json", &disk);
    let out = transflow(&["oracle-compare", &cfg]);
    assert_eq!(code(&out), 1);
}

#[test]
fn unknown_preset_is_an_error() {
    let out = transflow(&["preset", "nope"]);
    assert_eq!(code(&out), 1);
}
