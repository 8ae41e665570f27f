//! End-to-end runs of the `tailsim` binary.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;

const BIN: &str = env!("CARGO_BIN_EXE_tailsim");

fn reference_dir() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../configs/reference")
}

/// Copies the reference configuration into a fresh directory so outputs
/// land there.
fn workspace() -> tempfile::TempDir {
    let dir = tempfile::tempdir().unwrap();
    for f in ["substrate.json", "robot.json", "body.json", "tails.json", "run.json"] {
        fs::copy(reference_dir().join(f), dir.path().join(f)).unwrap();
    }
    dir
}

fn tailsim(args: &[&str]) -> Output {
    Command::new(BIN).args(args).output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn stderr_json(o: &Output) -> Value {
    serde_json::from_slice(&o.stderr)
        .unwrap_or_else(|e| panic!("stderr is not JSON ({e}): {}", String::from_utf8_lossy(&o.stderr)))
}

fn path_str(p: &Path) -> &str {
    p.to_str().unwrap()
}

fn write_penetration(path: &Path, k_n_per_cm: f64) {
    let mut s = String::from("# synthetic\ntime_s,depth_cm,force_N\n");
    for i in 0..=100 {
        let d = i as f64 * 0.05;
        s.push_str(&format!("{},{d},{}\n", i as f64 * 0.1, k_n_per_cm * d));
    }
    fs::write(path, s).unwrap();
}

fn write_shear(path: &Path, force: f64) {
    let mut s = String::from("time_s,disp_cm,force_N\n");
    for i in 0..=200 {
        s.push_str(&format!("{},{},{force}\n", i as f64 * 0.05, i as f64 * 0.1));
    }
    fs::write(path, s).unwrap();
}

fn write_mocap(path: &Path, v_cm_s: f64) {
    let mut s = String::from("time_s,x_cm,y_cm,z_cm,pitch_deg\n");
    for i in 0..=240 {
        let t = i as f64 / 120.0;
        s.push_str(&format!("{t},{},0,3,0\n", v_cm_s * t));
    }
    fs::write(path, s).unwrap();
}

#[test]
fn malformed_header_names_missing_column() {
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path().join("bad.csv");
    fs::write(&p, "time_s,force_N\n0,0\n").unwrap();
    let o = tailsim(&["calibrate", "penetration", "--input", path_str(&p)]);
    assert_eq!(o.status.code(), Some(2));
    let err = stderr_json(&o);
    let msg = err["error"]["message"].as_str().unwrap();
    assert!(msg.contains("depth_cm"), "{msg}");
    assert_eq!(err["error"]["line"], 1);
}

#[test]
fn calibrate_speed_reports_five_cm_per_s() {
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path().join("mocap.csv");
    write_mocap(&p, 5.0);
    let o = tailsim(&["calibrate", "speed", "--input", path_str(&p)]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let v: Value = serde_json::from_str(&stdout(&o)).unwrap();
    let speed = v["v_cm_s"].as_f64().unwrap();
    assert!((speed - 5.0).abs() < 1e-9, "{speed}");
    assert!(v["inputs"][0].as_str().unwrap().starts_with("mocap.csv=sha256:"));
}

#[test]
fn calibrate_speed_with_both_modes_reports_eta() {
    let dir = tempfile::tempdir().unwrap();
    let (a, b) = (dir.path().join("idle.csv"), dir.path().join("osc.csv"));
    write_mocap(&a, 5.9);
    write_mocap(&b, 6.9);
    let o = tailsim(&["calibrate", "speed", "--input", path_str(&a), "--osc", path_str(&b)]);
    let v: Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert!((v["eta"].as_f64().unwrap() - 1.0 / 5.9).abs() < 1e-9);
}

#[test]
fn calibrate_penetration_writes_fit_json() {
    let dir = tempfile::tempdir().unwrap();
    let (idle, osc, out) = (
        dir.path().join("idle_16.csv"),
        dir.path().join("osc_16.csv"),
        dir.path().join("kz.json"),
    );
    write_penetration(&idle, 3.2);
    write_penetration(&osc, 2.69);
    let o = tailsim(&[
        "calibrate",
        "penetration",
        "--input",
        path_str(&idle),
        "--window-cm",
        "0.5:4.0",
        "--out",
        path_str(&out),
    ]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let v: Value = serde_json::from_str(&fs::read_to_string(&out).unwrap()).unwrap();
    assert!((v["k_z_n_per_cm"].as_f64().unwrap() - 3.2).abs() < 1e-9);
    assert!(v["residual_rms_n"].as_f64().unwrap() < 1e-9);
    assert_eq!(v["window_cm"][0], 0.5);

    let o = tailsim(&[
        "calibrate",
        "penetration",
        "--input",
        path_str(&idle),
        "--osc",
        path_str(&osc),
    ]);
    let v: Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert!((v["dk_n_per_cm"].as_f64().unwrap() - 0.51).abs() < 1e-9);
    assert!(v["window_cm"][1].is_null());
}

#[test]
fn calibrate_shear_reports_drag_reduction() {
    let dir = tempfile::tempdir().unwrap();
    let (idle, osc) = (dir.path().join("idle.csv"), dir.path().join("osc.csv"));
    write_shear(&idle, 2.0);
    write_shear(&osc, 1.08);
    let o = tailsim(&["calibrate", "shear", "--idle", path_str(&idle), "--osc", path_str(&osc)]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let v: Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert!((v["drag_reduction"].as_f64().unwrap() - 0.46).abs() < 1e-12);
    assert!((v["rho_s"].as_f64().unwrap() - 0.54).abs() < 1e-12);
}

#[test]
fn calibrate_substrate_recovers_reference_values() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    write_penetration(&d.join("idle_2.csv"), 0.4);
    write_penetration(&d.join("osc_2.csv"), 0.05);
    write_penetration(&d.join("idle_16.csv"), 3.2);
    write_penetration(&d.join("osc_16.csv"), 2.69);
    // 10 cm wide rig at 2 cm: depth moment 20 cm³, so 1 N/cm³ gives 20 N.
    write_shear(&d.join("shear_idle.csv"), 20.0);
    write_shear(&d.join("shear_osc.csv"), 10.8);
    fs::write(
        d.join("rig.json"),
        r#"{"schema_version": 1, "knots_cm": [[0, 10], [5, 10]]}"#,
    )
    .unwrap();
    fs::write(
        d.join("manifest.json"),
        r#"{
  "schema_version": 1,
  "penetration": [
    {"area_cm2": 2, "idle": "idle_2.csv", "osc": "osc_2.csv"},
    {"area_cm2": 16, "idle": "idle_16.csv", "osc": "osc_16.csv"}
  ],
  "shear": {"idle": "shear_idle.csv", "osc": "shear_osc.csv", "rig_depth_cm": 2, "rig_body": "rig.json"}
}"#,
    )
    .unwrap();
    let out = d.join("substrate.json");
    let o = tailsim(&[
        "calibrate",
        "substrate",
        "--manifest",
        path_str(&d.join("manifest.json")),
        "--out",
        path_str(&out),
    ]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let v: Value = serde_json::from_str(&fs::read_to_string(&out).unwrap()).unwrap();
    let close = |key: &Value, want: f64| (key.as_f64().unwrap() - want).abs() < 1e-9;
    assert!(close(&v["cz_n_per_cm_per_cm2"], 0.2), "{v}");
    assert!(close(&v["ks_n_per_cm3"], 1.0), "{v}");
    assert!(close(&v["rho_s"], 0.54), "{v}");
    assert!(close(&v["fluidization"]["dk_small_n_per_cm"], 0.35), "{v}");
    assert!(close(&v["fluidization"]["dk_large_n_per_cm"], 0.51), "{v}");
}

#[test]
fn codesign_prints_crossover_and_flags_yielding_rows() {
    let dir = workspace();
    let cfg = dir.path().join("run.json");
    let o = tailsim(&["codesign", "--config", path_str(&cfg)]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let out = stdout(&o);
    let line = out.lines().find(|l| l.starts_with("crossover_area_cm2=")).unwrap();
    let a: f64 = line["crossover_area_cm2=".len()..].parse().unwrap();
    assert!((a - 8.1085).abs() < 0.01, "{a}");

    let csv = fs::read_to_string(dir.path().join("out/map.csv")).unwrap();
    let mut lines = csv.lines();
    assert!(lines.next().unwrap().starts_with("# tailsim "));
    assert!(lines.next().unwrap().starts_with("area_cm2,"));
    let first = lines.next().unwrap();
    assert!(first.starts_with("2,") && first.contains("substrate_yield"), "{first}");
    let svg = fs::read_to_string(dir.path().join("out/map.svg")).unwrap();
    assert!(svg.contains("R = 1") && svg.contains("A* ="));
}

#[test]
fn codesign_single_area_has_no_crossover() {
    let dir = workspace();
    let cfg = dir.path().join("run.json");
    let o = tailsim(&["codesign", "--config", path_str(&cfg), "--areas-cm2", "10:10:1"]);
    assert!(o.status.success());
    assert!(!stdout(&o).contains("crossover_area_cm2"));
    let csv = fs::read_to_string(dir.path().join("out/map.csv")).unwrap();
    assert_eq!(csv.lines().count(), 3);
    let svg = fs::read_to_string(dir.path().join("out/map.svg")).unwrap();
    assert!(!svg.contains("A* ="));
}

#[test]
fn codesign_without_crossover_is_informational() {
    let dir = workspace();
    let cfg = dir.path().join("run.json");
    let o = tailsim(&["codesign", "--config", path_str(&cfg), "--areas-cm2", "10:20:1"]);
    assert!(o.status.success());
    assert!(
        stdout(&o).contains("crossover_area_cm2=none (no_crossover"),
        "{}",
        stdout(&o)
    );
}

#[test]
fn codesign_serial_and_parallel_agree_bytewise() {
    let dir = workspace();
    let cfg = dir.path().join("run.json");
    let csv = dir.path().join("out/map.csv");
    tailsim(&["codesign", "--config", path_str(&cfg), "--serial"]);
    let serial = fs::read(&csv).unwrap();
    tailsim(&["codesign", "--config", path_str(&cfg)]);
    assert_eq!(serial, fs::read(&csv).unwrap());
}

#[test]
fn predict_emits_one_row_per_tail_and_mode() {
    let dir = workspace();
    let cfg = dir.path().join("run.json");
    for kind in ["sinkage", "drag"] {
        let o = tailsim(&["predict", kind, "--config", path_str(&cfg)]);
        assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
        let csv = fs::read_to_string(dir.path().join(format!("out/{kind}.csv"))).unwrap();
        let rows: Vec<&str> = csv.lines().skip(2).collect();
        assert_eq!(rows.len(), 4, "{csv}");
        // The small tail yields when oscillating: reported, not dropped.
        assert!(
            rows[1].starts_with("small,2,oscillate,") && rows[1].contains("substrate_yield"),
            "{}",
            rows[1]
        );
        assert!(dir.path().join(format!("out/{kind}.svg")).exists());
    }
    let o = tailsim(&["predict", "ratio", "--config", path_str(&cfg), "--no-svg"]);
    assert!(o.status.success());
    let csv = fs::read_to_string(dir.path().join("out/ratio.csv")).unwrap();
    assert!(csv.lines().nth(3).unwrap().contains(",oscillate,"));
    assert!(!dir.path().join("out/ratio.svg").exists());
}

#[test]
fn simulate_writes_trajectory() {
    let dir = workspace();
    let cfg = dir.path().join("run.json");
    let o = tailsim(&["simulate", "--config", path_str(&cfg), "--steps", "4"]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let csv = fs::read_to_string(dir.path().join("out/trajectory.csv")).unwrap();
    assert_eq!(csv.lines().count(), 2 + 2 * 2 * 4);
    assert!(
        csv.lines().nth(1).unwrap()
            == "label,area_cm2,mode,step,d_rear_cm,d_front_cm,pitch_deg,drag_n,speed_cm_s,x_cm,stuck"
    );
    assert!(dir.path().join("out/traj.svg").exists());
}

#[test]
fn missing_config_file_is_an_input_error() {
    let o = tailsim(&["codesign", "--config", "/nonexistent/run.json"]);
    assert_eq!(o.status.code(), Some(2));
    assert_eq!(stderr_json(&o)["error"]["kind"], "input");
}

#[test]
fn invalid_substrate_value_is_an_input_error() {
    let dir = workspace();
    let s = fs::read_to_string(dir.path().join("substrate.json"))
        .unwrap()
        .replace("\"rho_s\": 0.54", "\"rho_s\": 1.5");
    fs::write(dir.path().join("substrate.json"), s).unwrap();
    let o = tailsim(&["predict", "sinkage", "--config", path_str(&dir.path().join("run.json"))]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr_json(&o)["error"]["message"].as_str().unwrap().contains("rho_s"));
}
