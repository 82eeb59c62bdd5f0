use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use pairsep::export::{parse_layer_csv, parse_sweep_json, read_sweep_csv, round_sig};
use pairsep::sweeps::Layer;

fn pairsep(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_pairsep"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

fn write_config(dir: &Path, name: &str, text: &str) -> String {
    let p = dir.join(name);
    fs::write(&p, text).unwrap();
    p.to_string_lossy().into_owned()
}

const WORKED: &str = r#"{
  "coupler": {
    "L_m": 1e-3,
    "lambda_deg_nm": 1550,
    "kappa": {"TE": {"type": "linear", "slope_per_m2": 1.053871e10, "intercept_per_m": -9217}}
  }
}"#;

fn row1(theta: f64) -> String {
    format!(
        r#"{{
  "state": {{"lambda_deg_nm": 780, "nondegeneracy_nm": 0, "photon_fwhm_nm": 10}},
  "coupler": {{"dimensionless": {{"TE": {{"delta_xi": 0, "M": 4.072, "lambda_deg_nm": 780}}}}}},
  "evolution": {{"theta_rad": {theta}, "tau_fs": 0}},
  "numerics": {{"points_per_axis": 64, "sigma_span": 4}}
}}"#
    )
}

#[test]
fn params_prints_dimensionless_numbers() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "c.json", WORKED);
    let out = dir.path().join("out");
    let o = pairsep(&["params", "--config", &cfg, "--out", out.to_str().unwrap()]);
    assert!(o.status.success(), "{}", stderr(&o));
    let s = stdout(&o);
    assert!(s.contains("delta_xi = 0.0494"), "{s}");
    assert!(s.contains("M = 16.33"), "{s}");
    let doc: serde_json::Value = serde_json::from_str(&fs::read_to_string(out.join("params.json")).unwrap()).unwrap();
    let te = &doc["polarizations"]["TE"];
    assert!((te["eta_deg"].as_f64().unwrap() - 0.4507).abs() < 1e-3);
    assert!((te["T_lambda_nm"].as_f64().unwrap() - 298.0).abs() < 1.0);
}

#[test]
fn dimensionless_config_round_trips() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(
        dir.path(),
        "c.json",
        r#"{"coupler": {"dimensionless": {"TE": {"delta_xi": 0.125, "M": 3.5, "lambda_deg_nm": 780}}}}"#,
    );
    let o = pairsep(&["params", "--config", &cfg]);
    assert!(o.status.success(), "{}", stderr(&o));
    let s = stdout(&o);
    assert!(s.contains("delta_xi = 0.1250") && s.contains("M = 3.5000"), "{s}");
}

#[test]
fn missing_polarization_is_a_config_error() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(
        dir.path(),
        "c.json",
        r#"{"state": {"lambda_deg_nm": 780, "photon_fwhm_nm": 10, "polarization": "TM"},
            "coupler": {"dimensionless": {"TE": {"delta_xi": 0, "M": 4.072, "lambda_deg_nm": 780}}}}"#,
    );
    let o = pairsep(&["run", "--config", &cfg]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("TM"), "{}", stderr(&o));
}

#[test]
fn malformed_config_reports_line() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "c.json", "{\n  \"state\": {\n    \"lambda_deg_nm\": -780\n  }\n}");
    let o = pairsep(&["run", "--config", &cfg]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("line 3"), "{}", stderr(&o));
}

#[test]
fn run_row1_and_phase_flip() {
    let dir = tempfile::tempdir().unwrap();
    for (theta, name) in [(0.0, "a"), (std::f64::consts::PI, "b")] {
        let cfg = write_config(dir.path(), &format!("{name}.json"), &row1(theta));
        let out = dir.path().join(name);
        let o = pairsep(&["run", "--config", &cfg, "--out", out.to_str().unwrap()]);
        assert!(o.status.success(), "{}", stderr(&o));
        let doc: serde_json::Value = serde_json::from_str(&fs::read_to_string(out.join("run.json")).unwrap()).unwrap();
        let r = &doc["report"];
        let (ps, pb) = (r["ps_total"].as_f64().unwrap(), r["pb_total"].as_f64().unwrap());
        if theta == 0.0 {
            assert!((ps - 0.999).abs() <= 0.005, "{ps}");
            assert!((r["vis_s"].as_f64().unwrap() - 0.998).abs() <= 0.005);
        } else {
            assert!(pb > 0.99, "{pb}");
        }
    }
}

#[test]
fn fig4_writes_six_layers_and_fig5_marks_singularity() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("maps");
    let o = pairsep(&["sweep", "--preset", "fig4", "--resolution", "5", "--points", "24", "--out", out.to_str().unwrap()]);
    assert!(o.status.success(), "{}", stderr(&o));
    for layer in Layer::ALL {
        let path = out.join(format!("fig4_{}.csv", layer.name()));
        let t = parse_layer_csv(&fs::read_to_string(&path).unwrap()).unwrap();
        assert_eq!(t.values.dim(), (5, 5));
    }
    assert!(out.join("fig4.json").exists());

    let o = pairsep(&["sweep", "--preset", "fig5", "--resolution", "5", "--out", out.to_str().unwrap(), "--format", "csv"]);
    assert!(o.status.success(), "{}", stderr(&o));
    let vb = fs::read_to_string(out.join("fig5_V_B.csv")).unwrap();
    let t = parse_layer_csv(&vb).unwrap();
    // Row MΛ = π/2, column Δξ = 0.
    assert_eq!(t.values[[2, 2]], None);
    assert_eq!(vb.matches("NA").count(), 1);
    assert!(!out.join("fig5.json").exists());
}

#[test]
fn custom_axes_are_honored() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("m");
    let o = pairsep(&[
        "sweep", "--preset", "fig13", "--x", "0.1:0.9:3", "--y", "0.2:0.8:4", "--out", out.to_str().unwrap(), "--format", "json",
    ]);
    assert!(o.status.success(), "{}", stderr(&o));
    let g = parse_sweep_json(&fs::read_to_string(out.join("fig13.json")).unwrap()).unwrap();
    assert_eq!(g.x_values.len(), 3);
    assert_eq!(g.y_values.len(), 4);
    assert!((g.y_values[3] - 0.8).abs() < 1e-12);
}

#[test]
fn unknown_preset_lists_available() {
    let o = pairsep(&["sweep", "--preset", "fig99"]);
    assert_eq!(o.status.code(), Some(2));
    let e = stderr(&o);
    for name in ["fig4", "fig5", "fig8", "fig11", "fig13"] {
        assert!(e.contains(name), "{e}");
    }
}

#[test]
fn usage_errors_exit_2() {
    assert_eq!(pairsep(&["frobnicate"]).status.code(), Some(2));
    assert_eq!(pairsep(&["sweep"]).status.code(), Some(2));
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "c.json", &row1(0.0));
    let o = pairsep(&["compensate", "--config", &cfg, "--halfwidth-nm", "-3"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("halfwidth"));
}

#[test]
fn tau_scan_guard_and_envelope_mode() {
    let o = pairsep(&["tau-scan", "--from-fs", "-500", "--to-fs", "500", "--samples", "200", "--points", "32"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("envelope-only"), "{}", stderr(&o));

    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("t");
    let o = pairsep(&[
        "tau-scan", "--from-fs", "-1500", "--to-fs", "1500", "--samples", "200", "--envelope-only", "--points", "32", "--out",
        out.to_str().unwrap(),
    ]);
    assert!(o.status.success(), "{}", stderr(&o));
    let csv = fs::read_to_string(out.join("tau_scan.csv")).unwrap();
    assert!(csv.contains("# sampling=envelope-only"));
    assert!(csv.contains("# first_inversion_fs=NA"));
    assert_eq!(csv.lines().filter(|l| !l.starts_with('#')).count(), 201);
}

#[test]
fn tau_scan_finds_inversion() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("t");
    let o = pairsep(&["tau-scan", "--from-fs", "-3", "--to-fs", "3", "--samples", "601", "--points", "64", "--out", out.to_str().unwrap(), "--format", "json"]);
    assert!(o.status.success(), "{}", stderr(&o));
    let doc: serde_json::Value = serde_json::from_str(&fs::read_to_string(out.join("tau_scan.json")).unwrap()).unwrap();
    let t = doc["first_inversion_fs"].as_f64().unwrap();
    assert!((t - 1.2917).abs() < 0.01, "{t}");
}

#[test]
fn outputs_are_deterministic_and_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let (a, b) = (dir.path().join("a"), dir.path().join("b"));
    for d in [&a, &b] {
        let o = pairsep(&["sweep", "--preset", "fig8", "--resolution", "4", "--points", "16", "--out", d.to_str().unwrap()]);
        assert!(o.status.success(), "{}", stderr(&o));
    }
    let mut names: Vec<_> = fs::read_dir(&a).unwrap().map(|e| e.unwrap().file_name()).collect();
    names.sort();
    assert_eq!(names.len(), 7);
    for n in &names {
        assert_eq!(fs::read(a.join(n)).unwrap(), fs::read(b.join(n)).unwrap(), "{n:?} differs");
    }
    let from_csv = read_sweep_csv(&a, "fig8").unwrap();
    let from_json = parse_sweep_json(&fs::read_to_string(a.join("fig8.json")).unwrap()).unwrap();
    assert_eq!(from_csv.x_values, from_json.x_values);
    for layer in Layer::ALL {
        let (c, j) = (from_csv.layer(layer).unwrap(), from_json.layer(layer).unwrap());
        for (u, v) in c.iter().zip(j.iter()) {
            match (u, v) {
                (Some(u), Some(v)) => assert_eq!(round_sig(*u), round_sig(*v)),
                (None, None) => {}
                _ => panic!("NA mismatch in {}", layer.name()),
            }
        }
    }
}

#[test]
fn compensate_reports_no_shift_at_optimum() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "c.json", &row1(0.0).replace("\"photon_fwhm_nm\": 10", "\"photon_fwhm_nm\": 0.01"));
    let out = dir.path().join("c");
    let o = pairsep(&["compensate", "--config", &cfg, "--halfwidth-nm", "20", "--points", "32", "--out", out.to_str().unwrap()]);
    assert!(o.status.success(), "{}", stderr(&o));
    assert!(stdout(&o).contains("note: no shift improves P_S"), "{}", stdout(&o));
    let doc: serde_json::Value = serde_json::from_str(&fs::read_to_string(out.join("compensate.json")).unwrap()).unwrap();
    assert_eq!(doc["delta_lambda_star_nm"].as_f64().unwrap(), 0.0);
    assert_eq!(doc["ps_after"].as_f64().unwrap(), doc["ps_before"].as_f64().unwrap());
}

#[test]
fn table1_includes_sn_and_footnote() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("t");
    let o = pairsep(&["table1", "--points", "48", "--out", out.to_str().unwrap(), "--format", "csv"]);
    assert!(o.status.success(), "{}", stderr(&o));
    assert!(stdout(&o).contains("overestimated"));
    let csv = fs::read_to_string(out.join("table1.csv")).unwrap();
    assert!(csv.lines().any(|l| l.starts_with("nondegeneracy_nm,bandwidth_nm,sn,")));
    assert_eq!(csv.lines().filter(|l| !l.starts_with('#')).count(), 6);
}
