use std::f64::consts::PI;
use std::process::{Command, Output};

use epr_sim::output::read_csv;

fn epr_sim(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_epr-sim")).args(args).output().expect("binary runs")
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

#[test]
fn clauser_sweep_has_315_rows() {
    let out = epr_sim(&["clauser", "--sweep", "theta2=0:3.14159:0.01", "--normalize", "denominator"]);
    assert!(out.status.success(), "{}", stderr(&out));
    let table = read_csv(&out.stdout).unwrap();
    assert_eq!(table.header, ["theta1_rad", "theta2_rad", "raw", "normalized"]);
    assert_eq!(table.rows.len(), 315);
    let theta = table.column("theta2_rad").unwrap();
    for (t, v) in theta.iter().zip(table.column("normalized").unwrap()) {
        assert!((v - t.sin().powi(2)).abs() < 1e-11, "{t}: {v}");
    }
}

#[test]
fn ghz_table_has_two_nonzero_regimes() {
    let out = epr_sim(&["ghz-table"]);
    assert!(out.status.success(), "{}", stderr(&out));
    let table = read_csv(&out.stdout).unwrap();
    assert_eq!(table.rows.len(), 16);
    let ratios = table.column("ratio_to_c").unwrap();
    let nonzero: Vec<f64> = ratios.into_iter().filter(|r| *r > 1e-12).collect();
    assert_eq!(nonzero, vec![1.0, 1.0]);
}

#[test]
fn brendel_envelope_vanishes_near_20_pi() {
    let out = epr_sim(&["brendel", "--sweep", "phi=19.5pi:20.5pi:0.5pi", "--format", "json"]);
    assert!(out.status.success(), "{}", stderr(&out));
    let rows: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    let rows = rows.as_array().unwrap();
    assert_eq!(rows.len(), 3);
    assert!((rows[1]["phi_rad"].as_f64().unwrap() - 20.0 * PI).abs() < 1e-9);
    assert!(rows[1]["envelope"].as_f64().unwrap() < 1e-3);
    assert!(rows[0]["envelope"].as_f64().unwrap() > 0.01);
}

#[test]
fn pi_units_and_output_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("franson.csv");
    let out = epr_sim(&[
        "franson",
        "--sweep",
        "phi=0:2pi:0.5pi",
        "--set",
        "psi=0.5pi",
        "--pi-units",
        "--out",
        path.to_str().unwrap(),
    ]);
    assert!(out.status.success(), "{}", stderr(&out));
    assert!(out.stdout.is_empty());
    let table = read_csv(&std::fs::read(&path).unwrap()).unwrap();
    assert_eq!(table.header, ["phi_rad", "phi_pi", "psi_rad", "psi_pi", "raw", "normalized"]);
    assert_eq!(table.column("phi_pi").unwrap(), vec![0.0, 0.5, 1.0, 1.5, 2.0]);
    let raw = table.column("raw").unwrap();
    assert!((raw[1] - 1.0).abs() < 1e-11 && raw[3].abs() < 1e-11, "{raw:?}");
}

#[test]
fn config_file_and_flag_overlay() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("ghz.json");
    std::fs::write(
        &cfg,
        r#"{"experiment": "ghz", "settings": {"theta1": "pi/4"}, "crosstalk": "off",
            "sweep": {"param": "theta4", "start": "-pi/4", "stop": "pi/4", "step": "pi/4"}}"#,
    )
    .unwrap();
    let out = epr_sim(&["ghz", "--config", cfg.to_str().unwrap(), "--set", "theta2=pi/4", "--set", "theta3=pi/4"]);
    assert!(out.status.success(), "{}", stderr(&out));
    let ratios = read_csv(&out.stdout).unwrap().column("ratio_to_c").unwrap();
    for r in [ratios[0], ratios[2]] {
        assert!((r - 0.125).abs() < 1e-11, "{ratios:?}");
    }
}

#[test]
fn unknown_experiment_exits_2_with_line() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("bad.json");
    std::fs::write(&cfg, "{\n  \"experiment\": \"bell-state\"\n}\n").unwrap();
    let out = epr_sim(&["clauser", "--config", cfg.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("line 2"), "{}", stderr(&out));
}

#[test]
fn even_node_count_exits_2() {
    let out = epr_sim(&["brendel", "--nodes", "200"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("--nodes"), "{}", stderr(&out));

    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("nodes.json");
    std::fs::write(&cfg, "{\n \"experiment\": \"brendel\",\n \"spread\": {\n  \"nodes\": 200\n }\n}").unwrap();
    let out = epr_sim(&["brendel", "--config", cfg.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("config line 4"), "{}", stderr(&out));
}

#[test]
fn bad_flags_exit_2() {
    assert_eq!(epr_sim(&["teleport"]).status.code(), Some(2));
    assert_eq!(epr_sim(&["clauser", "--set", "theta9=1"]).status.code(), Some(2));
    assert_eq!(epr_sim(&["clauser", "--sweep", "theta2=0:1:-0.1"]).status.code(), Some(2));
    assert_eq!(epr_sim(&["brendel", "--smax", "1.5"]).status.code(), Some(2));
}

#[test]
fn all_zero_sweep_exits_3() {
    let out = epr_sim(&["clauser", "--set", "theta1=0.3", "--sweep", "theta2=0.3:0.3:0.1"]);
    assert_eq!(out.status.code(), Some(3), "{}", stderr(&out));
    assert!(stderr(&out).contains("degenerate"), "{}", stderr(&out));
}

#[test]
fn mc_reports_estimate_and_accidentals() {
    let out = epr_sim(&[
        "mc",
        "--set",
        "theta1=0",
        "--set",
        "theta2=pi/2",
        "--trials",
        "100000",
        "--seed",
        "3",
        "--window",
        "0.001",
        "--duration",
        "20",
        "--rate",
        "50",
    ]);
    assert!(out.status.success(), "{}", stderr(&out));
    let table = read_csv(&out.stdout).unwrap();
    assert_eq!(
        table.header,
        ["theta1_rad", "theta2_rad", "analytic_raw", "mc_mean", "mc_stderr", "accidentals", "accidentals_expected"]
    );
    let row = &table.rows[0];
    assert!((row[3] - row[2]).abs() < 5.0 * row[4], "{row:?}");
    // λ = 25 per detector: 2 · 25² · 1e-3 · 20
    assert!((row[6] - 25.0).abs() < 1e-9);
}
