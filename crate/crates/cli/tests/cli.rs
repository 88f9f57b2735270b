use std::path::Path;
use std::process::{Command, Output};

use pairsource_core::dispersion::CrystalSpec;

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_pairsource")).args(args).output().expect("spawn pairsource")
}

fn json(o: &Output) -> serde_json::Value {
    assert!(o.status.success(), "stderr: {}", String::from_utf8_lossy(&o.stderr));
    serde_json::from_slice(&o.stdout).expect("json on stdout")
}

fn write(dir: &Path, name: &str, text: &str) -> String {
    let p = dir.join(name);
    std::fs::write(&p, text).unwrap();
    p.to_str().unwrap().to_string()
}

#[test]
fn crystal_list_has_the_table_entries() {
    let v = json(&run(&["crystals", "list"]));
    let names: Vec<&str> = v.as_array().unwrap().iter().map(|c| c["name"].as_str().unwrap()).collect();
    for n in ["KNbO3", "PPLN", "PPKTP"] {
        assert!(names.contains(&n), "{names:?}");
    }
}

#[test]
fn unknown_crystal_is_an_input_error() {
    assert_eq!(run(&["crystals", "show", "BBO"]).status.code(), Some(1));
}

#[test]
fn shown_crystal_round_trips() {
    let o = run(&["crystals", "show", "ppktp"]);
    assert!(o.status.success());
    let spec = CrystalSpec::from_json_str(std::str::from_utf8(&o.stdout).unwrap()).unwrap();
    assert_eq!(spec.name, "PPKTP");
}

#[test]
fn solve_ppln_poling() {
    let v = json(&run(&["solve", "--crystal", "PPLN"]));
    assert!(v["residual"].as_f64().unwrap() < 1e-6);
    let period = v["solution"]["poling"]["period"].as_f64().unwrap();
    assert!(period > 5e-6 && period < 10e-6, "{period}");
}

#[test]
fn solve_degenerate_ppktp() {
    let v = json(&run(&["solve", "--crystal", "PPKTP"]));
    assert!(v["solution"]["poling"]["period"].as_f64().is_some());
}

#[test]
fn energy_violation_exits_one() {
    let o = run(&["solve", "--crystal", "PPLN", "--lambda-p", "532e-9", "--lambda-s", "500e-9"]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn efficiency_single_arm() {
    let v = json(&run(&[
        "efficiency", "--arm", "idler", "--coincidences", "7000", "--singles-signal", "39000",
        "--eta-idler", "0.24", "--t-idler", "0.87",
    ]));
    assert!((v["mu"].as_f64().unwrap() - 0.860).abs() < 1e-3);
}

#[test]
fn efficiency_record_file() {
    let dir = tempfile::tempdir().unwrap();
    let rec = write(
        dir.path(),
        "rec.json",
        r#"{"coincidences":900,"singles_signal":1000,"singles_idler":1000,
            "detector_efficiency_signal":0.5,"detector_efficiency_idler":1,
            "transmission_signal":1,"transmission_idler":1}"#,
    );
    let v = json(&run(&["efficiency", "--record", &rec]));
    assert_eq!(v["inconsistent_calibration"], true);
    let bad = write(dir.path(), "bad.json", r#"{"coincidences":1,"singles":2}"#);
    let o = run(&["efficiency", "--record", &bad]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn unknown_config_key_reports_path() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "c.json", r#"{"schema":"pairsource.config/1","crystal":"KNbO3","pump":{"waste":1e-4}}"#);
    let o = run(&["solve", "--config", &cfg]);
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stderr).contains("pump"));
}

#[test]
fn empty_scan_exits_one() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(
        dir.path(),
        "c.json",
        r#"{"schema":"pairsource.config/1","crystal":"KNbO3","scan":{"kind":"pump_waist","values":[]}}"#,
    );
    assert_eq!(run(&["scan", "--config", &cfg]).status.code(), Some(1));
}

#[test]
fn scan_csv_has_units() {
    let o = run(&["scan", "--crystal", "KNbO3", "--points", "32", "--values", "5e-5,2e-4", "--format", "csv"]);
    assert!(o.status.success());
    let text = String::from_utf8(o.stdout).unwrap();
    assert!(text.lines().any(|l| l == "pump_waist_m,purity"));
    assert_eq!(text.lines().filter(|l| !l.starts_with('#')).count(), 3);
}

#[test]
fn plateau_failure_exits_two() {
    let o = run(&["design", "--crystal", "KNbO3", "--points", "48", "--pump", "cw", "--plateau-fraction", "1e-9"]);
    assert_eq!(o.status.code(), Some(2), "{}", String::from_utf8_lossy(&o.stderr));
}

#[test]
fn design_is_reproducible_and_near_the_published_waists() {
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path();
    let mut outputs = Vec::new();
    for k in 0..2 {
        let out = p.join(format!("d{k}.json"));
        let curves = p.join(format!("curves{k}"));
        let o = run(&[
            "design", "--crystal", "KNbO3", "--points", "96",
            "--out", out.to_str().unwrap(), "--curves-dir", curves.to_str().unwrap(),
        ]);
        assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
        let mut files = vec![std::fs::read(&out).unwrap()];
        for f in ["spectral_spatial.csv", "joint_angular.csv", "collected_spectral_spatial.csv"] {
            files.push(std::fs::read(curves.join(f)).unwrap());
        }
        outputs.push(files);
    }
    assert_eq!(outputs[0], outputs[1]);
    let v: serde_json::Value = serde_json::from_slice(&outputs[0][0]).unwrap();
    let ws = v["signal"]["waist"].as_f64().unwrap();
    let wi = v["idler"]["waist"].as_f64().unwrap();
    assert!((ws / 145e-6 - 1.0).abs() < 0.1, "{ws}");
    assert!((wi / 140e-6 - 1.0).abs() < 0.1, "{wi}");
}

#[test]
fn toy_matches_closed_form() {
    let v = json(&run(&["toy", "--sigma", "1e-4", "--k-p", "2e4", "--points", "1024"]));
    assert!(v["fidelity"].as_f64().unwrap() > 1.0 - 1e-6);
    assert!((v["fitted_width"].as_f64().unwrap() / 1e-4 - 1.0).abs() < 0.01);
}

#[test]
fn bad_flag_exits_one() {
    assert_eq!(run(&["toy"]).status.code(), Some(1));
    assert_eq!(run(&["frobnicate"]).status.code(), Some(1));
}
