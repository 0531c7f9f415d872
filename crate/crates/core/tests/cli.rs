use std::fs;
use std::path::Path;

use sparse_steady::cli::run;

fn sh(args: &[&str]) -> (i32, String, String) {
    let mut out = Vec::new();
    let mut err = Vec::new();
    let argv = std::iter::once("sparse-steady").chain(args.iter().copied());
    let code = run(argv, &mut out, &mut err);
    (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
}

fn p(path: &Path) -> &str {
    path.to_str().unwrap()
}

#[test]
fn standard_construct_then_verify() {
    let dir = tempfile::tempdir().unwrap();
    let run_dir = dir.path().join("run");
    let (code, out, _) = sh(&[
        "construct", "--rho0", "1/2", "--k0", "1,1", "--stages", "8", "--c0", "4", "--exponent", "12", "--out", p(&run_dir),
    ]);
    assert_eq!(code, 0, "{out}");
    for f in ["state.json", "report.json", "field.json", "admissibility.csv", "manifest.json"] {
        assert!(run_dir.join(f).exists(), "{f}");
    }
    let (code, out, _) = sh(&["verify", p(&run_dir)]);
    assert_eq!(code, 0, "{out}");
    assert!(out.contains("stored report reproduced"));
}

#[test]
fn bad_rho0_is_a_config_error() {
    let dir = tempfile::tempdir().unwrap();
    let (code, _, err) = sh(&["construct", "--rho0", "1", "--out", p(dir.path())]);
    assert_eq!(code, 2);
    assert!(err.contains("rho0 must lie in (0,1)"), "{err}");
}

#[test]
fn unsafe_schedule_marks_bounds_not_applicable() {
    let dir = tempfile::tempdir().unwrap();
    let (code, out, _) = sh(&["construct", "--unsafe-schedule", "--stages", "3", "--out", p(dir.path())]);
    assert_eq!(code, 0, "{out}");
    for name in ["rho-bound", "c0-inequalities", "summability"] {
        let line = out.lines().find(|l| l.contains(name)).unwrap();
        assert!(line.trim_start().starts_with("n/a"), "{line}");
    }
}

#[test]
fn perturbed_ledger_amplitude_fails_verification() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(sh(&["construct", "--unsafe-schedule", "--stages", "2", "--out", p(dir.path())]).0, 0);
    let path = dir.path().join("state.json");
    let mut state: serde_json::Value = serde_json::from_str(&fs::read_to_string(&path).unwrap()).unwrap();
    let m = &mut state["ledger"][5]["lambda_abs"]["m"];
    *m = serde_json::json!(m.as_f64().unwrap() * (1.0 + 1e-3));
    fs::write(&path, serde_json::to_string_pretty(&state).unwrap()).unwrap();
    let (code, out, _) = sh(&["verify", p(&path)]);
    assert_eq!(code, 1);
    assert!(out.contains("failing check: residual-identity"), "{out}");
}

#[test]
fn stored_report_mismatch_fails_verification() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(sh(&["construct", "--unsafe-schedule", "--stages", "1", "--out", p(dir.path())]).0, 0);
    let path = dir.path().join("report.json");
    let mut report: serde_json::Value = serde_json::from_str(&fs::read_to_string(&path).unwrap()).unwrap();
    report["checks"][0]["detail"] = serde_json::json!("edited");
    fs::write(&path, serde_json::to_string_pretty(&report).unwrap()).unwrap();
    let (code, out, _) = sh(&["verify", p(dir.path())]);
    assert_eq!(code, 1);
    assert!(out.contains("report mismatch"), "{out}");
}

#[test]
fn missing_and_malformed_inputs_exit_two() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(sh(&["verify", p(&dir.path().join("nowhere"))]).0, 2);
    let junk = dir.path().join("state.json");
    fs::write(&junk, "{\"schema\": 3}").unwrap();
    assert_eq!(sh(&["verify", p(&junk)]).0, 2);
    assert_eq!(sh(&["construct"]).0, 2);
    assert_eq!(sh(&["frobnicate"]).0, 2);
    assert_eq!(sh(&["--help"]).0, 0);
}

#[test]
fn generate_enforces_the_gap() {
    let dir = tempfile::tempdir().unwrap();
    let (code, _, err) = sh(&["generate", "resonant", "--ratio", "8", "--out", p(dir.path())]);
    assert_eq!(code, 2);
    assert!(err.contains("gap condition requires ratio > 8"), "{err}");

    let (code, out, _) = sh(&["generate", "lacunary", "--rotating", "--out", p(dir.path())]);
    assert_eq!(code, 0, "{out}");
    let f = sparse_steady::io::read_field(&dir.path().join("field.json")).unwrap();
    assert_eq!(f.len(), 6);

    let res = dir.path().join("res");
    let (code, out, _) = sh(&[
        "generate", "resonant", "--base", "9,-9", "--count", "3", "--omega0", "1,1", "--eta", "1/2", "--out", p(&res),
    ]);
    assert_eq!(code, 0, "{out}");
    assert!(res.join("conditions.json").exists());
}

#[test]
fn reruns_are_byte_identical() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("run");
    let files = ["state.json", "report.json", "field.json", "admissibility.csv", "manifest.json"];
    let snapshot = || -> Vec<Vec<u8>> {
        assert_eq!(sh(&["construct", "--stages", "4", "--out", p(&out)]).0, 0);
        files.iter().map(|f| fs::read(out.join(f)).unwrap()).collect()
    };
    let first = snapshot();
    let second = snapshot();
    for (f, (a, b)) in files.iter().zip(first.iter().zip(&second)) {
        assert!(a == b, "{f} differs between runs");
    }
}

#[test]
fn evolve_writes_csv_and_manifest() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(sh(&["construct", "--unsafe-schedule", "--stages", "1", "--out", p(dir.path())]).0, 0);
    let csv = dir.path().join("traj.csv");
    let state = dir.path().join("state.json");
    let (code, out, _) = sh(&[
        "evolve", p(&state), "--stage", "1", "--radius", "16", "--dt", "1e-3", "--t-final", "0.02", "--record-every", "5",
        "--out", p(&csv),
    ]);
    assert_eq!(code, 0);
    assert!(out.contains("energy audit"), "{out}");
    let text = fs::read_to_string(&csv).unwrap();
    let mut lines = text.lines();
    assert!(lines.next().unwrap().starts_with("# {"));
    assert_eq!(lines.next().unwrap(), "t,energy,enstrophy,h_minus1,distance_to_initial");
    assert_eq!(lines.count(), 5);
    assert!(dir.path().join("traj.manifest.json").exists());

    let (code, _, err) = sh(&["evolve", p(&state), "--stage", "5", "--out", p(&csv)]);
    assert_eq!(code, 2);
    assert!(err.contains("stage 5"), "{err}");
}
