use std::path::Path;
use std::process::{Command, Output};

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_matsubara"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8(o.stderr.clone()).unwrap()
}

fn write_config(dir: &Path, text: &str) -> String {
    let path = dir.join("run.toml");
    std::fs::write(&path, text).unwrap();
    path.to_str().unwrap().to_string()
}

#[test]
fn empty_expectation_prints_one() {
    let o = run(&["expectation"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o), "1\n");
}

#[test]
fn wronskian_suite_passes_on_p0() {
    let o = run(&["--fixture", "p0", "verify", "--suite", "wronskian"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let report: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(report["suite"], "wronskian");
    let checks = report["checks"].as_array().unwrap();
    assert!(!checks.is_empty());
    for c in checks {
        for key in ["name", "equation", "residual", "tolerance", "pass"] {
            assert!(c.get(key).is_some(), "missing {key} in {c}");
        }
        assert_eq!(c["pass"], true);
    }
}

#[test]
fn unknown_config_key_is_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "fixture = \"p0\"\nkapa = \"0.4\"\n");
    let o = run(&["--config", &cfg, "spectrum"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("unknown field `kapa`"), "{}", stderr(&o));
}

#[test]
fn failing_checks_exit_one_and_cite_the_identity() {
    let o = run(&["verify", "--suite", "dwbc"]);
    assert_eq!(o.status.code(), Some(1));
    let err = stderr(&o);
    assert!(err.contains("FAIL D2") && err.contains("2πi"), "{err}");
}

#[test]
fn grid_is_deterministic_csv() {
    let args = ["omega", "--grid", "--steps", "2"];
    let a = run(&args);
    assert_eq!(a.status.code(), Some(0));
    let text = stdout(&a);
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("zeta2_re,zeta2_im,xi2_re,xi2_im,value_re,value_im"));
    assert_eq!(lines.count(), 16);
    assert_eq!(stdout(&run(&args)), text);
}

#[test]
fn model_from_config_file() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("spectrum.json");
    let cfg = write_config(
        dir.path(),
        &format!(
            "q = \"0.6+0.25i\"\ntaus = [\"1.1\", \"0.9\"]\nkappa = \"0.4\"\nalpha = \"0.35\"\noutput = {:?}\n",
            out.to_str().unwrap()
        ),
    );
    let o = run(&["--config", &cfg, "spectrum"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let from_file: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&out).unwrap()).unwrap();
    let fixture: serde_json::Value = serde_json::from_str(&stdout(&run(&["spectrum"]))).unwrap();
    assert_eq!(from_file["twists"], fixture["twists"]);
    assert_eq!(from_file["model"], "CONFIG");
}

#[test]
fn invalid_inputs_exit_two() {
    assert_eq!(run(&["rho", "--zeta2", "one"]).status.code(), Some(2));
    assert_eq!(run(&["basis-table", "--pmax", "2", "--radius", "0.9"]).status.code(), Some(2));
    assert_eq!(run(&["verify", "--suite", "everything"]).status.code(), Some(2));
    assert_eq!(run(&["dwbc", "--n", "2", "--xi", "0.5"]).status.code(), Some(2));
    // diagonal pole
    assert_eq!(run(&["omega", "--zeta2", "0.5", "--xi2", "0.5"]).status.code(), Some(2));
}

#[test]
fn dwbc_report_has_constant_structure() {
    let o = run(&["dwbc", "--n", "2", "--xi", "0.7+0.3i,1.2-0.1i"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let r: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(r["origin_integrals"].as_array().unwrap().len(), 3);
    assert_eq!(r["origin_integrals"][1], "0");
}
