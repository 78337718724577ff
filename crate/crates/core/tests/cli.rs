use std::process::{Command, Output};

fn ppse(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_ppse")).args(args).env_remove("PPSE_TOL").output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

#[test]
fn run_json_reports_prob_found() {
    let o = ppse(&["run", "--builtin", "three-box-X", "--format", "json"]);
    assert_eq!(o.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert!((v["prob_found"].as_f64().unwrap() - 1.0).abs() < 1e-9);
    // top-level keys appear in a fixed, documented order
    let text = stdout(&o);
    let keys = ["scenario", "mode", "selection", "outcomes", "eigenvalues", "prob_found", "notes", "warnings"];
    let pos: Vec<usize> = keys.iter().map(|k| text.find(&format!("\n  \"{k}\"")).unwrap()).collect();
    assert!(pos.windows(2).all(|w| w[0] < w[1]), "{pos:?}");
}

#[test]
fn json_is_reproducible() {
    let a = ppse(&["run", "--builtin", "appendix-a", "--format", "json"]);
    let b = ppse(&["run", "--builtin", "appendix-a", "--format", "json"]);
    assert_eq!(a.stdout, b.stdout);
}

#[test]
fn check_timesym_passes_for_reversed_selection() {
    let o = ppse(&["check-timesym", "--builtin", "appendix-b-time-reversed"]);
    assert_eq!(o.status.code(), Some(0));
    let out = stdout(&o);
    assert!(out.contains("PASS"), "{out}");
    assert!(out.contains("Prob[k=0] = 1.000000"), "{out}");
}

#[test]
fn check_timesym_process_selection() {
    let o = ppse(&["check-timesym", "--builtin", "three-box-Z", "--process", "i,ii"]);
    assert_eq!(o.status.code(), Some(0));
    let out = stdout(&o);
    assert!(out.contains("(ii)") && !out.contains("(vi)"), "{out}");
    let o = ppse(&["check-timesym", "--builtin", "three-box-Z", "--process", "iii"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stderr).contains("time-reversal operator"));
}

#[test]
fn missing_file_is_a_usage_error() {
    let o = ppse(&["run", "--file", "missing.ppse"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("missing.ppse"));
}

#[test]
fn both_inputs_is_a_usage_error() {
    let o = ppse(&["run", "--builtin", "three-box-X", "--file", "x.ppse"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn typed_errors_exit_one_with_location() {
    let dir = std::env::temp_dir().join(format!("ppse-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("bad.ppse");
    std::fs::write(&path, "scenario \"bad\" {\n  space dim = 2 basis = [x, y]\n  state a = 1+2j, 0\n}\n").unwrap();
    let o = ppse(&["validate", "--file", path.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stderr).contains("3:15"));
}

#[test]
fn every_listed_builtin_runs() {
    let list = stdout(&ppse(&["list-builtins"]));
    for name in list.lines() {
        let o = ppse(&["run", "--builtin", name]);
        assert_eq!(o.status.code(), Some(0), "{name}: {}", String::from_utf8_lossy(&o.stderr));
    }
}

#[test]
fn render_then_validate() {
    let text = stdout(&ppse(&["render-builtin", "appendix-b-original"]));
    let dir = std::env::temp_dir().join(format!("ppse-cli-r-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("b.ppse");
    std::fs::write(&path, text).unwrap();
    let o = ppse(&["validate", "--file", path.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    let o = ppse(&["run", "--file", path.to_str().unwrap(), "--format", "csv"]);
    let out = stdout(&o);
    assert!(out.starts_with("kind,label,prob,closed_form,oracle\n"), "{out}");
}

#[test]
fn all_builtins_in_one_call() {
    let o = ppse(&["run", "--all-builtins", "--format", "json"]);
    assert_eq!(o.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v.as_array().unwrap().len(), 8);
}

#[test]
fn tolerance_from_environment() {
    let o = Command::new(env!("CARGO_BIN_EXE_ppse"))
        .args(["run", "--builtin", "three-box-X"])
        .env("PPSE_TOL", "7")
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(2));
}
