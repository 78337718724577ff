use ppse_web::{builtin_list, builtin_text, degenerate_record_curve, run_scenario, three_box_view};
use serde_json::Value;

fn json(s: &str) -> Value {
    serde_json::from_str(s).unwrap()
}

#[test]
fn every_builtin_runs_through_the_page_api() {
    for name in builtin_list().lines() {
        let v = json(&run_scenario(&builtin_text(name)));
        assert!(v["error"].is_null(), "{name}: {v}");
        assert_eq!(v["scenario"], name);
    }
}

#[test]
fn reset_curve_stays_at_zero() {
    let v = json(&degenerate_record_curve(11));
    for p in v.as_array().unwrap() {
        assert!(p["reset"].as_f64().unwrap().abs() < 1e-12, "{p}");
        assert!(p["deviation"].as_f64().unwrap() < 1e-9);
    }
}

#[test]
fn box_z_fine_and_coarse() {
    let c = json(&three_box_view("Z", "coarse"));
    let f = json(&three_box_view("Z", "fine"));
    assert!((c["found"].as_f64().unwrap() - 0.2).abs() < 1e-9);
    assert!((f["found"].as_f64().unwrap() - 1.0 / 3.0).abs() < 1e-9);
}

#[test]
fn unknown_builtin_text_is_empty() {
    assert_eq!(builtin_text("nope"), "");
    assert!(json(&run_scenario(""))["error"].is_string());
}
