//! Browser bindings. Every export takes and returns plain strings or numbers
//! (JSON for structured results) so the same functions run natively in tests.

use ppse::apparatus::Mode;
use ppse::scenario::{builtin, parse_with_warnings, render, run};
use ppse::timesym::{appendix_a, completed_d};
use serde_json::{json, Value};
use wasm_bindgen::prelude::*;

fn error_json(e: &ppse::Error) -> Value {
    match e.location() {
        Some((line, col)) => json!({ "error": e.to_string(), "line": line, "col": col }),
        None => json!({ "error": e.to_string() }),
    }
}

/// Probability of reading the degenerate eigenvalue as the first coefficient
/// d11 of its record sweeps from 0 to 1, with and without the pointer reset.
#[wasm_bindgen]
pub fn degenerate_record_curve(samples: usize) -> String {
    let samples = samples.clamp(2, 400);
    let points: Vec<Value> = (0..samples)
        .map(|i| {
            let d11 = i as f64 / (samples - 1) as f64;
            match appendix_a(&completed_d(d11), false) {
                Ok(r) => json!({
                    "d11": d11,
                    "prob": r.prob_k1,
                    "reset": r.reset.eigen_probs[1],
                    "deviation": r.timesym.max_deviation,
                }),
                Err(e) => json!({ "d11": d11, "error": e.to_string() }),
            }
        })
        .collect();
    Value::Array(points).to_string()
}

/// Three boxes, asking only about `which` (X, Y or Z) with the given
/// measurement mode (coarse, fine or twostep).
#[wasm_bindgen]
pub fn three_box_view(which: &str, mode: &str) -> String {
    let result = (|| {
        let mut spec = builtin(&format!("three-box-{which}"))?;
        spec.measure.mode = Mode::from_keyword(mode)
            .ok_or_else(|| ppse::Error::ModeMismatch(format!("unknown mode `{mode}`")))?;
        let r = run(&spec)?;
        Ok::<_, ppse::Error>(json!({
            "box": which,
            "mode": mode,
            "found": r.eigenvalues[0].prob,
            "not_found": r.eigenvalues[1].prob,
            "oracle_found": r.eigenvalues[0].oracle,
        }))
    })();
    result.unwrap_or_else(|e| error_json(&e)).to_string()
}

/// Parse and run a scenario; the report as JSON, or the located error.
#[wasm_bindgen]
pub fn run_scenario(text: &str) -> String {
    match parse_with_warnings(text).and_then(|(spec, warnings)| Ok((run(&spec)?, warnings))) {
        Ok((mut report, warnings)) => {
            report.warnings.extend(warnings);
            report.to_json()
        }
        Err(e) => error_json(&e).to_string(),
    }
}

/// Canonical text of a builtin scenario, for loading into the editor.
#[wasm_bindgen]
pub fn builtin_text(name: &str) -> String {
    builtin(name).map(|s| render(&s)).unwrap_or_default()
}

#[wasm_bindgen]
pub fn builtin_list() -> String {
    ppse::scenario::BUILTINS.join("\n")
}

#[cfg(test)]
mod tests {
    use super::*;

    fn parse(s: &str) -> Value {
        serde_json::from_str(s).unwrap()
    }

    #[test]
    fn curve_ends() {
        let v = parse(&degenerate_record_curve(3));
        let pts = v.as_array().unwrap();
        assert_eq!(pts.len(), 3);
        assert!((pts[0]["prob"].as_f64().unwrap() - 0.5).abs() < 1e-12);
        assert!(pts[2]["prob"].as_f64().unwrap().abs() < 1e-12);
    }

    #[test]
    fn coarse_and_fine_differ() {
        let c = parse(&three_box_view("X", "coarse"));
        let f = parse(&three_box_view("X", "fine"));
        assert!((c["found"].as_f64().unwrap() - 1.0).abs() < 1e-9);
        assert!((f["found"].as_f64().unwrap() - 1.0 / 3.0).abs() < 1e-9);
        assert!(parse(&three_box_view("W", "fine"))["error"].is_string());
    }

    #[test]
    fn scenario_round_trip_and_errors() {
        let v = parse(&run_scenario(&builtin_text("appendix-b-interchanged")));
        assert!((v["prob_found"].as_f64().unwrap() - 0.5).abs() < 1e-9);
        let e = parse(&run_scenario("scenario \"x\" {\n  space dim = 2 basis = [a, b]\n  state s = 1+1j, 0\n}"));
        assert_eq!(e["line"], 3);
        assert_eq!(e["col"], 15);
    }
}
