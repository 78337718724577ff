mod common;

use common::{malformed, BASE};
use ppse::scenario::{builtin, parse, parse_with_warnings, render, BUILTINS};
use ppse::Error;

#[test]
fn base_parses() {
    let spec = parse(BASE).unwrap();
    assert_eq!(spec.basis_labels, ["x", "y", "z"]);
}

#[test]
fn malformed_inputs_are_located() {
    let cases = malformed();
    assert!(cases.len() >= 10);
    for (what, text, expect) in cases {
        let err = parse(&text).expect_err(what);
        assert!(matches!(err, Error::Parse { .. } | Error::Semantic { .. }), "{what}: {err}");
        assert_eq!(err.location(), Some(expect), "{what}: {err}");
    }
}

#[test]
fn parse_error_carries_offending_token() {
    let text = BASE.replacen("state a = 1, 0, 0", "state a = 1+2j, 0, 0", 1);
    match parse(&text).unwrap_err() {
        Error::Parse { token, .. } => assert_eq!(token, "2j"),
        e => panic!("{e}"),
    }
}

#[test]
fn unnormalised_state_warns() {
    let text = BASE.replacen("state a = 1, 0, 0", "state a = 2, 0, 0", 1);
    let (spec, warnings) = parse_with_warnings(&text).unwrap();
    assert_eq!(spec.state("a").unwrap()[0].re, 1.0);
    assert_eq!(warnings.len(), 1);
    let strict = text.replacen("  postselect {", "  options { strict_norm = true }\n  postselect {", 1);
    assert_eq!(parse(&strict).unwrap_err().location(), Some((3, 9)));
}

#[test]
fn builtins_round_trip() {
    for name in BUILTINS {
        let spec = builtin(name).unwrap();
        let text = render(&spec);
        assert_eq!(parse(&text).unwrap(), spec, "{name}");
        assert_eq!(render(&spec), text, "render is deterministic");
    }
}

#[test]
fn random_specs_round_trip() {
    for seed in 0..100 {
        let spec = common::random_spec(seed);
        let text = render(&spec);
        let back = parse(&text).unwrap_or_else(|e| panic!("seed {seed}: {e}\n{text}"));
        assert_eq!(back, spec, "seed {seed}");
    }
}

#[test]
fn three_box_render_shape() {
    let text = render(&builtin("three-box-X").unwrap());
    assert!(text.contains("basis = [X, Y, Z]"));
    assert!(text.contains("5.7735026918962584e-1"));
}

#[test]
fn comments_and_crlf_are_ignored() {
    let text = BASE.replace('\n', "  # note\r\n");
    assert_eq!(parse(&text).unwrap(), parse(BASE).unwrap());
}
