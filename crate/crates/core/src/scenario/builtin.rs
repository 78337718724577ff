use std::f64::consts::FRAC_PI_2;

use super::{HamiltonianSpec, MeasureSpec, OptionsSpec, ScenarioSpec, SelectSpec};
use crate::apparatus::{Matrix, Mode};
use crate::error::{Error, Result};
use crate::linalg::{apply_antiunitary, cx, Cx, DEFAULT_TOL, ZERO};
use crate::timesym::{
    appendix_a_model, appendix_a_spectrum, appendix_b_space, appendix_b_states, appendix_b_theta,
    appendix_b_unitary, AppendixBVariant,
};

pub const BUILTINS: [&str; 8] = [
    "three-box-X",
    "three-box-Y",
    "three-box-Z",
    "appendix-a",
    "appendix-a-reset",
    "appendix-b-original",
    "appendix-b-interchanged",
    "appendix-b-time-reversed",
];

pub fn builtin_names() -> Vec<&'static str> {
    BUILTINS.to_vec()
}

pub fn builtin(name: &str) -> Result<ScenarioSpec> {
    match name {
        "three-box-X" => Ok(three_box("X")),
        "three-box-Y" => Ok(three_box("Y")),
        "three-box-Z" => Ok(three_box("Z")),
        "appendix-a" => appendix_a_spec(&default_d(), false),
        "appendix-a-reset" => appendix_a_spec(&default_d(), true),
        "appendix-b-original" => Ok(appendix_b_spec(AppendixBVariant::Original)),
        "appendix-b-interchanged" => Ok(appendix_b_spec(AppendixBVariant::Interchanged)),
        "appendix-b-time-reversed" => Ok(appendix_b_spec(AppendixBVariant::TimeReversed)),
        _ => Err(Error::UnknownBuiltin(name.to_string())),
    }
}

fn s(v: &str) -> String {
    v.to_string()
}

fn real(v: &[f64]) -> Vec<Cx> {
    v.iter().map(|&x| cx(x, 0.0)).collect()
}

fn select(basis: &str) -> SelectSpec {
    SelectSpec { basis: s(basis), index: 0, initial: None }
}

fn three_box(p: &str) -> ScenarioSpec {
    let r = 1.0 / 3f64.sqrt();
    let labels = vec![s("X"), s("Y"), s("Z")];
    let others: Vec<String> = labels.iter().filter(|l| *l != p).cloned().collect();
    ScenarioSpec {
        name: format!("three-box-{p}"),
        basis_labels: labels,
        states: vec![(s("A"), real(&[r, r, r])), (s("B"), real(&[r, r, -r]))],
        bases: vec![(s("pre"), vec![s("A")]), (s("post"), vec![s("B")])],
        unitaries: vec![],
        hamiltonian: None,
        measure: MeasureSpec { blocks: vec![vec![s(p)], others], values: None, mode: Mode::Coarse, d: vec![] },
        preselect: select("pre"),
        postselect: select("post"),
        options: OptionsSpec { target: Some(0), ..OptionsSpec::default() },
    }
}

fn default_d() -> Matrix {
    let h = std::f64::consts::FRAC_1_SQRT_2;
    vec![vec![cx(h, 0.0), cx(h, 0.0)], vec![ZERO, cx(1.0, 0.0)]]
}

/// The doubly degenerate two-step scenario with the interaction given as a
/// joint Hamiltonian spectrum (σ± at ±1, τ at 0) run for a quarter period.
/// `d` is the 2×2 coefficient matrix of the degenerate block.
pub fn appendix_a_spec(d: &Matrix, reset: bool) -> Result<ScenarioSpec> {
    let model = appendix_a_model(d, false, DEFAULT_TOL)?;
    let spectrum = appendix_a_spectrum(&model, DEFAULT_TOL)?;
    let h = std::f64::consts::FRAC_1_SQRT_2;
    let mut states = vec![(s("a"), real(&[h, h, 0.0])), (s("b"), real(&[h, 0.0, h]))];
    let mut levels = Vec::new();
    let named = [("tau", 2usize), ("sp", 3), ("sm", 3)];
    for (level, (prefix, count)) in spectrum.levels().iter().zip(named) {
        let mut names = Vec::new();
        for (j, v) in level.vectors.iter().take(count).enumerate() {
            let n = format!("{prefix}{j}");
            states.push((n.clone(), v.amps().to_vec()));
            names.push(n);
        }
        levels.push((level.energy, names));
    }
    Ok(ScenarioSpec {
        name: s(if reset { "appendix-a-reset" } else { "appendix-a" }),
        basis_labels: vec![s("c00"), s("c11"), s("c12")],
        states,
        bases: vec![(s("pre"), vec![s("a")]), (s("post"), vec![s("b")])],
        unitaries: vec![(s("theta"), crate::apparatus::identity_matrix(3))],
        hamiltonian: Some(HamiltonianSpec { levels, duration: FRAC_PI_2 }),
        measure: MeasureSpec {
            blocks: vec![vec![s("c00")], vec![s("c11"), s("c12")]],
            values: None,
            mode: Mode::TwoStep,
            d: vec![(1, d.clone())],
        },
        preselect: select("pre"),
        postselect: select("post"),
        options: OptionsSpec { reset, target: Some(1), ..OptionsSpec::default() },
    })
}

fn appendix_b_spec(variant: AppendixBVariant) -> ScenarioSpec {
    let (a, b) = appendix_b_states();
    let theta = appendix_b_theta();
    let (pre, post, name) = match variant {
        AppendixBVariant::Original => (a, b, "appendix-b-original"),
        AppendixBVariant::Interchanged => (b, a, "appendix-b-interchanged"),
        AppendixBVariant::TimeReversed => (
            apply_antiunitary(&theta, &b).expect("same space"),
            apply_antiunitary(&theta, &a).expect("same space"),
            "appendix-b-time-reversed",
        ),
    };
    let rows = |m: &crate::linalg::Operator| -> Matrix {
        (0..m.dim()).map(|i| (0..m.dim()).map(|j| m.get(i, j)).collect()).collect()
    };
    let u = rows(&appendix_b_unitary());
    ScenarioSpec {
        name: s(name),
        basis_labels: appendix_b_space().labels().to_vec(),
        states: vec![(s("A"), pre.amps().to_vec()), (s("B"), post.amps().to_vec())],
        bases: vec![(s("pre"), vec![s("A")]), (s("post"), vec![s("B")])],
        unitaries: vec![(s("ca"), u.clone()), (s("bc"), u), (s("theta"), rows(theta.unitary_part()))],
        hamiltonian: None,
        measure: MeasureSpec {
            blocks: vec![vec![s("00")], vec![s("11"), s("12"), s("13")]],
            values: None,
            mode: Mode::Coarse,
            d: vec![],
        },
        preselect: select("pre"),
        postselect: select("post"),
        options: OptionsSpec { target: Some(1), ..OptionsSpec::default() },
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn every_builtin_builds() {
        for name in BUILTINS {
            let spec = builtin(name).unwrap();
            assert_eq!(spec.name, name);
            spec.build().unwrap();
        }
    }

    #[test]
    fn unknown_name() {
        assert!(matches!(builtin("no-such"), Err(Error::UnknownBuiltin(_))));
    }

    #[test]
    fn three_box_states() {
        let spec = builtin("three-box-X").unwrap();
        let r = 1.0 / 3f64.sqrt();
        assert_eq!(spec.state("A").unwrap(), real(&[r, r, r]).as_slice());
        assert_eq!(spec.state("B").unwrap(), real(&[r, r, -r]).as_slice());
    }
}
