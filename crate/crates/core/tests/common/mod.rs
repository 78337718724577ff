//! Random experiments and scenario specs shared by the integration tests.
#![allow(dead_code)]

use std::sync::Arc;

use ppse::apparatus::{Eigenstructure, IntermediateModel, Matrix, Mode};
use ppse::linalg::{cx, Cx, HilbertSpace, Operator, StateVector, DEFAULT_TOL};
use ppse::ppse::{Experiment, SelectionEvent};
use ppse::scenario::{MeasureSpec, OptionsSpec, ScenarioSpec, SelectSpec};
use ppse::timesym::ProcessTag;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn gauss(r: &mut ChaCha8Rng) -> f64 {
    r.sample(StandardNormal)
}

fn gauss_cx(r: &mut ChaCha8Rng) -> Cx {
    cx(gauss(r), gauss(r))
}

/// Columns of a Gram–Schmidt-orthonormalised Gaussian matrix.
fn orthonormal_columns(r: &mut ChaCha8Rng, n: usize, real: bool) -> Vec<Vec<Cx>> {
    let mut cols: Vec<Vec<Cx>> = Vec::new();
    while cols.len() < n {
        let mut v: Vec<Cx> = (0..n).map(|_| if real { cx(gauss(r), 0.0) } else { gauss_cx(r) }).collect();
        for c in &cols {
            let ov: Cx = c.iter().zip(&v).map(|(a, b)| a.conj() * b).sum();
            for (x, y) in v.iter_mut().zip(c) {
                *x -= ov * y;
            }
        }
        let norm = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if norm < 1e-6 {
            continue;
        }
        cols.push(v.into_iter().map(|z| z / norm).collect());
    }
    cols
}

/// Haar-ish random unitary as a row matrix.
pub fn random_unitary(r: &mut ChaCha8Rng, n: usize) -> Matrix {
    let cols = orthonormal_columns(r, n, false);
    (0..n).map(|i| (0..n).map(|j| cols[j][i]).collect()).collect()
}

/// O·diag(e^{iφ})·Oᵀ with O real orthogonal: unitary and symmetric, so it is
/// motion-reversal invariant under plain complex conjugation.
pub fn random_symmetric_unitary(r: &mut ChaCha8Rng, n: usize) -> Matrix {
    let o = orthonormal_columns(r, n, true);
    let phases: Vec<Cx> = (0..n).map(|_| Cx::from_polar(1.0, r.gen_range(0.0..std::f64::consts::TAU))).collect();
    (0..n)
        .map(|i| (0..n).map(|j| (0..n).map(|k| o[k][i] * phases[k] * o[k][j]).sum()).collect())
        .collect()
}

pub fn random_state(r: &mut ChaCha8Rng, n: usize) -> Vec<Cx> {
    let v: Vec<Cx> = (0..n).map(|_| gauss_cx(r)).collect();
    let norm = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    v.into_iter().map(|z| z / norm).collect()
}

/// Random partition of 0..n into blocks of one to three indices.
fn random_blocks(r: &mut ChaCha8Rng, n: usize, mode: Mode) -> Vec<Vec<usize>> {
    let mut idx: Vec<usize> = (0..n).collect();
    idx.shuffle(r);
    if mode == Mode::NonDegenerate {
        return idx.into_iter().map(|i| vec![i]).collect();
    }
    let mut blocks = Vec::new();
    let mut rest = &idx[..];
    while !rest.is_empty() {
        let take = r.gen_range(1..=rest.len().min(3));
        blocks.push(rest[..take].to_vec());
        rest = &rest[take..];
    }
    blocks
}

pub struct RandomExperiment {
    pub experiment: Experiment,
    pub seed: u64,
}

/// A random experiment: dimension 2–6, random eigenbasis split into blocks,
/// random stage unitaries and boundary states. With `symmetric` every
/// ingredient is real or symmetric so that plain conjugation is a valid Θ.
pub fn random_experiment(seed: u64, mode: Mode, symmetric: bool) -> Option<RandomExperiment> {
    let r = &mut rng(seed);
    let n = r.gen_range(2..=6);
    let sys = HilbertSpace::numbered("e", n).ok()?;
    let basis = orthonormal_columns(r, n, symmetric);
    let blocks = random_blocks(r, n, mode);
    let vecs: Vec<Vec<StateVector>> = blocks
        .iter()
        .map(|b| b.iter().map(|&i| StateVector::new(sys.clone(), basis[i].clone()).unwrap()).collect())
        .collect();
    let values = (0..vecs.len()).map(|k| k as f64 * 0.5 - 1.0).collect();
    let eigen = Eigenstructure::new(sys.clone(), values, vecs, DEFAULT_TOL).ok()?;
    let d = (mode == Mode::TwoStep).then(|| {
        blocks
            .iter()
            .map(|b| if symmetric { real_orthogonal(r, b.len()) } else { random_unitary(r, b.len()) })
            .collect()
    });
    let model = IntermediateModel::new(eigen, mode, d, false, DEFAULT_TOL).ok()?;
    let unitary = |r: &mut ChaCha8Rng| {
        let m = if symmetric { random_symmetric_unitary(r, n) } else { random_unitary(r, n) };
        Operator::from_rows(sys.clone(), &m).unwrap()
    };
    let u_ca = unitary(r);
    let u_bc = unitary(r);
    let a = StateVector::new(sys.clone(), random_state(r, n)).unwrap();
    let b = StateVector::new(sys.clone(), random_state(r, n)).unwrap();
    let pre = SelectionEvent::onto(a, "alpha", DEFAULT_TOL).ok()?;
    let post = SelectionEvent::onto(b, "beta", DEFAULT_TOL).ok()?;
    let experiment = Experiment::new(model, pre, post, u_ca, u_bc, DEFAULT_TOL).ok()?;
    Some(RandomExperiment { experiment, seed })
}

fn real_orthogonal(r: &mut ChaCha8Rng, n: usize) -> Matrix {
    let o = orthonormal_columns(r, n, true);
    (0..n).map(|i| (0..n).map(|j| o[j][i]).collect()).collect()
}

pub fn system_space(n: usize) -> Arc<HilbertSpace> {
    HilbertSpace::numbered("e", n).unwrap()
}

const NAMES: [&str; 8] = ["alpha", "beta", "psi", "phi", "chi", "u0", "v_1", "w'"];

/// A random, valid scenario spec in canonical form (states normalised).
pub fn random_spec(seed: u64) -> ScenarioSpec {
    let r = &mut rng(seed);
    let n = r.gen_range(2..=5);
    let labels: Vec<String> = if r.gen_bool(0.3) {
        (0..n).map(|i| format!("{}{}", i / 2, i)).collect()
    } else {
        (0..n).map(|i| format!("c{i}")).collect()
    };
    let mode = *Mode::ALL.choose(r).unwrap();
    let blocks: Vec<Vec<String>> = random_blocks(r, n, mode)
        .into_iter()
        .map(|b| b.into_iter().map(|i| labels[i].clone()).collect())
        .collect();
    let values = r.gen_bool(0.5).then(|| (0..blocks.len()).map(|_| gauss(r)).collect());
    let d = if mode == Mode::TwoStep {
        let mut d = Vec::new();
        for (k, b) in blocks.iter().enumerate() {
            if r.gen_bool(0.7) {
                d.push((k, random_unitary(r, b.len())));
            }
        }
        d
    } else {
        vec![]
    };

    let n_states = r.gen_range(2..=4);
    let states: Vec<(String, Vec<Cx>)> =
        NAMES[..n_states].iter().map(|nm| (nm.to_string(), random_state(r, n))).collect();
    let pre_state = states[0].0.clone();
    let post_state = states[1].0.clone();

    let mut unitaries = Vec::new();
    for name in ["ca", "bc", "theta"] {
        if r.gen_bool(0.6) {
            unitaries.push((name.to_string(), random_unitary(r, n)));
        }
    }
    let has_theta = unitaries.iter().any(|(nm, _)| nm == "theta");
    let processes = r.gen_bool(0.5).then(|| {
        let pool: Vec<ProcessTag> =
            ProcessTag::ALL.into_iter().filter(|p| has_theta || !p.needs_theta()).collect();
        let k = r.gen_range(1..=pool.len());
        pool.choose_multiple(r, k).copied().collect()
    });
    let initial = r.gen_bool(0.3).then(|| labels[r.gen_range(0..n)].clone());

    ScenarioSpec {
        name: format!("random \"{seed}\""),
        basis_labels: labels,
        states,
        bases: vec![("pre".into(), vec![pre_state]), ("post".into(), vec![post_state])],
        unitaries,
        hamiltonian: None,
        measure: MeasureSpec { blocks: blocks.clone(), values, mode, d },
        preselect: SelectSpec { basis: "pre".into(), index: 0, initial },
        postselect: SelectSpec { basis: "post".into(), index: 0, initial: None },
        options: OptionsSpec {
            tol: [1e-10, 1e-9, 1e-8][r.gen_range(0..3)],
            strict_norm: r.gen_bool(0.3),
            strict_d: false,
            processes,
            reset: r.gen_bool(0.2),
            target: r.gen_bool(0.5).then(|| r.gen_range(0..blocks.len())),
        },
    }
}

/// Small valid scenario that the malformed inputs are edited from.
pub const BASE: &str = r#"scenario "t" {
  space dim = 3 basis = [x, y, z]
  state a = 1, 0, 0
  state b = 0, 1/sqrt(2), 1/sqrt(2)
  basis pre = [a]
  basis post = [b]
  measure { blocks = [x] [y, z] mode = coarse }
  preselect { basis = pre index = 0 }
  postselect { basis = post index = 0 }
}
"#;

/// Broken variants of [`BASE`]: (what, text, expected line and column).
pub fn malformed() -> Vec<(&'static str, String, (usize, usize))> {
    let edit = |from: &str, to: &str| {
        assert!(BASE.contains(from), "{from}");
        BASE.replacen(from, to, 1)
    };
    vec![
        ("j as imaginary unit", edit("state a = 1, 0, 0", "state a = 1+2j, 0, 0"), (3, 15)),
        ("state of wrong length", edit("state a = 1, 0, 0", "state a = 1, 0"), (3, 9)),
        ("non-orthonormal basis", edit("basis pre = [a]", "basis pre = [a, x]"), (5, 9)),
        (
            "d row with norm 2",
            edit("[y, z] mode = coarse }", "[y, z] mode = twostep\n    d 1 = [1, 1; 0, 1] }"),
            (7, 3),
        ),
        ("unknown section", edit("  basis post", "  frobnicate\n  basis post"), (6, 3)),
        ("missing closing brace", BASE.trim_end().trim_end_matches('}').to_string(), (10, 1)),
        ("unknown mode", edit("mode = coarse", "mode = sideways"), (7, 40)),
        ("unknown label in a block", edit("[y, z]", "[y, w]"), (7, 3)),
        ("selection index out of range", edit("basis = pre index = 0", "basis = pre index = 3"), (8, 3)),
        (
            "non-unitary stage",
            edit("  basis pre", "  unitary ca = [1, 0, 0; 0, 1, 0; 0, 0, 2]\n  basis pre"),
            (5, 11),
        ),
        ("state declared twice", edit("state b =", "state a ="), (4, 9)),
        ("unterminated string", BASE.replacen("\"t\"", "\"t", 1), (1, 10)),
        ("division by zero", edit("1/sqrt(2), 1/sqrt(2)", "1/0, 1"), (4, 18)),
        ("tolerance out of range", edit("  postselect {", "  options { tol = 2 }\n  postselect {"), (9, 19)),
        ("missing value", edit("index = 0 }\n}", "index = }\n}"), (9, 37)),
    ]
}
