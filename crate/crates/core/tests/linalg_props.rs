mod common;

use ppse::linalg::{
    adjoint, apply, apply_antiunitary, compose, inner, is_unitary, kron, ray_distance, tensor,
    unitary_from_spectrum, AntiunitaryOp, Cx, HilbertSpace, Level, Operator, SpectralData, StateVector,
};
use proptest::prelude::*;

fn unitary(seed: u64, n: usize) -> Operator {
    let m = common::random_unitary(&mut common::rng(seed), n);
    Operator::from_rows(common::system_space(n), &m).unwrap()
}

fn state(seed: u64, n: usize) -> StateVector {
    StateVector::new(common::system_space(n), common::random_state(&mut common::rng(seed), n)).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn unitaries_preserve_inner_products(seed in any::<u64>(), n in 1usize..7) {
        let u = unitary(seed, n);
        prop_assert!(is_unitary(&u, 1e-10));
        let (x, y) = (state(seed ^ 1, n), state(seed ^ 2, n));
        let before = inner(&x, &y).unwrap();
        let after = inner(&apply(&u, &x).unwrap(), &apply(&u, &y).unwrap()).unwrap();
        prop_assert!((before - after).norm() < 1e-12);
    }

    #[test]
    fn adjoint_reverses_products(seed in any::<u64>(), n in 1usize..6) {
        let (a, b) = (unitary(seed, n), unitary(seed.wrapping_add(7), n));
        let lhs = adjoint(&compose(&a, &b).unwrap());
        let rhs = compose(&adjoint(&b), &adjoint(&a)).unwrap();
        prop_assert!(lhs.max_abs_diff(&rhs) < 1e-12);
        prop_assert!(adjoint(&adjoint(&a)).max_abs_diff(&a) == 0.0);
    }

    #[test]
    fn kron_acts_factorwise(seed in any::<u64>(), n in 1usize..4, m in 1usize..4) {
        let (a, b) = (unitary(seed, n), unitary(seed ^ 3, m));
        let (x, y) = (state(seed ^ 5, n), state(seed ^ 9, m));
        let joint = apply(&kron(&a, &b), &tensor(&x, &y)).unwrap();
        let split = tensor(&apply(&a, &x).unwrap(), &apply(&b, &y).unwrap());
        prop_assert!(joint.max_abs_diff(&split) < 1e-12);
        prop_assert!(is_unitary(&kron(&a, &b), 1e-10));
    }

    #[test]
    fn antiunitary_is_antilinear_and_preserves_overlaps(seed in any::<u64>(), n in 1usize..6, re in -2.0f64..2.0, im in -2.0f64..2.0) {
        let theta = AntiunitaryOp::new(unitary(seed, n), 1e-10).unwrap();
        let (x, y) = (state(seed ^ 11, n), state(seed ^ 13, n));
        let c = Cx::new(re, im);
        let lhs = apply_antiunitary(&theta, &x.scale(c)).unwrap();
        let rhs = apply_antiunitary(&theta, &x).unwrap().scale(c.conj());
        prop_assert!(lhs.max_abs_diff(&rhs) < 1e-12);
        // ⟨Θx|Θy⟩ = ⟨x|y⟩*
        let tx = apply_antiunitary(&theta, &x).unwrap();
        let ty = apply_antiunitary(&theta, &y).unwrap();
        prop_assert!((inner(&tx, &ty).unwrap() - inner(&x, &y).unwrap().conj()).norm() < 1e-12);
    }

    #[test]
    fn spectral_evolution_is_unitary_and_acts_by_phases(seed in any::<u64>(), n in 1usize..6, t in -5.0f64..5.0) {
        let u = unitary(seed, n);
        let space = common::system_space(n);
        let energies: Vec<f64> = (0..n).map(|i| i as f64 - 1.5).collect();
        let levels = (0..n)
            .map(|i| Level { energy: energies[i], vectors: vec![u.column(i)] })
            .collect();
        let spec = SpectralData::new(space, levels, 1e-10).unwrap();
        let ev = unitary_from_spectrum(&spec, t);
        prop_assert!(is_unitary(&ev, 1e-10));
        for (i, e) in energies.iter().enumerate() {
            let v = u.column(i);
            let expect = v.scale(Cx::from_polar(1.0, -e * t));
            prop_assert!(apply(&ev, &v).unwrap().max_abs_diff(&expect) < 1e-10);
        }
    }

    #[test]
    fn ray_distance_ignores_global_phase(seed in any::<u64>(), n in 1usize..6, phi in 0.0f64..6.3) {
        let x = state(seed, n);
        prop_assert!(ray_distance(&x, &x.scale(Cx::from_polar(1.0, phi))).unwrap() < 1e-12);
    }
}

#[test]
fn mismatched_spaces_are_rejected() {
    let a = StateVector::basis(HilbertSpace::numbered("e", 2).unwrap(), 0).unwrap();
    let b = StateVector::basis(HilbertSpace::numbered("e", 3).unwrap(), 0).unwrap();
    assert!(inner(&a, &b).is_err());
}
