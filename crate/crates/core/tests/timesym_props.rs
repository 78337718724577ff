mod common;

use ppse::apparatus::Mode;
use ppse::linalg::AntiunitaryOp;
use ppse::timesym::{stages_reversible, time_symmetry, ProcessTag};
use proptest::prelude::*;

fn mode_strategy() -> impl Strategy<Value = Mode> {
    prop::sample::select(Mode::ALL.to_vec())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn first_row_agrees_under_motion_reversal(seed in any::<u64>(), mode in mode_strategy()) {
        let Some(r) = common::random_experiment(seed, mode, true) else { return Ok(()) };
        let exp = r.experiment;
        let theta = AntiunitaryOp::conjugation(exp.system().clone());
        prop_assert!(stages_reversible(&exp, &theta).unwrap());
        let Ok(rep) = time_symmetry(&exp, Some(&theta), &[ProcessTag::I, ProcessTag::Ii, ProcessTag::Iii]) else {
            return Ok(());
        };
        prop_assert_eq!(rep.motion_reversal, Some(true));
        prop_assert!(rep.max_deviation <= 1e-9, "deviation {}", rep.max_deviation);
        prop_assert!(rep.recovered_initial);
    }

    /// Processes (i) and (ii) need no Θ and agree for any unitaries.
    #[test]
    fn backward_reading_matches_forward(seed in any::<u64>(), mode in mode_strategy()) {
        let Some(r) = common::random_experiment(seed, mode, false) else { return Ok(()) };
        let Ok(rep) = time_symmetry(&r.experiment, None, &[ProcessTag::I, ProcessTag::Ii]) else { return Ok(()) };
        prop_assert!(rep.max_deviation <= 1e-9);
        prop_assert_eq!(rep.motion_reversal, None);
    }
}

#[test]
fn processes_needing_theta_are_refused_without_one() {
    let r = common::random_experiment(1, Mode::Coarse, false).unwrap();
    let e = time_symmetry(&r.experiment, None, &[ProcessTag::Iii]).unwrap_err();
    assert!(matches!(e.root(), ppse::Error::MissingThetaForProcess(_)), "{e}");
}

#[test]
fn generic_unitaries_are_not_motion_reversal_invariant() {
    let r = common::random_experiment(5, Mode::Fine, false).unwrap();
    let theta = AntiunitaryOp::conjugation(r.experiment.system().clone());
    assert!(!stages_reversible(&r.experiment, &theta).unwrap());
}
