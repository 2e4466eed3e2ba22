//! Exact evaluation of fully decided games against hand-derived
//! closed forms. These values were computed on paper first and are
//! frozen here; the implementation has to meet them, not the other
//! way around.

mod common;

use cgplan_core::{chain_gain_bias, chain_value, ChainError, Objective, ObjectiveError, Owner};
use common::build;

fn assert_close(actual: &[f64], expected: &[f64], tolerance: f64) {
    assert_eq!(actual.len(), expected.len());
    for (i, (a, e)) in actual.iter().zip(expected).enumerate() {
        assert!(
            (a - e).abs() <= tolerance,
            "state {i}: got {a}, expected {e} (tolerance {tolerance})"
        );
    }
}

#[test]
fn geometric_self_loop() {
    // r = 1 forever at discount 1/2: 1 + 1/2 + 1/4 + ... = 2.
    let game = build(&[("a", Owner::P1, 1.0)], &[(0, 0)], &[], 0);
    let values = chain_value(&game, Objective::Discounted(0.5)).unwrap();
    assert!((values.get(0) - 2.0).abs() <= 1e-12);
}

#[test]
fn two_cycle_discounted() {
    // V(a) = 0 + β V(b), V(b) = 1 + β V(a); at β = 1/2: 2/3 and 4/3.
    let game = build(&[("a", Owner::P1, 0.0), ("b", Owner::P1, 1.0)], &[(0, 1), (1, 0)], &[], 0);
    let values = chain_value(&game, Objective::Discounted(0.5)).unwrap();
    assert_close(&values.values, &[2.0 / 3.0, 4.0 / 3.0], 1e-12);
}

#[test]
fn two_cycle_average() {
    let game = build(&[("a", Owner::P1, 0.0), ("b", Owner::P1, 1.0)], &[(0, 1), (1, 0)], &[], 0);
    let values = chain_value(&game, Objective::Average).unwrap();
    assert_close(&values.values, &[0.5, 0.5], 1e-12);
}

#[test]
fn coin_between_absorbing_sinks() {
    // c flips into reward-1 or reward-0 self-loops.
    let states = [("c", Owner::Random, 0.0), ("a", Owner::P1, 1.0), ("b", Owner::P1, 0.0)];
    let game = build(&states, &[(1, 1), (2, 2)], &[(0, 1, 0.5), (0, 2, 0.5)], 0);

    let average = chain_value(&game, Objective::Average).unwrap();
    assert_close(&average.values, &[0.5, 1.0, 0.0], 1e-12);

    // V(a) = 2, V(b) = 0, V(c) = 0 + 0.5 (0.5·2 + 0.5·0) = 0.5.
    let discounted = chain_value(&game, Objective::Discounted(0.5)).unwrap();
    assert_close(&discounted.values, &[0.5, 2.0, 0.0], 1e-12);
}

#[test]
fn absorption_mixes_recurrent_gains() {
    // r splits 0.3 / 0.7 between sinks of gain 1 and 3; its own reward
    // is transient and must not count.
    let states = [("r", Owner::Random, 7.0), ("a", Owner::P1, 1.0), ("b", Owner::P1, 3.0)];
    let game = build(&states, &[(1, 1), (2, 2)], &[(0, 1, 0.3), (0, 2, 0.7)], 0);
    let values = chain_value(&game, Objective::Average).unwrap();
    assert_close(&values.values, &[2.4, 1.0, 3.0], 1e-12);
}

#[test]
fn gain_and_bias_of_a_two_cycle() {
    // Gain 1/2 everywhere; bias solves h(a) = 0 - 1/2 + h(b) with
    // stationary normalization (h(a) + h(b))/2 = 0.
    let game = build(&[("a", Owner::P1, 0.0), ("b", Owner::P1, 1.0)], &[(0, 1), (1, 0)], &[], 0);
    let (gain, bias) = chain_gain_bias(&game).unwrap();
    assert_close(&gain, &[0.5, 0.5], 1e-12);
    assert_close(&bias, &[-0.25, 0.25], 1e-12);
}

#[test]
fn bias_extends_to_transient_states() {
    // t earns 0.9 once, then joins the cycle at a:
    // h(t) = 0.9 - 0.5 + h(a) = 0.15.
    let states = [("t", Owner::P1, 0.9), ("a", Owner::P1, 0.0), ("b", Owner::P1, 1.0)];
    let game = build(&states, &[(0, 1), (1, 2), (2, 1)], &[], 0);
    let (gain, bias) = chain_gain_bias(&game).unwrap();
    assert_close(&gain, &[0.5, 0.5, 0.5], 1e-12);
    assert_close(&bias, &[0.15, -0.25, 0.25], 1e-12);
}

#[test]
fn rejects_remaining_choice() {
    let game = build(&[("a", Owner::P1, 0.0), ("b", Owner::P1, 1.0)], &[(0, 0), (0, 1), (1, 1)], &[], 0);
    assert_eq!(
        chain_value(&game, Objective::Average),
        Err(ChainError::NotAChain { state: 0, successors: 2 })
    );
    assert!(matches!(chain_gain_bias(&game), Err(ChainError::NotAChain { .. })));
}

#[test]
fn rejects_degenerate_discounts() {
    let game = build(&[("a", Owner::P1, 1.0)], &[(0, 0)], &[], 0);
    for beta in [0.0, 1.0, -0.5, 1.5] {
        assert_eq!(
            chain_value(&game, Objective::Discounted(beta)),
            Err(ChainError::BadDiscount)
        );
    }
    assert_eq!(Objective::discounted(1.0), Err(ObjectiveError::BadDiscount(1.0)));
    assert_eq!(Objective::discounted(0.5), Ok(Objective::Discounted(0.5)));
    assert!(Objective::<f64>::discounted(f64::NAN).is_err());
}
