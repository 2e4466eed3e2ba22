//! Step-unrolled feasibility formulas for action sequences.
//!
//! A plan of n actions is checked over n+1 time-indexed copies of the
//! proposition set: the copy of proposition `p` at time `t` is solver
//! variable `t * num_props + p`. The result is a conjunct list, one
//! group per constraint, so an unsat core maps back to the initial
//! condition, a particular step, or the goal.

use cgplan_sat::PropExpr;
use thiserror::Error;

use crate::system::BooleanSystem;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum BmcError {
    #[error("unknown action {name:?}")]
    UnknownAction { name: String },
}

/// The conjuncts of the unrolled formula for the named action sequence:
/// the initial condition at time 0, each action bridging consecutive
/// times, and the goal at the final time. Their conjunction is
/// satisfiable exactly when the sequence can be executed concretely
/// from an initial state into a goal state.
pub fn bmc_formula(system: &BooleanSystem, plan: &[String]) -> Result<Vec<PropExpr>, BmcError> {
    let np = system.num_props();
    let at = |t: usize| move |prop: usize, primed: bool| (t + primed as usize) * np + prop;

    let mut conjuncts = vec![system.init.lower(&at(0))];
    for (step, name) in plan.iter().enumerate() {
        let action = system
            .action(name)
            .ok_or_else(|| BmcError::UnknownAction { name: name.clone() })?;
        conjuncts.push(action.formula.lower(&at(step)));
    }
    conjuncts.push(system.goal.lower(&at(plan.len())));
    Ok(conjuncts)
}

/// Slices a solver model back into per-time valuations of the
/// proposition set; `steps` is the number of states, one more than the
/// plan length. The model must cover the unrolled input variables.
pub fn decode_trace(model: &[bool], steps: usize, num_props: usize) -> Vec<Vec<bool>> {
    assert!(model.len() >= steps * num_props, "model shorter than the unrolled inputs");
    (0..steps).map(|t| model[t * num_props..(t + 1) * num_props].to_vec()).collect()
}
