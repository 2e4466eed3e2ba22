//! Projection of a boolean system onto a proposition subset.
//!
//! An abstract state is a valuation of the projection set, packed into
//! a `u32` with bit `i` holding the value of the i-th kept proposition.
//! An abstract action relates two abstract states exactly when some
//! pair of concrete states under them is related, so every concrete
//! path projects to an abstract path of the same length: abstract
//! unreachability refutes concrete reachability outright.

use std::collections::VecDeque;

use cgplan_sat::{solve, to_cnf, PropExpr, Solution};
use thiserror::Error;

use crate::formula::Formula;
use crate::system::BooleanSystem;

/// Largest projection the explicit enumeration accepts; the abstract
/// state space is `2^|projection|` and relations are materialized.
pub const PROJECTION_GUARD: usize = 12;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum ProjectionError {
    #[error("projection over {props} propositions exceeds the enumeration guard of {guard}")]
    GuardExceeded { props: usize, guard: usize },
}

/// A shortest abstract path from an initial to a goal state: the
/// actions taken and the abstract states visited, one more state than
/// actions. Under the identity projection the states are concrete.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AbstractPlan {
    pub actions: Vec<String>,
    pub states: Vec<u32>,
}

fn check_projection(system: &BooleanSystem, pi: &[usize]) -> Result<(), ProjectionError> {
    assert!(
        pi.windows(2).all(|w| w[0] < w[1]) && pi.iter().all(|&p| p < system.num_props()),
        "projection must be a sorted set of declared proposition indices"
    );
    if pi.len() > PROJECTION_GUARD {
        return Err(ProjectionError::GuardExceeded { props: pi.len(), guard: PROJECTION_GUARD });
    }
    Ok(())
}

/// Satisfiability of `formula` conjoined with the given single-variable
/// bindings, over `num_inputs` solver variables.
fn satisfiable_with(formula: &PropExpr, bindings: &[(usize, bool)], num_inputs: usize) -> bool {
    let mut conjuncts = vec![formula.clone()];
    for &(var, value) in bindings {
        let atom = PropExpr::var(var);
        conjuncts.push(if value { atom } else { PropExpr::not(atom) });
    }
    matches!(solve(&to_cnf(&conjuncts, num_inputs)), Solution::Sat(_))
}

/// Satisfiability table indexed by packed bindings: entry `pattern`
/// answers whether `formula` stays satisfiable when each `vars[bit]` is
/// pinned to the corresponding bit of the pattern. Variables absent
/// from the formula never influence the answer, so callers pass only
/// the variables it mentions and share entries across everything else.
fn satisfiability_table(formula: &PropExpr, vars: &[usize], num_inputs: usize) -> Vec<bool> {
    let mut table = Vec::with_capacity(1 << vars.len());
    for pattern in 0..1u32 << vars.len() {
        let bindings: Vec<(usize, bool)> =
            vars.iter().enumerate().map(|(bit, &v)| (v, pattern >> bit & 1 == 1)).collect();
        table.push(satisfiable_with(formula, &bindings, num_inputs));
    }
    table
}

/// Packs the bits of `state` at the given projection positions, in
/// order, as the low bits of the result.
fn extract(state: u32, positions: &[usize]) -> u32 {
    positions.iter().enumerate().fold(0, |acc, (bit, &pos)| acc | (state >> pos & 1) << bit)
}

/// The relation of an action on abstract states: a pair belongs to it
/// exactly when the action formula is satisfiable with the pair's
/// values bound on the projected propositions, current and next. Pairs
/// come out sorted. The satisfiability check is one solver query per
/// combination of propositions the formula actually mentions; pairs
/// differing only elsewhere share the answer.
pub fn abstract_action(
    system: &BooleanSystem,
    action: &Formula,
    pi: &[usize],
) -> Result<Vec<(u32, u32)>, ProjectionError> {
    check_projection(system, pi)?;
    let np = system.num_props();
    let lowered = action.lower(&|prop, primed| prop + if primed { np } else { 0 });

    let current_support = action.support(false);
    let next_support = action.support(true);
    let rel_cur: Vec<usize> =
        (0..pi.len()).filter(|&i| current_support.contains(&pi[i])).collect();
    let rel_nxt: Vec<usize> = (0..pi.len()).filter(|&i| next_support.contains(&pi[i])).collect();

    let split = rel_cur.len();
    let vars: Vec<usize> = rel_cur
        .iter()
        .map(|&i| pi[i])
        .chain(rel_nxt.iter().map(|&i| pi[i] + np))
        .collect();
    let table = satisfiability_table(&lowered, &vars, 2 * np);

    let mut pairs = Vec::new();
    for s in 0..1u32 << pi.len() {
        let cur_bits = extract(s, &rel_cur);
        for t in 0..1u32 << pi.len() {
            let pattern = cur_bits | extract(t, &rel_nxt) << split;
            if table[pattern as usize] {
                pairs.push((s, t));
            }
        }
    }
    Ok(pairs)
}

/// Abstract states whose bindings leave `formula` satisfiable, in
/// numeric order. The formula is over current-state variables.
fn satisfying_states(system: &BooleanSystem, formula: &Formula, pi: &[usize]) -> Vec<u32> {
    let np = system.num_props();
    let lowered = formula.lower(&|prop, _| prop);
    let support = formula.support(false);
    let relevant: Vec<usize> = (0..pi.len()).filter(|&i| support.contains(&pi[i])).collect();
    let vars: Vec<usize> = relevant.iter().map(|&i| pi[i]).collect();
    let table = satisfiability_table(&lowered, &vars, np);
    (0..1u32 << pi.len()).filter(|&s| table[extract(s, &relevant) as usize]).collect()
}

/// Shortest abstract path from the projected initial states to the
/// projected goal states, or `None` when no goal state is reachable,
/// which settles concrete infeasibility as well. Ties are broken by
/// visiting actions in declaration order and successor states in
/// numeric order.
pub fn abstract_reach(
    system: &BooleanSystem,
    pi: &[usize],
) -> Result<Option<AbstractPlan>, ProjectionError> {
    check_projection(system, pi)?;
    let size = 1usize << pi.len();

    let mut is_goal = vec![false; size];
    for s in satisfying_states(system, &system.goal, pi) {
        is_goal[s as usize] = true;
    }
    let relations: Vec<Vec<(u32, u32)>> = system
        .actions
        .iter()
        .map(|a| abstract_action(system, &a.formula, pi))
        .collect::<Result<_, _>>()?;

    let mut parent: Vec<Option<(u32, usize)>> = vec![None; size];
    let mut visited = vec![false; size];
    let mut queue = VecDeque::new();
    for s in satisfying_states(system, &system.init, pi) {
        visited[s as usize] = true;
        queue.push_back(s);
    }

    while let Some(s) = queue.pop_front() {
        if is_goal[s as usize] {
            let mut actions = Vec::new();
            let mut states = vec![s];
            let mut at = s;
            while let Some((prev, action)) = parent[at as usize] {
                actions.push(system.actions[action].name.clone());
                states.push(prev);
                at = prev;
            }
            actions.reverse();
            states.reverse();
            return Ok(Some(AbstractPlan { actions, states }));
        }
        for (index, relation) in relations.iter().enumerate() {
            let lo = relation.partition_point(|&(from, _)| from < s);
            let hi = relation.partition_point(|&(from, _)| from <= s);
            for &(_, t) in &relation[lo..hi] {
                if !visited[t as usize] {
                    visited[t as usize] = true;
                    parent[t as usize] = Some((s, index));
                    queue.push_back(t);
                }
            }
        }
    }
    Ok(None)
}
