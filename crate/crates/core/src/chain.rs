//! Exact evaluation of Markov chains under both objectives.
//!
//! A chain here is a game in which every non-random state has exactly
//! one successor (both players pinned). Discounted values solve one
//! linear system. Average values go through the full multichain
//! decomposition: recurrent classes, their stationary distributions and
//! gains, and absorption probabilities for transient states. The bias
//! vector is computed alongside the gain when policy iteration needs
//! it for its second-order improvement test.

use thiserror::Error;

use crate::game::{GameStructure, Objective, Owner, ValueFunction};
use crate::linalg::{lu_factor, solve_system, SingularSystem};
use crate::scalar::Real;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum ChainError {
    #[error("state {state} has {successors} successors; a chain needs exactly one per non-random state")]
    NotAChain { state: usize, successors: usize },
    #[error("discount factor must lie strictly inside (0,1)")]
    BadDiscount,
    #[error("chain evaluation hit a singular system; valid chains cannot produce one")]
    Singular(#[from] SingularSystem),
}

/// Returns the offending state if the game is not a chain.
fn check_chain<S: Real>(game: &GameStructure<S>) -> Result<(), ChainError> {
    for v in 0..game.num_states() {
        if game.owner(v) != Owner::Random && game.successors(v).len() != 1 {
            return Err(ChainError::NotAChain { state: v, successors: game.successors(v).len() });
        }
    }
    Ok(())
}

/// Transition probabilities out of a state: weights at random states,
/// the single successor with probability one elsewhere.
fn prob_row<S: Real>(game: &GameStructure<S>, v: usize) -> Vec<(usize, S)> {
    if game.owner(v) == Owner::Random {
        game.successors(v).iter().copied().zip(game.weights(v).iter().copied()).collect()
    } else {
        vec![(game.successors(v)[0], S::one())]
    }
}

/// Expected reward stream of the chain under the objective.
#[allow(clippy::needless_range_loop)]
pub fn chain_value<S: Real>(
    game: &GameStructure<S>,
    objective: Objective<S>,
) -> Result<ValueFunction<S>, ChainError> {
    check_chain(game)?;
    match objective {
        Objective::Discounted(beta) => {
            if !(beta > S::zero() && beta < S::one()) {
                return Err(ChainError::BadDiscount);
            }
            let n = game.num_states();
            // (I - beta P) V = r
            let mut a = vec![vec![S::zero(); n]; n];
            for v in 0..n {
                a[v][v] = S::one();
                for (w, p) in prob_row(game, v) {
                    a[v][w] = a[v][w] - beta * p;
                }
            }
            let r: Vec<S> = (0..n).map(|v| game.reward(v)).collect();
            Ok(ValueFunction::new(solve_system(a, &r)?))
        }
        Objective::Average => {
            let decomposition = decompose(game)?;
            Ok(ValueFunction::new(decomposition.gain))
        }
    }
}

/// Long-run gain and bias of the chain. The gain is the average-reward
/// value; the bias solves (I - P) h = r - g with the stationary-weighted
/// sum of h pinned to zero on each recurrent class.
pub fn chain_gain_bias<S: Real>(
    game: &GameStructure<S>,
) -> Result<(Vec<S>, Vec<S>), ChainError> {
    check_chain(game)?;
    let decomposition = decompose(game)?;
    let n = game.num_states();

    // One equation per state: the flow equation h(v) = r(v) - g(v) + P h,
    // except that each recurrent class swaps the equation at its lowest
    // state for the normalization that pins its free constant.
    let mut a = vec![vec![S::zero(); n]; n];
    let mut b = vec![S::zero(); n];
    for v in 0..n {
        a[v][v] = S::one();
        for (w, p) in prob_row(game, v) {
            a[v][w] = a[v][w] - p;
        }
        b[v] = game.reward(v) - decomposition.gain[v];
    }
    for class in &decomposition.recurrent {
        let anchor = class.members[0];
        for coefficient in a[anchor].iter_mut() {
            *coefficient = S::zero();
        }
        for (&member, &pi) in class.members.iter().zip(&class.stationary) {
            a[anchor][member] = pi;
        }
        b[anchor] = S::zero();
    }
    let bias = solve_system(a, &b)?;
    Ok((decomposition.gain, bias))
}

struct RecurrentClass<S> {
    /// Member states, ascending.
    members: Vec<usize>,
    /// Stationary distribution, parallel to `members`.
    stationary: Vec<S>,
    gain: S,
}

struct Decomposition<S> {
    recurrent: Vec<RecurrentClass<S>>,
    /// Average-reward value per state.
    gain: Vec<S>,
}

fn decompose<S: Real>(game: &GameStructure<S>) -> Result<Decomposition<S>, ChainError> {
    let n = game.num_states();
    let adjacency: Vec<Vec<usize>> = (0..n).map(|v| game.successors(v).to_vec()).collect();
    let components = strongly_connected_components(&adjacency);

    let mut component_of = vec![usize::MAX; n];
    for (c, members) in components.iter().enumerate() {
        for &v in members {
            component_of[v] = c;
        }
    }

    let mut recurrent = Vec::new();
    let mut class_of = vec![None; n];
    for members in &components {
        let closed = members
            .iter()
            .all(|&v| adjacency[v].iter().all(|&w| component_of[w] == component_of[v]));
        if !closed {
            continue;
        }
        let class = recurrent.len();
        for &v in members {
            class_of[v] = Some(class);
        }
        let stationary = stationary_distribution(game, members)?;
        let gain = members
            .iter()
            .zip(&stationary)
            .map(|(&v, &pi)| pi * game.reward(v))
            .sum();
        recurrent.push(RecurrentClass { members: members.clone(), stationary, gain });
    }

    // Gains: the class gain inside a recurrent class, the
    // absorption-weighted mix of class gains at transient states.
    let transient: Vec<usize> = (0..n).filter(|&v| class_of[v].is_none()).collect();
    let mut gain = vec![S::zero(); n];
    for class in &recurrent {
        for &v in &class.members {
            gain[v] = class.gain;
        }
    }
    if !transient.is_empty() {
        let local: std::collections::BTreeMap<usize, usize> =
            transient.iter().enumerate().map(|(i, &v)| (v, i)).collect();
        let t = transient.len();
        let mut a = vec![vec![S::zero(); t]; t];
        for (i, &v) in transient.iter().enumerate() {
            a[i][i] = S::one();
            for (w, p) in prob_row(game, v) {
                if let Some(&j) = local.get(&w) {
                    a[i][j] = a[i][j] - p;
                }
            }
        }
        let factors = lu_factor(a)?;
        for (c, class) in recurrent.iter().enumerate() {
            let b: Vec<S> = transient
                .iter()
                .map(|&v| {
                    prob_row(game, v)
                        .into_iter()
                        .filter(|&(w, _)| class_of[w] == Some(c))
                        .map(|(_, p)| p)
                        .sum()
                })
                .collect();
            let absorption = factors.solve(&b);
            for (i, &v) in transient.iter().enumerate() {
                gain[v] = gain[v] + absorption[i] * class.gain;
            }
        }
    }

    Ok(Decomposition { recurrent, gain })
}

/// Stationary distribution of the chain restricted to one recurrent
/// class: solves pi (P - I) = 0 with sum(pi) = 1 by transposing and
/// replacing the first equation with the normalization row.
fn stationary_distribution<S: Real>(
    game: &GameStructure<S>,
    members: &[usize],
) -> Result<Vec<S>, ChainError> {
    let m = members.len();
    let local: std::collections::BTreeMap<usize, usize> =
        members.iter().enumerate().map(|(i, &v)| (v, i)).collect();
    let mut a = vec![vec![S::zero(); m]; m];
    for (j, &v) in members.iter().enumerate() {
        a[j][j] = a[j][j] - S::one();
        for (w, p) in prob_row(game, v) {
            let i = local[&w];
            a[i][j] = a[i][j] + p;
        }
    }
    for coefficient in a[0].iter_mut() {
        *coefficient = S::one();
    }
    let mut b = vec![S::zero(); m];
    b[0] = S::one();
    Ok(solve_system(a, &b)?)
}

/// Tarjan's algorithm, iterative to keep deep chains off the call
/// stack. Components come out with members sorted ascending.
fn strongly_connected_components(adjacency: &[Vec<usize>]) -> Vec<Vec<usize>> {
    let n = adjacency.len();
    const UNVISITED: usize = usize::MAX;
    let mut index = vec![UNVISITED; n];
    let mut lowlink = vec![0usize; n];
    let mut on_stack = vec![false; n];
    let mut stack: Vec<usize> = Vec::new();
    let mut next_index = 0usize;
    let mut components = Vec::new();

    for root in 0..n {
        if index[root] != UNVISITED {
            continue;
        }
        // Work items: (state, next child position to examine).
        let mut work: Vec<(usize, usize)> = vec![(root, 0)];
        while let Some(frame) = work.last_mut() {
            let v = frame.0;
            if frame.1 == 0 {
                index[v] = next_index;
                lowlink[v] = next_index;
                next_index += 1;
                stack.push(v);
                on_stack[v] = true;
            }
            let child = frame.1;
            if let Some(&w) = adjacency[v].get(child) {
                frame.1 += 1;
                if index[w] == UNVISITED {
                    work.push((w, 0));
                } else if on_stack[w] {
                    lowlink[v] = lowlink[v].min(index[w]);
                }
                continue;
            }
            // All children done: close v, fold its lowlink into the parent.
            work.pop();
            if let Some(parent) = work.last_mut() {
                let p = parent.0;
                lowlink[p] = lowlink[p].min(lowlink[v]);
            }
            if lowlink[v] == index[v] {
                let mut component = Vec::new();
                loop {
                    let w = stack.pop().expect("tarjan stack holds the component");
                    on_stack[w] = false;
                    component.push(w);
                    if w == v {
                        break;
                    }
                }
                component.sort_unstable();
                components.push(component);
            }
        }
    }
    components
}
