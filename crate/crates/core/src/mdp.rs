//! Policy iteration for one-decision-maker games.
//!
//! The game may contain states of both players, but only one player may
//! still have a choice; everyone else must already be pinned to a single
//! successor. Values are always player-1 values of the rewards as given;
//! `sense` controls whether the deciding player pushes them up or down,
//! so a best response for player 2 is a MIN solve on the same rewards.
//!
//! Discounted: Howard improvement with exact linear-solve evaluation,
//! all states re-targeted per round. Average: multichain improvement on
//! the (gain, bias) pair, one lexicographically lowest switch per round;
//! a single-switch round keeps the improvement argument airtight in the
//! multichain case and makes traces reproducible.

use std::collections::BTreeMap;

use thiserror::Error;

use crate::chain::{chain_gain_bias, chain_value, ChainError};
use crate::game::{GameStructure, MemorylessStrategy, Objective, Player, ValueFunction};
use crate::scalar::{real, Real};

/// Direction the deciding player drives the (player-1) value.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Sense {
    Max,
    Min,
}

#[derive(Debug, Clone, PartialEq)]
pub struct MdpSolution<S> {
    /// Optimal values; the gain vector under the average objective.
    pub values: ValueFunction<S>,
    /// Bias of the final policy's chain, average objective only.
    pub bias: Option<Vec<S>>,
    pub policy: MemorylessStrategy,
    /// Improvement rounds until the fixed point.
    pub rounds: usize,
}

#[derive(Debug, Error, PartialEq)]
pub enum MdpError {
    #[error("state {state} still offers the opposing player a choice")]
    OpposingChoice { state: usize },
    #[error(transparent)]
    Chain(#[from] ChainError),
    #[error("policy iteration did not converge within {rounds} rounds")]
    NoConvergence { rounds: usize },
}

const MAX_ROUNDS: usize = 10_000;

/// Strict-improvement margin; switches below it are treated as ties.
fn improvement_tolerance<S: Real>() -> S {
    real::<S>(1e-9)
}

/// Optimal values and policy for the deciding `player`.
pub fn mdp_solve<S: Real>(
    game: &GameStructure<S>,
    objective: Objective<S>,
    player: Player,
    sense: Sense,
) -> Result<MdpSolution<S>, MdpError> {
    let opponent = player.opponent().owner();
    for v in 0..game.num_states() {
        if game.owner(v) == opponent && game.successors(v).len() >= 2 {
            return Err(MdpError::OpposingChoice { state: v });
        }
    }

    // Start from the lowest-indexed successor everywhere.
    let mut policy = MemorylessStrategy::new(
        player,
        game.states_of(player.owner()).map(|v| (v, game.sorted_successors(v)[0])).collect(),
    );

    for round in 0..MAX_ROUNDS {
        let pinned = game.restrict(&policy).expect("policy picks existing edges");
        match objective {
            Objective::Discounted(_) => {
                let values = chain_value(&pinned, objective)?;
                let improved = improve_discounted(game, &mut policy, &values, sense);
                if !improved {
                    return Ok(MdpSolution { values, bias: None, policy, rounds: round });
                }
            }
            Objective::Average => {
                let (gain, bias) = chain_gain_bias(&pinned)?;
                let improved = improve_average(game, &mut policy, &gain, &bias, sense);
                if !improved {
                    return Ok(MdpSolution {
                        values: ValueFunction::new(gain),
                        bias: Some(bias),
                        policy,
                        rounds: round,
                    });
                }
            }
        }
    }
    Err(MdpError::NoConvergence { rounds: MAX_ROUNDS })
}

pub(crate) fn better<S: Real>(candidate: S, incumbent: S, sense: Sense, tolerance: S) -> bool {
    match sense {
        Sense::Max => candidate > incumbent + tolerance,
        Sense::Min => candidate < incumbent - tolerance,
    }
}

/// Greedy re-targeting of every owned state. Returns whether anything
/// switched.
fn improve_discounted<S: Real>(
    game: &GameStructure<S>,
    policy: &mut MemorylessStrategy,
    values: &ValueFunction<S>,
    sense: Sense,
) -> bool {
    let tolerance = improvement_tolerance::<S>();
    let mut switched = false;
    let mut updates: BTreeMap<usize, usize> = BTreeMap::new();
    for (&v, &current) in &policy.choice {
        let mut best = current;
        for w in game.sorted_successors(v) {
            if better(values.get(w), values.get(best), sense, tolerance) {
                best = w;
            }
        }
        if best != current {
            switched = true;
        }
        updates.insert(v, best);
    }
    policy.choice = updates;
    switched
}

/// One lexicographic (gain, then bias) switch at the lowest improving
/// state and its lowest improving successor. Returns whether a switch
/// happened. Shared with the game solver, whose strategy-improvement
/// outer loop makes exactly the same move for player 1.
pub(crate) fn improve_average<S: Real>(
    game: &GameStructure<S>,
    policy: &mut MemorylessStrategy,
    gain: &[S],
    bias: &[S],
    sense: Sense,
) -> bool {
    let tolerance = improvement_tolerance::<S>();
    let mut switch = None;
    'scan: for (&v, &current) in policy.choice.iter() {
        for w in game.sorted_successors(v) {
            let gain_improves = better(gain[w], gain[current], sense, tolerance);
            let gain_ties = (gain[w] - gain[current]).abs() <= tolerance;
            if gain_improves || (gain_ties && better(bias[w], bias[current], sense, tolerance)) {
                switch = Some((v, w));
                break 'scan;
            }
        }
    }
    match switch {
        Some((v, w)) => {
            policy.choice.insert(v, w);
            true
        }
        None => false,
    }
}
