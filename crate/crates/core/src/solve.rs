//! Exact solution of two-player games, plus the exponential
//! enumeration oracle used to cross-check it.
//!
//! Discounted games go through value iteration on the one-step operator
//! (max at player-1 states, min at player-2 states, expectation at
//! random states), run until the fixed-point error is provably below
//! tolerance, followed by greedy strategy extraction and an exact
//! linear-solve re-evaluation of the extracted pair. Average games use
//! strategy improvement for player 1: pin the current strategy, let
//! player 2 best-respond exactly, then make one lexicographic
//! (gain, bias) switch; at the fixed point both strategies are optimal.

use std::collections::BTreeMap;

use thiserror::Error;

use crate::chain::{chain_gain_bias, chain_value, ChainError};
use crate::game::{
    GameStructure, MemorylessStrategy, Objective, Owner, Player, ValueFunction,
};
use crate::mdp::{improve_average, mdp_solve, MdpError, Sense};
use crate::scalar::{real, Real};

#[derive(Debug, Clone, PartialEq)]
pub struct GameValues<S> {
    /// Player-1 value at every state.
    pub val1: ValueFunction<S>,
    pub opt1: MemorylessStrategy,
    pub opt2: MemorylessStrategy,
}

/// Result of deciding whether player 1 can force value ≥ p from the
/// initial state.
#[derive(Debug, Clone, PartialEq)]
pub struct SolveResult<S> {
    pub winner: Player,
    /// The winner's certificate: player 1's p-achieving strategy, or
    /// player 2's spoiling strategy.
    pub strategy: MemorylessStrategy,
    pub val1: ValueFunction<S>,
    pub opt1: MemorylessStrategy,
    pub opt2: MemorylessStrategy,
    /// val1(v0) landed within the goal tolerance of p; the verdict
    /// stands (ties favor player 1) but downstream reporting flags it.
    pub boundary: bool,
}

#[derive(Debug, Error, PartialEq)]
pub enum SolveError {
    #[error(transparent)]
    Chain(#[from] ChainError),
    #[error(transparent)]
    Mdp(#[from] MdpError),
    #[error("value iteration did not converge within {sweeps} sweeps")]
    ValueIterationDiverged { sweeps: usize },
    #[error("strategy improvement did not converge within {rounds} rounds")]
    ImprovementDiverged { rounds: usize },
    #[error("{strategies:.3e} strategy pairs exceed the enumeration guard of {limit:.0e}")]
    InstanceTooLarge { strategies: f64, limit: f64 },
}

const MAX_VI_SWEEPS: usize = 1_000_000;
const MAX_IMPROVEMENT_ROUNDS: usize = 10_000;
const ENUMERATION_GUARD: f64 = 1e7;

/// Margin for winner determination in `game_solve`; a value within the
/// margin of p counts as reaching p.
pub(crate) fn goal_tolerance<S: Real>() -> S {
    real::<S>(1e-9)
}

/// Optimal values and memoryless optimal strategies for both players.
pub fn game_values<S: Real>(
    game: &GameStructure<S>,
    objective: Objective<S>,
) -> Result<GameValues<S>, SolveError> {
    match objective {
        Objective::Discounted(beta) => discounted_values(game, beta),
        Objective::Average => average_values(game),
    }
}

fn discounted_values<S: Real>(
    game: &GameStructure<S>,
    beta: S,
) -> Result<GameValues<S>, SolveError> {
    let n = game.num_states();
    // Stopping rule: once successive iterates differ by at most
    // eps (1 - beta) / (2 beta) in sup norm, the current iterate is
    // within eps of the fixed point.
    let eps = real::<S>(1e-9);
    let threshold = eps * (S::one() - beta) / (real::<S>(2.0) * beta);

    let mut values = vec![S::zero(); n];
    let mut converged = false;
    for _ in 0..MAX_VI_SWEEPS {
        let mut next = vec![S::zero(); n];
        let mut delta = S::zero();
        for v in 0..n {
            let aggregated = match game.owner(v) {
                Owner::P1 => fold_extreme(game.successors(v), &values, Sense::Max),
                Owner::P2 => fold_extreme(game.successors(v), &values, Sense::Min),
                Owner::Random => game
                    .successors(v)
                    .iter()
                    .zip(game.weights(v))
                    .map(|(&w, &p)| p * values[w])
                    .sum(),
            };
            next[v] = game.reward(v) + beta * aggregated;
            delta = delta.max((next[v] - values[v]).abs());
        }
        values = next;
        if delta <= threshold {
            converged = true;
            break;
        }
    }
    if !converged {
        return Err(SolveError::ValueIterationDiverged { sweeps: MAX_VI_SWEEPS });
    }

    let opt1 = greedy_strategy(game, &values, Player::One);
    let opt2 = greedy_strategy(game, &values, Player::Two);
    let pinned = game
        .restrict(&opt1)
        .and_then(|g| g.restrict(&opt2))
        .expect("greedy strategies pick existing edges");
    let val1 = chain_value(&pinned, Objective::Discounted(beta))?;
    Ok(GameValues { val1, opt1, opt2 })
}

fn fold_extreme<S: Real>(successors: &[usize], values: &[S], sense: Sense) -> S {
    let fold = match sense {
        Sense::Max => S::max,
        Sense::Min => S::min,
    };
    successors
        .iter()
        .map(|&w| values[w])
        .reduce(fold)
        .expect("every state has a successor")
}

/// Extracts the player's greedy strategy from a value vector, lowest
/// successor index on ties.
fn greedy_strategy<S: Real>(
    game: &GameStructure<S>,
    values: &[S],
    player: Player,
) -> MemorylessStrategy {
    let choice: BTreeMap<usize, usize> = game
        .states_of(player.owner())
        .map(|v| {
            let successors = game.sorted_successors(v);
            let mut best = successors[0];
            for &w in &successors[1..] {
                let beats = match player {
                    Player::One => values[w] > values[best],
                    Player::Two => values[w] < values[best],
                };
                if beats {
                    best = w;
                }
            }
            (v, best)
        })
        .collect();
    MemorylessStrategy::new(player, choice)
}

fn average_values<S: Real>(game: &GameStructure<S>) -> Result<GameValues<S>, SolveError> {
    // Start from the lowest-indexed successor everywhere.
    let mut f1 = MemorylessStrategy::new(
        Player::One,
        game.states_of(Owner::P1).map(|v| (v, game.sorted_successors(v)[0])).collect(),
    );

    for _ in 0..MAX_IMPROVEMENT_ROUNDS {
        let pinned = game.restrict(&f1).expect("strategy picks existing edges");
        let response = mdp_solve(&pinned, Objective::Average, Player::Two, Sense::Min)?;
        let chain = pinned.restrict(&response.policy).expect("best response picks existing edges");
        let (gain, bias) = chain_gain_bias(&chain)?;
        if !improve_average(game, &mut f1, &gain, &bias, Sense::Max) {
            return Ok(GameValues {
                val1: ValueFunction::new(gain),
                opt1: f1,
                opt2: response.policy,
            });
        }
    }
    Err(SolveError::ImprovementDiverged { rounds: MAX_IMPROVEMENT_ROUNDS })
}

/// Decides the threshold game: can player 1 force val1(v0) ≥ p?
/// Ties within the goal tolerance go to player 1.
pub fn game_solve<S: Real>(
    game: &GameStructure<S>,
    objective: Objective<S>,
    p: S,
) -> Result<SolveResult<S>, SolveError> {
    let values = game_values(game, objective)?;
    let at_initial = values.val1.get(game.initial());
    let tolerance = goal_tolerance::<S>();
    let winner = if at_initial >= p - tolerance { Player::One } else { Player::Two };
    let boundary = (at_initial - p).abs() <= tolerance;
    let strategy = match winner {
        Player::One => values.opt1.clone(),
        Player::Two => values.opt2.clone(),
    };
    Ok(SolveResult {
        winner,
        strategy,
        val1: values.val1,
        opt1: values.opt1,
        opt2: values.opt2,
        boundary,
    })
}

/// Ground-truth values by exhausting every memoryless strategy pair:
/// evaluate each pair's chain exactly, then take the pointwise
/// max over player-1 strategies of the pointwise min over player-2
/// strategies. Exponential; guarded by the strategy-count limit.
pub fn brute_force_values<S: Real>(
    game: &GameStructure<S>,
    objective: Objective<S>,
) -> Result<ValueFunction<S>, SolveError> {
    let strategy_count: f64 = (0..game.num_states())
        .filter(|&v| game.owner(v) != Owner::Random)
        .map(|v| game.successors(v).len() as f64)
        .product();
    if strategy_count > ENUMERATION_GUARD {
        return Err(SolveError::InstanceTooLarge {
            strategies: strategy_count,
            limit: ENUMERATION_GUARD,
        });
    }

    let mut best: Option<Vec<S>> = None;
    for f1 in enumerate_strategies(game, Player::One) {
        let pinned = game.restrict(&f1).expect("enumerated strategies pick existing edges");
        let mut worst: Option<Vec<S>> = None;
        for f2 in enumerate_strategies(game, Player::Two) {
            let chain = pinned.restrict(&f2).expect("enumerated strategies pick existing edges");
            let values = chain_value(&chain, objective)?;
            worst = Some(match worst {
                None => values.values,
                Some(acc) => {
                    acc.into_iter().zip(values.values).map(|(a, b)| a.min(b)).collect()
                }
            });
        }
        let worst = worst.expect("player 2 has at least the empty strategy");
        best = Some(match best {
            None => worst,
            Some(acc) => acc.into_iter().zip(worst).map(|(a, b)| a.max(b)).collect(),
        });
    }
    Ok(ValueFunction::new(best.expect("player 1 has at least the empty strategy")))
}

/// All memoryless strategies of a player, successors in ascending
/// order, odometer-style.
fn enumerate_strategies<S: Real>(
    game: &GameStructure<S>,
    player: Player,
) -> impl Iterator<Item = MemorylessStrategy> + '_ {
    let states: Vec<usize> = game.states_of(player.owner()).collect();
    let options: Vec<Vec<usize>> = states.iter().map(|&v| game.sorted_successors(v)).collect();
    let mut counters = vec![0usize; states.len()];
    let mut exhausted = false;
    std::iter::from_fn(move || {
        if exhausted {
            return None;
        }
        let choice: BTreeMap<usize, usize> = states
            .iter()
            .enumerate()
            .map(|(i, &v)| (v, options[i][counters[i]]))
            .collect();
        // Advance the odometer, first state fastest.
        exhausted = true;
        for (i, counter) in counters.iter_mut().enumerate() {
            *counter += 1;
            if *counter < options[i].len() {
                exhausted = false;
                break;
            }
            *counter = 0;
        }
        Some(MemorylessStrategy::new(player, choice))
    })
}
