//! Game structures: turn-based stochastic games on explicit graphs.
//!
//! A game is a finite directed graph whose states are owned by player 1,
//! player 2, or chance. Every state carries a real reward and at least
//! one outgoing edge; edges leaving chance states carry probabilities
//! summing to one. States are identified by dense indices in declaration
//! order, names are aliases for people and files. All tie-breaking
//! downstream (strategy extraction, refinement choices) leans on that
//! fixed index order, which is what makes runs reproducible.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use thiserror::Error;

use crate::scalar::{real, Real};

/// Who moves at a state.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Owner {
    P1,
    P2,
    Random,
}

impl fmt::Display for Owner {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Owner::P1 => "P1",
            Owner::P2 => "P2",
            Owner::Random => "R",
        })
    }
}

/// One of the two strategic players.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Player {
    One,
    Two,
}

impl Player {
    pub fn owner(self) -> Owner {
        match self {
            Player::One => Owner::P1,
            Player::Two => Owner::P2,
        }
    }

    pub fn opponent(self) -> Player {
        match self {
            Player::One => Player::Two,
            Player::Two => Player::One,
        }
    }

    /// 1 or 2, for reports and serialized strategies.
    pub fn index(self) -> u8 {
        match self {
            Player::One => 1,
            Player::Two => 2,
        }
    }
}

impl fmt::Display for Player {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.index())
    }
}

/// What the game degenerates to, judged by who actually has a choice.
/// A player counts as present only when they own a state with two or
/// more successors; a frozen player (single successor everywhere, e.g.
/// after `restrict`) no longer classifies. Chance counts by presence:
/// any random state makes the dynamics stochastic.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GameClass {
    Game,
    Mdp,
    DeterministicGame,
    TransitionSystem,
}

impl fmt::Display for GameClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            GameClass::Game => "GAME",
            GameClass::Mdp => "MDP",
            GameClass::DeterministicGame => "DETERMINISTIC_GAME",
            GameClass::TransitionSystem => "TRANSITION_SYSTEM",
        })
    }
}

/// Optimization criterion for infinite plays.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Objective<S> {
    /// Expected total reward with future steps scaled by β ∈ (0,1);
    /// the reward at time zero counts in full.
    Discounted(S),
    /// Long-run (Cesàro) mean reward per step.
    Average,
}

#[derive(Debug, Error, PartialEq)]
pub enum ObjectiveError {
    #[error("discount factor must lie strictly inside (0,1), got {0}")]
    BadDiscount(f64),
}

impl<S: Real> Objective<S> {
    /// Checked constructor for the discounted objective.
    pub fn discounted(beta: S) -> Result<Self, ObjectiveError> {
        if beta > S::zero() && beta < S::one() && beta.is_finite() {
            Ok(Objective::Discounted(beta))
        } else {
            Err(ObjectiveError::BadDiscount(beta.to_f64().unwrap_or(f64::NAN)))
        }
    }
}

/// A deterministic positional strategy: one successor per owned state.
/// The domain covers exactly the states of `player`, including states
/// with a single successor.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MemorylessStrategy {
    pub player: Player,
    pub choice: BTreeMap<usize, usize>,
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum StrategyError {
    #[error("strategy covers state {state} which player {player} does not own")]
    NotOwned { state: usize, player: Player },
    #[error("strategy misses state {state} owned by player {player}")]
    Missing { state: usize, player: Player },
    #[error("strategy picks ({from}, {to}) which is not an edge")]
    NotAnEdge { from: usize, to: usize },
}

impl MemorylessStrategy {
    pub fn new(player: Player, choice: BTreeMap<usize, usize>) -> Self {
        MemorylessStrategy { player, choice }
    }

    /// Checks the domain and edge validity against a game.
    pub fn validate_for<S: Real>(&self, game: &GameStructure<S>) -> Result<(), StrategyError> {
        for (&v, &w) in &self.choice {
            if v >= game.num_states() || game.owner(v) != self.player.owner() {
                return Err(StrategyError::NotOwned { state: v, player: self.player });
            }
            if !game.successors(v).contains(&w) {
                return Err(StrategyError::NotAnEdge { from: v, to: w });
            }
        }
        for v in 0..game.num_states() {
            if game.owner(v) == self.player.owner() && !self.choice.contains_key(&v) {
                return Err(StrategyError::Missing { state: v, player: self.player });
            }
        }
        Ok(())
    }
}

/// State-indexed vector of values, total over the game's states.
#[derive(Debug, Clone, PartialEq)]
pub struct ValueFunction<S> {
    pub values: Vec<S>,
}

impl<S: Real> ValueFunction<S> {
    pub fn new(values: Vec<S>) -> Self {
        ValueFunction { values }
    }

    pub fn get(&self, state: usize) -> S {
        self.values[state]
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }
}

impl<S> std::ops::Index<usize> for ValueFunction<S> {
    type Output = S;
    fn index(&self, state: usize) -> &S {
        &self.values[state]
    }
}

/// A structural defect found while checking a game. Violations are
/// data, not failures: validation gathers all of them.
#[derive(Debug, Clone, PartialEq)]
pub enum Violation {
    NoStates,
    DuplicateName { name: String },
    InitialOutOfRange { initial: usize, count: usize },
    NonFiniteReward { state: String },
    EdgeEndpointOutOfRange { from: usize, to: usize, count: usize },
    DuplicateEdge { from: String, to: String },
    MissingWeight { from: String, to: String },
    UnexpectedWeight { from: String, to: String },
    WeightOutOfRange { from: String, to: String, weight: f64 },
    WeightSumMismatch { state: String, sum: f64 },
    DeadState { state: String },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::NoStates => write!(f, "game declares no states"),
            Violation::DuplicateName { name } => write!(f, "state name '{name}' declared twice"),
            Violation::InitialOutOfRange { initial, count } => {
                write!(f, "initial state index {initial} out of range (game has {count} states)")
            }
            Violation::NonFiniteReward { state } => {
                write!(f, "state '{state}' has a non-finite reward")
            }
            Violation::EdgeEndpointOutOfRange { from, to, count } => {
                write!(f, "edge ({from}, {to}) leaves the state range 0..{count}")
            }
            Violation::DuplicateEdge { from, to } => {
                write!(f, "edge ('{from}', '{to}') declared twice")
            }
            Violation::MissingWeight { from, to } => {
                write!(f, "edge ('{from}', '{to}') leaves a random state but carries no weight")
            }
            Violation::UnexpectedWeight { from, to } => {
                write!(f, "edge ('{from}', '{to}') carries a weight but '{from}' is not random")
            }
            Violation::WeightOutOfRange { from, to, weight } => {
                write!(f, "edge ('{from}', '{to}') weight {weight} lies outside (0, 1]")
            }
            Violation::WeightSumMismatch { state, sum } => {
                write!(f, "weights leaving random state '{state}' sum to {sum} instead of 1")
            }
            Violation::DeadState { state } => {
                write!(f, "state '{state}' has no outgoing edge")
            }
        }
    }
}

/// An explicit two-player stochastic game. Immutable once built; all
/// mutating operations (`restrict`, `mirror`) return new games.
#[derive(Debug, Clone, PartialEq)]
pub struct GameStructure<S> {
    names: Vec<String>,
    owners: Vec<Owner>,
    rewards: Vec<S>,
    successors: Vec<Vec<usize>>,
    weights: Vec<Vec<S>>,
    initial: usize,
}

impl<S: Real> GameStructure<S> {
    /// Builds a game from declaration-order parts, collecting every
    /// structural violation. `states` is (name, owner, reward); `edges`
    /// is (from, to, weight) with weights present exactly on edges
    /// leaving random states. Succeeds only when no violation exists.
    pub fn try_new(
        states: Vec<(String, Owner, S)>,
        edges: Vec<(usize, usize, Option<S>)>,
        initial: usize,
    ) -> Result<Self, Vec<Violation>> {
        let mut violations = Vec::new();
        let count = states.len();
        if count == 0 {
            violations.push(Violation::NoStates);
            return Err(violations);
        }

        let mut seen_names = BTreeSet::new();
        for (name, _, reward) in &states {
            if !seen_names.insert(name.clone()) {
                violations.push(Violation::DuplicateName { name: name.clone() });
            }
            if !reward.is_finite() {
                violations.push(Violation::NonFiniteReward { state: name.clone() });
            }
        }
        if initial >= count {
            violations.push(Violation::InitialOutOfRange { initial, count });
        }

        let mut successors: Vec<Vec<usize>> = vec![Vec::new(); count];
        let mut weights: Vec<Vec<S>> = vec![Vec::new(); count];
        let mut seen_edges = BTreeSet::new();
        for &(from, to, weight) in &edges {
            if from >= count || to >= count {
                violations.push(Violation::EdgeEndpointOutOfRange { from, to, count });
                continue;
            }
            let from_name = states[from].0.clone();
            let to_name = states[to].0.clone();
            if !seen_edges.insert((from, to)) {
                violations.push(Violation::DuplicateEdge { from: from_name, to: to_name });
                continue;
            }
            let from_random = states[from].1 == Owner::Random;
            match (from_random, weight) {
                (true, None) => {
                    violations.push(Violation::MissingWeight { from: from_name, to: to_name });
                    continue;
                }
                (false, Some(_)) => {
                    violations.push(Violation::UnexpectedWeight { from: from_name, to: to_name });
                    continue;
                }
                (true, Some(w)) => {
                    if !(w > S::zero() && w <= S::one()) || !w.is_finite() {
                        violations.push(Violation::WeightOutOfRange {
                            from: from_name,
                            to: to_name,
                            weight: w.to_f64().unwrap_or(f64::NAN),
                        });
                        continue;
                    }
                    successors[from].push(to);
                    weights[from].push(w);
                }
                (false, None) => successors[from].push(to),
            }
        }

        let sum_tolerance = real::<S>(1e-9).max(S::epsilon() * real(4.0));
        for (v, (name, owner, _)) in states.iter().enumerate() {
            if successors[v].is_empty() {
                violations.push(Violation::DeadState { state: name.clone() });
            } else if *owner == Owner::Random {
                let sum: S = weights[v].iter().copied().sum();
                if (sum - S::one()).abs() > sum_tolerance {
                    violations.push(Violation::WeightSumMismatch {
                        state: name.clone(),
                        sum: sum.to_f64().unwrap_or(f64::NAN),
                    });
                }
            }
        }

        if !violations.is_empty() {
            return Err(violations);
        }
        let (names, owners, rewards) = states.into_iter().fold(
            (Vec::new(), Vec::new(), Vec::new()),
            |(mut ns, mut os, mut rs), (n, o, r)| {
                ns.push(n);
                os.push(o);
                rs.push(r);
                (ns, os, rs)
            },
        );
        Ok(GameStructure { names, owners, rewards, successors, weights, initial })
    }

    /// Re-checks the structural invariants of an already built game.
    /// Empty result means valid; construction guarantees this, so a
    /// nonempty result on a game produced by this crate is a bug.
    pub fn validate(&self) -> Vec<Violation> {
        let states: Vec<(String, Owner, S)> = (0..self.num_states())
            .map(|v| (self.names[v].clone(), self.owners[v], self.rewards[v]))
            .collect();
        let mut edges = Vec::new();
        for v in 0..self.num_states() {
            for (k, &w) in self.successors[v].iter().enumerate() {
                let weight = if self.owners[v] == Owner::Random {
                    Some(self.weights[v][k])
                } else {
                    None
                };
                edges.push((v, w, weight));
            }
        }
        match GameStructure::try_new(states, edges, self.initial) {
            Ok(_) => Vec::new(),
            Err(violations) => violations,
        }
    }

    pub fn num_states(&self) -> usize {
        self.names.len()
    }

    pub fn name(&self, state: usize) -> &str {
        &self.names[state]
    }

    /// Index of the state with this name, if declared.
    pub fn state_by_name(&self, name: &str) -> Option<usize> {
        self.names.iter().position(|n| n == name)
    }

    pub fn owner(&self, state: usize) -> Owner {
        self.owners[state]
    }

    pub fn reward(&self, state: usize) -> S {
        self.rewards[state]
    }

    pub fn initial(&self) -> usize {
        self.initial
    }

    /// Successor states in declaration order.
    pub fn successors(&self, state: usize) -> &[usize] {
        &self.successors[state]
    }

    /// Successors in ascending index order. Decision scans use this so
    /// that ties resolve to the lowest-indexed state regardless of the
    /// order edges were declared in.
    pub fn sorted_successors(&self, state: usize) -> Vec<usize> {
        let mut successors = self.successors[state].clone();
        successors.sort_unstable();
        successors
    }

    /// Edge probabilities parallel to `successors`; empty unless the
    /// state is random.
    pub fn weights(&self, state: usize) -> &[S] {
        &self.weights[state]
    }

    /// States owned by the given player, ascending.
    pub fn states_of(&self, owner: Owner) -> impl Iterator<Item = usize> + '_ {
        (0..self.num_states()).filter(move |&v| self.owners[v] == owner)
    }

    /// Whether the owner controls any state with a real choice.
    pub fn has_live_choice(&self, owner: Owner) -> bool {
        (0..self.num_states())
            .any(|v| self.owners[v] == owner && self.successors[v].len() >= 2)
    }

    /// Degenerate-subclass judgment; see `GameClass`.
    pub fn classify(&self) -> GameClass {
        let both_players_live =
            self.has_live_choice(Owner::P1) && self.has_live_choice(Owner::P2);
        let stochastic = self.owners.contains(&Owner::Random);
        match (both_players_live, stochastic) {
            (true, true) => GameClass::Game,
            (true, false) => GameClass::DeterministicGame,
            (false, true) => GameClass::Mdp,
            (false, false) => GameClass::TransitionSystem,
        }
    }

    /// Pins one player to a strategy: their states keep only the chosen
    /// edge. States, rewards, and weights are untouched.
    pub fn restrict(&self, strategy: &MemorylessStrategy) -> Result<Self, StrategyError> {
        strategy.validate_for(self)?;
        let mut restricted = self.clone();
        for (&v, &w) in &strategy.choice {
            restricted.successors[v] = vec![w];
        }
        Ok(restricted)
    }

    /// The same game seen from player 2's side: ownership of P1 and P2
    /// states swaps and every reward is negated, so player-1 values of
    /// the mirror are player-2 values of the original.
    pub fn mirror(&self) -> Self {
        let mut mirrored = self.clone();
        for owner in &mut mirrored.owners {
            *owner = match *owner {
                Owner::P1 => Owner::P2,
                Owner::P2 => Owner::P1,
                Owner::Random => Owner::Random,
            };
        }
        for reward in &mut mirrored.rewards {
            *reward = -*reward;
        }
        mirrored
    }
}
