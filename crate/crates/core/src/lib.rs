//! Explicit-state solver and refinement planner for two-player
//! stochastic games.
//!
//! A game is a finite directed structure whose states belong to player
//! 1, player 2, or chance; plays accumulate state rewards under either
//! a discounted or a long-run average objective, player 1 maximizing
//! and player 2 minimizing. The crate provides
//! * exact evaluation of fully decided games (`chain_value`),
//! * policy iteration for one-player games (`mdp_solve`),
//! * optimal values and strategies for full games (`game_values`),
//! * a goal-threshold decision procedure (`game_solve`),
//! * partition abstractions with a soundness direction that lets
//!   abstract wins lower to concrete plans (`build_abstraction`),
//! * a counterexample-guided planner that refines the abstraction
//!   until it certifies a verdict (`counterexample_guided_plan`).
//!
//! Everything numeric is generic over the scalar via [`Real`]; the
//! aliases at the crate root pin the common double-precision
//! instantiation.

pub mod abstraction;
pub mod cegar;
pub mod chain;
pub mod demo;
pub mod game;
pub mod io;
pub mod linalg;
pub mod mdp;
pub mod solve;

mod scalar;

pub use abstraction::{
    build_abstraction, concretize_plan, concretize_spoiler, initial_abstraction, Abstraction,
    PartitionError, Repair, SpoilerGapError, SplitError, StatePartition,
};
pub use cegar::{
    cegar_step, certificate_focus, counterexample_guided_plan,
    counterexample_guided_plan_capped, focus_p1, focus_p2, value_focus, CegarError,
    IterationRecord, PlanOutcome, PlanVerdict, RefinementOutcome, SplitEvent, SplitOperator,
};
pub use chain::{chain_gain_bias, chain_value, ChainError};
pub use demo::storyline_game;
pub use game::{
    GameClass, GameStructure, MemorylessStrategy, Objective, ObjectiveError, Owner, Player,
    StrategyError, ValueFunction, Violation,
};
pub use io::{
    parse_game, parse_partition_blocks, serialize_abstraction, serialize_game,
    serialize_strategy, ParseError,
};
pub use mdp::{mdp_solve, MdpError, MdpSolution, Sense};
pub use scalar::{real, Real};
pub use solve::{
    brute_force_values, game_solve, game_values, GameValues, SolveError, SolveResult,
};

/// Double-precision instantiations, the default across the tools.
pub type Game = GameStructure<f64>;
pub type Values = ValueFunction<f64>;
pub type GameAbstraction = Abstraction<f64>;
pub type PlanRun = PlanOutcome<f64>;

/// Single-precision game, for callers trading accuracy for footprint.
pub type Game32 = GameStructure<f32>;
