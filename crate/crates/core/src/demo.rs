//! A small worked game whose refinement run exercises every stage of
//! the planner: a coarse abstraction that undervalues the start, a
//! reward split, a spoiler split, and a feasible verdict.
//!
//! Player 1 starts at `v` and can lock in the `g0` self-loop (average
//! 0.7), take the `v3` detour cycle worth 0.6, or hand control to
//! player 2 at `v2`, who can trap the play in the low self-loops `v0`
//! (0.15) or `v1` (0.25), directly or through the fair coin `c1`. The
//! `g`-cluster also contains a chance state `c2` mixing `g0` and `g1`.
//! The concrete average value at `v` is 0.7.
//!
//! Under the coarsest start partition all player-1 states outside `v`
//! share one block whose reward floor 0.15 hides the `g` states, so
//! the abstract value starts at 0.15; splitting off `v0` lifts it to
//! 0.25; splitting `v2` from `v3` (only `v2` can reach the `v0`
//! block) lifts it to 0.6, which clears goals up to that value.

use crate::game::{GameStructure, Owner};

/// The eleven-state refinement storyline game, average objective.
pub fn storyline_game() -> GameStructure<f64> {
    let states = vec![
        ("v".to_string(), Owner::P1, 0.0),
        ("c0".to_string(), Owner::Random, 0.0),
        ("v0".to_string(), Owner::P1, 0.15),
        ("v1".to_string(), Owner::P1, 0.25),
        ("g0".to_string(), Owner::P1, 0.7),
        ("g1".to_string(), Owner::P1, 0.6),
        ("g2".to_string(), Owner::P1, 0.65),
        ("c2".to_string(), Owner::Random, 0.6),
        ("v2".to_string(), Owner::P2, 0.0),
        ("v3".to_string(), Owner::P2, 1.8),
        ("c1".to_string(), Owner::Random, 0.0),
    ];
    let edges = vec![
        (0, 4, None),
        (0, 8, None),
        (0, 9, None),
        (1, 0, Some(1.0)),
        (2, 2, None),
        (3, 3, None),
        (4, 4, None),
        (4, 6, None),
        (5, 5, None),
        (5, 7, None),
        (6, 6, None),
        (7, 4, Some(0.6)),
        (7, 5, Some(0.4)),
        (8, 1, None),
        (8, 2, None),
        (8, 3, None),
        (8, 10, None),
        (9, 1, None),
        (10, 2, Some(0.5)),
        (10, 3, Some(0.5)),
    ];
    GameStructure::try_new(states, edges, 0).expect("the storyline game is well formed")
}
