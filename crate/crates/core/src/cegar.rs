//! Goal-directed planning by refinement of partition abstractions.
//!
//! The planner asks whether player 1 can force value at least `p` from
//! the initial state. It solves a small abstract game first; if player
//! 1 wins there, the abstract strategy lowers to a concrete plan (the
//! abstract value is a lower bound, so the plan certifies). If player 2
//! wins, the abstract spoiler is checked against the concrete game:
//! either some block is only partially able to follow it (the
//! counterexample is spurious and the block splits), or the spoiler is
//! real and lowers to a concrete witness. Each split grows the
//! partition by at least one block, so the loop visits at most
//! `|V| - initial blocks + 1` abstractions before reaching one that is
//! fine enough to decide.
//!
//! Three refinement operators are tried in a fixed order, each sweeping
//! blocks by index, so runs are reproducible:
//! 1. spoiler focus on player-2 blocks: members that can follow the
//!    spoiler's chosen abstract edge,
//! 2. improvement focus on player-1 blocks: members with a concrete
//!    edge into a strictly better-valued block,
//! 3. reward focus on any block: members attaining the block's
//!    (minimum) reward.
//!
//! A fourth operator backs the infeasibility certificate: if the best
//! response to a lowered spoiler crosses a block boundary that the
//! abstraction lacks, the crossing separates the members with that
//! escape from the rest.

use std::collections::BTreeSet;
use std::fmt;

use thiserror::Error;

use crate::abstraction::{
    build_abstraction, concretize_plan, concretize_spoiler, initial_abstraction, Abstraction,
    PartitionError, StatePartition,
};
use crate::game::{GameStructure, MemorylessStrategy, Objective, Owner, Player, ValueFunction};
use crate::mdp::{mdp_solve, MdpError, Sense};
use crate::scalar::{real, Real};
use crate::solve::{game_solve, goal_tolerance, SolveError, SolveResult};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SplitOperator {
    FocusP1,
    FocusP2,
    ValueFocus,
    CertificateFocus,
}

impl fmt::Display for SplitOperator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            SplitOperator::FocusP1 => "FOCUS_P1",
            SplitOperator::FocusP2 => "FOCUS_P2",
            SplitOperator::ValueFocus => "VALUE_FOCUS",
            SplitOperator::CertificateFocus => "CERTIFICATE_FOCUS",
        })
    }
}

/// One block split, in concrete state indices.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SplitEvent {
    pub operator: SplitOperator,
    /// Members of the block before the split, ascending.
    pub block_members: Vec<usize>,
    /// The members separated out, ascending.
    pub subset: Vec<usize>,
}

/// What one refinement attempt concluded about the abstract spoiler.
#[derive(Debug, Clone)]
pub enum RefinementOutcome {
    /// Some block mixed states that can and cannot follow the spoiler
    /// (or mixed values); it was split.
    Spurious { refined: StatePartition, event: SplitEvent },
    /// Every operator is at a fixed point; the spoiler lowers intact.
    Genuine,
}

/// One planner iteration, recorded for the run trace.
#[derive(Debug, Clone)]
pub struct IterationRecord<S> {
    pub iteration: usize,
    pub abstract_states: usize,
    /// Blocks the dead-block repair added while building this
    /// iteration's abstraction, on top of the single block its
    /// preceding split contributed.
    pub repair_splits: usize,
    /// Winner of the abstract game at this iteration.
    pub winner: Player,
    /// The split performed, absent on the verdict iteration.
    pub split: Option<SplitEvent>,
    /// Abstract player-1 value at the abstract initial state.
    pub abstract_val1_initial: S,
}

#[derive(Debug, Clone)]
pub enum PlanVerdict<S> {
    /// Player 1 reaches `p`: a concrete memoryless plan, certified by
    /// solving the plan-restricted game for the opponent's best reply.
    Feasible { plan: MemorylessStrategy, certified_value: S },
    /// Player 1 cannot reach `p`: a concrete spoiler capping the value,
    /// certified by player 1's best response against it, with the
    /// abstract spoiler it was lowered from.
    Infeasible {
        spoiler: MemorylessStrategy,
        abstract_spoiler: MemorylessStrategy,
        certified_value: S,
    },
}

#[derive(Debug, Clone)]
pub struct PlanOutcome<S> {
    pub verdict: PlanVerdict<S>,
    pub trace: Vec<IterationRecord<S>>,
    /// The partition the verdict was reached on.
    pub final_partition: StatePartition,
    /// Repairs applied while building the first abstraction.
    pub initial_repairs: usize,
}

impl<S> PlanOutcome<S> {
    pub fn refinements(&self) -> usize {
        self.trace.iter().filter(|record| record.split.is_some()).count()
    }

    pub fn feasible(&self) -> bool {
        matches!(self.verdict, PlanVerdict::Feasible { .. })
    }
}

#[derive(Debug, Error)]
pub enum CegarError {
    #[error(transparent)]
    Solve(#[from] SolveError),
    #[error(transparent)]
    Mdp(#[from] MdpError),
    #[error(transparent)]
    Partition(#[from] PartitionError),
    #[error("refinement failed to reach a verdict within {iterations} iterations")]
    RefinementDiverged { iterations: usize },
}

/// Minimum abstract value gap for the improvement focus.
fn focus_delta<S: Real>() -> S {
    real::<S>(1e-9)
}

/// Slack allowed between an abstract bound and its concrete
/// certificate; generous against the solvers' own tolerances.
fn certificate_slack<S: Real>() -> S {
    real::<S>(1e-6)
}

/// Members of a player-2 block with a concrete edge into the spoiler's
/// target block. Nonempty by construction of existential edges.
pub fn focus_p2<S: Real>(
    game: &GameStructure<S>,
    partition: &StatePartition,
    block: usize,
    target: usize,
) -> BTreeSet<usize> {
    partition
        .members(block)
        .iter()
        .copied()
        .filter(|&v| game.successors(v).iter().any(|&w| partition.block_of(w) == target))
        .collect()
}

/// Members of a player-1 block with a concrete edge into a block whose
/// abstract value strictly exceeds their own block's.
pub fn focus_p1<S: Real>(
    game: &GameStructure<S>,
    partition: &StatePartition,
    abstract_val1: &ValueFunction<S>,
    block: usize,
) -> BTreeSet<usize> {
    let own = abstract_val1.get(block);
    let threshold = own + focus_delta::<S>();
    partition
        .members(block)
        .iter()
        .copied()
        .filter(|&v| {
            game.successors(v)
                .iter()
                .any(|&w| abstract_val1.get(partition.block_of(w)) > threshold)
        })
        .collect()
}

/// Members of a block attaining the block's reward, which is the
/// minimum over members; exact comparison is deliberate, the minimum
/// is one of the compared values.
pub fn value_focus<S: Real>(
    game: &GameStructure<S>,
    partition: &StatePartition,
    block: usize,
) -> BTreeSet<usize> {
    let floor = partition
        .members(block)
        .iter()
        .map(|&v| game.reward(v))
        .reduce(S::min)
        .expect("blocks are nonempty");
    partition
        .members(block)
        .iter()
        .copied()
        .filter(|&v| game.reward(v) == floor)
        .collect()
}

/// Tries the refinement operators in order against the solved abstract
/// game and performs the first proper split found. Returns `Genuine`
/// only after all three sweeps find every block uniform, which in
/// particular means every member of every player-2 block can follow
/// the spoiler.
pub fn cegar_step<S: Real>(
    game: &GameStructure<S>,
    abstraction: &Abstraction<S>,
    solved: &SolveResult<S>,
) -> RefinementOutcome {
    let partition = &abstraction.partition;

    for block in 0..partition.num_blocks() {
        if abstraction.game.owner(block) != Owner::P2 {
            continue;
        }
        let target = solved.opt2.choice[&block];
        let subset = focus_p2(game, partition, block, target);
        assert!(!subset.is_empty(), "existential edges have a concrete witness");
        if let Some(outcome) = try_split(partition, block, subset, SplitOperator::FocusP2) {
            return outcome;
        }
    }

    for block in 0..partition.num_blocks() {
        if abstraction.game.owner(block) != Owner::P1 {
            continue;
        }
        let subset = focus_p1(game, partition, &solved.val1, block);
        if subset.is_empty() {
            continue;
        }
        if let Some(outcome) = try_split(partition, block, subset, SplitOperator::FocusP1) {
            return outcome;
        }
    }

    for block in 0..partition.num_blocks() {
        let subset = value_focus(game, partition, block);
        if let Some(outcome) = try_split(partition, block, subset, SplitOperator::ValueFocus) {
            return outcome;
        }
    }

    RefinementOutcome::Genuine
}

/// Splits when the subset is proper; a full subset means the operator
/// is already at a fixed point on this block.
fn try_split(
    partition: &StatePartition,
    block: usize,
    subset: BTreeSet<usize>,
    operator: SplitOperator,
) -> Option<RefinementOutcome> {
    if subset.len() == partition.members(block).len() {
        return None;
    }
    let refined = partition.split(block, &subset).expect("focus subsets are proper and owned");
    let event = SplitEvent {
        operator,
        block_members: partition.members(block).to_vec(),
        subset: subset.into_iter().collect(),
    };
    Some(RefinementOutcome::Spurious { refined, event })
}

/// Finds the lowest player-1 state whose best-response move crosses
/// between blocks the abstraction does not connect, and the subset of
/// its block sharing that escape. Such a crossing is the only way a
/// lowered spoiler can fail its certificate; absence of one means the
/// certificate holds up to solver tolerances.
pub fn certificate_focus<S: Real>(
    game: &GameStructure<S>,
    abstraction: &Abstraction<S>,
    response: &MemorylessStrategy,
) -> Option<(usize, BTreeSet<usize>)> {
    let partition = &abstraction.partition;
    for (&u, &w) in &response.choice {
        let block = partition.block_of(u);
        let target = partition.block_of(w);
        if abstraction.game.successors(block).binary_search(&target).is_ok() {
            continue;
        }
        let subset: BTreeSet<usize> = partition
            .members(block)
            .iter()
            .copied()
            .filter(|&v| game.successors(v).iter().any(|&x| partition.block_of(x) == target))
            .collect();
        debug_assert!(subset.contains(&u));
        debug_assert!(
            subset.len() < partition.members(block).len(),
            "a block-wide escape is a universal edge",
        );
        return Some((block, subset));
    }
    None
}

/// Decides whether player 1 can force value at least `p` from the
/// initial state, by abstraction refinement. Both verdicts come with a
/// concrete certificate: a feasible plan is re-checked against the
/// opponent's best reply, an infeasible spoiler against player 1's
/// best response.
pub fn counterexample_guided_plan<S: Real>(
    game: &GameStructure<S>,
    objective: Objective<S>,
    p: S,
) -> Result<PlanOutcome<S>, CegarError> {
    counterexample_guided_plan_capped(game, objective, p, usize::MAX)
}

/// The same refinement loop with a caller-imposed iteration ceiling,
/// for runs that should give up early rather than refine to the end.
/// Hitting the ceiling reports `RefinementDiverged`.
pub fn counterexample_guided_plan_capped<S: Real>(
    game: &GameStructure<S>,
    objective: Objective<S>,
    p: S,
    cap: usize,
) -> Result<PlanOutcome<S>, CegarError> {
    let seed = initial_abstraction(game);
    let seed_blocks = seed.num_blocks();
    let mut abstraction = build_abstraction(game, seed)?;
    let initial_repairs = abstraction.repairs.len();
    let initial_blocks = abstraction.partition.num_blocks();
    // Every split adds a block and blocks cannot outnumber states, so
    // at most |V| - initial splits precede the verdict iteration.
    let max_iterations = (game.num_states() - initial_blocks + 1).min(cap);
    let mut trace: Vec<IterationRecord<S>> = Vec::new();
    let mut repair_splits = initial_blocks - seed_blocks;

    for iteration in 0..max_iterations {
        let solved = game_solve(&abstraction.game, objective, p)?;
        let abstract_states = abstraction.game.num_states();
        let abstract_val1_initial = solved.val1.get(abstraction.game.initial());
        let mut record = IterationRecord {
            iteration,
            abstract_states,
            repair_splits,
            winner: solved.winner,
            split: None,
            abstract_val1_initial,
        };

        if solved.winner == Player::One {
            let plan = concretize_plan(game, &abstraction, &solved.opt1);
            let restricted = game.restrict(&plan).expect("lowered plans choose real edges");
            let reply = mdp_solve(&restricted, objective, Player::Two, Sense::Min)?;
            let certified_value = reply.values.get(game.initial());
            assert!(
                certified_value >= p - certificate_slack::<S>(),
                "the abstract value is a lower bound; a winning plan must certify",
            );
            trace.push(record);
            return Ok(PlanOutcome {
                verdict: PlanVerdict::Feasible { plan, certified_value },
                trace,
                final_partition: abstraction.partition,
                initial_repairs,
            });
        }

        match cegar_step(game, &abstraction, &solved) {
            RefinementOutcome::Spurious { refined, event } => {
                record.split = Some(event);
                trace.push(record);
                let refined_blocks = refined.num_blocks();
                abstraction = build_abstraction(game, refined)?;
                repair_splits = abstraction.partition.num_blocks() - refined_blocks;
            }
            RefinementOutcome::Genuine => {
                let spoiler = concretize_spoiler(game, &abstraction, &solved.opt2)
                    .expect("a genuine verdict leaves every player-2 block fully focused");
                let restricted =
                    game.restrict(&spoiler).expect("lowered spoilers choose real edges");
                let response = mdp_solve(&restricted, objective, Player::One, Sense::Max)?;
                let certified_value = response.values.get(game.initial());
                if certified_value < p - goal_tolerance::<S>() {
                    trace.push(record);
                    return Ok(PlanOutcome {
                        verdict: PlanVerdict::Infeasible {
                            spoiler,
                            abstract_spoiler: solved.opt2,
                            certified_value,
                        },
                        trace,
                        final_partition: abstraction.partition,
                        initial_repairs,
                    });
                }
                // The spoiler failed to cap the value at p. The best
                // response must then use an inter-block move missing
                // from the abstraction; separating the states that
                // have it restores progress.
                if let Some((block, subset)) =
                    certificate_focus(game, &abstraction, &response.policy)
                {
                    let event = SplitEvent {
                        operator: SplitOperator::CertificateFocus,
                        block_members: abstraction.partition.members(block).to_vec(),
                        subset: subset.iter().copied().collect(),
                    };
                    let refined = abstraction
                        .partition
                        .split(block, &subset)
                        .expect("certificate gaps are proper subsets");
                    record.split = Some(event);
                    trace.push(record);
                    let refined_blocks = refined.num_blocks();
                    abstraction = build_abstraction(game, refined)?;
                    repair_splits = abstraction.partition.num_blocks() - refined_blocks;
                } else {
                    // No crossing: the response stays on abstract
                    // edges, so its value is capped by the abstract
                    // one and the miss is solver noise at the goal
                    // boundary. The spoiler still pins the value.
                    assert!(
                        certified_value < p + certificate_slack::<S>(),
                        "a crossing-free best response cannot beat the abstract bound",
                    );
                    trace.push(record);
                    return Ok(PlanOutcome {
                        verdict: PlanVerdict::Infeasible {
                            spoiler,
                            abstract_spoiler: solved.opt2,
                            certified_value,
                        },
                        trace,
                        final_partition: abstraction.partition,
                        initial_repairs,
                    });
                }
            }
        }
    }

    Err(CegarError::RefinementDiverged { iterations: max_iterations })
}
