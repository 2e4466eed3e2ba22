//! Partition-based abstraction of games.
//!
//! A partition groups concrete states into owner-homogeneous blocks,
//! with every random state kept as a singleton. The induced abstract
//! game plays on the blocks: player-1 blocks get an edge only where
//! every member can follow it (so any abstract player-1 move can be
//! realized from anywhere in the block), player-2 and random blocks get
//! an edge where some member can (so the abstraction over-approximates
//! the opponent and chance), random weights accumulate into the target
//! block, and a block's reward is the minimum over its members. All
//! four choices make the abstract player-1 value a lower bound on the
//! concrete one, which is what lets an abstract win certify a concrete
//! plan.
//!
//! Blocks are kept canonical: members ascending, blocks ordered by
//! their smallest member. Abstract state ids are block indices in that
//! order, so every downstream tie-break stays reproducible.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use thiserror::Error;

use crate::game::{GameStructure, MemorylessStrategy, Owner, Player};
use crate::scalar::Real;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum PartitionError {
    #[error("partition references state {state} but the game has {count} states")]
    UnknownState { state: usize, count: usize },
    #[error("state {state} is missing from every block")]
    MissingState { state: usize },
    #[error("state {state} appears in more than one block")]
    DuplicateState { state: usize },
    #[error("block {index} is empty")]
    EmptyBlock { index: usize },
    #[error("block {index} mixes owners")]
    MixedOwners { index: usize },
    #[error("block {index} holds {size} random states; random states must stay singletons")]
    RandomNotSingleton { index: usize, size: usize },
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum SplitError {
    #[error("block index {block} out of range")]
    BlockOutOfRange { block: usize },
    #[error("state {state} is not a member of the split block")]
    ForeignState { state: usize },
    #[error("split subset is empty")]
    EmptySubset,
    #[error("split subset equals the whole block")]
    ImproperSubset,
}

/// A partition of the concrete state space, canonically ordered.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StatePartition {
    blocks: Vec<Vec<usize>>,
    block_of: Vec<usize>,
}

impl StatePartition {
    /// Validates blocks against the game and canonicalizes their order.
    pub fn new<S: Real>(
        game: &GameStructure<S>,
        blocks: Vec<Vec<usize>>,
    ) -> Result<Self, PartitionError> {
        let n = game.num_states();
        let mut seen = vec![false; n];
        for (index, block) in blocks.iter().enumerate() {
            if block.is_empty() {
                return Err(PartitionError::EmptyBlock { index });
            }
            for &v in block {
                if v >= n {
                    return Err(PartitionError::UnknownState { state: v, count: n });
                }
                if seen[v] {
                    return Err(PartitionError::DuplicateState { state: v });
                }
                seen[v] = true;
            }
            let owner = game.owner(block[0]);
            if block.iter().any(|&v| game.owner(v) != owner) {
                return Err(PartitionError::MixedOwners { index });
            }
            if owner == Owner::Random && block.len() > 1 {
                return Err(PartitionError::RandomNotSingleton { index, size: block.len() });
            }
        }
        if let Some(state) = seen.iter().position(|&s| !s) {
            return Err(PartitionError::MissingState { state });
        }
        Ok(Self::canonicalize(blocks, n))
    }

    fn canonicalize(mut blocks: Vec<Vec<usize>>, n: usize) -> Self {
        for block in &mut blocks {
            block.sort_unstable();
        }
        blocks.sort_by_key(|block| block[0]);
        let mut block_of = vec![0usize; n];
        for (i, block) in blocks.iter().enumerate() {
            for &v in block {
                block_of[v] = i;
            }
        }
        StatePartition { blocks, block_of }
    }

    /// The finest partition: every state alone.
    pub fn singletons<S: Real>(game: &GameStructure<S>) -> Self {
        Self::canonicalize((0..game.num_states()).map(|v| vec![v]).collect(), game.num_states())
    }

    pub fn num_blocks(&self) -> usize {
        self.blocks.len()
    }

    pub fn blocks(&self) -> &[Vec<usize>] {
        &self.blocks
    }

    pub fn members(&self, block: usize) -> &[usize] {
        &self.blocks[block]
    }

    pub fn block_of(&self, state: usize) -> usize {
        self.block_of[state]
    }

    /// Splits one block into `subset` and the rest. The subset must be
    /// a proper nonempty part of the block; the result is canonical
    /// again (indices of other blocks may shift).
    pub fn split(&self, block: usize, subset: &BTreeSet<usize>) -> Result<Self, SplitError> {
        if block >= self.blocks.len() {
            return Err(SplitError::BlockOutOfRange { block });
        }
        if subset.is_empty() {
            return Err(SplitError::EmptySubset);
        }
        let members: BTreeSet<usize> = self.blocks[block].iter().copied().collect();
        if let Some(&state) = subset.iter().find(|s| !members.contains(s)) {
            return Err(SplitError::ForeignState { state });
        }
        if subset.len() == members.len() {
            return Err(SplitError::ImproperSubset);
        }
        let mut blocks = self.blocks.clone();
        blocks[block] = members.difference(subset).copied().collect();
        blocks.push(subset.iter().copied().collect());
        Ok(Self::canonicalize(blocks, self.block_of.len()))
    }

    /// Replaces one block by several pieces at once; used by the
    /// dead-block repair, which regroups a block by successor
    /// signatures. Pieces must partition the block.
    fn replace_block(&self, block: usize, pieces: Vec<Vec<usize>>) -> Self {
        debug_assert!(pieces.len() >= 2);
        debug_assert_eq!(
            pieces.iter().flatten().copied().collect::<BTreeSet<_>>(),
            self.blocks[block].iter().copied().collect::<BTreeSet<_>>(),
        );
        let mut blocks = self.blocks.clone();
        blocks.remove(block);
        blocks.extend(pieces);
        Self::canonicalize(blocks, self.block_of.len())
    }
}

/// A dead-block repair event: the partition had a player-1 block with
/// no realizable abstract move, and it was regrouped by successor
/// signature.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Repair {
    /// Members of the block that had no universal edge.
    pub block_members: Vec<usize>,
    /// The signature groups that replaced it.
    pub pieces: Vec<Vec<usize>>,
}

impl fmt::Display for Repair {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "block {:?} split into {:?}", self.block_members, self.pieces)
    }
}

/// A partition together with the abstract game it induces.
#[derive(Debug, Clone)]
pub struct Abstraction<S> {
    pub partition: StatePartition,
    /// The abstract game; state i is block i, named "b{i}".
    pub game: GameStructure<S>,
    /// Repairs applied while building, in order. Empty when the given
    /// partition already induced a playable game.
    pub repairs: Vec<Repair>,
}

/// Successor blocks of one concrete state under a partition.
fn successor_blocks<S: Real>(
    game: &GameStructure<S>,
    partition: &StatePartition,
    v: usize,
) -> BTreeSet<usize> {
    game.successors(v).iter().map(|&w| partition.block_of(w)).collect()
}

/// Builds the abstract game over the partition's blocks. If a player-1
/// block admits no universal edge, the partition is first repaired by
/// regrouping that block by successor-block signature, repeated until
/// every block has a move; the repairs are reported in the result.
pub fn build_abstraction<S: Real>(
    game: &GameStructure<S>,
    partition: StatePartition,
) -> Result<Abstraction<S>, PartitionError> {
    // Defend against a partition built for a different game.
    let mut partition = StatePartition::new(game, partition.blocks.clone())?;
    let mut repairs = Vec::new();

    // Repair loop: find the lowest player-1 block whose members share
    // no common successor block, regroup it, start over (indices shift).
    'repair: loop {
        for b in 0..partition.num_blocks() {
            let members = partition.members(b);
            if game.owner(members[0]) != Owner::P1 {
                continue;
            }
            let universal = members
                .iter()
                .map(|&v| successor_blocks(game, &partition, v))
                .reduce(|acc, set| acc.intersection(&set).copied().collect())
                .expect("blocks are nonempty");
            if !universal.is_empty() {
                continue;
            }
            let mut groups: BTreeMap<BTreeSet<usize>, Vec<usize>> = BTreeMap::new();
            for &v in members {
                groups.entry(successor_blocks(game, &partition, v)).or_default().push(v);
            }
            debug_assert!(
                groups.len() >= 2,
                "a uniform-signature block has that signature as its universal edge set",
            );
            let pieces: Vec<Vec<usize>> = groups.into_values().collect();
            repairs.push(Repair { block_members: members.to_vec(), pieces: pieces.clone() });
            partition = partition.replace_block(b, pieces);
            continue 'repair;
        }
        break;
    }

    // Assemble the abstract game. Construction cannot fail on a
    // repaired partition: every block has an edge, weights re-group
    // concrete distributions, rewards stay finite.
    let mut states = Vec::new();
    let mut edges: Vec<(usize, usize, Option<S>)> = Vec::new();
    for (b, members) in partition.blocks().iter().enumerate() {
        let owner = game.owner(members[0]);
        let reward = members
            .iter()
            .map(|&v| game.reward(v))
            .reduce(S::min)
            .expect("blocks are nonempty");
        states.push((format!("b{b}"), owner, reward));
        match owner {
            Owner::P1 => {
                let universal = members
                    .iter()
                    .map(|&v| successor_blocks(game, &partition, v))
                    .reduce(|acc, set| acc.intersection(&set).copied().collect())
                    .expect("blocks are nonempty");
                edges.extend(universal.into_iter().map(|w| (b, w, None)));
            }
            Owner::P2 => {
                let existential: BTreeSet<usize> = members
                    .iter()
                    .flat_map(|&v| successor_blocks(game, &partition, v))
                    .collect();
                edges.extend(existential.into_iter().map(|w| (b, w, None)));
            }
            Owner::Random => {
                let v = members[0];
                let mut grouped: BTreeMap<usize, S> = BTreeMap::new();
                for (&w, &p) in game.successors(v).iter().zip(game.weights(v)) {
                    let entry = grouped.entry(partition.block_of(w)).or_insert_with(S::zero);
                    *entry = *entry + p;
                }
                edges.extend(grouped.into_iter().map(|(w, p)| (b, w, Some(p))));
            }
        }
    }
    let initial = partition.block_of(game.initial());
    let abstract_game = GameStructure::try_new(states, edges, initial)
        .expect("a repaired partition induces a structurally valid game");
    Ok(Abstraction { partition, game: abstract_game, repairs })
}

/// The coarsest useful starting partition: the initial state alone,
/// the remaining player-1 states as one block, the remaining player-2
/// states as one block, every random state alone.
pub fn initial_abstraction<S: Real>(game: &GameStructure<S>) -> StatePartition {
    let v0 = game.initial();
    let mut blocks = vec![vec![v0]];
    let rest_p1: Vec<usize> = game.states_of(Owner::P1).filter(|&v| v != v0).collect();
    if !rest_p1.is_empty() {
        blocks.push(rest_p1);
    }
    let rest_p2: Vec<usize> = game.states_of(Owner::P2).filter(|&v| v != v0).collect();
    if !rest_p2.is_empty() {
        blocks.push(rest_p2);
    }
    blocks.extend(game.states_of(Owner::Random).filter(|&v| v != v0).map(|v| vec![v]));
    StatePartition::new(game, blocks).expect("initial blocks partition the states by owner")
}

/// Maps an abstract player-1 strategy down to the concrete game: each
/// concrete state follows its block's choice into the lowest-indexed
/// concrete successor inside the target block. The universal edge rule
/// guarantees such a successor exists.
pub fn concretize_plan<S: Real>(
    game: &GameStructure<S>,
    abstraction: &Abstraction<S>,
    f1_abstract: &MemorylessStrategy,
) -> MemorylessStrategy {
    debug_assert_eq!(f1_abstract.player, Player::One);
    let choice = concretize(game, &abstraction.partition, f1_abstract)
        .into_iter()
        .map(|(v, w)| (v, w.expect("universal abstract edges concretize everywhere")))
        .collect();
    MemorylessStrategy { player: Player::One, choice }
}

#[derive(Debug, Error, PartialEq, Eq)]
#[error(
    "state {state} has no edge into the abstract spoiler's target block; \
     the spoiler was not a refinement fixed point"
)]
pub struct SpoilerGapError {
    pub state: usize,
}

/// Maps an abstract player-2 strategy down to the concrete game.
/// Player-2 abstract edges are only existential, so this can fail on a
/// strategy that is not a refinement fixed point; the error names the
/// concrete state that cannot follow the spoiler.
pub fn concretize_spoiler<S: Real>(
    game: &GameStructure<S>,
    abstraction: &Abstraction<S>,
    f2_abstract: &MemorylessStrategy,
) -> Result<MemorylessStrategy, SpoilerGapError> {
    debug_assert_eq!(f2_abstract.player, Player::Two);
    let choice = concretize(game, &abstraction.partition, f2_abstract)
        .into_iter()
        .map(|(v, w)| w.map(|w| (v, w)).ok_or(SpoilerGapError { state: v }))
        .collect::<Result<_, _>>()?;
    Ok(MemorylessStrategy { player: Player::Two, choice })
}

/// Shared lowering: for every concrete state of the strategy's player,
/// the lowest-indexed successor inside the abstract target block, if
/// any exists.
fn concretize<S: Real>(
    game: &GameStructure<S>,
    partition: &StatePartition,
    strategy: &MemorylessStrategy,
) -> Vec<(usize, Option<usize>)> {
    let mut lowered = Vec::new();
    for (&block, &target) in &strategy.choice {
        let target_members: BTreeSet<usize> =
            partition.members(target).iter().copied().collect();
        for &v in partition.members(block) {
            let w = game.successors(v).iter().copied().filter(|w| target_members.contains(w)).min();
            lowered.push((v, w));
        }
    }
    lowered.sort_unstable();
    lowered
}
