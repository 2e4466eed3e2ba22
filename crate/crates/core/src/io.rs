//! File formats: game JSON, partition JSON, strategy JSON.
//!
//! Serialization is canonical: states and edges appear in index order,
//! edges grouped by source, pretty-printed with two-space indentation.
//! Parsing a serialized game and serializing it again reproduces the
//! bytes, which keeps golden files stable.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::abstraction::Abstraction;
use crate::game::{GameStructure, MemorylessStrategy, Owner, Violation};
use crate::scalar::{real, Real};

#[derive(Debug, Error)]
pub enum ParseError {
    #[error("malformed JSON: {0}")]
    Json(#[from] serde_json::Error),
    #[error("state '{state}' has unknown owner '{owner}' (expected P1, P2, or R)")]
    UnknownOwner { state: String, owner: String },
    #[error("{context} references undeclared state '{name}'")]
    UnknownState { context: &'static str, name: String },
    #[error("invalid game: {}", format_violations(.0))]
    Invalid(Vec<Violation>),
}

fn format_violations(violations: &[Violation]) -> String {
    violations.iter().map(|v| v.to_string()).collect::<Vec<_>>().join("; ")
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct GameFile {
    states: Vec<StateFile>,
    edges: Vec<EdgeFile>,
    initial: String,
    /// Abstraction dumps annex block membership to the plain game
    /// format; game readers accept the annex and ignore it.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    concretization: Option<serde_json::Value>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct StateFile {
    name: String,
    owner: String,
    reward: f64,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct EdgeFile {
    from: String,
    to: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    weight: Option<f64>,
}

fn owner_from_str(state: &str, owner: &str) -> Result<Owner, ParseError> {
    match owner {
        "P1" => Ok(Owner::P1),
        "P2" => Ok(Owner::P2),
        "R" => Ok(Owner::Random),
        other => {
            Err(ParseError::UnknownOwner { state: state.to_string(), owner: other.to_string() })
        }
    }
}

/// Reads a game from its JSON form. Name resolution failures and
/// structural violations are both reported as errors; a parsed game is
/// always valid.
pub fn parse_game<S: Real>(text: &str) -> Result<GameStructure<S>, ParseError> {
    let file: GameFile = serde_json::from_str(text)?;
    let mut index = BTreeMap::new();
    for (i, state) in file.states.iter().enumerate() {
        // Duplicate names stay unmapped here so try_new reports them.
        index.entry(state.name.clone()).or_insert(i);
    }
    let resolve = |context: &'static str, name: &str| {
        index
            .get(name)
            .copied()
            .ok_or_else(|| ParseError::UnknownState { context, name: name.to_string() })
    };

    let states = file
        .states
        .iter()
        .map(|s| Ok((s.name.clone(), owner_from_str(&s.name, &s.owner)?, real::<S>(s.reward))))
        .collect::<Result<Vec<_>, ParseError>>()?;
    let edges = file
        .edges
        .iter()
        .map(|e| {
            Ok((
                resolve("edge source", &e.from)?,
                resolve("edge target", &e.to)?,
                e.weight.map(real::<S>),
            ))
        })
        .collect::<Result<Vec<_>, ParseError>>()?;
    let initial = resolve("initial", &file.initial)?;

    GameStructure::try_new(states, edges, initial).map_err(ParseError::Invalid)
}

fn game_to_file<S: Real>(game: &GameStructure<S>) -> GameFile {
    let states = (0..game.num_states())
        .map(|v| StateFile {
            name: game.name(v).to_string(),
            owner: game.owner(v).to_string(),
            reward: game.reward(v).to_f64().expect("finite reward"),
        })
        .collect();
    let mut edges = Vec::new();
    for v in 0..game.num_states() {
        for (k, &w) in game.successors(v).iter().enumerate() {
            edges.push(EdgeFile {
                from: game.name(v).to_string(),
                to: game.name(w).to_string(),
                weight: if game.owner(v) == Owner::Random {
                    Some(game.weights(v)[k].to_f64().expect("finite weight"))
                } else {
                    None
                },
            });
        }
    }
    GameFile {
        states,
        edges,
        initial: game.name(game.initial()).to_string(),
        concretization: None,
    }
}

/// Canonical JSON form of a game.
pub fn serialize_game<S: Real>(game: &GameStructure<S>) -> String {
    let mut text = serde_json::to_string_pretty(&game_to_file(game)).expect("game serializes");
    text.push('\n');
    text
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct PartitionFile {
    blocks: Vec<Vec<String>>,
}

/// Reads a partition as blocks of state indices. Validation against
/// partition invariants happens in `StatePartition::new`; this only
/// resolves names.
pub fn parse_partition_blocks<S: Real>(
    text: &str,
    game: &GameStructure<S>,
) -> Result<Vec<Vec<usize>>, ParseError> {
    let file: PartitionFile = serde_json::from_str(text)?;
    file.blocks
        .into_iter()
        .map(|block| {
            block
                .into_iter()
                .map(|name| {
                    game.state_by_name(&name)
                        .ok_or(ParseError::UnknownState { context: "partition block", name })
                })
                .collect()
        })
        .collect()
}

/// Strategy JSON: `{"player": 1, "choice": {"v0": "v2", ...}}` with
/// states referenced by name, keys sorted.
pub fn serialize_strategy<S: Real>(
    game: &GameStructure<S>,
    strategy: &MemorylessStrategy,
) -> String {
    #[derive(Serialize)]
    struct StrategyFile {
        player: u8,
        choice: BTreeMap<String, String>,
    }
    let choice = strategy
        .choice
        .iter()
        .map(|(&v, &w)| (game.name(v).to_string(), game.name(w).to_string()))
        .collect();
    let mut text =
        serde_json::to_string_pretty(&StrategyFile { player: strategy.player.index(), choice })
            .expect("strategy serializes");
    text.push('\n');
    text
}

/// Abstraction dump: the abstract game in the ordinary game format plus
/// a `concretization` annex mapping abstract state names to the
/// concrete states they stand for.
pub fn serialize_abstraction<S: Real>(
    concrete: &GameStructure<S>,
    abstraction: &Abstraction<S>,
) -> String {
    #[derive(Serialize)]
    struct AbstractionFile {
        #[serde(flatten)]
        game: serde_json::Value,
        concretization: BTreeMap<String, Vec<String>>,
    }
    let game = serde_json::to_value(game_to_file(&abstraction.game)).expect("game serializes");
    let concretization = abstraction
        .partition
        .blocks()
        .iter()
        .enumerate()
        .map(|(i, members)| {
            (
                abstraction.game.name(i).to_string(),
                members.iter().map(|&v| concrete.name(v).to_string()).collect(),
            )
        })
        .collect();
    let mut text = serde_json::to_string_pretty(&AbstractionFile { game, concretization })
        .expect("abstraction serializes");
    text.push('\n');
    text
}
