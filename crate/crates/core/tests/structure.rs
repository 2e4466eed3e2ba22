//! Structural layer: construction, validation, classification,
//! restriction, mirroring, and the JSON formats.

mod common;

use cgplan_core::{
    parse_game, parse_partition_blocks, serialize_game, serialize_strategy, Game, GameClass,
    MemorylessStrategy, Owner, ParseError, Player, StrategyError, Violation,
};
use common::{build, strategy};

const EXAMPLE: &str = r#"{
  "states": [
    { "name": "v0", "owner": "P1", "reward": 0.0 },
    { "name": "s1", "owner": "P2", "reward": -1.5 },
    { "name": "c", "owner": "R", "reward": 2.0 }
  ],
  "edges": [
    { "from": "v0", "to": "s1" },
    { "from": "v0", "to": "c" },
    { "from": "s1", "to": "v0" },
    { "from": "s1", "to": "s1" },
    { "from": "c", "to": "s1", "weight": 0.5 },
    { "from": "c", "to": "v0", "weight": 0.5 }
  ],
  "initial": "v0"
}"#;

#[test]
fn parses_names_into_declaration_indices() {
    let game: Game = parse_game(EXAMPLE).unwrap();
    assert_eq!(game.num_states(), 3);
    assert_eq!(game.name(0), "v0");
    assert_eq!(game.state_by_name("c"), Some(2));
    assert_eq!(game.state_by_name("nope"), None);
    assert_eq!(game.owner(1), Owner::P2);
    assert_eq!(game.reward(1), -1.5);
    assert_eq!(game.initial(), 0);
    assert_eq!(game.successors(0), &[1, 2]);
    assert_eq!(game.successors(2), &[1, 0]);
    assert_eq!(game.weights(2), &[0.5, 0.5]);
    assert!(game.weights(0).is_empty());
}

#[test]
fn serialization_round_trips_bytes() {
    let game: Game = parse_game(EXAMPLE).unwrap();
    let text = serialize_game(&game);
    let reparsed: Game = parse_game(&text).unwrap();
    assert_eq!(reparsed, game);
    assert_eq!(serialize_game(&reparsed), text);
    assert!(text.ends_with('\n'));
}

#[test]
fn rejects_unknown_owner_tag() {
    let text = EXAMPLE.replace("\"P2\"", "\"PLAYER2\"");
    match parse_game::<f64>(&text) {
        Err(ParseError::UnknownOwner { state, owner }) => {
            assert_eq!(state, "s1");
            assert_eq!(owner, "PLAYER2");
        }
        other => panic!("expected unknown owner, got {other:?}"),
    }
}

#[test]
fn rejects_undeclared_state_references() {
    let bad_edge = EXAMPLE.replace("{ \"from\": \"s1\", \"to\": \"v0\" }", "{ \"from\": \"s1\", \"to\": \"ghost\" }");
    assert!(matches!(
        parse_game::<f64>(&bad_edge),
        Err(ParseError::UnknownState { context: "edge target", .. })
    ));
    let bad_initial = EXAMPLE.replace("\"initial\": \"v0\"", "\"initial\": \"ghost\"");
    assert!(matches!(
        parse_game::<f64>(&bad_initial),
        Err(ParseError::UnknownState { context: "initial", .. })
    ));
}

#[test]
fn rejects_unknown_json_fields() {
    let text = EXAMPLE.replace("\"initial\": \"v0\"", "\"initial\": \"v0\", \"extra\": 1");
    assert!(matches!(parse_game::<f64>(&text), Err(ParseError::Json(_))));
}

fn violations_of(
    states: &[(&str, Owner, f64)],
    edges: &[(usize, usize, Option<f64>)],
    initial: usize,
) -> Vec<Violation> {
    let states = states.iter().map(|&(n, o, r)| (n.to_string(), o, r)).collect();
    Game::try_new(states, edges.to_vec(), initial).expect_err("construction must fail")
}

#[test]
fn reports_every_structural_violation() {
    let v = violations_of(&[], &[], 0);
    assert_eq!(v, vec![Violation::NoStates]);

    let v = violations_of(
        &[("a", Owner::P1, 0.0), ("a", Owner::P1, f64::NAN)],
        &[(0, 1, None), (1, 0, None)],
        5,
    );
    assert!(v.contains(&Violation::DuplicateName { name: "a".into() }));
    assert!(v.contains(&Violation::NonFiniteReward { state: "a".into() }));
    assert!(v.contains(&Violation::InitialOutOfRange { initial: 5, count: 2 }));

    let v = violations_of(&[("a", Owner::P1, 0.0)], &[(0, 3, None), (0, 0, None)], 0);
    assert_eq!(v, vec![Violation::EdgeEndpointOutOfRange { from: 0, to: 3, count: 1 }]);

    let v = violations_of(&[("a", Owner::P1, 0.0)], &[(0, 0, None), (0, 0, None)], 0);
    assert_eq!(v, vec![Violation::DuplicateEdge { from: "a".into(), to: "a".into() }]);

    let v = violations_of(
        &[("c", Owner::Random, 0.0), ("a", Owner::P1, 0.0)],
        &[(0, 1, None), (1, 1, Some(1.0))],
        0,
    );
    assert!(v.contains(&Violation::MissingWeight { from: "c".into(), to: "a".into() }));
    assert!(v.contains(&Violation::UnexpectedWeight { from: "a".into(), to: "a".into() }));
    // Both offending edges were dropped, so both states also read dead.
    assert!(v.contains(&Violation::DeadState { state: "c".into() }));
    assert!(v.contains(&Violation::DeadState { state: "a".into() }));

    let v = violations_of(
        &[("c", Owner::Random, 0.0), ("a", Owner::P1, 0.0)],
        &[(0, 0, Some(0.0)), (0, 1, Some(1.2)), (1, 1, None)],
        0,
    );
    assert!(v.contains(&Violation::WeightOutOfRange { from: "c".into(), to: "c".into(), weight: 0.0 }));
    assert!(v.contains(&Violation::WeightOutOfRange { from: "c".into(), to: "a".into(), weight: 1.2 }));

    let v = violations_of(
        &[("c", Owner::Random, 0.0), ("a", Owner::P1, 0.0)],
        &[(0, 0, Some(0.5)), (0, 1, Some(0.4)), (1, 1, None)],
        0,
    );
    assert_eq!(v.len(), 1);
    assert!(matches!(&v[0], Violation::WeightSumMismatch { state, .. } if state == "c"));
}

#[test]
fn weight_sum_tolerance_is_tight() {
    // A third three times: off by one ulp, accepted.
    let third = 1.0 / 3.0;
    let ok = build(
        &[("c", Owner::Random, 0.0), ("a", Owner::P1, 0.0), ("b", Owner::P1, 0.0)],
        &[(1, 1), (2, 2)],
        &[(0, 0, third), (0, 1, third), (0, 2, third)],
        0,
    );
    assert!(ok.validate().is_empty());

    // Off by a millionth: rejected, not repaired.
    let states = vec![
        ("c".to_string(), Owner::Random, 0.0),
        ("a".to_string(), Owner::P1, 0.0),
    ];
    let edges = vec![(0usize, 1usize, Some(0.999999_f64)), (1, 1, None)];
    assert!(Game::try_new(states, edges, 0).is_err());
}

#[test]
fn classification_counts_choice_not_presence() {
    // Both players with live choices plus chance.
    let full = build(
        &[("u", Owner::P1, 0.0), ("x", Owner::P2, 0.0), ("c", Owner::Random, 0.0)],
        &[(0, 1), (0, 2), (1, 0), (1, 2)],
        &[(2, 0, 0.5), (2, 1, 0.5)],
        0,
    );
    assert_eq!(full.classify(), GameClass::Game);

    // No chance states.
    let det = build(
        &[("u", Owner::P1, 0.0), ("x", Owner::P2, 0.0)],
        &[(0, 0), (0, 1), (1, 0), (1, 1)],
        &[],
        0,
    );
    assert_eq!(det.classify(), GameClass::DeterministicGame);

    // Player 2 present but frozen: a single decision maker plus chance.
    let mdp = build(
        &[("u", Owner::P1, 0.0), ("x", Owner::P2, 0.0), ("c", Owner::Random, 0.0)],
        &[(0, 1), (0, 2), (1, 2)],
        &[(2, 0, 1.0)],
        0,
    );
    assert_eq!(mdp.classify(), GameClass::Mdp);

    // Nobody chooses, no chance.
    let ts = build(&[("u", Owner::P1, 0.0), ("x", Owner::P2, 0.0)], &[(0, 1), (1, 0)], &[], 0);
    assert_eq!(ts.classify(), GameClass::TransitionSystem);
}

#[test]
fn restriction_freezes_the_player_out_of_classification() {
    let game = build(
        &[("u", Owner::P1, 0.0), ("x", Owner::P2, 0.0), ("c", Owner::Random, 0.0)],
        &[(0, 1), (0, 2), (1, 0), (1, 2)],
        &[(2, 0, 0.5), (2, 1, 0.5)],
        0,
    );
    let f1 = strategy(Player::One, &[(0, 2)]);
    let pinned = game.restrict(&f1).unwrap();
    assert_eq!(pinned.successors(0), &[2]);
    assert!(!pinned.has_live_choice(Owner::P1));
    assert_eq!(pinned.classify(), GameClass::Mdp);
    // Untouched parts carry over.
    assert_eq!(pinned.reward(1), game.reward(1));
    assert_eq!(pinned.successors(1), game.successors(1));
    assert_eq!(pinned.weights(2), game.weights(2));
}

#[test]
fn restriction_rejects_bad_strategies() {
    let game = build(
        &[("u", Owner::P1, 0.0), ("x", Owner::P2, 0.0)],
        &[(0, 0), (0, 1), (1, 0), (1, 1)],
        &[],
        0,
    );
    assert_eq!(
        game.restrict(&strategy(Player::One, &[(0, 0), (1, 0)])),
        Err(StrategyError::NotOwned { state: 1, player: Player::One }),
    );
    assert_eq!(
        game.restrict(&strategy(Player::One, &[])),
        Err(StrategyError::Missing { state: 0, player: Player::One }),
    );
    let mut game2 = build(
        &[("u", Owner::P1, 0.0), ("x", Owner::P2, 0.0), ("y", Owner::P2, 0.0)],
        &[(0, 0), (0, 1), (1, 0), (1, 1), (2, 0)],
        &[],
        0,
    );
    game2 = game2.restrict(&strategy(Player::Two, &[(1, 0), (2, 0)])).unwrap();
    assert_eq!(
        game2.restrict(&strategy(Player::One, &[(0, 2)])),
        Err(StrategyError::NotAnEdge { from: 0, to: 2 }),
    );
}

#[test]
fn mirroring_swaps_players_and_negates_rewards() {
    let game: Game = parse_game(EXAMPLE).unwrap();
    let mirrored = game.mirror();
    assert_eq!(mirrored.owner(0), Owner::P2);
    assert_eq!(mirrored.owner(1), Owner::P1);
    assert_eq!(mirrored.owner(2), Owner::Random);
    assert_eq!(mirrored.reward(1), 1.5);
    assert_eq!(mirrored.weights(2), game.weights(2));
    assert_eq!(mirrored.mirror(), game);
}

#[test]
fn partition_file_resolves_names() {
    let game: Game = parse_game(EXAMPLE).unwrap();
    let blocks =
        parse_partition_blocks(r#"{ "blocks": [["v0", "s1"], ["c"]] }"#, &game).unwrap();
    assert_eq!(blocks, vec![vec![0, 1], vec![2]]);
    assert!(matches!(
        parse_partition_blocks(r#"{ "blocks": [["ghost"]] }"#, &game),
        Err(ParseError::UnknownState { context: "partition block", .. })
    ));
}

#[test]
fn strategy_serialization_uses_names() {
    let game: Game = parse_game(EXAMPLE).unwrap();
    let f1 = MemorylessStrategy::new(Player::One, [(0usize, 2usize)].into_iter().collect());
    let text = serialize_strategy(&game, &f1);
    let parsed: serde_json::Value = serde_json::from_str(&text).unwrap();
    assert_eq!(parsed["player"], 1);
    assert_eq!(parsed["choice"]["v0"], "c");
}
