//! Builders shared by the integration tests.

#![allow(dead_code)]

use std::collections::BTreeMap;

use cgplan_core::{Game, MemorylessStrategy, Owner, Player};
use rand::Rng;
use rand_chacha::ChaCha8Rng;

/// Terse game construction: plain edges and weighted edges separately.
pub fn build(
    states: &[(&str, Owner, f64)],
    edges: &[(usize, usize)],
    weighted: &[(usize, usize, f64)],
    initial: usize,
) -> Game {
    let states = states.iter().map(|&(n, o, r)| (n.to_string(), o, r)).collect();
    let mut all: Vec<(usize, usize, Option<f64>)> =
        edges.iter().map(|&(f, t)| (f, t, None)).collect();
    all.extend(weighted.iter().map(|&(f, t, w)| (f, t, Some(w))));
    Game::try_new(states, all, initial).expect("test game is well formed")
}

pub fn strategy(player: Player, picks: &[(usize, usize)]) -> MemorylessStrategy {
    let choice: BTreeMap<usize, usize> = picks.iter().copied().collect();
    MemorylessStrategy::new(player, choice)
}

/// A seeded valid game: random owners, rewards on a 0.02 grid in
/// [-2, 2], out-degrees in 1..=max_out with distinct targets, random
/// states carrying normalized weights nudged to sum to exactly 1.0.
pub fn random_game(rng: &mut ChaCha8Rng, max_states: usize, max_out: usize) -> Game {
    let n = rng.gen_range(2..=max_states);
    let owner_pool = [Owner::P1, Owner::P2, Owner::Random];
    let states: Vec<(String, Owner, f64)> = (0..n)
        .map(|v| {
            let owner = owner_pool[rng.gen_range(0..3)];
            let reward = f64::from(rng.gen_range(-100i32..=100)) / 50.0;
            (format!("s{v}"), owner, reward)
        })
        .collect();

    let mut edges: Vec<(usize, usize, Option<f64>)> = Vec::new();
    for (v, state) in states.iter().enumerate() {
        let degree = rng.gen_range(1..=max_out.min(n));
        let mut targets: Vec<usize> = (0..n).collect();
        for i in 0..degree {
            let j = rng.gen_range(i..n);
            targets.swap(i, j);
        }
        if state.1 == Owner::Random {
            let mut raw: Vec<f64> = (0..degree).map(|_| rng.gen_range(0.05f64..1.0)).collect();
            let total: f64 = raw.iter().sum();
            for w in raw.iter_mut() {
                *w /= total;
            }
            let head: f64 = raw[..degree - 1].iter().sum();
            raw[degree - 1] = 1.0 - head;
            for (k, &t) in targets[..degree].iter().enumerate() {
                edges.push((v, t, Some(raw[k])));
            }
        } else {
            for &t in &targets[..degree] {
                edges.push((v, t, None));
            }
        }
    }

    let initial = rng.gen_range(0..n);
    Game::try_new(states, edges, initial).expect("generated game is well formed")
}
