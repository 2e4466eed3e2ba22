//! Seeded instance generators. Each generator is a pure function of
//! its parameters: the same arguments yield the same game, so corpora
//! can be regenerated on demand instead of being shipped as files.

use cgplan_core::{Game, GameStructure, Owner};
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum GenError {
    #[error("state count must be at least 1")]
    NoStates,
    #[error("out-degree bound must be at least 1")]
    ZeroOutDegree,
    #[error("owner fractions must lie in [0,1] and sum to at most 1, got p1={p1}, p2={p2}")]
    BadFractions { p1: f64, p2: f64 },
    #[error("reward range [{low}, {high}] is not a finite nonempty interval")]
    BadRewardRange { low: f64, high: f64 },
    #[error("grid dimensions must be at least 1x1, got {width}x{height}")]
    BadDimensions { width: usize, height: usize },
    #[error("slip probability must lie in [0,1), got {slip}")]
    BadSlip { slip: f64 },
}

/// Draws a game with `n_states` states named `s0..`, out-degrees
/// between 0 and `out_degree` (a drawn degree of 0 becomes a self
/// loop, keeping every state alive), owners drawn by the given
/// fractions with the remainder random, and rewards uniform in
/// `reward_range`. State `s0` is initial. Weights on random states
/// are normalized draws, so each lies in (0,1] and they sum to 1.
pub fn gen_random_game(
    n_states: usize,
    out_degree: usize,
    p1_frac: f64,
    p2_frac: f64,
    reward_range: (f64, f64),
    seed: u64,
) -> Result<Game, GenError> {
    if n_states == 0 {
        return Err(GenError::NoStates);
    }
    if out_degree == 0 {
        return Err(GenError::ZeroOutDegree);
    }
    let fraction_ok = |f: f64| (0.0..=1.0).contains(&f);
    if !fraction_ok(p1_frac) || !fraction_ok(p2_frac) || p1_frac + p2_frac > 1.0 {
        return Err(GenError::BadFractions { p1: p1_frac, p2: p2_frac });
    }
    let (low, high) = reward_range;
    if !low.is_finite() || !high.is_finite() || low > high {
        return Err(GenError::BadRewardRange { low, high });
    }

    let mut rng = ChaCha8Rng::seed_from_u64(seed);

    let states: Vec<(String, Owner, f64)> = (0..n_states)
        .map(|v| {
            let u: f64 = rng.gen();
            let owner = if u < p1_frac {
                Owner::P1
            } else if u < p1_frac + p2_frac {
                Owner::P2
            } else {
                Owner::Random
            };
            (format!("s{v}"), owner, rng.gen_range(low..=high))
        })
        .collect();

    let max_degree = out_degree.min(n_states);
    let mut pool: Vec<usize> = (0..n_states).collect();
    let mut edges: Vec<(usize, usize, Option<f64>)> = Vec::new();
    for v in 0..n_states {
        let degree = rng.gen_range(0..=max_degree);
        if degree == 0 {
            edges.push((v, v, None));
            continue;
        }
        // Partial Fisher-Yates; the first `degree` slots end up as a
        // uniform sample of distinct targets.
        for i in 0..degree {
            let j = rng.gen_range(i..n_states);
            pool.swap(i, j);
        }
        let mut targets: Vec<usize> = pool[..degree].to_vec();
        targets.sort_unstable();
        for t in targets {
            edges.push((v, t, None));
        }
    }

    for (v, state) in states.iter().enumerate() {
        if state.1 != Owner::Random {
            continue;
        }
        let slots: Vec<usize> = (0..edges.len()).filter(|&k| edges[k].0 == v).collect();
        let draws: Vec<f64> = slots.iter().map(|_| rng.gen_range(0.1..1.0)).collect();
        let total: f64 = draws.iter().sum();
        // The last weight closes the sum to 1 exactly, a stronger
        // guarantee than the validator's tolerance.
        let mut assigned = 0.0;
        for (i, &k) in slots.iter().enumerate() {
            let w = if i + 1 == slots.len() { 1.0 - assigned } else { draws[i] / total };
            assigned += w;
            edges[k].2 = Some(w);
        }
    }

    Ok(GameStructure::try_new(states, edges, 0).expect("drawn games satisfy every rule"))
}

const DIRECTIONS: [(&str, isize, isize); 4] = [("n", 0, -1), ("s", 0, 1), ("e", 1, 0), ("w", -1, 0)];

/// Builds a grid navigation game. The robot starts at cell (0,0) and
/// earns reward 1 exactly while on the goal cell at the far corner;
/// every other state pays 0. From a cell the robot may stay or move to
/// an adjacent cell. With `slip_prob` > 0 each move runs through a
/// random state that fails with the slip probability: an unpatrolled
/// slip drops the robot back on its source cell, while with
/// `adversary` it hands the robot to an opponent state that may hold
/// it there or push it one cell. Staying is safe on an unpatrolled
/// grid but can be grabbed on a patrolled one. With `slip_prob` = 0
/// every action lands as chosen and the patrol never gets a turn. The
/// layout is fully determined by the parameters; the seed is accepted
/// so callers can treat both generators alike.
pub fn gen_gridworld(
    width: usize,
    height: usize,
    slip_prob: f64,
    adversary: bool,
    seed: u64,
) -> Result<Game, GenError> {
    if width == 0 || height == 0 {
        return Err(GenError::BadDimensions { width, height });
    }
    if !(0.0..1.0).contains(&slip_prob) {
        return Err(GenError::BadSlip { slip: slip_prob });
    }
    let _ = seed;

    let cells = width * height;
    let cell = |x: usize, y: usize| y * width + x;
    let coords = |c: usize| (c % width, c / width);
    let goal = cell(width - 1, height - 1);

    // Actions per cell in declaration order: staying first with the
    // cell itself as intended target, then each direction whose
    // target stays on the grid.
    let actions: Vec<Vec<(&str, usize)>> = (0..cells)
        .map(|c| {
            let (x, y) = coords(c);
            let mut acts = vec![("stay", c)];
            acts.extend(DIRECTIONS.iter().filter_map(|&(tag, dx, dy)| {
                let tx = x.checked_add_signed(dx)?;
                let ty = y.checked_add_signed(dy)?;
                (tx < width && ty < height).then(|| (tag, cell(tx, ty)))
            }));
            acts
        })
        .collect();

    // Actions that can slip: every move, plus staying when a grab can
    // reroute it. With slip 0 nothing slips and the action lands as
    // chosen.
    let slips = |k: usize| slip_prob > 0.0 && (k > 0 || adversary);

    let slip_base = cells;
    let mut slip_index: Vec<Vec<Option<usize>>> = Vec::with_capacity(cells);
    let mut next = slip_base;
    for cell_actions in &actions {
        let per_action = (0..cell_actions.len())
            .map(|k| {
                slips(k).then(|| {
                    next += 1;
                    next - 1
                })
            })
            .collect();
        slip_index.push(per_action);
    }
    let push_base = next;
    let push = |c: usize| push_base + c;

    let mut states: Vec<(String, Owner, f64)> = Vec::new();
    for c in 0..cells {
        let (x, y) = coords(c);
        let reward = if c == goal { 1.0 } else { 0.0 };
        states.push((format!("c_{x}_{y}"), Owner::P1, reward));
    }
    for c in 0..cells {
        let (x, y) = coords(c);
        for (k, &(tag, _)) in actions[c].iter().enumerate() {
            if slip_index[c][k].is_some() {
                states.push((format!("s_{x}_{y}_{tag}"), Owner::Random, 0.0));
            }
        }
    }
    if adversary {
        for c in 0..cells {
            let (x, y) = coords(c);
            states.push((format!("p_{x}_{y}"), Owner::P2, 0.0));
        }
    }

    let mut edges: Vec<(usize, usize, Option<f64>)> = Vec::new();
    for c in 0..cells {
        for (k, &(_, target)) in actions[c].iter().enumerate() {
            match slip_index[c][k] {
                Some(s) => edges.push((c, s, None)),
                None => edges.push((c, target, None)),
            }
        }
    }
    for c in 0..cells {
        for (k, &(_, target)) in actions[c].iter().enumerate() {
            let Some(s) = slip_index[c][k] else { continue };
            let failed = if adversary { push(c) } else { c };
            edges.push((s, target, Some(1.0 - slip_prob)));
            edges.push((s, failed, Some(slip_prob)));
        }
    }
    if adversary {
        for (c, cell_actions) in actions.iter().enumerate() {
            edges.push((push(c), c, None));
            for &(_, target) in &cell_actions[1..] {
                edges.push((push(c), target, None));
            }
        }
    }

    Ok(GameStructure::try_new(states, edges, 0).expect("grid games satisfy every rule"))
}
