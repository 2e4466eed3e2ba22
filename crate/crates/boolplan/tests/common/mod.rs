#![allow(dead_code)]

use cgplan_bool::{Action, BooleanSystem, Formula};
use rand::Rng;

fn lit(prop: usize, positive: bool) -> Formula {
    if positive {
        Formula::var(prop)
    } else {
        Formula::not(Formula::var(prop))
    }
}

/// A system in the shape planning problems tend to take: literal
/// initial and goal conditions, actions that guard on a few
/// propositions, rewrite one or two, and frame most of the rest. A
/// small fraction of propositions is left unframed per action, so some
/// nondeterminism is always in the mix.
pub fn random_system<R: Rng>(rng: &mut R, max_props: usize, max_actions: usize) -> BooleanSystem {
    let np = rng.gen_range(2..=max_props);
    let props: Vec<String> = (0..np).map(|p| format!("p{p}")).collect();

    let mut pinned = Vec::new();
    for p in 0..np {
        if rng.gen_bool(0.8) {
            pinned.push(lit(p, rng.gen_bool(0.5)));
        }
    }
    let init = if pinned.is_empty() { Formula::Const(true) } else { Formula::And(pinned) };

    let goal_len = rng.gen_range(1..=3.min(np));
    let mut goal_props: Vec<usize> = (0..np).collect();
    let mut goal = Vec::new();
    for _ in 0..goal_len {
        let at = rng.gen_range(0..goal_props.len());
        goal.push(lit(goal_props.swap_remove(at), rng.gen_bool(0.5)));
    }
    let goal = if goal.len() == 1 { goal.pop().unwrap() } else { Formula::And(goal) };

    let num_actions = rng.gen_range(1..=max_actions);
    let actions = (0..num_actions)
        .map(|i| {
            let mut conjuncts = Vec::new();
            let mut free: Vec<usize> = (0..np).collect();
            for _ in 0..rng.gen_range(0..=2.min(np - 1)) {
                let at = rng.gen_range(0..free.len());
                conjuncts.push(lit(free.swap_remove(at), rng.gen_bool(0.5)));
            }
            let mut effected = Vec::new();
            for _ in 0..rng.gen_range(1..=2.min(np)) {
                let target = rng.gen_range(0..np);
                if effected.contains(&target) {
                    continue;
                }
                effected.push(target);
                let rhs = match rng.gen_range(0..4) {
                    0 => Formula::Const(true),
                    1 => Formula::Const(false),
                    2 => Formula::not(Formula::var(target)),
                    _ => Formula::var(rng.gen_range(0..np)),
                };
                conjuncts.push(Formula::iff(Formula::primed(target), rhs));
            }
            for p in 0..np {
                if !effected.contains(&p) && rng.gen_bool(0.85) {
                    conjuncts.push(Formula::iff(Formula::primed(p), Formula::var(p)));
                }
            }
            Action { name: format!("a{i}"), formula: Formula::And(conjuncts) }
        })
        .collect();

    let system = BooleanSystem { props, init, goal, actions };
    system.validate().expect("generator emits valid systems");
    system
}
