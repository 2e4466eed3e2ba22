//! Plan search by projection refinement.
//!
//! The projection starts empty, so the first abstract plan is as short
//! as the initial and goal formulas allow. Whenever the unrolled
//! feasibility formula of an abstract plan is unsatisfiable, every
//! proposition underlying its unsat core joins the projection; the
//! core must reach outside the current projection (a plan the
//! abstraction accepted cannot be refuted by the propositions it
//! already tracks), so the projection grows every round and the loop
//! runs at most one round per proposition.

use std::collections::{BTreeSet, VecDeque};

use cgplan_sat::{minimize_core, solve, to_cnf, Solution};

use crate::abstraction::{abstract_reach, AbstractPlan, ProjectionError, PROJECTION_GUARD};
use crate::bmc::{bmc_formula, decode_trace};
use crate::system::BooleanSystem;

/// Outcome of the search. A feasible plan carries the concrete trace
/// that executes it, one valuation per time step; infeasibility is
/// definitive for the concrete system.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Verdict {
    Feasible { plan: Vec<String>, trace: Vec<Vec<bool>> },
    Infeasible,
}

/// One round of the loop: the projection in force (proposition names),
/// the abstract plan found under it if any, and the propositions the
/// unsat core added afterwards. The terminal round adds nothing.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PlanIteration {
    pub iteration: usize,
    pub projection: Vec<String>,
    pub abstract_plan: Option<Vec<String>>,
    pub added: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PlanOutcome {
    pub verdict: Verdict,
    pub iterations: Vec<PlanIteration>,
}

impl PlanOutcome {
    pub fn feasible(&self) -> bool {
        matches!(self.verdict, Verdict::Feasible { .. })
    }
}

/// Searches for a concretely executable action sequence from an
/// initial state to a goal state, refining an initially empty
/// projection from unsat cores until a plan validates or abstract
/// reachability fails. Fails only when the proposition set itself
/// exceeds the projection guard.
pub fn boolean_cegar_plan(system: &BooleanSystem) -> Result<PlanOutcome, ProjectionError> {
    let np = system.num_props();
    let names = |set: &[usize]| set.iter().map(|&p| system.props[p].clone()).collect();
    let mut pi: Vec<usize> = Vec::new();
    let mut iterations = Vec::new();

    for iteration in 0..=np {
        let Some(abstract_plan) = abstract_reach(system, &pi)? else {
            iterations.push(PlanIteration {
                iteration,
                projection: names(&pi),
                abstract_plan: None,
                added: Vec::new(),
            });
            return Ok(PlanOutcome { verdict: Verdict::Infeasible, iterations });
        };

        let conjuncts =
            bmc_formula(system, &abstract_plan.actions).expect("abstract plans name real actions");
        let steps = abstract_plan.actions.len() + 1;
        let cnf = to_cnf(&conjuncts, steps * np);
        match solve(&cnf) {
            Solution::Sat(model) => {
                let trace = decode_trace(&model, steps, np);
                check_execution(system, &abstract_plan.actions, &trace);
                iterations.push(PlanIteration {
                    iteration,
                    projection: names(&pi),
                    abstract_plan: Some(abstract_plan.actions.clone()),
                    added: Vec::new(),
                });
                return Ok(PlanOutcome {
                    verdict: Verdict::Feasible { plan: abstract_plan.actions, trace },
                    iterations,
                });
            }
            Solution::Unsat => {
                let core = minimize_core(&cnf).expect("the solver just reported unsat");
                let mut core_props = BTreeSet::new();
                for clause in core {
                    core_props
                        .extend(cnf.clause_input_support(clause).into_iter().map(|v| v % np));
                }
                let added: Vec<usize> =
                    core_props.iter().copied().filter(|p| !pi.contains(p)).collect();
                assert!(
                    !added.is_empty(),
                    "unsat core confined to the projection that accepted the plan"
                );
                iterations.push(PlanIteration {
                    iteration,
                    projection: names(&pi),
                    abstract_plan: Some(abstract_plan.actions),
                    added: names(&added),
                });
                pi = pi.iter().copied().chain(added).collect();
                pi.sort_unstable();
            }
        }
    }
    unreachable!("the projection covered every proposition without deciding the system")
}

/// Every returned plan is replayed against the formulas it came from;
/// a failure here is a defect in the unrolling or the solver.
fn check_execution(system: &BooleanSystem, plan: &[String], trace: &[Vec<bool>]) {
    assert_eq!(trace.len(), plan.len() + 1);
    assert!(system.init.eval(&trace[0], None), "trace does not start initial");
    assert!(system.goal.eval(trace.last().unwrap(), None), "trace does not end in the goal");
    for (step, name) in plan.iter().enumerate() {
        let action = system.action(name).expect("validated plan names a real action");
        assert!(
            action.formula.eval(&trace[step], Some(&trace[step + 1])),
            "step {step} ({name}) does not execute its action"
        );
    }
}

/// Reference decision procedure: breadth-first search over the full
/// concrete state space, valuations packed as in the identity
/// projection. Returns a shortest plan with its state sequence, with
/// the same tie-breaking as the abstract search. Guarded by the same
/// bound on the proposition count.
pub fn concrete_reach(system: &BooleanSystem) -> Result<Option<AbstractPlan>, ProjectionError> {
    let np = system.num_props();
    if np > PROJECTION_GUARD {
        return Err(ProjectionError::GuardExceeded { props: np, guard: PROJECTION_GUARD });
    }
    let size = 1usize << np;
    let unpack = |s: usize| (0..np).map(|p| s >> p & 1 == 1).collect::<Vec<bool>>();
    let valuations: Vec<Vec<bool>> = (0..size).map(unpack).collect();

    let mut parent: Vec<Option<(u32, usize)>> = vec![None; size];
    let mut visited = vec![false; size];
    let mut queue = VecDeque::new();
    for s in 0..size {
        if system.init.eval(&valuations[s], None) {
            visited[s] = true;
            queue.push_back(s as u32);
        }
    }
    while let Some(s) = queue.pop_front() {
        if system.goal.eval(&valuations[s as usize], None) {
            let mut actions = Vec::new();
            let mut states = vec![s];
            let mut at = s;
            while let Some((prev, action)) = parent[at as usize] {
                actions.push(system.actions[action].name.clone());
                states.push(prev);
                at = prev;
            }
            actions.reverse();
            states.reverse();
            return Ok(Some(AbstractPlan { actions, states }));
        }
        for (index, action) in system.actions.iter().enumerate() {
            for t in 0..size {
                if !visited[t]
                    && action.formula.eval(&valuations[s as usize], Some(&valuations[t]))
                {
                    visited[t] = true;
                    parent[t] = Some((s, index));
                    queue.push_back(t as u32);
                }
            }
        }
    }
    Ok(None)
}
