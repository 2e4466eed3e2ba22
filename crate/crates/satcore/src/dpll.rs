//! Davis-Putnam-Logemann-Loveland search.
//!
//! Branching is deterministic: the lowest-numbered unassigned variable,
//! false before true. Unit propagation runs to fixpoint at every node.
//! There is no pure-literal rule, no learning, no restarts; instances
//! in this codebase are small and determinism matters more than speed.

use crate::cnf::{Clause, CnfInstance};

/// Outcome of a solve. A satisfying assignment is total: variables the
/// search never touched default to false.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Solution {
    Sat(Vec<bool>),
    Unsat,
}

/// Decides the instance.
pub fn solve(cnf: &CnfInstance) -> Solution {
    let keep = vec![true; cnf.num_clauses()];
    solve_subset(cnf, &keep)
}

/// Decides the instance restricted to the clauses with `keep[idx]` set.
/// `keep` must have one entry per clause.
pub(crate) fn solve_subset(cnf: &CnfInstance, keep: &[bool]) -> Solution {
    assert_eq!(keep.len(), cnf.num_clauses());
    let clauses: Vec<&Clause> = cnf
        .clauses()
        .iter()
        .zip(keep)
        .filter(|(_, &k)| k)
        .map(|(c, _)| c)
        .collect();
    let assign = vec![None; cnf.num_vars()];
    match search(&clauses, assign) {
        Some(partial) => Solution::Sat(partial.into_iter().map(|v| v.unwrap_or(false)).collect()),
        None => Solution::Unsat,
    }
}

/// One search node. Takes ownership of the assignment, propagates in
/// place, branches on clones. Returns an assignment under which every
/// clause holds, or `None` if this subtree is exhausted.
fn search(clauses: &[&Clause], mut assign: Vec<Option<bool>>) -> Option<Vec<Option<bool>>> {
    // Unit propagation to fixpoint.
    loop {
        let mut changed = false;
        for clause in clauses {
            let mut satisfied = false;
            let mut unassigned = None;
            let mut unassigned_count = 0;
            for &lit in clause.iter() {
                match assign[lit.var] {
                    Some(value) => {
                        if lit.satisfied_by(value) {
                            satisfied = true;
                            break;
                        }
                    }
                    None => {
                        unassigned_count += 1;
                        unassigned = Some(lit);
                    }
                }
            }
            if satisfied {
                continue;
            }
            match unassigned_count {
                0 => return None,
                1 => {
                    let lit = unassigned.unwrap();
                    assign[lit.var] = Some(!lit.negated);
                    changed = true;
                }
                _ => {}
            }
        }
        if !changed {
            break;
        }
    }

    // Branch on the lowest unassigned variable. If none remains, the
    // propagation pass above visited every clause without finding a
    // conflict, and a conflict is the only way a fully assigned clause
    // escapes the `satisfied` branch, so the assignment is a model.
    let var = match assign.iter().position(|v| v.is_none()) {
        None => return Some(assign),
        Some(var) => var,
    };
    for value in [false, true] {
        let mut child = assign.clone();
        child[var] = Some(value);
        if let Some(model) = search(clauses, child) {
            return Some(model);
        }
    }
    None
}

/// Checks a total assignment against every clause of the instance.
pub fn check_model(cnf: &CnfInstance, model: &[bool]) -> bool {
    model.len() == cnf.num_vars()
        && cnf
            .clauses()
            .iter()
            .all(|clause| clause.iter().any(|lit| lit.satisfied_by(model[lit.var])))
}
