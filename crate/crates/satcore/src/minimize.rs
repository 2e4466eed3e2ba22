//! Deletion-based unsat core minimization.

use thiserror::Error;

use crate::cnf::CnfInstance;
use crate::dpll::{solve_subset, Solution};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum CoreError {
    #[error("instance is satisfiable, no unsat core exists")]
    Satisfiable,
}

/// Shrinks an unsatisfiable instance to a locally minimal core.
///
/// Clauses are tried for deletion in index order; a clause is dropped
/// permanently when the remainder stays unsatisfiable. The result is a
/// sorted list of clause indices whose sub-instance is unsatisfiable
/// and stays satisfiable when any single one is removed. Errors if the
/// full instance is satisfiable.
pub fn minimize_core(cnf: &CnfInstance) -> Result<Vec<usize>, CoreError> {
    let mut keep = vec![true; cnf.num_clauses()];
    if solve_subset(cnf, &keep) != Solution::Unsat {
        return Err(CoreError::Satisfiable);
    }
    for idx in 0..cnf.num_clauses() {
        keep[idx] = false;
        if solve_subset(cnf, &keep) != Solution::Unsat {
            keep[idx] = true;
        }
    }
    Ok((0..cnf.num_clauses()).filter(|&i| keep[i]).collect())
}
