//! A small, deterministic SAT engine.
//!
//! The crate provides a structural CNF transformation with bookkeeping
//! (variable kinds, clause groups, input supports), a plain DPLL solver,
//! deletion-based unsat core minimization, and DIMACS import/export.
//! Everything is deterministic: no randomized heuristics, no timestamps.

mod cnf;
mod dimacs;
mod dpll;
mod expr;
mod minimize;

pub use cnf::{to_cnf, CnfInstance, Clause, GroupId, Lit, VarId, VarKind};
pub use dimacs::{export_dimacs, import_dimacs, DimacsError};
pub use dpll::{check_model, solve, Solution};
pub use expr::PropExpr;
pub use minimize::{minimize_core, CoreError};
