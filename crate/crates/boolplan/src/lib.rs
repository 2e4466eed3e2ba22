//! Planning for boolean transition systems by projection refinement.
//!
//! A system describes exponentially many states with a handful of
//! formulas: propositions, an initial condition, a goal, and named
//! actions over current and next-state variables. The planner projects
//! the system onto a growing subset of its propositions, searches the
//! small abstract state space for a candidate action sequence, and
//! checks the candidate concretely with a satisfiability query on its
//! step-unrolled formula. Unsat cores of failed candidates pick the
//! propositions the projection is missing.

pub mod abstraction;
pub mod bmc;
pub mod formula;
pub mod parse;
pub mod plan;
pub mod system;

pub use abstraction::{
    abstract_action, abstract_reach, AbstractPlan, ProjectionError, PROJECTION_GUARD,
};
pub use bmc::{bmc_formula, decode_trace, BmcError};
pub use formula::Formula;
pub use parse::{parse_boolean_system, ParseError, ParseErrorKind};
pub use plan::{boolean_cegar_plan, concrete_reach, PlanIteration, PlanOutcome, Verdict};
pub use system::{Action, BooleanSystem, SystemError};
