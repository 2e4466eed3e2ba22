//! Boolean transition systems: states are valuations of a proposition
//! list, actions are formulas relating a state to its primed successor.

use std::collections::BTreeSet;
use std::fmt;

use thiserror::Error;

use crate::formula::Formula;

/// A named transition formula. Primed variables are the successor
/// state; a proposition with no primed occurrence is unconstrained, so
/// actions carry their own frame conjuncts when they need one.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Action {
    pub name: String,
    pub formula: Formula,
}

/// Propositions with an initial-state formula, a goal formula, and a
/// list of actions. `init` and `goal` are over current-state variables
/// only; action formulas may use both primings.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BooleanSystem {
    pub props: Vec<String>,
    pub init: Formula,
    pub goal: Formula,
    pub actions: Vec<Action>,
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum SystemError {
    #[error("no propositions declared")]
    NoProps,
    #[error("no actions declared")]
    NoActions,
    #[error("proposition index {prop} out of range in {place}, only {count} declared")]
    PropOutOfRange { place: String, prop: usize, count: usize },
    #[error("primed variable in {place}")]
    PrimedState { place: String },
    #[error("duplicate proposition name {name:?}")]
    DuplicateProp { name: String },
    #[error("duplicate action name {name:?}")]
    DuplicateAction { name: String },
}

impl BooleanSystem {
    pub fn num_props(&self) -> usize {
        self.props.len()
    }

    /// Index of a proposition name.
    pub fn prop_index(&self, name: &str) -> Option<usize> {
        self.props.iter().position(|p| p == name)
    }

    /// The action with the given name.
    pub fn action(&self, name: &str) -> Option<&Action> {
        self.actions.iter().find(|a| a.name == name)
    }

    /// Checks the structural invariants. Parsed systems satisfy them by
    /// construction; hand-built ones go through here.
    pub fn validate(&self) -> Result<(), SystemError> {
        if self.props.is_empty() {
            return Err(SystemError::NoProps);
        }
        if self.actions.is_empty() {
            return Err(SystemError::NoActions);
        }
        let mut seen = BTreeSet::new();
        for name in &self.props {
            if !seen.insert(name) {
                return Err(SystemError::DuplicateProp { name: name.clone() });
            }
        }
        let mut seen = BTreeSet::new();
        for action in &self.actions {
            if !seen.insert(&action.name) {
                return Err(SystemError::DuplicateAction { name: action.name.clone() });
            }
        }
        for (place, formula) in self.formulas() {
            if matches!(place.as_str(), "init" | "goal") && !formula.support(true).is_empty() {
                return Err(SystemError::PrimedState { place });
            }
            for primed in [false, true] {
                if let Some(&prop) =
                    formula.support(primed).iter().find(|&&p| p >= self.props.len())
                {
                    return Err(SystemError::PropOutOfRange {
                        place,
                        prop,
                        count: self.props.len(),
                    });
                }
            }
        }
        Ok(())
    }

    fn formulas(&self) -> Vec<(String, &Formula)> {
        let mut out = vec![("init".to_string(), &self.init), ("goal".to_string(), &self.goal)];
        for action in &self.actions {
            out.push((format!("action {}", action.name), &action.formula));
        }
        out
    }
}

/// Prints the concrete syntax; parsing the output restores the system.
impl fmt::Display for BooleanSystem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "props:")?;
        for p in &self.props {
            write!(f, " {p}")?;
        }
        writeln!(f)?;
        writeln!(f, "init: {}", self.init.render(&self.props))?;
        writeln!(f, "goal: {}", self.goal.render(&self.props))?;
        for action in &self.actions {
            writeln!(f, "action {}: {}", action.name, action.formula.render(&self.props))?;
        }
        Ok(())
    }
}
