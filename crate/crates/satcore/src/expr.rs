//! Propositional formulas over integer-numbered variables.

/// A propositional formula. Variables are identified by dense indices
/// that the caller manages; the CNF transformation preserves them.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum PropExpr {
    Const(bool),
    Var(usize),
    Not(Box<PropExpr>),
    And(Vec<PropExpr>),
    Or(Vec<PropExpr>),
    Implies(Box<PropExpr>, Box<PropExpr>),
    Iff(Box<PropExpr>, Box<PropExpr>),
}

impl PropExpr {
    pub fn var(v: usize) -> Self {
        PropExpr::Var(v)
    }

    #[allow(clippy::should_implement_trait)]
    pub fn not(e: PropExpr) -> Self {
        PropExpr::Not(Box::new(e))
    }

    pub fn and(es: Vec<PropExpr>) -> Self {
        PropExpr::And(es)
    }

    pub fn or(es: Vec<PropExpr>) -> Self {
        PropExpr::Or(es)
    }

    pub fn implies(a: PropExpr, b: PropExpr) -> Self {
        PropExpr::Implies(Box::new(a), Box::new(b))
    }

    pub fn iff(a: PropExpr, b: PropExpr) -> Self {
        PropExpr::Iff(Box::new(a), Box::new(b))
    }

    /// Largest variable index mentioned, if any.
    pub fn max_var(&self) -> Option<usize> {
        match self {
            PropExpr::Const(_) => None,
            PropExpr::Var(v) => Some(*v),
            PropExpr::Not(e) => e.max_var(),
            PropExpr::And(es) | PropExpr::Or(es) => es.iter().filter_map(|e| e.max_var()).max(),
            PropExpr::Implies(a, b) | PropExpr::Iff(a, b) => a.max_var().max(b.max_var()),
        }
    }

    /// Evaluates under a total assignment. Panics if a variable index is
    /// out of range; callers size the assignment from `max_var`.
    pub fn eval(&self, assignment: &[bool]) -> bool {
        match self {
            PropExpr::Const(b) => *b,
            PropExpr::Var(v) => assignment[*v],
            PropExpr::Not(e) => !e.eval(assignment),
            PropExpr::And(es) => es.iter().all(|e| e.eval(assignment)),
            PropExpr::Or(es) => es.iter().any(|e| e.eval(assignment)),
            PropExpr::Implies(a, b) => !a.eval(assignment) || b.eval(assignment),
            PropExpr::Iff(a, b) => a.eval(assignment) == b.eval(assignment),
        }
    }
}
