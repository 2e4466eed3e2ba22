//! Propositional formulas over a system's propositions, with a primed
//! copy of each proposition standing for its next-state value.

use std::collections::BTreeSet;

/// A formula over propositions `0..num_props` of the owning system.
/// Conjunctions and disjunctions hold at least one operand; the empty
/// cases are the constants.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Formula {
    Const(bool),
    Var { prop: usize, primed: bool },
    Not(Box<Formula>),
    And(Vec<Formula>),
    Or(Vec<Formula>),
    Implies(Box<Formula>, Box<Formula>),
    Iff(Box<Formula>, Box<Formula>),
}

impl Formula {
    pub fn var(prop: usize) -> Self {
        Formula::Var { prop, primed: false }
    }

    pub fn primed(prop: usize) -> Self {
        Formula::Var { prop, primed: true }
    }

    #[allow(clippy::should_implement_trait)]
    pub fn not(e: Formula) -> Self {
        Formula::Not(Box::new(e))
    }

    pub fn implies(a: Formula, b: Formula) -> Self {
        Formula::Implies(Box::new(a), Box::new(b))
    }

    pub fn iff(a: Formula, b: Formula) -> Self {
        Formula::Iff(Box::new(a), Box::new(b))
    }

    /// Truth under a pair of valuations, indexed by proposition. Primed
    /// variables read `next`; passing `None` asserts the formula is
    /// over current-state propositions only.
    pub fn eval(&self, current: &[bool], next: Option<&[bool]>) -> bool {
        match self {
            Formula::Const(b) => *b,
            Formula::Var { prop, primed: false } => current[*prop],
            Formula::Var { prop, primed: true } => {
                next.expect("primed variable in a single-state formula")[*prop]
            }
            Formula::Not(e) => !e.eval(current, next),
            Formula::And(es) => es.iter().all(|e| e.eval(current, next)),
            Formula::Or(es) => es.iter().any(|e| e.eval(current, next)),
            Formula::Implies(a, b) => !a.eval(current, next) || b.eval(current, next),
            Formula::Iff(a, b) => a.eval(current, next) == b.eval(current, next),
        }
    }

    /// Propositions occurring at the given priming.
    pub fn support(&self, primed: bool) -> BTreeSet<usize> {
        let mut out = BTreeSet::new();
        self.collect_support(primed, &mut out);
        out
    }

    fn collect_support(&self, want_primed: bool, out: &mut BTreeSet<usize>) {
        match self {
            Formula::Const(_) => {}
            Formula::Var { prop, primed } => {
                if *primed == want_primed {
                    out.insert(*prop);
                }
            }
            Formula::Not(e) => e.collect_support(want_primed, out),
            Formula::And(es) | Formula::Or(es) => {
                for e in es {
                    e.collect_support(want_primed, out);
                }
            }
            Formula::Implies(a, b) | Formula::Iff(a, b) => {
                a.collect_support(want_primed, out);
                b.collect_support(want_primed, out);
            }
        }
    }

    /// Translation into a plain propositional formula; `var` assigns
    /// the solver variable for each (proposition, priming) occurrence.
    pub(crate) fn lower<F: Fn(usize, bool) -> usize>(&self, var: &F) -> cgplan_sat::PropExpr {
        use cgplan_sat::PropExpr;
        match self {
            Formula::Const(b) => PropExpr::Const(*b),
            Formula::Var { prop, primed } => PropExpr::var(var(*prop, *primed)),
            Formula::Not(e) => PropExpr::not(e.lower(var)),
            Formula::And(es) => PropExpr::and(es.iter().map(|e| e.lower(var)).collect()),
            Formula::Or(es) => PropExpr::or(es.iter().map(|e| e.lower(var)).collect()),
            Formula::Implies(a, b) => PropExpr::implies(a.lower(var), b.lower(var)),
            Formula::Iff(a, b) => PropExpr::iff(a.lower(var), b.lower(var)),
        }
    }

    /// Concrete syntax, parenthesized so that parsing it restores this
    /// exact tree. `props` supplies the variable names.
    pub fn render(&self, props: &[String]) -> String {
        let mut out = String::new();
        self.render_into(props, 0, &mut out);
        out
    }

    // Precedence contexts: 0 iff, 1 implies, 2 or, 3 and, 4 operand.
    // A node appears bare when its own level is at least the context.
    fn render_into(&self, props: &[String], context: u8, out: &mut String) {
        let own = match self {
            Formula::Iff(..) => 0,
            Formula::Implies(..) => 1,
            Formula::Or(_) => 2,
            Formula::And(_) => 3,
            _ => 4,
        };
        if own < context {
            out.push('(');
            self.render_into(props, 0, out);
            out.push(')');
            return;
        }
        match self {
            Formula::Const(true) => out.push_str("true"),
            Formula::Const(false) => out.push_str("false"),
            Formula::Var { prop, primed } => {
                out.push_str(&props[*prop]);
                if *primed {
                    out.push('\'');
                }
            }
            Formula::Not(e) => {
                out.push('!');
                e.render_into(props, 4, out);
            }
            Formula::And(es) => {
                for (i, e) in es.iter().enumerate() {
                    if i > 0 {
                        out.push_str(" & ");
                    }
                    e.render_into(props, 4, out);
                }
            }
            Formula::Or(es) => {
                for (i, e) in es.iter().enumerate() {
                    if i > 0 {
                        out.push_str(" | ");
                    }
                    e.render_into(props, 3, out);
                }
            }
            // Right-associative: a bare implication may continue to the
            // right but needs parentheses as a left operand.
            Formula::Implies(a, b) => {
                a.render_into(props, 2, out);
                out.push_str(" -> ");
                b.render_into(props, 1, out);
            }
            // Left-associative, mirrored.
            Formula::Iff(a, b) => {
                a.render_into(props, 0, out);
                out.push_str(" <-> ");
                b.render_into(props, 1, out);
            }
        }
    }
}
