//! Clausal form with provenance bookkeeping.
//!
//! The structural transformation introduces one defining variable per
//! non-literal subformula (both implication directions are emitted, so a
//! defined variable is a function of the inputs it depends on). Every
//! clause carries the index of the top-level conjunct it came from, and
//! every defined variable records the set of input variables that
//! determine it. Callers use the two together to trace an unsat core
//! back to the inputs that matter.

use std::collections::BTreeSet;

use crate::expr::PropExpr;

pub type VarId = usize;
pub type GroupId = usize;

/// A literal: a variable, possibly negated.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Lit {
    pub var: VarId,
    pub negated: bool,
}

impl Lit {
    pub fn pos(var: VarId) -> Self {
        Lit { var, negated: false }
    }

    pub fn neg(var: VarId) -> Self {
        Lit { var, negated: true }
    }

    pub fn flip(self) -> Self {
        Lit { var: self.var, negated: !self.negated }
    }

    /// Truth of the literal under a value for its variable.
    pub fn satisfied_by(self, value: bool) -> bool {
        value != self.negated
    }
}

pub type Clause = Vec<Lit>;

/// How a variable entered the instance.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum VarKind {
    /// Supplied by the caller; the id equals the formula's variable index.
    Input,
    /// Introduced by the transformation to name a subformula. `support`
    /// lists, in increasing order, the input variables whose values
    /// determine this one.
    Defined { support: Vec<VarId> },
}

/// A CNF instance: variables with kinds, clauses with group tags.
#[derive(Debug, Clone)]
pub struct CnfInstance {
    vars: Vec<VarKind>,
    clauses: Vec<Clause>,
    groups: Vec<GroupId>,
}

impl CnfInstance {
    /// An empty instance over `num_inputs` caller variables.
    pub fn new(num_inputs: usize) -> Self {
        CnfInstance {
            vars: vec![VarKind::Input; num_inputs],
            clauses: Vec::new(),
            groups: Vec::new(),
        }
    }

    pub fn num_vars(&self) -> usize {
        self.vars.len()
    }

    pub fn num_clauses(&self) -> usize {
        self.clauses.len()
    }

    pub fn var_kind(&self, v: VarId) -> &VarKind {
        &self.vars[v]
    }

    pub fn clauses(&self) -> &[Clause] {
        &self.clauses
    }

    pub fn clause(&self, idx: usize) -> &Clause {
        &self.clauses[idx]
    }

    /// Group tag of clause `idx`.
    pub fn group_of(&self, idx: usize) -> GroupId {
        self.groups[idx]
    }

    /// Appends a clause under the given group tag.
    pub fn add_clause(&mut self, clause: Clause, group: GroupId) {
        for lit in &clause {
            assert!(lit.var < self.vars.len(), "clause mentions unknown variable {}", lit.var);
        }
        self.clauses.push(clause);
        self.groups.push(group);
    }

    /// Introduces a defined variable with the given input support.
    pub fn fresh_defined(&mut self, support: Vec<VarId>) -> VarId {
        let id = self.vars.len();
        self.vars.push(VarKind::Defined { support });
        id
    }

    /// Input variables a single variable depends on: itself if an input,
    /// its recorded support if defined.
    pub fn input_support_of_var(&self, v: VarId) -> BTreeSet<VarId> {
        match &self.vars[v] {
            VarKind::Input => [v].into_iter().collect(),
            VarKind::Defined { support } => support.iter().copied().collect(),
        }
    }

    /// Union of the input supports of every variable in clause `idx`.
    pub fn clause_input_support(&self, idx: usize) -> BTreeSet<VarId> {
        let mut out = BTreeSet::new();
        for lit in &self.clauses[idx] {
            out.extend(self.input_support_of_var(lit.var));
        }
        out
    }

    /// A copy keeping the same variable table but only the listed
    /// clauses, in the given order, with their group tags.
    pub fn restrict_to(&self, indices: &[usize]) -> CnfInstance {
        CnfInstance {
            vars: self.vars.clone(),
            clauses: indices.iter().map(|&i| self.clauses[i].clone()).collect(),
            groups: indices.iter().map(|&i| self.groups[i]).collect(),
        }
    }
}

/// Transforms a conjunction of formulas into CNF. Conjunct `i` owns
/// group tag `i`: every clause produced while encoding it is tagged `i`.
///
/// Input variables `0..num_inputs` are declared up front whether or not
/// the formulas mention them; every formula leaf must be below
/// `num_inputs`. Models of the result restricted to the inputs are
/// exactly the assignments satisfying all conjuncts, and the defined
/// variables are determined by the inputs in every model.
pub fn to_cnf(conjuncts: &[PropExpr], num_inputs: usize) -> CnfInstance {
    let mut cnf = CnfInstance::new(num_inputs);
    for (group, conjunct) in conjuncts.iter().enumerate() {
        match fold_constants(conjunct) {
            PropExpr::Const(true) => {}
            PropExpr::Const(false) => cnf.add_clause(vec![], group),
            folded => {
                let root = encode(&mut cnf, &folded, num_inputs, group);
                cnf.add_clause(vec![root.lit], group);
            }
        }
    }
    cnf
}

/// Removes `Const` nodes; the result is either a single `Const` or a
/// constant-free formula. Single-child conjunctions and disjunctions
/// collapse to the child.
fn fold_constants(e: &PropExpr) -> PropExpr {
    match e {
        PropExpr::Const(b) => PropExpr::Const(*b),
        PropExpr::Var(v) => PropExpr::Var(*v),
        PropExpr::Not(inner) => match fold_constants(inner) {
            PropExpr::Const(b) => PropExpr::Const(!b),
            f => PropExpr::not(f),
        },
        PropExpr::And(es) => {
            let mut kept = Vec::new();
            for sub in es {
                match fold_constants(sub) {
                    PropExpr::Const(false) => return PropExpr::Const(false),
                    PropExpr::Const(true) => {}
                    f => kept.push(f),
                }
            }
            match kept.len() {
                0 => PropExpr::Const(true),
                1 => kept.pop().unwrap(),
                _ => PropExpr::And(kept),
            }
        }
        PropExpr::Or(es) => {
            let mut kept = Vec::new();
            for sub in es {
                match fold_constants(sub) {
                    PropExpr::Const(true) => return PropExpr::Const(true),
                    PropExpr::Const(false) => {}
                    f => kept.push(f),
                }
            }
            match kept.len() {
                0 => PropExpr::Const(false),
                1 => kept.pop().unwrap(),
                _ => PropExpr::Or(kept),
            }
        }
        PropExpr::Implies(a, b) => match (fold_constants(a), fold_constants(b)) {
            (PropExpr::Const(false), _) => PropExpr::Const(true),
            (PropExpr::Const(true), fb) => fb,
            (_, PropExpr::Const(true)) => PropExpr::Const(true),
            (fa, PropExpr::Const(false)) => match fa {
                PropExpr::Const(b) => PropExpr::Const(!b),
                f => PropExpr::not(f),
            },
            (fa, fb) => PropExpr::implies(fa, fb),
        },
        PropExpr::Iff(a, b) => match (fold_constants(a), fold_constants(b)) {
            (PropExpr::Const(x), PropExpr::Const(y)) => PropExpr::Const(x == y),
            (PropExpr::Const(true), f) | (f, PropExpr::Const(true)) => f,
            (PropExpr::Const(false), f) | (f, PropExpr::Const(false)) => PropExpr::not(f),
            (fa, fb) => PropExpr::iff(fa, fb),
        },
    }
}

/// A subformula's encoding: the literal standing for it plus the input
/// variables its truth depends on.
struct Encoded {
    lit: Lit,
    support: BTreeSet<VarId>,
}

/// Structural encoding of a constant-free formula. Negations reuse the
/// child's variable; every other connective gets a defined variable with
/// clauses for both implication directions.
fn encode(cnf: &mut CnfInstance, e: &PropExpr, num_inputs: usize, group: GroupId) -> Encoded {
    match e {
        PropExpr::Const(_) => unreachable!("constants are folded away before encoding"),
        PropExpr::Var(v) => {
            assert!(*v < num_inputs, "formula variable {v} out of range ({num_inputs} inputs declared)");
            Encoded { lit: Lit::pos(*v), support: [*v].into_iter().collect() }
        }
        PropExpr::Not(inner) => {
            let child = encode(cnf, inner, num_inputs, group);
            Encoded { lit: child.lit.flip(), support: child.support }
        }
        PropExpr::And(es) => {
            let children: Vec<Encoded> = es.iter().map(|s| encode(cnf, s, num_inputs, group)).collect();
            let support: BTreeSet<VarId> = children.iter().flat_map(|c| c.support.iter().copied()).collect();
            let a = cnf.fresh_defined(support.iter().copied().collect());
            for child in &children {
                cnf.add_clause(vec![Lit::neg(a), child.lit], group);
            }
            let mut long: Clause = vec![Lit::pos(a)];
            long.extend(children.iter().map(|c| c.lit.flip()));
            cnf.add_clause(long, group);
            Encoded { lit: Lit::pos(a), support }
        }
        PropExpr::Or(es) => {
            let children: Vec<Encoded> = es.iter().map(|s| encode(cnf, s, num_inputs, group)).collect();
            let support: BTreeSet<VarId> = children.iter().flat_map(|c| c.support.iter().copied()).collect();
            let o = cnf.fresh_defined(support.iter().copied().collect());
            let mut long: Clause = vec![Lit::neg(o)];
            long.extend(children.iter().map(|c| c.lit));
            cnf.add_clause(long, group);
            for child in &children {
                cnf.add_clause(vec![Lit::pos(o), child.lit.flip()], group);
            }
            Encoded { lit: Lit::pos(o), support }
        }
        PropExpr::Implies(a, b) => {
            let p = encode(cnf, a, num_inputs, group);
            let q = encode(cnf, b, num_inputs, group);
            let mut support = p.support;
            support.extend(q.support.iter().copied());
            let d = cnf.fresh_defined(support.iter().copied().collect());
            cnf.add_clause(vec![Lit::neg(d), p.lit.flip(), q.lit], group);
            cnf.add_clause(vec![Lit::pos(d), p.lit], group);
            cnf.add_clause(vec![Lit::pos(d), q.lit.flip()], group);
            Encoded { lit: Lit::pos(d), support }
        }
        PropExpr::Iff(a, b) => {
            let p = encode(cnf, a, num_inputs, group);
            let q = encode(cnf, b, num_inputs, group);
            let mut support = p.support;
            support.extend(q.support.iter().copied());
            let d = cnf.fresh_defined(support.iter().copied().collect());
            cnf.add_clause(vec![Lit::neg(d), p.lit.flip(), q.lit], group);
            cnf.add_clause(vec![Lit::neg(d), p.lit, q.lit.flip()], group);
            cnf.add_clause(vec![Lit::pos(d), p.lit, q.lit], group);
            cnf.add_clause(vec![Lit::pos(d), p.lit.flip(), q.lit.flip()], group);
            Encoded { lit: Lit::pos(d), support }
        }
    }
}
