use cgplan_sat::{minimize_core, solve, to_cnf, CnfInstance, Lit, PropExpr, Solution};

#[test]
fn empty_instance_is_satisfiable() {
    let cnf = CnfInstance::new(3);
    match solve(&cnf) {
        Solution::Sat(model) => assert_eq!(model, vec![false; 3]),
        Solution::Unsat => panic!("no clauses means satisfiable"),
    }
}

#[test]
fn empty_clause_is_unsatisfiable() {
    let mut cnf = CnfInstance::new(1);
    cnf.add_clause(vec![], 0);
    assert_eq!(solve(&cnf), Solution::Unsat);
}

#[test]
fn branching_prefers_low_variables_and_false() {
    // Both polarities of variable 1 work; the model must use the first
    // one the search order reaches: everything false.
    let mut cnf = CnfInstance::new(2);
    cnf.add_clause(vec![Lit::neg(0), Lit::pos(1)], 0);
    match solve(&cnf) {
        Solution::Sat(model) => assert_eq!(model, vec![false, false]),
        Solution::Unsat => panic!("instance is satisfiable"),
    }
}

#[test]
fn propagation_chains_through_units() {
    // Units force 0, then 1, then 2 with no branching possible.
    let mut cnf = CnfInstance::new(3);
    cnf.add_clause(vec![Lit::pos(0)], 0);
    cnf.add_clause(vec![Lit::neg(0), Lit::pos(1)], 0);
    cnf.add_clause(vec![Lit::neg(1), Lit::pos(2)], 0);
    match solve(&cnf) {
        Solution::Sat(model) => assert_eq!(model, vec![true, true, true]),
        Solution::Unsat => panic!("instance is satisfiable"),
    }
}

#[test]
fn full_parity_square_is_a_tight_core() {
    // All four binary clauses over two variables; no proper subset is
    // unsatisfiable, so minimization must keep every clause.
    let mut cnf = CnfInstance::new(2);
    cnf.add_clause(vec![Lit::pos(0), Lit::pos(1)], 0);
    cnf.add_clause(vec![Lit::pos(0), Lit::neg(1)], 1);
    cnf.add_clause(vec![Lit::neg(0), Lit::pos(1)], 2);
    cnf.add_clause(vec![Lit::neg(0), Lit::neg(1)], 3);
    assert_eq!(minimize_core(&cnf).unwrap(), vec![0, 1, 2, 3]);
}

#[test]
fn redundant_clauses_fall_out_of_the_core() {
    // Clauses 0 and 2 contradict on their own; the middle clause and
    // the tail are padding that deletion must remove.
    let mut cnf = CnfInstance::new(3);
    cnf.add_clause(vec![Lit::pos(0)], 0);
    cnf.add_clause(vec![Lit::pos(1), Lit::pos(2)], 1);
    cnf.add_clause(vec![Lit::neg(0)], 2);
    cnf.add_clause(vec![Lit::neg(2)], 3);
    assert_eq!(minimize_core(&cnf).unwrap(), vec![0, 2]);
}

#[test]
fn constant_conjuncts_transform_without_variables() {
    let cnf = to_cnf(&[PropExpr::Const(true)], 2);
    assert_eq!(cnf.num_clauses(), 0);
    assert!(matches!(solve(&cnf), Solution::Sat(_)));

    let cnf = to_cnf(&[PropExpr::Const(false)], 2);
    assert_eq!(solve(&cnf), Solution::Unsat);

    // A contradiction folded away structurally, not by search.
    let folded = to_cnf(
        &[PropExpr::and(vec![PropExpr::var(0), PropExpr::Const(false)])],
        1,
    );
    assert_eq!(solve(&folded), Solution::Unsat);
}

#[test]
fn tautologies_and_contradictions_via_transformation() {
    let x = PropExpr::var(0);
    let tautology = PropExpr::or(vec![x.clone(), PropExpr::not(x.clone())]);
    assert!(matches!(solve(&to_cnf(&[tautology], 1)), Solution::Sat(_)));

    let contradiction = PropExpr::and(vec![x.clone(), PropExpr::not(x)]);
    assert_eq!(solve(&to_cnf(&[contradiction], 1)), Solution::Unsat);
}
