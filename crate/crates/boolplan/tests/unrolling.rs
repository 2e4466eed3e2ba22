//! Step-unrolled plan formulas: satisfiability, model decoding, and
//! core provenance.

use std::collections::BTreeSet;

use cgplan_bool::{bmc_formula, decode_trace, parse_boolean_system, BmcError};
use cgplan_sat::{minimize_core, solve, to_cnf, Solution};

const FLIP: &str = "props: p\ninit: !p\ngoal: p\naction flip: p' <-> !p\n";

#[test]
fn the_empty_plan_is_initial_and_final_at_once() {
    let system = parse_boolean_system(FLIP).unwrap();
    let conjuncts = bmc_formula(&system, &[]).unwrap();
    assert_eq!(conjuncts.len(), 2);
    assert_eq!(solve(&to_cnf(&conjuncts, 1)), Solution::Unsat);

    let system = parse_boolean_system("props: p\ninit: p\ngoal: p\naction a: true\n").unwrap();
    let conjuncts = bmc_formula(&system, &[]).unwrap();
    match solve(&to_cnf(&conjuncts, 1)) {
        Solution::Sat(model) => assert!(model[0]),
        Solution::Unsat => panic!("constant system should be satisfiable"),
    }
}

#[test]
fn the_flip_plan_has_exactly_one_execution() {
    let system = parse_boolean_system(FLIP).unwrap();
    let conjuncts = bmc_formula(&system, &["flip".to_string()]).unwrap();
    assert_eq!(conjuncts.len(), 3);
    match solve(&to_cnf(&conjuncts, 2)) {
        Solution::Sat(model) => {
            let trace = decode_trace(&model, 2, 1);
            assert_eq!(trace, vec![vec![false], vec![true]]);
        }
        Solution::Unsat => panic!("the flip plan is executable"),
    }
}

#[test]
fn time_indexing_keeps_steps_apart() {
    let text = "props: a b\ninit: a & !b\ngoal: b\naction swap: (a' <-> b) & (b' <-> a)\n";
    let system = parse_boolean_system(text).unwrap();
    let conjuncts = bmc_formula(&system, &["swap".to_string()]).unwrap();
    match solve(&to_cnf(&conjuncts, 4)) {
        Solution::Sat(model) => {
            let trace = decode_trace(&model, 2, 2);
            assert_eq!(trace, vec![vec![true, false], vec![false, true]]);
        }
        Solution::Unsat => panic!("the swap plan is executable"),
    }
}

#[test]
fn violated_preconditions_show_up_in_the_core() {
    let text = "props: p q\ninit: !p\ngoal: q\naction go: p & q'\n";
    let system = parse_boolean_system(text).unwrap();
    let conjuncts = bmc_formula(&system, &["go".to_string()]).unwrap();
    let cnf = to_cnf(&conjuncts, 4);
    assert_eq!(solve(&cnf), Solution::Unsat);

    let core = minimize_core(&cnf).unwrap();
    let mut vars = BTreeSet::new();
    for clause in core {
        vars.extend(cnf.clause_input_support(clause));
    }
    // The clash is over p at the first step. Clauses defining the
    // step's conjunction may drag its other variables along, but p at
    // time 0 has to be present.
    assert!(vars.contains(&0), "core misses the contradicted precondition");
    let props: BTreeSet<usize> = vars.into_iter().map(|v| v % 2).collect();
    assert!(props.contains(&0));
}

#[test]
fn unknown_action_names_are_refused() {
    let system = parse_boolean_system(FLIP).unwrap();
    assert_eq!(
        bmc_formula(&system, &["flop".to_string()]).unwrap_err(),
        BmcError::UnknownAction { name: "flop".into() }
    );
}
