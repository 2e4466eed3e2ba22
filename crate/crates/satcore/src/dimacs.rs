//! DIMACS CNF reading and writing.
//!
//! The format carries no provenance, so exporting drops variable kinds
//! and group tags, and importing yields an instance where every
//! variable is an input and every clause is its own group.

use std::fmt::Write as _;

use thiserror::Error;

use crate::cnf::{CnfInstance, Lit};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum DimacsError {
    #[error("line {line}: expected 'p cnf <vars> <clauses>' header, got '{text}'")]
    BadHeader { line: usize, text: String },
    #[error("line {line}: clause data before the header")]
    ClauseBeforeHeader { line: usize },
    #[error("line {line}: '{token}' is not a literal")]
    BadLiteral { line: usize, token: String },
    #[error("line {line}: literal {literal} exceeds the declared {vars} variables")]
    LiteralOutOfRange { line: usize, literal: i64, vars: usize },
    #[error("unterminated clause at end of input (missing trailing 0)")]
    UnterminatedClause,
    #[error("header declares {declared} clauses but {found} were read")]
    ClauseCountMismatch { declared: usize, found: usize },
}

/// Renders the instance in DIMACS format. Variables are shifted to the
/// 1-based convention.
pub fn export_dimacs(cnf: &CnfInstance) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "p cnf {} {}", cnf.num_vars(), cnf.num_clauses());
    for clause in cnf.clauses() {
        for lit in clause {
            let magnitude = (lit.var + 1) as i64;
            let _ = write!(out, "{} ", if lit.negated { -magnitude } else { magnitude });
        }
        let _ = writeln!(out, "0");
    }
    out
}

/// Parses DIMACS text. Comment lines (`c ...`) and blank lines are
/// skipped; clauses may span lines and are terminated by `0`.
pub fn import_dimacs(text: &str) -> Result<CnfInstance, DimacsError> {
    let mut declared: Option<(usize, usize)> = None;
    let mut cnf = CnfInstance::new(0);
    let mut current: Vec<Lit> = Vec::new();
    let mut found = 0usize;

    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let trimmed = raw.trim();
        if trimmed.is_empty() || trimmed.starts_with('c') {
            continue;
        }
        if trimmed.starts_with('p') {
            let fields: Vec<&str> = trimmed.split_whitespace().collect();
            let parsed = match fields.as_slice() {
                ["p", "cnf", vars, clauses] => vars
                    .parse::<usize>()
                    .ok()
                    .zip(clauses.parse::<usize>().ok()),
                _ => None,
            };
            match parsed {
                Some((vars, clauses)) => {
                    declared = Some((vars, clauses));
                    cnf = CnfInstance::new(vars);
                }
                None => return Err(DimacsError::BadHeader { line, text: trimmed.to_string() }),
            }
            continue;
        }
        let (vars, _) = declared.ok_or(DimacsError::ClauseBeforeHeader { line })?;
        for token in trimmed.split_whitespace() {
            let literal: i64 = token
                .parse()
                .map_err(|_| DimacsError::BadLiteral { line, token: token.to_string() })?;
            if literal == 0 {
                cnf.add_clause(std::mem::take(&mut current), found);
                found += 1;
                continue;
            }
            let magnitude = literal.unsigned_abs() as usize;
            if magnitude > vars {
                return Err(DimacsError::LiteralOutOfRange { line, literal, vars });
            }
            current.push(if literal < 0 { Lit::neg(magnitude - 1) } else { Lit::pos(magnitude - 1) });
        }
    }

    if !current.is_empty() {
        return Err(DimacsError::UnterminatedClause);
    }
    if let Some((_, clauses)) = declared {
        if clauses != found {
            return Err(DimacsError::ClauseCountMismatch { declared: clauses, found });
        }
    }
    Ok(cnf)
}
