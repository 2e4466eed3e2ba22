//! Concrete syntax for boolean systems.
//!
//! ```text
//! file    := "props:" ident+  "init:" formula  "goal:" formula
//!            ("action" ident ":" formula)+
//! formula := iff
//! iff     := imp ("<->" imp)*          left-associative
//! imp     := or ("->" or)*             right-associative
//! or      := and ("|" and)*
//! and     := lit ("&" lit)*
//! lit     := "!" lit | "(" formula ")" | "true" | "false"
//!          | "frame" ("except" "{" idents "}")?  | ident "'"?
//! ```
//!
//! A trailing `'` makes a variable next-state; next-state variables are
//! only allowed in action formulas. `frame` expands to `p' <-> p` for
//! every proposition not listed in its `except` set. `#` starts a
//! comment running to the end of the line. The section words and the
//! operand words above are reserved and cannot name propositions or
//! actions.

use std::collections::BTreeSet;
use std::fmt;

use thiserror::Error;

use crate::formula::Formula;
use crate::system::{Action, BooleanSystem};

/// A syntax or resolution error, located at a 1-based line and column.
#[derive(Debug, Error, PartialEq, Eq)]
#[error("{line}:{column}: {kind}")]
pub struct ParseError {
    pub line: usize,
    pub column: usize,
    pub kind: ParseErrorKind,
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum ParseErrorKind {
    #[error("unexpected character {found:?}")]
    UnexpectedChar { found: char },
    #[error("expected {expected}, found {found}")]
    Unexpected { expected: &'static str, found: String },
    #[error("unknown proposition {name:?}")]
    UnknownProp { name: String },
    #[error("duplicate proposition {name:?}")]
    DuplicateProp { name: String },
    #[error("duplicate action {name:?}")]
    DuplicateAction { name: String },
    #[error("next-state variables are not allowed in {section}")]
    PrimedHere { section: &'static str },
    #[error("frame is only allowed in action formulas")]
    FrameHere,
}

#[derive(Debug, Clone, PartialEq, Eq)]
enum Tok {
    Ident(String),
    Props,
    Init,
    Goal,
    Action,
    True,
    False,
    Frame,
    Except,
    Colon,
    Prime,
    Bang,
    Amp,
    Pipe,
    Arrow,
    Biarrow,
    LParen,
    RParen,
    LBrace,
    RBrace,
    Comma,
    End,
}

impl fmt::Display for Tok {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Tok::Ident(s) => write!(f, "{s:?}"),
            Tok::Props => write!(f, "\"props\""),
            Tok::Init => write!(f, "\"init\""),
            Tok::Goal => write!(f, "\"goal\""),
            Tok::Action => write!(f, "\"action\""),
            Tok::True => write!(f, "\"true\""),
            Tok::False => write!(f, "\"false\""),
            Tok::Frame => write!(f, "\"frame\""),
            Tok::Except => write!(f, "\"except\""),
            Tok::Colon => write!(f, "\":\""),
            Tok::Prime => write!(f, "\"'\""),
            Tok::Bang => write!(f, "\"!\""),
            Tok::Amp => write!(f, "\"&\""),
            Tok::Pipe => write!(f, "\"|\""),
            Tok::Arrow => write!(f, "\"->\""),
            Tok::Biarrow => write!(f, "\"<->\""),
            Tok::LParen => write!(f, "\"(\""),
            Tok::RParen => write!(f, "\")\""),
            Tok::LBrace => write!(f, "\"{{\""),
            Tok::RBrace => write!(f, "\"}}\""),
            Tok::Comma => write!(f, "\",\""),
            Tok::End => write!(f, "end of input"),
        }
    }
}

struct Spanned {
    tok: Tok,
    line: usize,
    column: usize,
}

fn err(line: usize, column: usize, kind: ParseErrorKind) -> ParseError {
    ParseError { line, column, kind }
}

fn lex(text: &str) -> Result<Vec<Spanned>, ParseError> {
    let mut toks = Vec::new();
    let mut chars = text.chars().peekable();
    let mut line = 1;
    let mut column = 1;
    while let Some(&c) = chars.peek() {
        let (tok_line, tok_column) = (line, column);
        let mut bump = |chars: &mut std::iter::Peekable<std::str::Chars>| {
            let c = chars.next().unwrap();
            if c == '\n' {
                line += 1;
                column = 1;
            } else {
                column += 1;
            }
            c
        };
        if c.is_whitespace() {
            bump(&mut chars);
            continue;
        }
        if c == '#' {
            while chars.peek().is_some_and(|&c| c != '\n') {
                bump(&mut chars);
            }
            continue;
        }
        if c.is_ascii_alphabetic() || c == '_' {
            let mut word = String::new();
            while chars.peek().is_some_and(|&c| c.is_ascii_alphanumeric() || c == '_') {
                word.push(bump(&mut chars));
            }
            let tok = match word.as_str() {
                "props" => Tok::Props,
                "init" => Tok::Init,
                "goal" => Tok::Goal,
                "action" => Tok::Action,
                "true" => Tok::True,
                "false" => Tok::False,
                "frame" => Tok::Frame,
                "except" => Tok::Except,
                _ => Tok::Ident(word),
            };
            toks.push(Spanned { tok, line: tok_line, column: tok_column });
            continue;
        }
        bump(&mut chars);
        let tok = match c {
            ':' => Tok::Colon,
            '\'' => Tok::Prime,
            '!' => Tok::Bang,
            '&' => Tok::Amp,
            '|' => Tok::Pipe,
            '(' => Tok::LParen,
            ')' => Tok::RParen,
            '{' => Tok::LBrace,
            '}' => Tok::RBrace,
            ',' => Tok::Comma,
            '-' => match chars.peek() {
                Some('>') => {
                    bump(&mut chars);
                    Tok::Arrow
                }
                _ => return Err(err(tok_line, tok_column, ParseErrorKind::UnexpectedChar { found: '-' })),
            },
            '<' => {
                let ok = chars.peek() == Some(&'-') && {
                    bump(&mut chars);
                    chars.peek() == Some(&'>')
                };
                if !ok {
                    return Err(err(tok_line, tok_column, ParseErrorKind::UnexpectedChar { found: '<' }));
                }
                bump(&mut chars);
                Tok::Biarrow
            }
            other => return Err(err(tok_line, tok_column, ParseErrorKind::UnexpectedChar { found: other })),
        };
        toks.push(Spanned { tok, line: tok_line, column: tok_column });
    }
    toks.push(Spanned { tok: Tok::End, line, column });
    Ok(toks)
}

struct Parser {
    toks: Vec<Spanned>,
    pos: usize,
    props: Vec<String>,
    // Names the section for prime and frame diagnostics; primes are
    // legal exactly when it is "action".
    section: &'static str,
}

impl Parser {
    fn peek(&self) -> &Tok {
        &self.toks[self.pos].tok
    }

    fn here(&self) -> (usize, usize) {
        (self.toks[self.pos].line, self.toks[self.pos].column)
    }

    fn advance(&mut self) -> &Tok {
        let tok = &self.toks[self.pos].tok;
        if !matches!(tok, Tok::End) {
            self.pos += 1;
        }
        tok
    }

    fn unexpected(&self, expected: &'static str) -> ParseError {
        let (line, column) = self.here();
        err(line, column, ParseErrorKind::Unexpected {
            expected,
            found: self.peek().to_string(),
        })
    }

    fn expect(&mut self, want: Tok, expected: &'static str) -> Result<(), ParseError> {
        if *self.peek() == want {
            self.advance();
            Ok(())
        } else {
            Err(self.unexpected(expected))
        }
    }

    fn expect_ident(&mut self, expected: &'static str) -> Result<(String, usize, usize), ParseError> {
        let (line, column) = self.here();
        match self.peek().clone() {
            Tok::Ident(name) => {
                self.advance();
                Ok((name, line, column))
            }
            _ => Err(self.unexpected(expected)),
        }
    }

    fn prop_index(&self, name: &str, line: usize, column: usize) -> Result<usize, ParseError> {
        self.props
            .iter()
            .position(|p| p == name)
            .ok_or_else(|| err(line, column, ParseErrorKind::UnknownProp { name: name.to_string() }))
    }

    fn formula(&mut self) -> Result<Formula, ParseError> {
        let mut left = self.implication()?;
        while *self.peek() == Tok::Biarrow {
            self.advance();
            let right = self.implication()?;
            left = Formula::iff(left, right);
        }
        Ok(left)
    }

    fn implication(&mut self) -> Result<Formula, ParseError> {
        let left = self.disjunction()?;
        if *self.peek() == Tok::Arrow {
            self.advance();
            let right = self.implication()?;
            return Ok(Formula::implies(left, right));
        }
        Ok(left)
    }

    fn disjunction(&mut self) -> Result<Formula, ParseError> {
        let mut items = vec![self.conjunction()?];
        while *self.peek() == Tok::Pipe {
            self.advance();
            items.push(self.conjunction()?);
        }
        Ok(if items.len() == 1 { items.pop().unwrap() } else { Formula::Or(items) })
    }

    fn conjunction(&mut self) -> Result<Formula, ParseError> {
        let mut items = vec![self.operand()?];
        while *self.peek() == Tok::Amp {
            self.advance();
            items.push(self.operand()?);
        }
        Ok(if items.len() == 1 { items.pop().unwrap() } else { Formula::And(items) })
    }

    fn operand(&mut self) -> Result<Formula, ParseError> {
        let (line, column) = self.here();
        match self.peek().clone() {
            Tok::Bang => {
                self.advance();
                Ok(Formula::not(self.operand()?))
            }
            Tok::LParen => {
                self.advance();
                let inner = self.formula()?;
                self.expect(Tok::RParen, "\")\"")?;
                Ok(inner)
            }
            Tok::True => {
                self.advance();
                Ok(Formula::Const(true))
            }
            Tok::False => {
                self.advance();
                Ok(Formula::Const(false))
            }
            Tok::Frame => {
                self.advance();
                if self.section != "action" {
                    return Err(err(line, column, ParseErrorKind::FrameHere));
                }
                self.frame_tail()
            }
            Tok::Ident(name) => {
                self.advance();
                let prop = self.prop_index(&name, line, column)?;
                if *self.peek() == Tok::Prime {
                    let (line, column) = self.here();
                    self.advance();
                    if self.section != "action" {
                        return Err(err(line, column, ParseErrorKind::PrimedHere {
                            section: self.section,
                        }));
                    }
                    return Ok(Formula::primed(prop));
                }
                Ok(Formula::var(prop))
            }
            _ => Err(self.unexpected("a formula")),
        }
    }

    // Already past the `frame` token; consumes an optional except set
    // and expands to next-state equality for the propositions kept.
    fn frame_tail(&mut self) -> Result<Formula, ParseError> {
        let mut except = BTreeSet::new();
        if *self.peek() == Tok::Except {
            self.advance();
            self.expect(Tok::LBrace, "\"{\"")?;
            while *self.peek() != Tok::RBrace {
                let (name, line, column) = self.expect_ident("a proposition name")?;
                except.insert(self.prop_index(&name, line, column)?);
                if *self.peek() == Tok::Comma {
                    self.advance();
                } else {
                    break;
                }
            }
            self.expect(Tok::RBrace, "\"}\"")?;
        }
        let mut kept: Vec<Formula> = (0..self.props.len())
            .filter(|p| !except.contains(p))
            .map(|p| Formula::iff(Formula::primed(p), Formula::var(p)))
            .collect();
        Ok(match kept.len() {
            0 => Formula::Const(true),
            1 => kept.pop().unwrap(),
            _ => Formula::And(kept),
        })
    }

    fn file(&mut self) -> Result<BooleanSystem, ParseError> {
        self.expect(Tok::Props, "\"props\"")?;
        self.expect(Tok::Colon, "\":\"")?;
        while let Tok::Ident(_) = self.peek() {
            let (name, line, column) = self.expect_ident("a proposition name")?;
            if self.props.contains(&name) {
                return Err(err(line, column, ParseErrorKind::DuplicateProp { name }));
            }
            self.props.push(name);
        }
        if self.props.is_empty() {
            return Err(self.unexpected("a proposition name"));
        }

        self.expect(Tok::Init, "\"init\"")?;
        self.expect(Tok::Colon, "\":\"")?;
        self.section = "init";
        let init = self.formula()?;

        self.expect(Tok::Goal, "\"goal\"")?;
        self.expect(Tok::Colon, "\":\"")?;
        self.section = "goal";
        let goal = self.formula()?;

        let mut actions: Vec<Action> = Vec::new();
        while *self.peek() == Tok::Action {
            self.advance();
            let (name, line, column) = self.expect_ident("an action name")?;
            if actions.iter().any(|a| a.name == name) {
                return Err(err(line, column, ParseErrorKind::DuplicateAction { name }));
            }
            self.expect(Tok::Colon, "\":\"")?;
            self.section = "action";
            let formula = self.formula()?;
            actions.push(Action { name, formula });
        }
        if actions.is_empty() {
            return Err(self.unexpected("\"action\""));
        }
        self.expect(Tok::End, "end of input")?;

        Ok(BooleanSystem { props: std::mem::take(&mut self.props), init, goal, actions })
    }
}

/// Parses the concrete syntax above into a resolved system.
pub fn parse_boolean_system(text: &str) -> Result<BooleanSystem, ParseError> {
    let toks = lex(text)?;
    let mut parser = Parser { toks, pos: 0, props: Vec::new(), section: "props" };
    parser.file()
}
