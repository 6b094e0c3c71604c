//! Recursive-descent parser for the ASCII surface syntax.
//!
//! Propositional grammar, loosest to tightest: `->` (right-associative),
//! `|`, `&`, `~`, with parentheses overriding. S-formulas carry exactly
//! one top-level `=>` or `=/>`. A `#` starts a line comment anywhere.

use std::fmt;

use crate::formula::{PropFormula, SFormula, VarName};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ParseError {
    /// Byte offset into the input.
    pub position: usize,
    pub found: String,
    pub expected: Vec<&'static str>,
}

impl fmt::Display for ParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "parse error at offset {}: found {}, expected {}",
            self.position,
            self.found,
            self.expected.join(" or ")
        )
    }
}

impl std::error::Error for ParseError {}

#[derive(Debug, Clone, PartialEq, Eq)]
enum Token {
    Ident(String),
    Tilde,
    Amp,
    Pipe,
    Arrow,
    StrictImp,
    StrictNonImp,
    LParen,
    RParen,
}

impl Token {
    fn describe(&self) -> String {
        match self {
            Token::Ident(s) => format!("`{s}`"),
            Token::Tilde => "`~`".into(),
            Token::Amp => "`&`".into(),
            Token::Pipe => "`|`".into(),
            Token::Arrow => "`->`".into(),
            Token::StrictImp => "`=>`".into(),
            Token::StrictNonImp => "`=/>`".into(),
            Token::LParen => "`(`".into(),
            Token::RParen => "`)`".into(),
        }
    }
}

fn tokenize(text: &str) -> Result<Vec<(usize, Token)>, ParseError> {
    let bytes = text.as_bytes();
    let mut out = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i] as char;
        match c {
            ' ' | '\t' | '\r' | '\n' => i += 1,
            '#' => {
                while i < bytes.len() && bytes[i] != b'\n' {
                    i += 1;
                }
            }
            '(' => {
                out.push((i, Token::LParen));
                i += 1;
            }
            ')' => {
                out.push((i, Token::RParen));
                i += 1;
            }
            '~' => {
                out.push((i, Token::Tilde));
                i += 1;
            }
            '&' => {
                out.push((i, Token::Amp));
                i += 1;
            }
            '|' => {
                out.push((i, Token::Pipe));
                i += 1;
            }
            '-' => {
                if bytes.get(i + 1) == Some(&b'>') {
                    out.push((i, Token::Arrow));
                    i += 2;
                } else {
                    return Err(ParseError {
                        position: i,
                        found: "`-`".into(),
                        expected: vec!["`->`"],
                    });
                }
            }
            '=' => {
                if bytes.get(i + 1) == Some(&b'/') && bytes.get(i + 2) == Some(&b'>') {
                    out.push((i, Token::StrictNonImp));
                    i += 3;
                } else if bytes.get(i + 1) == Some(&b'>') {
                    out.push((i, Token::StrictImp));
                    i += 2;
                } else {
                    return Err(ParseError {
                        position: i,
                        found: "`=`".into(),
                        expected: vec!["`=>`", "`=/>`"],
                    });
                }
            }
            c if c.is_ascii_alphabetic() => {
                let start = i;
                while i < bytes.len() {
                    let b = bytes[i] as char;
                    if b.is_ascii_alphanumeric() || matches!(b, '_' | '.' | '^') {
                        i += 1;
                    } else {
                        break;
                    }
                }
                out.push((start, Token::Ident(text[start..i].to_owned())));
            }
            c => {
                return Err(ParseError {
                    position: i,
                    found: format!("`{c}`"),
                    expected: vec!["a formula token"],
                });
            }
        }
    }
    Ok(out)
}

struct Parser<'a> {
    tokens: &'a [(usize, Token)],
    pos: usize,
    end: usize,
}

impl<'a> Parser<'a> {
    fn peek(&self) -> Option<&Token> {
        self.tokens.get(self.pos).map(|(_, t)| t)
    }

    fn error(&self, expected: Vec<&'static str>) -> ParseError {
        match self.tokens.get(self.pos) {
            Some((p, t)) => ParseError { position: *p, found: t.describe(), expected },
            None => ParseError {
                position: self.end,
                found: "end of input".into(),
                expected,
            },
        }
    }

    fn bump(&mut self) -> Option<&Token> {
        let t = self.tokens.get(self.pos).map(|(_, t)| t);
        self.pos += 1;
        t
    }

    fn eat(&mut self, t: &Token) -> bool {
        if self.peek() == Some(t) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    // implication level, right-associative
    fn implies(&mut self) -> Result<PropFormula, ParseError> {
        let lhs = self.or()?;
        if self.eat(&Token::Arrow) {
            let rhs = self.implies()?;
            Ok(PropFormula::implies(lhs, rhs))
        } else {
            Ok(lhs)
        }
    }

    fn or(&mut self) -> Result<PropFormula, ParseError> {
        let mut lhs = self.and()?;
        while self.eat(&Token::Pipe) {
            let rhs = self.and()?;
            lhs = PropFormula::or(lhs, rhs);
        }
        Ok(lhs)
    }

    fn and(&mut self) -> Result<PropFormula, ParseError> {
        let mut lhs = self.unary()?;
        while self.eat(&Token::Amp) {
            let rhs = self.unary()?;
            lhs = PropFormula::and(lhs, rhs);
        }
        Ok(lhs)
    }

    fn unary(&mut self) -> Result<PropFormula, ParseError> {
        if self.eat(&Token::Tilde) {
            Ok(PropFormula::not(self.unary()?))
        } else {
            self.primary()
        }
    }

    fn primary(&mut self) -> Result<PropFormula, ParseError> {
        match self.peek().cloned() {
            Some(Token::Ident(name)) => {
                let pos = self.tokens[self.pos].0;
                self.bump();
                let v = VarName::new(&name).map_err(|_| ParseError {
                    position: pos,
                    found: format!("`{name}`"),
                    expected: vec!["a variable name"],
                })?;
                Ok(PropFormula::Var(v))
            }
            Some(Token::LParen) => {
                self.bump();
                let inner = self.implies()?;
                if self.eat(&Token::RParen) {
                    Ok(inner)
                } else {
                    Err(self.error(vec!["`)`"]))
                }
            }
            _ => Err(self.error(vec!["a variable", "`~`", "`(`"])),
        }
    }
}

fn parse_prop_tokens(tokens: &[(usize, Token)], end: usize) -> Result<PropFormula, ParseError> {
    let mut p = Parser { tokens, pos: 0, end };
    let f = p.implies()?;
    if p.pos != tokens.len() {
        return Err(p.error(vec!["end of input"]));
    }
    Ok(f)
}

/// Parses a propositional formula.
pub fn parse_prop(text: &str) -> Result<PropFormula, ParseError> {
    let tokens = tokenize(text)?;
    parse_prop_tokens(&tokens, text.len())
}

/// Parses an s-formula: exactly one top-level `=>` or `=/>`.
pub fn parse_sformula(text: &str) -> Result<SFormula, ParseError> {
    let tokens = tokenize(text)?;
    let mut strict = tokens
        .iter()
        .enumerate()
        .filter(|(_, (_, t))| matches!(t, Token::StrictImp | Token::StrictNonImp));
    let (idx, (_, op)) = strict.next().ok_or_else(|| ParseError {
        position: text.len(),
        found: "end of input".into(),
        expected: vec!["`=>`", "`=/>`"],
    })?;
    if let Some((_, (pos, t))) = strict.next() {
        return Err(ParseError {
            position: *pos,
            found: t.describe(),
            expected: vec!["a single strict operator"],
        });
    }
    let lhs = parse_prop_tokens(&tokens[..idx], text.len())?;
    let rhs = parse_prop_tokens(&tokens[idx + 1..], text.len())?;
    Ok(match op {
        Token::StrictImp => SFormula::strict_imp(lhs, rhs),
        _ => SFormula::strict_nonimp(lhs, rhs),
    })
}

/// Parses a whole theory: one s-formula per non-empty, non-comment line.
pub fn parse_theory(text: &str) -> Result<crate::formula::Theory, ParseError> {
    let mut theory = crate::formula::Theory::new();
    for line in text.lines() {
        let stripped = match line.find('#') {
            Some(i) => &line[..i],
            None => line,
        };
        if stripped.trim().is_empty() {
            continue;
        }
        theory.insert(parse_sformula(stripped)?);
    }
    Ok(theory)
}
