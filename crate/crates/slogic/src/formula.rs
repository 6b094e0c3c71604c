//! Abstract syntax for propositional formulas and s-formulas.
//!
//! An s-formula relates two purely propositional formulas by strict
//! implication (`=>`) or strict nonimplication (`=/>`). Nesting of the
//! strict operators is ruled out by construction: the sides of an
//! [`SFormula`] are [`PropFormula`] values.

use std::collections::BTreeSet;
use std::sync::Arc;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::semantics::Valuation;

/// A propositional variable name.
///
/// Tokens start with a letter and may continue with letters, digits,
/// `_`, `.`, or `^`. Equality is exact token equality.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct VarName(String);

impl VarName {
    pub fn new(name: &str) -> Result<Self, InvalidVarName> {
        if Self::is_valid(name) {
            Ok(VarName(name.to_owned()))
        } else {
            Err(InvalidVarName(name.to_owned()))
        }
    }

    pub fn is_valid(name: &str) -> bool {
        let mut chars = name.chars();
        match chars.next() {
            Some(c) if c.is_ascii_alphabetic() => {}
            _ => return false,
        }
        chars.all(|c| c.is_ascii_alphanumeric() || matches!(c, '_' | '.' | '^'))
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl fmt::Display for VarName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("invalid variable name `{0}`")]
pub struct InvalidVarName(pub String);

/// A propositional formula over named variables.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum PropFormula {
    Var(VarName),
    Not(Arc<PropFormula>),
    And(Arc<PropFormula>, Arc<PropFormula>),
    Or(Arc<PropFormula>, Arc<PropFormula>),
    Implies(Arc<PropFormula>, Arc<PropFormula>),
}

impl PropFormula {
    pub fn var(name: &str) -> Self {
        PropFormula::Var(VarName::new(name).expect("valid variable name"))
    }

    pub fn not(a: PropFormula) -> Self {
        PropFormula::Not(Arc::new(a))
    }

    pub fn and(a: PropFormula, b: PropFormula) -> Self {
        PropFormula::And(Arc::new(a), Arc::new(b))
    }

    pub fn or(a: PropFormula, b: PropFormula) -> Self {
        PropFormula::Or(Arc::new(a), Arc::new(b))
    }

    pub fn implies(a: PropFormula, b: PropFormula) -> Self {
        PropFormula::Implies(Arc::new(a), Arc::new(b))
    }

    /// The set of variables occurring in the formula.
    pub fn vars(&self) -> BTreeSet<VarName> {
        let mut out = BTreeSet::new();
        self.collect_vars(&mut out);
        out
    }

    pub(crate) fn collect_vars(&self, out: &mut BTreeSet<VarName>) {
        match self {
            PropFormula::Var(v) => {
                out.insert(v.clone());
            }
            PropFormula::Not(a) => a.collect_vars(out),
            PropFormula::And(a, b) | PropFormula::Or(a, b) | PropFormula::Implies(a, b) => {
                a.collect_vars(out);
                b.collect_vars(out);
            }
        }
    }

    /// Classical truth-table evaluation. Variables absent from the
    /// valuation read false.
    pub fn eval(&self, w: &Valuation) -> bool {
        match self {
            PropFormula::Var(v) => w.get(v),
            PropFormula::Not(a) => !a.eval(w),
            PropFormula::And(a, b) => a.eval(w) && b.eval(w),
            PropFormula::Or(a, b) => a.eval(w) || b.eval(w),
            PropFormula::Implies(a, b) => !a.eval(w) || b.eval(w),
        }
    }

    fn precedence(&self) -> u8 {
        match self {
            PropFormula::Var(_) | PropFormula::Not(_) => 4,
            PropFormula::And(_, _) => 3,
            PropFormula::Or(_, _) => 2,
            PropFormula::Implies(_, _) => 1,
        }
    }

    fn fmt_prec(&self, f: &mut fmt::Formatter<'_>, min: u8) -> fmt::Result {
        let prec = self.precedence();
        let parens = prec < min;
        if parens {
            f.write_str("(")?;
        }
        match self {
            PropFormula::Var(v) => write!(f, "{v}")?,
            PropFormula::Not(a) => {
                f.write_str("~")?;
                a.fmt_prec(f, 4)?;
            }
            PropFormula::And(a, b) => {
                a.fmt_prec(f, 3)?;
                f.write_str(" & ")?;
                b.fmt_prec(f, 4)?;
            }
            PropFormula::Or(a, b) => {
                a.fmt_prec(f, 2)?;
                f.write_str(" | ")?;
                b.fmt_prec(f, 3)?;
            }
            PropFormula::Implies(a, b) => {
                a.fmt_prec(f, 2)?;
                f.write_str(" -> ")?;
                b.fmt_prec(f, 1)?;
            }
        }
        if parens {
            f.write_str(")")?;
        }
        Ok(())
    }
}

impl fmt::Display for PropFormula {
    /// Minimal-parentheses rendering; parsing the output yields a
    /// structurally equal formula.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.fmt_prec(f, 0)
    }
}

/// The two s-formula kinds.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum SKind {
    StrictImp,
    StrictNonImp,
}

/// An s-formula: `lhs => rhs` or `lhs =/> rhs` with purely
/// propositional sides.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct SFormula {
    pub kind: SKind,
    pub lhs: PropFormula,
    pub rhs: PropFormula,
}

impl SFormula {
    pub fn strict_imp(lhs: PropFormula, rhs: PropFormula) -> Self {
        SFormula { kind: SKind::StrictImp, lhs, rhs }
    }

    pub fn strict_nonimp(lhs: PropFormula, rhs: PropFormula) -> Self {
        SFormula { kind: SKind::StrictNonImp, lhs, rhs }
    }

    /// Strict negation: swaps `=>` and `=/>`. An involution.
    pub fn strict_negation(&self) -> SFormula {
        SFormula {
            kind: match self.kind {
                SKind::StrictImp => SKind::StrictNonImp,
                SKind::StrictNonImp => SKind::StrictImp,
            },
            lhs: self.lhs.clone(),
            rhs: self.rhs.clone(),
        }
    }

    pub fn vars(&self) -> BTreeSet<VarName> {
        let mut out = BTreeSet::new();
        self.lhs.collect_vars(&mut out);
        self.rhs.collect_vars(&mut out);
        out
    }
}

impl fmt::Display for SFormula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let op = match self.kind {
            SKind::StrictImp => "=>",
            SKind::StrictNonImp => "=/>",
        };
        write!(f, "{} {} {}", self.lhs, op, self.rhs)
    }
}

/// A finite s-theory: an ordered, duplicate-free set of s-formulas.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Theory {
    formulas: Vec<SFormula>,
}

impl Theory {
    pub fn new() -> Self {
        Theory::default()
    }

    /// Inserts a formula, keeping insertion order. Returns false if a
    /// structurally equal formula was already present.
    pub fn insert(&mut self, f: SFormula) -> bool {
        if self.formulas.contains(&f) {
            false
        } else {
            self.formulas.push(f);
            true
        }
    }

    pub fn iter(&self) -> impl Iterator<Item = &SFormula> {
        self.formulas.iter()
    }

    pub fn len(&self) -> usize {
        self.formulas.len()
    }

    pub fn is_empty(&self) -> bool {
        self.formulas.is_empty()
    }

    pub fn contains(&self, f: &SFormula) -> bool {
        self.formulas.contains(f)
    }

    pub fn vars(&self) -> BTreeSet<VarName> {
        let mut out = BTreeSet::new();
        for f in &self.formulas {
            f.lhs.collect_vars(&mut out);
            f.rhs.collect_vars(&mut out);
        }
        out
    }

    /// The theory extended with the strict negation of `phi`, as used
    /// when refuting a candidate consequence.
    pub fn with_negated(&self, phi: &SFormula) -> Theory {
        let mut t = self.clone();
        t.insert(phi.strict_negation());
        t
    }
}

impl FromIterator<SFormula> for Theory {
    fn from_iter<I: IntoIterator<Item = SFormula>>(iter: I) -> Self {
        let mut t = Theory::new();
        for f in iter {
            t.insert(f);
        }
        t
    }
}

impl fmt::Display for Theory {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, s) in self.formulas.iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            write!(f, "{s}")?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::parser::{parse_prop, parse_sformula};

    #[test]
    fn render_right_assoc_implication() {
        let f = PropFormula::implies(
            PropFormula::var("A"),
            PropFormula::implies(PropFormula::var("B"), PropFormula::var("C")),
        );
        assert_eq!(f.to_string(), "A -> B -> C");
    }

    #[test]
    fn render_negated_conjunction() {
        let f = PropFormula::not(PropFormula::and(PropFormula::var("X"), PropFormula::var("Y")));
        assert_eq!(f.to_string(), "~(X & Y)");
    }

    #[test]
    fn render_nonimp() {
        let f = SFormula::strict_nonimp(PropFormula::var("X"), PropFormula::var("Y"));
        assert_eq!(f.to_string(), "X =/> Y");
    }

    #[test]
    fn render_left_assoc_needs_parens_on_right() {
        let f = PropFormula::and(
            PropFormula::var("A"),
            PropFormula::and(PropFormula::var("B"), PropFormula::var("C")),
        );
        assert_eq!(f.to_string(), "A & (B & C)");
        assert_eq!(parse_prop(&f.to_string()).unwrap(), f);
    }

    #[test]
    fn strict_negation_swaps_and_is_involutive() {
        let phi = parse_sformula("A => B").unwrap();
        let neg = phi.strict_negation();
        assert_eq!(neg, parse_sformula("A =/> B").unwrap());
        assert_eq!(neg.strict_negation(), phi);
    }

    #[test]
    fn eval_false_antecedent() {
        let f = parse_prop("X -> Y").unwrap();
        let w = Valuation::new();
        assert!(f.eval(&w));
    }

    #[test]
    fn eval_tautology_under_all_false() {
        let f = parse_prop("X | ~X").unwrap();
        assert!(f.eval(&Valuation::new()));
    }

    #[test]
    fn eval_conjunction() {
        let f = parse_prop("X & ~Y").unwrap();
        let w = Valuation::from_pairs([("X", true), ("Y", false)]);
        assert!(f.eval(&w));
    }

    #[test]
    fn theory_deduplicates() {
        let mut t = Theory::new();
        assert!(t.insert(parse_sformula("X => Y").unwrap()));
        assert!(!t.insert(parse_sformula("X => Y").unwrap()));
        assert_eq!(t.len(), 1);
    }

    #[test]
    fn var_name_validation() {
        assert!(VarName::is_valid("RT2.2"));
        assert!(VarName::is_valid("SRT2^2"));
        assert!(VarName::is_valid("x_1"));
        assert!(!VarName::is_valid("2x"));
        assert!(!VarName::is_valid(""));
        assert!(!VarName::is_valid("a-b"));
    }
}
