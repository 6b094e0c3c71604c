//! Frame semantics and the exhaustive semantic oracle.
//!
//! A frame is a nonempty set of valuations. A strict implication holds
//! in a frame when the material implication is true at every world; a
//! strict nonimplication holds when some world makes the left side true
//! and the right side false. The oracle decides satisfiability by
//! direct valuation search and is used as independent ground truth for
//! the tableau and fragment engines.

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::formula::{SFormula, SKind, Theory, VarName};
use crate::fragments::RuleTrace;
use crate::tableau::Proof;

/// A truth assignment. Variables absent from the map read false, so a
/// valuation over the mentioned variables loses no generality.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Default)]
pub struct Valuation {
    assignment: BTreeMap<VarName, bool>,
}

impl Valuation {
    pub fn new() -> Self {
        Valuation::default()
    }

    pub fn from_pairs<'a, I: IntoIterator<Item = (&'a str, bool)>>(pairs: I) -> Self {
        let mut v = Valuation::new();
        for (name, value) in pairs {
            v.set(VarName::new(name).expect("valid variable name"), value);
        }
        v
    }

    pub fn set(&mut self, var: VarName, value: bool) {
        self.assignment.insert(var, value);
    }

    pub fn get(&self, var: &VarName) -> bool {
        self.assignment.get(var).copied().unwrap_or(false)
    }

    /// Iterates in sorted variable order.
    pub fn iter(&self) -> impl Iterator<Item = (&VarName, bool)> {
        self.assignment.iter().map(|(v, b)| (v, *b))
    }
}

impl fmt::Display for Valuation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("{")?;
        for (i, (v, b)) in self.iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            write!(f, "{v}={}", if b { "T" } else { "F" })?;
        }
        f.write_str("}")
    }
}

impl Serialize for Valuation {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_map(self.assignment.iter())
    }
}

impl<'de> Deserialize<'de> for Valuation {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let assignment = BTreeMap::<VarName, bool>::deserialize(deserializer)?;
        Ok(Valuation { assignment })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("a frame must contain at least one valuation")]
pub struct EmptyFrame;

/// A nonempty finite set of valuations.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "FrameRepr", into = "FrameRepr")]
pub struct Frame {
    worlds: Vec<Valuation>,
}

#[derive(Serialize, Deserialize)]
struct FrameRepr {
    worlds: Vec<Valuation>,
}

impl TryFrom<FrameRepr> for Frame {
    type Error = EmptyFrame;
    fn try_from(repr: FrameRepr) -> Result<Self, EmptyFrame> {
        Frame::new(repr.worlds)
    }
}

impl From<Frame> for FrameRepr {
    fn from(frame: Frame) -> FrameRepr {
        FrameRepr { worlds: frame.worlds }
    }
}

impl Frame {
    /// Builds a frame, deduplicating equal valuations and preserving
    /// first-occurrence order. Fails on an empty world set.
    pub fn new(worlds: Vec<Valuation>) -> Result<Self, EmptyFrame> {
        let mut unique: Vec<Valuation> = Vec::new();
        for w in worlds {
            if !unique.contains(&w) {
                unique.push(w);
            }
        }
        if unique.is_empty() {
            Err(EmptyFrame)
        } else {
            Ok(Frame { worlds: unique })
        }
    }

    pub fn single(world: Valuation) -> Self {
        Frame { worlds: vec![world] }
    }

    pub fn worlds(&self) -> &[Valuation] {
        &self.worlds
    }

    /// Satisfaction of a single s-formula.
    pub fn satisfies(&self, phi: &SFormula) -> bool {
        match phi.kind {
            SKind::StrictImp => self
                .worlds
                .iter()
                .all(|w| !phi.lhs.eval(w) || phi.rhs.eval(w)),
            SKind::StrictNonImp => self
                .worlds
                .iter()
                .any(|w| phi.lhs.eval(w) && !phi.rhs.eval(w)),
        }
    }

    /// Satisfaction of every formula of a theory.
    pub fn satisfies_theory(&self, theory: &Theory) -> bool {
        theory.iter().all(|phi| self.satisfies(phi))
    }

    /// Canonical JSON document: `{"worlds":[{"X":true,...},...]}` with
    /// variables sorted within each world.
    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("frame serializes")
    }
}

impl fmt::Display for Frame {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, w) in self.worlds.iter().enumerate() {
            if i > 0 {
                f.write_str(" ")?;
            }
            write!(f, "{w}")?;
        }
        Ok(())
    }
}

/// Evidence attached to a positive consequence verdict.
#[derive(Debug, Clone)]
pub enum Evidence {
    /// A closed tableau refuting the theory plus the negated query.
    Tableau(Proof),
    /// A fragment-rule derivation.
    Trace(RuleTrace),
    /// Established by exhaustive valuation search; no syntactic witness.
    Semantic,
}

/// Outcome of a consequence check.
#[derive(Debug, Clone)]
pub enum Verdict {
    Consequence(Evidence),
    /// Carries a frame satisfying the theory and falsifying the query.
    NotConsequence(Frame),
}

impl Verdict {
    pub fn is_consequence(&self) -> bool {
        matches!(self, Verdict::Consequence(_))
    }
}

/// Deterministic enumeration of all valuations over `vars`, in
/// lexicographic order (all-false first, first variable most
/// significant).
pub fn valuations_over(vars: &[VarName]) -> impl Iterator<Item = Valuation> + '_ {
    let n = vars.len();
    (0u64..(1u64 << n)).map(move |mask| {
        let mut w = Valuation::new();
        for (i, v) in vars.iter().enumerate() {
            w.set(v.clone(), mask >> (n - 1 - i) & 1 == 1);
        }
        w
    })
}

/// Largest variable count the exhaustive oracle is intended for.
pub const ORACLE_VAR_LIMIT: usize = 16;

/// Brute-force satisfiability over the mentioned variables.
///
/// A theory is satisfiable iff every strict nonimplication `A =/> B`
/// has a witness valuation satisfying `A & ~B` together with every
/// material implication from the strict implications, and, when there
/// are no nonimplications, at least one valuation satisfies all
/// implications (frames are nonempty). Returns a frame with one
/// witness world per nonimplication.
pub fn oracle_satisfiable(theory: &Theory) -> Option<Frame> {
    let vars: Vec<VarName> = theory.vars().into_iter().collect();
    let imps: Vec<&SFormula> = theory
        .iter()
        .filter(|f| f.kind == SKind::StrictImp)
        .collect();
    let nonimps: Vec<&SFormula> = theory
        .iter()
        .filter(|f| f.kind == SKind::StrictNonImp)
        .collect();

    let satisfies_imps =
        |w: &Valuation| imps.iter().all(|f| !f.lhs.eval(w) || f.rhs.eval(w));

    if nonimps.is_empty() {
        let world = valuations_over(&vars).find(satisfies_imps)?;
        return Some(Frame::single(world));
    }

    let mut witnesses = Vec::with_capacity(nonimps.len());
    for f in &nonimps {
        let witness = valuations_over(&vars)
            .find(|w| f.lhs.eval(w) && !f.rhs.eval(w) && satisfies_imps(w))?;
        witnesses.push(witness);
    }
    Some(Frame::new(witnesses).expect("at least one nonimplication witness"))
}

/// Brute-force strict consequence: `phi` follows from the theory iff
/// the theory plus the strict negation of `phi` is unsatisfiable.
pub fn oracle_consequence(theory: &Theory, phi: &SFormula) -> Verdict {
    match oracle_satisfiable(&theory.with_negated(phi)) {
        None => Verdict::Consequence(Evidence::Semantic),
        Some(frame) => Verdict::NotConsequence(frame),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::parser::{parse_sformula, parse_theory};

    fn theory(lines: &[&str]) -> Theory {
        lines.iter().map(|l| parse_sformula(l).unwrap()).collect()
    }

    #[test]
    fn nonimp_witnessed_by_single_world() {
        let frame = Frame::single(Valuation::from_pairs([("X", true), ("Y", false)]));
        assert!(frame.satisfies(&parse_sformula("X =/> Y").unwrap()));
        assert!(!frame.satisfies(&parse_sformula("X => Y").unwrap()));
    }

    #[test]
    fn imp_vacuous_when_antecedent_false_everywhere() {
        let frame = Frame::single(Valuation::new());
        assert!(frame.satisfies(&parse_sformula("X => Y").unwrap()));
    }

    #[test]
    fn theory_satisfaction_is_conjunction() {
        let frame = Frame::single(Valuation::from_pairs([("X", true), ("Y", false)]));
        assert!(frame.satisfies_theory(&theory(&["X =/> Y", "X => X"])));
        assert!(!frame.satisfies_theory(&theory(&["X => Y", "X =/> Y"])));
        assert!(Frame::single(Valuation::new()).satisfies_theory(&Theory::new()));
    }

    #[test]
    fn contradictory_pair_unsatisfiable_in_any_frame() {
        let t = theory(&["X => Y", "X =/> Y"]);
        assert!(oracle_satisfiable(&t).is_none());
    }

    #[test]
    fn example_theory_from_closed_tableau_is_unsatisfiable() {
        let t = theory(&["X =/> Y", "X => A", "B => Y", "A => B", "A =/> B"]);
        assert!(oracle_satisfiable(&t).is_none());
    }

    #[test]
    fn tautology_implying_contradiction_is_unsatisfiable() {
        let t = theory(&["(X | ~X) => (Y & ~Y)"]);
        assert!(oracle_satisfiable(&t).is_none());
    }

    #[test]
    fn ramsey_theory_has_two_world_model() {
        let t = theory(&[
            "SRT22 & COH => RT22",
            "RT22 => SRT22",
            "RT22 => COH",
            "SRT22 =/> RT22",
            "COH =/> RT22",
        ]);
        let frame = oracle_satisfiable(&t).expect("satisfiable");
        assert_eq!(frame.worlds().len(), 2);
        assert!(frame.satisfies_theory(&t));
    }

    #[test]
    fn consequence_examples_after_closure_theorem() {
        let t = theory(&["X =/> Y", "X => A", "B => Y"]);
        assert!(oracle_consequence(&t, &parse_sformula("A =/> B").unwrap()).is_consequence());

        let chain = theory(&["X => A", "A => B", "B => Y"]);
        assert!(oracle_consequence(&chain, &parse_sformula("X => Y").unwrap()).is_consequence());

        let fork = theory(&["A => B", "A => C"]);
        for q in ["B => C", "B =/> C"] {
            match oracle_consequence(&fork, &parse_sformula(q).unwrap()) {
                Verdict::NotConsequence(frame) => {
                    assert!(frame.satisfies_theory(&fork));
                    assert!(!frame.satisfies(&parse_sformula(q).unwrap()));
                }
                Verdict::Consequence(_) => panic!("{q} should not be a consequence"),
            }
        }
    }

    #[test]
    fn frame_json_is_canonical() {
        let frame = Frame::single(Valuation::from_pairs([("Y", false), ("X", true)]));
        assert_eq!(frame.to_json(), r#"{"worlds":[{"X":true,"Y":false}]}"#);
        let back: Frame = serde_json::from_str(&frame.to_json()).unwrap();
        assert_eq!(back, frame);
    }

    #[test]
    fn empty_frame_rejected() {
        assert_eq!(Frame::new(vec![]), Err(EmptyFrame));
        assert!(serde_json::from_str::<Frame>(r#"{"worlds":[]}"#).is_err());
    }

    #[test]
    fn parse_theory_ignores_comments_and_blanks() {
        let t = parse_theory("# header\nX => Y\n\nA =/> B # note\n").unwrap();
        assert_eq!(t.len(), 2);
    }
}
