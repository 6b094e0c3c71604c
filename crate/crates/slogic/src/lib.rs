//! Decision engine for s-logic: strict implication between
//! propositional formulas under frame semantics.
//!
//! An s-formula `A => B` (strict implication) holds in a frame — a
//! nonempty set of valuations — when `A -> B` is true at every world;
//! `A =/> B` (strict nonimplication) holds when some world makes `A`
//! true and `B` false. A formula is a strict consequence of a theory
//! when every frame satisfying the theory satisfies it; the engine
//! decides this by refuting the theory extended with the strict
//! negation of the query.
//!
//! Three engines are provided and cross-checked: a systematic,
//! terminating tableau for the full language ([`tableau`]), polynomial
//! Horn-closure procedures for the conjunctive fragments
//! ([`fragments`]), and an exhaustive semantic oracle ([`semantics`]).
//! The [`zoodb`] layer turns them into a fact database with trichotomy
//! queries, implication matrices, and saturation reports.

pub mod formula;
pub mod fragments;
pub mod parser;
pub mod semantics;
pub mod tableau;
pub mod zoodb;

pub use formula::{PropFormula, SFormula, SKind, Theory, VarName};
pub use fragments::{
    f1_decide, f2_consistency, f2_decide, horn_closure, saturate, to_f2, Conjunction, F2Fact,
    FactKind, FragmentError, FragmentVerdict, RuleSystem, RuleTrace,
};
pub use parser::{parse_prop, parse_sformula, parse_theory, ParseError};
pub use semantics::{
    oracle_consequence, oracle_satisfiable, Evidence, Frame, Valuation, Verdict, ORACLE_VAR_LIMIT,
};
pub use tableau::{build_systematic, decide, extract_frame, Proof, Tableau, TableauError};
pub use zoodb::{
    check, export_dot, ingest, matrix, query, query_with, saturate_db, CheckResult, Database,
    Engine, QueryAnswer, ZooError,
};
