//! Fact-database layer for implication corpora.
//!
//! A database is ingested from a line-oriented `.slt` file, carries
//! per-fact provenance, and answers trichotomy queries — proved,
//! refuted, or independent — by running the appropriate engine on the
//! query and on its strict negation. Bulk products are the pairwise
//! implication matrix, a DOT rendering of it, and a persisted
//! saturation report guarded by a content digest.

use std::collections::BTreeSet;
use std::fmt;
use std::path::{Path, PathBuf};

use petgraph::algo::{condensation, has_path_connecting};
use petgraph::graph::Graph;
use serde_json::json;
use sha2::{Digest, Sha256};

use crate::formula::{SFormula, Theory, VarName};
use crate::fragments::{
    f1_decide, f2_consistency, f2_decide, horn_closure, saturate, to_f2, Conflict, F2Fact,
    FactKind, FragmentError, FragmentVerdict, RuleId, RuleSystem, RuleTrace, TraceStep,
};
use crate::parser::parse_sformula;
use crate::semantics::{
    oracle_consequence, Evidence, Frame, Valuation, Verdict, ORACLE_VAR_LIMIT,
};
use crate::tableau::{build_systematic, decide as tableau_decide, Proof, TableauError};

/// One ingested fact with its provenance.
#[derive(Debug, Clone, Eq)]
pub struct FactRecord {
    pub fact: SFormula,
    /// Free-text citation from the `@ "..."` suffix.
    pub provenance: Option<String>,
    /// 1-based line in the ingested file.
    pub source_line: usize,
}

impl PartialEq for FactRecord {
    /// Structural equality; the ingestion origin is diagnostic
    /// metadata, not content.
    fn eq(&self, other: &Self) -> bool {
        self.fact == other.fact && self.provenance == other.provenance
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FragmentClass {
    F1,
    F2,
    General,
}

impl fmt::Display for FragmentClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            FragmentClass::F1 => "F1",
            FragmentClass::F2 => "F2",
            FragmentClass::General => "general",
        })
    }
}

/// An immutable fact database.
#[derive(Debug, Clone)]
pub struct Database {
    records: Vec<FactRecord>,
    declared_vars: BTreeSet<VarName>,
    fragment_class: FragmentClass,
    source: String,
}

impl PartialEq for Database {
    fn eq(&self, other: &Self) -> bool {
        self.records == other.records
            && self.declared_vars == other.declared_vars
            && self.fragment_class == other.fragment_class
    }
}

impl Database {
    pub fn records(&self) -> &[FactRecord] {
        &self.records
    }

    /// Variables from `vars` lines plus every variable mentioned in a
    /// fact.
    pub fn declared_vars(&self) -> &BTreeSet<VarName> {
        &self.declared_vars
    }

    pub fn fragment_class(&self) -> FragmentClass {
        self.fragment_class
    }

    pub fn theory(&self) -> Theory {
        self.records.iter().map(|r| r.fact.clone()).collect()
    }

    /// The facts as fragment facts, when every record fits F2.
    pub fn f2_facts(&self) -> Option<Vec<F2Fact>> {
        self.records.iter().map(|r| to_f2(&r.fact)).collect()
    }

    /// SHA-256 of the ingested file contents, hex-encoded.
    pub fn digest(&self) -> String {
        let mut hasher = Sha256::new();
        hasher.update(self.source.as_bytes());
        format!("{:x}", hasher.finalize())
    }

    /// Renders the database back to `.slt`; re-ingesting the output
    /// yields a structurally equal database.
    pub fn to_slt(&self) -> String {
        let mut out = String::new();
        if !self.declared_vars.is_empty() {
            out.push_str("vars");
            for v in &self.declared_vars {
                out.push(' ');
                out.push_str(v.as_str());
            }
            out.push('\n');
        }
        for r in &self.records {
            out.push_str(&r.fact.to_string());
            if let Some(c) = &r.provenance {
                out.push_str(&format!(" @ \"{c}\""));
            }
            out.push('\n');
        }
        out
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Severity {
    Warning,
    Error,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Diagnostic {
    pub line: usize,
    pub severity: Severity,
    pub message: String,
}

impl fmt::Display for Diagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let kind = match self.severity {
            Severity::Warning => "warning",
            Severity::Error => "error",
        };
        write!(f, "line {}: {}: {}", self.line, kind, self.message)
    }
}

/// Drops a `#` comment, ignoring `#` inside a quoted citation.
fn strip_comment(line: &str) -> &str {
    let mut in_quote = false;
    for (i, c) in line.char_indices() {
        match c {
            '"' => in_quote = !in_quote,
            '#' if !in_quote => return &line[..i],
            _ => {}
        }
    }
    line
}

/// Splits a fact line into formula text and optional citation.
fn split_citation(line: &str) -> Result<(&str, Option<String>), String> {
    let mut in_quote = false;
    let mut at = None;
    for (i, c) in line.char_indices() {
        match c {
            '"' => in_quote = !in_quote,
            '@' if !in_quote => {
                at = Some(i);
                break;
            }
            _ => {}
        }
    }
    let Some(at) = at else {
        return Ok((line, None));
    };
    let tail = line[at + 1..].trim();
    let citation = tail
        .strip_prefix('"')
        .and_then(|t| t.strip_suffix('"'))
        .ok_or_else(|| "citation after `@` must be a double-quoted string".to_string())?;
    Ok((&line[..at], Some(citation.to_owned())))
}

/// Parses `.slt` file contents. Errors fail ingestion; duplicate facts
/// only warn. The returned diagnostics on success are warnings.
pub fn ingest(text: &str) -> Result<(Database, Vec<Diagnostic>), Vec<Diagnostic>> {
    let mut records: Vec<FactRecord> = Vec::new();
    let mut declared_vars = BTreeSet::new();
    let mut warnings = Vec::new();
    let mut errors = Vec::new();

    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let line = strip_comment(raw).trim();
        if line.is_empty() {
            continue;
        }
        if let Some(rest) = line.strip_prefix("vars") {
            if rest.is_empty() || rest.starts_with(char::is_whitespace) {
                for name in rest.split_whitespace() {
                    match VarName::new(name) {
                        Ok(v) => {
                            declared_vars.insert(v);
                        }
                        Err(e) => errors.push(Diagnostic {
                            line: line_no,
                            severity: Severity::Error,
                            message: e.to_string(),
                        }),
                    }
                }
                continue;
            }
        }
        let (formula_text, provenance) = match split_citation(line) {
            Ok(parts) => parts,
            Err(message) => {
                errors.push(Diagnostic { line: line_no, severity: Severity::Error, message });
                continue;
            }
        };
        match parse_sformula(formula_text) {
            Ok(fact) => {
                if let Some(prev) = records.iter().find(|r| r.fact == fact) {
                    warnings.push(Diagnostic {
                        line: line_no,
                        severity: Severity::Warning,
                        message: format!(
                            "duplicate fact `{fact}` (first ingested at line {})",
                            prev.source_line
                        ),
                    });
                } else {
                    declared_vars.extend(fact.vars());
                    records.push(FactRecord { fact, provenance, source_line: line_no });
                }
            }
            Err(e) => errors.push(Diagnostic {
                line: line_no,
                severity: Severity::Error,
                message: e.to_string(),
            }),
        }
    }
    if !errors.is_empty() {
        errors.extend(warnings);
        errors.sort_by_key(|d| d.line);
        return Err(errors);
    }

    let f2: Vec<Option<F2Fact>> = records.iter().map(|r| to_f2(&r.fact)).collect();
    let fragment_class = if f2.iter().all(|f| f.as_ref().is_some_and(F2Fact::is_f1)) {
        FragmentClass::F1
    } else if f2.iter().all(Option::is_some) {
        FragmentClass::F2
    } else {
        FragmentClass::General
    };
    Ok((
        Database { records, declared_vars, fragment_class, source: text.to_owned() },
        warnings,
    ))
}

/// Why a database is inconsistent: a fragment-level Horn conflict or a
/// closed tableau for the whole theory.
#[derive(Debug, Clone)]
pub enum InconsistencyReport {
    Conflict(Conflict),
    Refutation(Proof),
}

impl fmt::Display for InconsistencyReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            InconsistencyReport::Conflict(c) => write!(f, "{c}"),
            InconsistencyReport::Refutation(_) => f.write_str("closed tableau for the theory"),
        }
    }
}

#[derive(Debug, Clone)]
pub enum CheckResult {
    Consistent(Frame),
    Inconsistent(InconsistencyReport),
}

#[derive(Debug, Clone, thiserror::Error)]
pub enum ZooError {
    #[error(transparent)]
    Tableau(#[from] TableauError),
    #[error("the {0} engine requires fragment facts: {1}")]
    NotInFragment(FragmentClass, String),
    #[error("the oracle engine is limited to {ORACLE_VAR_LIMIT} variables; the input has {0}")]
    OracleLimit(usize),
    #[error("the database is inconsistent")]
    InconsistentDatabase,
}

/// The canonical model of a consistent fragment database: one closure
/// valuation per nonimplication, or the all-false world when there is
/// none.
fn fragment_model(facts: &[F2Fact], universe: &BTreeSet<VarName>) -> Frame {
    let imps: Vec<F2Fact> = facts.iter().filter(|f| f.kind == FactKind::Imp).cloned().collect();
    let mut worlds = Vec::new();
    for ni in facts.iter().filter(|f| f.kind == FactKind::NonImp) {
        let closure = horn_closure(&imps, ni.ante.conjuncts());
        let mut w = Valuation::new();
        for v in universe {
            w.set(v.clone(), closure.contains(v));
        }
        worlds.push(w);
    }
    if worlds.is_empty() {
        let mut w = Valuation::new();
        for v in universe {
            w.set(v.clone(), false);
        }
        worlds.push(w);
    }
    Frame::new(worlds).expect("nonempty world list")
}

/// Consistency check: fragment databases use the Horn-closure test
/// with a derivation-backed conflict report; general databases build
/// the systematic tableau for the theory itself.
pub fn check(db: &Database) -> Result<CheckResult, ZooError> {
    if let Some(facts) = db.f2_facts() {
        return Ok(match f2_consistency(&facts) {
            Ok(()) => CheckResult::Consistent(fragment_model(&facts, db.declared_vars())),
            Err(conflict) => CheckResult::Inconsistent(InconsistencyReport::Conflict(conflict)),
        });
    }
    let tableau = build_systematic(&db.theory())?;
    if tableau.closed {
        Ok(CheckResult::Inconsistent(InconsistencyReport::Refutation(Proof { tableau })))
    } else {
        let label = tableau.open_branch.as_ref().expect("open tableau has an open branch");
        let frame = crate::tableau::extract_frame(label, &tableau.atoms)?;
        Ok(CheckResult::Consistent(frame))
    }
}

/// Engine selection for queries.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Engine {
    /// Fragment engine when both database and query fit F2, tableau
    /// otherwise.
    #[default]
    Auto,
    Tableau,
    F1,
    F2,
    Oracle,
}

fn decide_with(db: &Database, phi: &SFormula, engine: Engine) -> Result<Verdict, ZooError> {
    let fragment_verdict = |v: Result<FragmentVerdict, FragmentError>, class: FragmentClass| {
        match v {
            Ok(FragmentVerdict::Consequence(trace)) => {
                Ok(Verdict::Consequence(Evidence::Trace(trace)))
            }
            Ok(FragmentVerdict::NotConsequence(frame)) => Ok(Verdict::NotConsequence(frame)),
            Err(FragmentError::NotInFragment(what)) => Err(ZooError::NotInFragment(class, what)),
            // Queries run behind the consistency check.
            Err(FragmentError::Inconsistent(_)) => Err(ZooError::InconsistentDatabase),
        }
    };
    match engine {
        Engine::Auto => {
            match (db.f2_facts(), to_f2(phi)) {
                (Some(facts), Some(q)) => {
                    fragment_verdict(f2_decide(&facts, &q), FragmentClass::F2)
                }
                _ => Ok(tableau_decide(&db.theory(), phi)?),
            }
        }
        Engine::Tableau => Ok(tableau_decide(&db.theory(), phi)?),
        Engine::F1 | Engine::F2 => {
            let class = if engine == Engine::F1 { FragmentClass::F1 } else { FragmentClass::F2 };
            let facts = db
                .f2_facts()
                .ok_or_else(|| ZooError::NotInFragment(class, "database".into()))?;
            let q = to_f2(phi)
                .ok_or_else(|| ZooError::NotInFragment(class, phi.to_string()))?;
            let verdict = if engine == Engine::F1 {
                f1_decide(&facts, &q)
            } else {
                f2_decide(&facts, &q)
            };
            fragment_verdict(verdict, class)
        }
        Engine::Oracle => {
            let mut vars = db.declared_vars().clone();
            vars.extend(phi.vars());
            if vars.len() > ORACLE_VAR_LIMIT {
                return Err(ZooError::OracleLimit(vars.len()));
            }
            Ok(oracle_consequence(&db.theory(), phi))
        }
    }
}

/// The trichotomy answer to a query.
#[derive(Debug, Clone)]
pub enum QueryAnswer {
    Proved(Evidence),
    /// The strict negation of the query is proved; its evidence is
    /// attached.
    Refuted(Evidence),
    /// Neither direction follows; each frame satisfies the theory and
    /// falsifies one direction.
    Independent {
        against_query: Frame,
        against_negation: Frame,
    },
    Inconsistent(InconsistencyReport),
}

impl QueryAnswer {
    pub fn status(&self) -> &'static str {
        match self {
            QueryAnswer::Proved(_) => "PROVED",
            QueryAnswer::Refuted(_) => "REFUTED",
            QueryAnswer::Independent { .. } => "INDEPENDENT",
            QueryAnswer::Inconsistent(_) => "INCONSISTENT",
        }
    }
}

/// Decides the query and its strict negation, yielding exactly one of
/// proved / refuted / independent for a consistent database.
pub fn query(db: &Database, phi: &SFormula) -> Result<QueryAnswer, ZooError> {
    query_with(db, phi, Engine::Auto)
}

pub fn query_with(db: &Database, phi: &SFormula, engine: Engine) -> Result<QueryAnswer, ZooError> {
    if let CheckResult::Inconsistent(report) = check(db)? {
        return Ok(QueryAnswer::Inconsistent(report));
    }
    match decide_with(db, phi, engine)? {
        Verdict::Consequence(evidence) => Ok(QueryAnswer::Proved(evidence)),
        Verdict::NotConsequence(against_query) => {
            match decide_with(db, &phi.strict_negation(), engine)? {
                Verdict::Consequence(evidence) => Ok(QueryAnswer::Refuted(evidence)),
                Verdict::NotConsequence(against_negation) => {
                    Ok(QueryAnswer::Independent { against_query, against_negation })
                }
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Status {
    Proved,
    Refuted,
    Independent,
}

impl Status {
    pub fn as_str(self) -> &'static str {
        match self {
            Status::Proved => "proved",
            Status::Refuted => "refuted",
            Status::Independent => "independent",
        }
    }
}

/// The pairwise implication matrix over the declared variables.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Matrix {
    /// Sorted row/column order.
    pub vars: Vec<VarName>,
    /// `cells[i][j]` answers `vars[i] => vars[j]`.
    pub cells: Vec<Vec<Status>>,
}

/// Queries every ordered variable pair, fanning rows out across
/// threads and merging in sorted order.
pub fn matrix(db: &Database) -> Result<Matrix, ZooError> {
    if let CheckResult::Inconsistent(_) = check(db)? {
        return Err(ZooError::InconsistentDatabase);
    }
    let vars: Vec<VarName> = db.declared_vars().iter().cloned().collect();
    let rows: Vec<Result<Vec<Status>, ZooError>> = std::thread::scope(|scope| {
        let handles: Vec<_> = vars
            .iter()
            .map(|x| {
                let vars = &vars;
                scope.spawn(move || {
                    vars.iter()
                        .map(|y| {
                            let q = SFormula::strict_imp(
                                crate::formula::PropFormula::Var(x.clone()),
                                crate::formula::PropFormula::Var(y.clone()),
                            );
                            Ok(match query(db, &q)? {
                                QueryAnswer::Proved(_) => Status::Proved,
                                QueryAnswer::Refuted(_) => Status::Refuted,
                                QueryAnswer::Independent { .. } => Status::Independent,
                                QueryAnswer::Inconsistent(_) => {
                                    return Err(ZooError::InconsistentDatabase)
                                }
                            })
                        })
                        .collect()
                })
            })
            .collect();
        handles.into_iter().map(|h| h.join().expect("matrix worker")).collect()
    });
    let cells = rows.into_iter().collect::<Result<Vec<_>, _>>()?;
    Ok(Matrix { vars, cells })
}

impl Matrix {
    pub fn render_text(&self) -> String {
        let width = self
            .vars
            .iter()
            .map(|v| v.as_str().len())
            .chain(["independent".len()])
            .max()
            .unwrap_or(1);
        let mut out = String::new();
        out.push_str(&format!("{:width$}", ""));
        for v in &self.vars {
            out.push_str(&format!(" {:width$}", v.as_str()));
        }
        out.push('\n');
        for (i, v) in self.vars.iter().enumerate() {
            out.push_str(&format!("{:width$}", v.as_str()));
            for cell in &self.cells[i] {
                out.push_str(&format!(" {:width$}", cell.as_str()));
            }
            out.push('\n');
        }
        out
    }

    pub fn to_json(&self) -> serde_json::Value {
        json!({
            "vars": self.vars.iter().map(|v| v.as_str()).collect::<Vec<_>>(),
            "cells": self
                .cells
                .iter()
                .map(|row| row.iter().map(|c| c.as_str()).collect::<Vec<_>>())
                .collect::<Vec<_>>(),
        })
    }
}

/// DOT rendering of a matrix: solid edges for proved implications,
/// transitively reduced (equivalence classes drawn as a cycle), dashed
/// `=/>` edges for refuted ones, nothing for independent pairs.
pub fn export_dot(matrix: &Matrix) -> String {
    let n = matrix.vars.len();
    let mut graph: Graph<VarName, ()> = Graph::new();
    let nodes: Vec<_> = matrix.vars.iter().map(|v| graph.add_node(v.clone())).collect();
    for i in 0..n {
        for j in 0..n {
            if i != j && matrix.cells[i][j] == Status::Proved {
                graph.add_edge(nodes[i], nodes[j], ());
            }
        }
    }

    let condensed = condensation(graph, true);
    let mut solid: Vec<(VarName, VarName)> = Vec::new();
    for scc in condensed.node_weights() {
        let mut members: Vec<VarName> = scc.clone();
        members.sort();
        // A nontrivial class renders as a cycle, making the mutual
        // implications visible.
        if members.len() > 1 {
            for k in 0..members.len() {
                solid.push((members[k].clone(), members[(k + 1) % members.len()].clone()));
            }
        }
    }
    let representative = |idx: petgraph::graph::NodeIndex| -> VarName {
        condensed[idx].iter().min().expect("nonempty component").clone()
    };
    for edge in condensed.edge_indices() {
        let (src, dst) = condensed.edge_endpoints(edge).expect("edge endpoints");
        // Transitive reduction on the condensed DAG: skip the edge if
        // the target stays reachable through an intermediate component.
        let redundant = condensed.edge_indices().any(|other| {
            let (s2, d2) = condensed.edge_endpoints(other).expect("edge endpoints");
            s2 == src && d2 != dst && has_path_connecting(&condensed, d2, dst, None)
        });
        if !redundant {
            solid.push((representative(src), representative(dst)));
        }
    }
    solid.sort();
    solid.dedup();

    let mut dashed: Vec<(VarName, VarName)> = Vec::new();
    for i in 0..n {
        for j in 0..n {
            if i != j && matrix.cells[i][j] == Status::Refuted {
                dashed.push((matrix.vars[i].clone(), matrix.vars[j].clone()));
            }
        }
    }
    dashed.sort();

    let mut out = String::from("digraph implications {\n");
    for v in &matrix.vars {
        out.push_str(&format!("  \"{v}\";\n"));
    }
    for (a, b) in &solid {
        out.push_str(&format!("  \"{a}\" -> \"{b}\";\n"));
    }
    for (a, b) in &dashed {
        out.push_str(&format!("  \"{a}\" -> \"{b}\" [style=dashed, label=\"=/>\"];\n"));
    }
    out.push_str("}\n");
    out
}

/// The strongest derivable facts of a fragment database.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SaturationReport {
    pub max_ante: usize,
    pub facts: Vec<(F2Fact, RuleTrace)>,
}

pub fn saturate_db(db: &Database, max_ante: usize) -> Result<SaturationReport, ZooError> {
    let facts = db
        .f2_facts()
        .ok_or_else(|| ZooError::NotInFragment(FragmentClass::F2, "database".into()))?;
    match saturate(&facts, db.declared_vars(), max_ante) {
        Ok(derived) => Ok(SaturationReport { max_ante, facts: derived }),
        Err(FragmentError::Inconsistent(_)) => Err(ZooError::InconsistentDatabase),
        Err(FragmentError::NotInFragment(what)) => {
            Err(ZooError::NotInFragment(FragmentClass::F2, what))
        }
    }
}

#[derive(Debug, thiserror::Error)]
pub enum ClosureError {
    #[error("{path}: stale closure report (file digest {found}, report digest {expected})")]
    Stale { path: PathBuf, expected: String, found: String },
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("{path}: malformed closure report: {message}")]
    Malformed { path: PathBuf, message: String },
}

/// Canonical JSON form of a saturation report, including the engine
/// version and the digest of the source fact file.
pub fn closure_json(db: &Database, report: &SaturationReport) -> serde_json::Value {
    json!({
        "engine": env!("CARGO_PKG_VERSION"),
        "digest": db.digest(),
        "maxAnte": report.max_ante,
        "facts": report
            .facts
            .iter()
            .map(|(fact, trace)| json!({
                "fact": fact.to_string(),
                "system": match trace.system {
                    RuleSystem::F1 => "F1",
                    RuleSystem::F2 => "F2",
                },
                "trace": trace.to_json(),
            }))
            .collect::<Vec<_>>(),
    })
}

pub fn save_closure(
    path: &Path,
    db: &Database,
    report: &SaturationReport,
) -> Result<(), ClosureError> {
    let text = serde_json::to_string_pretty(&closure_json(db, report)).expect("report serializes");
    std::fs::write(path, text).map_err(|source| ClosureError::Io {
        path: path.to_owned(),
        source,
    })
}

fn parse_fact(text: &str, path: &Path) -> Result<F2Fact, ClosureError> {
    parse_sformula(text)
        .ok()
        .and_then(|s| to_f2(&s))
        .ok_or_else(|| ClosureError::Malformed {
            path: path.to_owned(),
            message: format!("`{text}` is not a fragment fact"),
        })
}

/// Loads a saturation report and verifies its digest against the
/// database it claims to describe.
pub fn load_closure(path: &Path, db: &Database) -> Result<SaturationReport, ClosureError> {
    let text = std::fs::read_to_string(path).map_err(|source| ClosureError::Io {
        path: path.to_owned(),
        source,
    })?;
    let doc: serde_json::Value =
        serde_json::from_str(&text).map_err(|e| ClosureError::Malformed {
            path: path.to_owned(),
            message: e.to_string(),
        })?;
    let malformed = |message: &str| ClosureError::Malformed {
        path: path.to_owned(),
        message: message.to_owned(),
    };
    let expected = doc["digest"].as_str().ok_or_else(|| malformed("missing digest"))?;
    let found = db.digest();
    if expected != found {
        return Err(ClosureError::Stale {
            path: path.to_owned(),
            expected: expected.to_owned(),
            found,
        });
    }
    let max_ante = doc["maxAnte"].as_u64().ok_or_else(|| malformed("missing maxAnte"))? as usize;
    let mut facts = Vec::new();
    for entry in doc["facts"].as_array().ok_or_else(|| malformed("missing facts"))? {
        let fact = parse_fact(
            entry["fact"].as_str().ok_or_else(|| malformed("missing fact text"))?,
            path,
        )?;
        let system = match entry["system"].as_str() {
            Some("F1") => RuleSystem::F1,
            Some("F2") => RuleSystem::F2,
            _ => return Err(malformed("unknown rule system")),
        };
        let mut steps = Vec::new();
        for step in entry["trace"].as_array().ok_or_else(|| malformed("missing trace"))? {
            let rule = match step["rule"].as_str() {
                Some("I") => RuleId::I,
                Some("W") => RuleId::W,
                Some("HS") => RuleId::Hs,
                Some("N") => RuleId::N,
                _ => return Err(malformed("unknown rule")),
            };
            let derived = parse_fact(
                step["fact"].as_str().ok_or_else(|| malformed("missing step fact"))?,
                path,
            )?;
            let mut premises = Vec::new();
            for p in step["premises"].as_array().ok_or_else(|| malformed("missing premises"))? {
                premises.push(parse_fact(
                    p.as_str().ok_or_else(|| malformed("premise is not a string"))?,
                    path,
                )?);
            }
            steps.push(TraceStep { rule, premises, derived });
        }
        let trace = RuleTrace { system, steps, conclusion: fact.clone() };
        facts.push((fact, trace));
    }
    Ok(SaturationReport { max_ante, facts })
}
