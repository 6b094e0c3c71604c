//! Polynomial decision procedures for the two conjunctive fragments.
//!
//! F1 facts relate single variables; F2 facts allow a conjunction of
//! variables on the left. Consequence in both fragments reduces to
//! Horn-style closure computation, and every positive verdict carries a
//! replayable derivation in the fragment's rule system: (I) identity,
//! (W) antecedent weakening, (HS) hypothetical syllogism, and (N)
//! nonimplication transfer.

use std::collections::{BTreeSet, HashMap};
use std::fmt;

use serde_json::json;

use crate::formula::{PropFormula, SFormula, SKind, VarName};
use crate::semantics::{Frame, Valuation};

/// A nonempty conjunction of variables, canonicalized as a sorted set.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Conjunction(BTreeSet<VarName>);

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("a conjunction must have at least one conjunct")]
pub struct EmptyConjunction;

impl Conjunction {
    pub fn new<I: IntoIterator<Item = VarName>>(conjuncts: I) -> Result<Self, EmptyConjunction> {
        let set: BTreeSet<VarName> = conjuncts.into_iter().collect();
        if set.is_empty() {
            Err(EmptyConjunction)
        } else {
            Ok(Conjunction(set))
        }
    }

    pub fn singleton(v: VarName) -> Self {
        Conjunction(BTreeSet::from([v]))
    }

    pub fn conjuncts(&self) -> &BTreeSet<VarName> {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn contains(&self, v: &VarName) -> bool {
        self.0.contains(v)
    }

    pub fn is_subset(&self, other: &BTreeSet<VarName>) -> bool {
        self.0.is_subset(other)
    }

    /// The conjunction extended with one more variable.
    pub fn with(&self, v: VarName) -> Conjunction {
        let mut set = self.0.clone();
        set.insert(v);
        Conjunction(set)
    }

    /// Union with another conjunction.
    pub fn union(&self, other: &Conjunction) -> Conjunction {
        Conjunction(self.0.union(&other.0).cloned().collect())
    }

    /// The conjunction with one conjunct removed; None if it was the
    /// only one and removal would leave it empty... removal keeps the
    /// set nonempty only when more conjuncts remain.
    fn without(&self, v: &VarName) -> BTreeSet<VarName> {
        let mut set = self.0.clone();
        set.remove(v);
        set
    }

    /// The only conjunct, when the conjunction is a single variable.
    pub fn single(&self) -> Option<&VarName> {
        if self.0.len() == 1 {
            self.0.iter().next()
        } else {
            None
        }
    }
}

impl fmt::Display for Conjunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, v) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str(" & ")?;
            }
            write!(f, "{v}")?;
        }
        Ok(())
    }
}

/// The two F2 fact kinds.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum FactKind {
    Imp,
    NonImp,
}

/// A fragment fact: a conjunctive antecedent strictly (non)implying a
/// single variable. F1 facts are the special case of a one-variable
/// antecedent.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct F2Fact {
    pub kind: FactKind,
    pub ante: Conjunction,
    pub cons: VarName,
}

impl F2Fact {
    pub fn imp(ante: Conjunction, cons: VarName) -> Self {
        F2Fact { kind: FactKind::Imp, ante, cons }
    }

    pub fn nonimp(ante: Conjunction, cons: VarName) -> Self {
        F2Fact { kind: FactKind::NonImp, ante, cons }
    }

    pub fn is_f1(&self) -> bool {
        self.ante.len() == 1
    }

    pub fn vars(&self) -> BTreeSet<VarName> {
        let mut out = self.ante.conjuncts().clone();
        out.insert(self.cons.clone());
        out
    }

    /// The general-form s-formula, with the antecedent rendered as a
    /// left-associated conjunction over sorted conjuncts.
    pub fn to_sformula(&self) -> SFormula {
        let mut iter = self.ante.conjuncts().iter();
        let first = iter.next().expect("nonempty conjunction");
        let lhs = iter.fold(PropFormula::Var(first.clone()), |acc, v| {
            PropFormula::and(acc, PropFormula::Var(v.clone()))
        });
        let rhs = PropFormula::Var(self.cons.clone());
        match self.kind {
            FactKind::Imp => SFormula::strict_imp(lhs, rhs),
            FactKind::NonImp => SFormula::strict_nonimp(lhs, rhs),
        }
    }
}

impl fmt::Display for F2Fact {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let op = match self.kind {
            FactKind::Imp => "=>",
            FactKind::NonImp => "=/>",
        };
        write!(f, "{} {} {}", self.ante, op, self.cons)
    }
}

fn flatten_conjunction(f: &PropFormula, out: &mut Vec<VarName>) -> bool {
    match f {
        PropFormula::Var(v) => {
            out.push(v.clone());
            true
        }
        PropFormula::And(a, b) => flatten_conjunction(a, out) && flatten_conjunction(b, out),
        _ => false,
    }
}

/// Views an s-formula as an F2 fact, when it fits the fragment.
pub fn to_f2(s: &SFormula) -> Option<F2Fact> {
    let mut conjuncts = Vec::new();
    if !flatten_conjunction(&s.lhs, &mut conjuncts) {
        return None;
    }
    let cons = match &s.rhs {
        PropFormula::Var(v) => v.clone(),
        _ => return None,
    };
    let ante = Conjunction::new(conjuncts).ok()?;
    Some(match s.kind {
        SKind::StrictImp => F2Fact::imp(ante, cons),
        SKind::StrictNonImp => F2Fact::nonimp(ante, cons),
    })
}

/// The rule systems of the two fragments.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RuleSystem {
    F1,
    F2,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RuleId {
    I,
    W,
    Hs,
    N,
}

impl RuleId {
    pub fn as_str(self) -> &'static str {
        match self {
            RuleId::I => "I",
            RuleId::W => "W",
            RuleId::Hs => "HS",
            RuleId::N => "N",
        }
    }
}

/// One derivation step: premises are input facts or earlier
/// conclusions.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TraceStep {
    pub rule: RuleId,
    pub premises: Vec<F2Fact>,
    pub derived: F2Fact,
}

/// A replayable derivation of `conclusion` from a fragment theory.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RuleTrace {
    pub system: RuleSystem,
    pub steps: Vec<TraceStep>,
    pub conclusion: F2Fact,
}

impl RuleTrace {
    pub fn render_text(&self) -> String {
        let mut out = String::new();
        for step in &self.steps {
            let premises: Vec<String> = step.premises.iter().map(|p| p.to_string()).collect();
            out.push_str(&format!(
                "derive {} by ({}) from {}\n",
                step.derived,
                step.rule.as_str(),
                if premises.is_empty() { "nothing".to_string() } else { premises.join(", ") }
            ));
        }
        if self.steps.is_empty() {
            out.push_str(&format!("{} is in the theory\n", self.conclusion));
        }
        out
    }

    pub fn to_json(&self) -> serde_json::Value {
        json!(self
            .steps
            .iter()
            .map(|s| json!({
                "fact": s.derived.to_string(),
                "rule": s.rule.as_str(),
                "premises": s.premises.iter().map(|p| p.to_string()).collect::<Vec<_>>(),
            }))
            .collect::<Vec<_>>())
    }

    /// Replays the derivation against a theory, checking each step's
    /// rule shape and that every premise is an input fact or an
    /// earlier conclusion.
    pub fn replay(&self, theory: &[F2Fact]) -> Result<(), String> {
        let mut established: Vec<F2Fact> = theory.to_vec();
        for (i, step) in self.steps.iter().enumerate() {
            for p in &step.premises {
                if !established.contains(p) {
                    return Err(format!("step {i}: premise {p} not established"));
                }
            }
            check_step(self.system, step).map_err(|e| format!("step {i}: {e}"))?;
            established.push(step.derived.clone());
        }
        if !established.contains(&self.conclusion) {
            return Err(format!("conclusion {} not established", self.conclusion));
        }
        Ok(())
    }
}

fn check_step(system: RuleSystem, step: &TraceStep) -> Result<(), String> {
    let d = &step.derived;
    match (system, step.rule) {
        (_, RuleId::I) => {
            let ok = step.premises.is_empty()
                && d.kind == FactKind::Imp
                && d.ante.single() == Some(&d.cons);
            ok.then_some(()).ok_or_else(|| format!("bad (I) instance deriving {d}"))
        }
        (RuleSystem::F2, RuleId::W) => {
            let ok = matches!(&step.premises[..],
                [p] if p.kind == FactKind::Imp
                    && d.kind == FactKind::Imp
                    && p.cons == d.cons
                    && p.ante.is_subset(d.ante.conjuncts()));
            ok.then_some(()).ok_or_else(|| format!("bad (W) instance deriving {d}"))
        }
        (RuleSystem::F2, RuleId::Hs) => {
            // From X & B => Y and A => X, deduce A & B => Y.
            match &step.premises[..] {
                [main, side]
                    if main.kind == FactKind::Imp
                        && side.kind == FactKind::Imp
                        && main.ante.contains(&side.cons)
                        && d.kind == FactKind::Imp
                        && d.cons == main.cons =>
                {
                    let mut expected = main.ante.without(&side.cons);
                    expected.extend(side.ante.conjuncts().iter().cloned());
                    if *d.ante.conjuncts() == expected {
                        Ok(())
                    } else {
                        Err(format!("bad (HS) antecedent in {d}"))
                    }
                }
                _ => Err(format!("bad (HS) instance deriving {d}")),
            }
        }
        (RuleSystem::F1, RuleId::Hs) => {
            // From X => Y and Y => Z, deduce X => Z.
            match &step.premises[..] {
                [first, second]
                    if first.kind == FactKind::Imp
                        && second.kind == FactKind::Imp
                        && first.is_f1()
                        && second.is_f1()
                        && d.is_f1()
                        && d.kind == FactKind::Imp
                        && second.ante.single() == Some(&first.cons)
                        && d.ante == first.ante
                        && d.cons == second.cons =>
                {
                    Ok(())
                }
                _ => Err(format!("bad (HS) instance deriving {d}")),
            }
        }
        (RuleSystem::F2, RuleId::N) => {
            // From A =/> X, A & Z => X, and A => Y for each conjunct Y
            // of B, deduce B =/> Z.
            if d.kind != FactKind::NonImp || step.premises.len() < 2 {
                return Err(format!("bad (N) instance deriving {d}"));
            }
            let first = &step.premises[0];
            let second = &step.premises[1];
            if first.kind != FactKind::NonImp || second.kind != FactKind::Imp {
                return Err(format!("bad (N) premises deriving {d}"));
            }
            let a = &first.ante;
            let x = &first.cons;
            if second.cons != *x || second.ante != a.with(d.cons.clone()) {
                return Err(format!("bad (N) middle premise deriving {d}"));
            }
            let mut covered = BTreeSet::new();
            for p in &step.premises[2..] {
                if p.kind != FactKind::Imp || p.ante != *a || !d.ante.contains(&p.cons) {
                    return Err(format!("bad (N) side premise {p}"));
                }
                covered.insert(p.cons.clone());
            }
            if covered == *d.ante.conjuncts() {
                Ok(())
            } else {
                Err(format!("(N) side premises do not cover the antecedent of {d}"))
            }
        }
        (RuleSystem::F1, RuleId::N) => {
            // From X =/> Y, X => W, and Z => Y, deduce W =/> Z.
            match &step.premises[..] {
                [ni, xw, zy]
                    if ni.kind == FactKind::NonImp
                        && xw.kind == FactKind::Imp
                        && zy.kind == FactKind::Imp
                        && [ni, xw, zy, d].iter().all(|f| f.is_f1())
                        && d.kind == FactKind::NonImp
                        && xw.ante == ni.ante
                        && zy.cons == ni.cons
                        && d.ante.single() == Some(&xw.cons)
                        && zy.ante.single() == Some(&d.cons) =>
                {
                    Ok(())
                }
                _ => Err(format!("bad (N) instance deriving {d}")),
            }
        }
        (RuleSystem::F1, RuleId::W) => Err("rule (W) is not part of the F1 system".into()),
    }
}

/// A consistency conflict: a nonimplication whose consequent is
/// Horn-derivable from its own antecedent.
#[derive(Debug, Clone)]
pub struct Conflict {
    pub nonimp: F2Fact,
    /// Derivation of `ante => cons` from the implications alone.
    pub derivation: RuleTrace,
}

impl fmt::Display for Conflict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{} conflicts with the implications: {} is derivable",
            self.nonimp,
            F2Fact::imp(self.nonimp.ante.clone(), self.nonimp.cons.clone())
        )
    }
}

#[derive(Debug, Clone, thiserror::Error)]
pub enum FragmentError {
    #[error("inconsistent theory: {0}")]
    Inconsistent(Conflict),
    #[error("not in the fragment: {0}")]
    NotInFragment(String),
}

/// Fragment analogue of the general verdict.
#[derive(Debug, Clone)]
pub enum FragmentVerdict {
    Consequence(RuleTrace),
    NotConsequence(Frame),
}

impl FragmentVerdict {
    pub fn is_consequence(&self) -> bool {
        matches!(self, FragmentVerdict::Consequence(_))
    }
}

/// Least superset of `seed` closed under the implications: whenever
/// every conjunct of an antecedent is in the set, so is the consequent.
pub fn horn_closure(imps: &[F2Fact], seed: &BTreeSet<VarName>) -> BTreeSet<VarName> {
    horn_closure_counted(imps, seed).0
}

/// Closure plus the number of fact scans performed, for step-budget
/// checks.
pub fn horn_closure_counted(
    imps: &[F2Fact],
    seed: &BTreeSet<VarName>,
) -> (BTreeSet<VarName>, usize) {
    let mut set = seed.clone();
    let mut steps = 0;
    loop {
        let mut changed = false;
        for f in imps {
            steps += 1;
            if !set.contains(&f.cons) && f.ante.is_subset(&set) {
                set.insert(f.cons.clone());
                changed = true;
            }
        }
        if !changed {
            break;
        }
    }
    (set, steps)
}

/// Closure with, for each non-seed member, the implication that first
/// derived it, in derivation order.
fn horn_closure_derivation(
    imps: &[F2Fact],
    seed: &BTreeSet<VarName>,
) -> (BTreeSet<VarName>, Vec<(VarName, F2Fact)>) {
    let mut set = seed.clone();
    let mut order = Vec::new();
    loop {
        let mut changed = false;
        for f in imps {
            if !set.contains(&f.cons) && f.ante.is_subset(&set) {
                set.insert(f.cons.clone());
                order.push((f.cons.clone(), f.clone()));
                changed = true;
            }
        }
        if !changed {
            break;
        }
    }
    (set, order)
}

/// Builds a trace of `base => target` for every needed closure member,
/// mirroring the repeated (HS)/(W) composition of the completeness
/// argument. Appends to `steps`; `derived` caches facts already
/// established for this base.
fn push_imp_derivation(
    imps: &[F2Fact],
    base: &Conjunction,
    target: &VarName,
    steps: &mut Vec<TraceStep>,
    derived: &mut HashMap<VarName, F2Fact>,
) {
    if derived.contains_key(target) {
        return;
    }
    if base.contains(target) {
        let ident = F2Fact::imp(Conjunction::singleton(target.clone()), target.clone());
        let goal = F2Fact::imp(base.clone(), target.clone());
        steps.push(TraceStep { rule: RuleId::I, premises: vec![], derived: ident.clone() });
        if goal != ident {
            steps.push(TraceStep { rule: RuleId::W, premises: vec![ident], derived: goal.clone() });
        }
        derived.insert(target.clone(), goal);
        return;
    }
    // target entered the closure through some implication; find it via
    // the recorded derivation order.
    let (_, order) = horn_closure_derivation(imps, base.conjuncts());
    let fact = order
        .iter()
        .find(|(v, _)| v == target)
        .map(|(_, f)| f.clone())
        .expect("target is in the closure");
    // Establish base => u for every conjunct u of the firing
    // antecedent, then fold (HS) over them.
    for u in fact.ante.conjuncts() {
        push_imp_derivation(imps, base, u, steps, derived);
    }
    let mut cur = fact.clone();
    for u in fact.ante.conjuncts() {
        let side = derived[u].clone();
        let mut next_ante = cur.ante.without(u);
        next_ante.extend(side.ante.conjuncts().iter().cloned());
        let next = F2Fact::imp(
            Conjunction::new(next_ante).expect("base is nonempty"),
            cur.cons.clone(),
        );
        steps.push(TraceStep {
            rule: RuleId::Hs,
            premises: vec![cur, side],
            derived: next.clone(),
        });
        cur = next;
    }
    debug_assert_eq!(cur.ante, *base);
    derived.insert(target.clone(), cur);
}

fn imp_trace(imps: &[F2Fact], base: &Conjunction, target: &VarName) -> Vec<TraceStep> {
    let mut steps = Vec::new();
    let mut derived = HashMap::new();
    push_imp_derivation(imps, base, target, &mut steps, &mut derived);
    steps
}

/// Drops steps whose conclusions are never used: not needed for the
/// final conclusion, or re-deriving an input fact. Keeps order.
fn prune_steps(steps: Vec<TraceStep>, conclusion: &F2Fact, theory: &[F2Fact]) -> Vec<TraceStep> {
    let mut needed: BTreeSet<F2Fact> = BTreeSet::from([conclusion.clone()]);
    let mut keep = vec![false; steps.len()];
    for (i, step) in steps.iter().enumerate().rev() {
        if needed.contains(&step.derived) && !theory.contains(&step.derived) {
            keep[i] = true;
            needed.remove(&step.derived);
            needed.extend(step.premises.iter().filter(|p| !theory.contains(p)).cloned());
        }
    }
    steps
        .into_iter()
        .zip(keep)
        .filter_map(|(s, k)| k.then_some(s))
        .collect()
}

fn imps_of(facts: &[F2Fact]) -> Vec<F2Fact> {
    facts.iter().filter(|f| f.kind == FactKind::Imp).cloned().collect()
}

fn nonimps_of(facts: &[F2Fact]) -> Vec<F2Fact> {
    facts.iter().filter(|f| f.kind == FactKind::NonImp).cloned().collect()
}

/// Consistency: no nonimplication's consequent may be Horn-derivable
/// from its own antecedent.
pub fn f2_consistency(facts: &[F2Fact]) -> Result<(), Conflict> {
    let imps = imps_of(facts);
    for ni in facts.iter().filter(|f| f.kind == FactKind::NonImp) {
        let closure = horn_closure(&imps, ni.ante.conjuncts());
        if closure.contains(&ni.cons) {
            let conclusion = F2Fact::imp(ni.ante.clone(), ni.cons.clone());
            let steps = prune_steps(imp_trace(&imps, &ni.ante, &ni.cons), &conclusion, &imps);
            return Err(Conflict {
                nonimp: ni.clone(),
                derivation: RuleTrace { system: RuleSystem::F2, steps, conclusion },
            });
        }
    }
    Ok(())
}

fn valuation_from_set(universe: &BTreeSet<VarName>, truthy: &BTreeSet<VarName>) -> Valuation {
    let mut w = Valuation::new();
    for v in universe {
        w.set(v.clone(), truthy.contains(v));
    }
    w
}

/// Worlds witnessing each nonimplication of the theory: the canonical
/// closure valuation of each nonimplication's antecedent.
fn witness_worlds(
    imps: &[F2Fact],
    nonimps: &[F2Fact],
    universe: &BTreeSet<VarName>,
) -> Vec<Valuation> {
    nonimps
        .iter()
        .map(|ni| valuation_from_set(universe, &horn_closure(imps, ni.ante.conjuncts())))
        .collect()
}

fn f2_decide_inner(facts: &[F2Fact], phi: &F2Fact) -> FragmentVerdict {
    let imps = imps_of(facts);
    let nonimps = nonimps_of(facts);
    let mut universe: BTreeSet<VarName> = facts.iter().flat_map(|f| f.vars()).collect();
    universe.extend(phi.vars());

    match phi.kind {
        FactKind::Imp => {
            let closure = horn_closure(&imps, phi.ante.conjuncts());
            if closure.contains(&phi.cons) {
                let steps = prune_steps(imp_trace(&imps, &phi.ante, &phi.cons), phi, facts);
                FragmentVerdict::Consequence(RuleTrace {
                    system: RuleSystem::F2,
                    steps,
                    conclusion: phi.clone(),
                })
            } else {
                // The closure valuation of the query antecedent
                // satisfies the theory's implications, makes the
                // antecedent true, and leaves the consequent false.
                let mut worlds = vec![valuation_from_set(&universe, &closure)];
                worlds.extend(witness_worlds(&imps, &nonimps, &universe));
                FragmentVerdict::NotConsequence(Frame::new(worlds).expect("nonempty"))
            }
        }
        FactKind::NonImp => {
            for ni in &nonimps {
                let cl_d = horn_closure(&imps, ni.ante.conjuncts());
                if phi.ante.is_subset(&cl_d) {
                    let extended = ni.ante.with(phi.cons.clone());
                    let cl_dz = horn_closure(&imps, extended.conjuncts());
                    if cl_dz.contains(&ni.cons) {
                        // Rule (N) with A = ni.ante, X = ni.cons,
                        // Z = phi.cons, B = phi.ante.
                        let mut steps = imp_trace(&imps, &extended, &ni.cons);
                        let middle = F2Fact::imp(extended, ni.cons.clone());
                        let mut premises = vec![ni.clone(), middle];
                        for u in phi.ante.conjuncts() {
                            steps.extend(imp_trace(&imps, &ni.ante, u));
                            premises.push(F2Fact::imp(ni.ante.clone(), u.clone()));
                        }
                        // Sub-derivations may repeat steps; drop exact
                        // duplicates while keeping order.
                        let mut seen = Vec::new();
                        steps.retain(|s| {
                            if seen.contains(&s.derived) {
                                false
                            } else {
                                seen.push(s.derived.clone());
                                true
                            }
                        });
                        steps.push(TraceStep {
                            rule: RuleId::N,
                            premises,
                            derived: phi.clone(),
                        });
                        return FragmentVerdict::Consequence(RuleTrace {
                            system: RuleSystem::F2,
                            steps: prune_steps(steps, phi, facts),
                            conclusion: phi.clone(),
                        });
                    }
                }
            }
            // One world per nonimplication: its antecedent closure when
            // that already falsifies the query antecedent, otherwise
            // the closure extended with the query consequent.
            let mut worlds = Vec::new();
            for ni in &nonimps {
                let cl_d = horn_closure(&imps, ni.ante.conjuncts());
                if !phi.ante.is_subset(&cl_d) {
                    worlds.push(valuation_from_set(&universe, &cl_d));
                } else {
                    let extended = ni.ante.with(phi.cons.clone());
                    let cl_dz = horn_closure(&imps, extended.conjuncts());
                    worlds.push(valuation_from_set(&universe, &cl_dz));
                }
            }
            if worlds.is_empty() {
                // No nonimplications: the all-false valuation satisfies
                // every implication and witnesses nothing.
                worlds.push(valuation_from_set(&universe, &BTreeSet::new()));
            }
            FragmentVerdict::NotConsequence(Frame::new(worlds).expect("nonempty"))
        }
    }
}

/// F2 decision procedure. The theory must be consistent; positive
/// verdicts carry an (I)/(W)/(HS)/(N) derivation, negative ones a
/// countermodel frame built from the closure valuations.
pub fn f2_decide(facts: &[F2Fact], phi: &F2Fact) -> Result<FragmentVerdict, FragmentError> {
    f2_consistency(facts).map_err(FragmentError::Inconsistent)?;
    Ok(f2_decide_inner(facts, phi))
}

fn require_f1(facts: &[F2Fact], phi: &F2Fact) -> Result<(), FragmentError> {
    for f in facts.iter().chain(std::iter::once(phi)) {
        if !f.is_f1() {
            return Err(FragmentError::NotInFragment(f.to_string()));
        }
    }
    Ok(())
}

/// Shortest implication path in the F1 digraph, as a variable chain
/// starting at `from` and ending at `to`.
fn f1_path(imps: &[F2Fact], from: &VarName, to: &VarName) -> Option<Vec<VarName>> {
    let mut prev: HashMap<VarName, VarName> = HashMap::new();
    let mut queue = std::collections::VecDeque::from([from.clone()]);
    let mut seen = BTreeSet::from([from.clone()]);
    while let Some(u) = queue.pop_front() {
        if u == *to {
            let mut path = vec![u.clone()];
            let mut cur = u;
            while let Some(p) = prev.get(&cur) {
                path.push(p.clone());
                cur = p.clone();
            }
            path.reverse();
            return Some(path);
        }
        for f in imps {
            if f.ante.single() == Some(&u) && seen.insert(f.cons.clone()) {
                prev.insert(f.cons.clone(), u.clone());
                queue.push_back(f.cons.clone());
            }
        }
    }
    None
}

/// Derivation of `from => to` by folding (HS) along a path; empty when
/// the edge itself is an input fact.
fn f1_chain_steps(path: &[VarName]) -> Vec<TraceStep> {
    let mut steps = Vec::new();
    if path.len() == 1 {
        let v = &path[0];
        steps.push(TraceStep {
            rule: RuleId::I,
            premises: vec![],
            derived: F2Fact::imp(Conjunction::singleton(v.clone()), v.clone()),
        });
        return steps;
    }
    let edge = |a: &VarName, b: &VarName| F2Fact::imp(Conjunction::singleton(a.clone()), b.clone());
    let mut cur = edge(&path[0], &path[1]);
    for j in 2..path.len() {
        let next_edge = edge(&path[j - 1], &path[j]);
        let next = edge(&path[0], &path[j]);
        steps.push(TraceStep {
            rule: RuleId::Hs,
            premises: vec![cur, next_edge],
            derived: next.clone(),
        });
        cur = next;
    }
    steps
}

/// F1 decision procedure: implication queries are digraph
/// reachability, nonimplication queries a single (N) transfer from
/// some nonimplication of the theory.
pub fn f1_decide(facts: &[F2Fact], phi: &F2Fact) -> Result<FragmentVerdict, FragmentError> {
    require_f1(facts, phi)?;
    f2_consistency(facts).map_err(FragmentError::Inconsistent)?;
    let imps = imps_of(facts);
    let nonimps = nonimps_of(facts);
    let mut universe: BTreeSet<VarName> = facts.iter().flat_map(|f| f.vars()).collect();
    universe.extend(phi.vars());

    match phi.kind {
        FactKind::Imp => {
            let x = phi.ante.single().expect("F1 fact").clone();
            if let Some(path) = f1_path(&imps, &x, &phi.cons) {
                return Ok(FragmentVerdict::Consequence(RuleTrace {
                    system: RuleSystem::F1,
                    steps: prune_steps(f1_chain_steps(&path), phi, facts),
                    conclusion: phi.clone(),
                }));
            }
        }
        FactKind::NonImp => {
            let w = phi.ante.single().expect("F1 fact").clone();
            for ni in &nonimps {
                let x = ni.ante.single().expect("F1 fact").clone();
                let to_w = f1_path(&imps, &x, &w);
                let to_y = f1_path(&imps, &phi.cons, &ni.cons);
                if let (Some(pw), Some(py)) = (to_w, to_y) {
                    let mut steps = f1_chain_steps(&pw);
                    steps.extend(f1_chain_steps(&py));
                    let mut seen = Vec::new();
                    steps.retain(|s| {
                        if seen.contains(&s.derived) {
                            false
                        } else {
                            seen.push(s.derived.clone());
                            true
                        }
                    });
                    steps.push(TraceStep {
                        rule: RuleId::N,
                        premises: vec![
                            ni.clone(),
                            F2Fact::imp(Conjunction::singleton(x), w.clone()),
                            F2Fact::imp(
                                Conjunction::singleton(phi.cons.clone()),
                                ni.cons.clone(),
                            ),
                        ],
                        derived: phi.clone(),
                    });
                    return Ok(FragmentVerdict::Consequence(RuleTrace {
                        system: RuleSystem::F1,
                        steps: prune_steps(steps, phi, facts),
                        conclusion: phi.clone(),
                    }));
                }
            }
        }
    }
    // Countermodels coincide with the F2 construction: the closure of
    // a single variable is its reachability set.
    match f2_decide_inner(facts, phi) {
        FragmentVerdict::NotConsequence(frame) => Ok(FragmentVerdict::NotConsequence(frame)),
        FragmentVerdict::Consequence(_) => {
            unreachable!("F1 and F2 consequence coincide on F1 inputs")
        }
    }
}

/// Enumerates every F2 consequence over antecedent subsets of the
/// variable universe up to `max_ante` conjuncts, minimized under
/// (W)-subsumption: implications keep their weakest antecedent,
/// nonimplications their strongest.
pub fn saturate(
    facts: &[F2Fact],
    vars: &BTreeSet<VarName>,
    max_ante: usize,
) -> Result<Vec<(F2Fact, RuleTrace)>, FragmentError> {
    f2_consistency(facts).map_err(FragmentError::Inconsistent)?;
    let var_list: Vec<VarName> = vars.iter().cloned().collect();
    let mut subsets: Vec<Vec<VarName>> = Vec::new();
    let mut frontier: Vec<Vec<VarName>> = vec![vec![]];
    for _ in 0..max_ante.max(1) {
        let mut next = Vec::new();
        for subset in &frontier {
            let start = subset
                .last()
                .map(|last| var_list.iter().position(|v| v == last).unwrap() + 1)
                .unwrap_or(0);
            for v in &var_list[start..] {
                let mut grown = subset.clone();
                grown.push(v.clone());
                next.push(grown);
            }
        }
        subsets.extend(next.iter().cloned());
        frontier = next;
    }
    subsets.sort_by_key(|s| (s.len(), s.clone()));

    let mut derived: Vec<(F2Fact, RuleTrace)> = Vec::new();
    for subset in &subsets {
        let ante = Conjunction::new(subset.iter().cloned()).expect("nonempty subset");
        for cons in &var_list {
            for kind in [FactKind::Imp, FactKind::NonImp] {
                let candidate = F2Fact { kind, ante: ante.clone(), cons: cons.clone() };
                match f2_decide_inner(facts, &candidate) {
                    FragmentVerdict::Consequence(trace) => derived.push((candidate, trace)),
                    FragmentVerdict::NotConsequence(_) => {}
                }
            }
        }
    }
    // (W)-subsumption: drop an implication when a strict
    // subset-antecedent version is derived, and a nonimplication when
    // a strict superset-antecedent version is.
    let kept: Vec<(F2Fact, RuleTrace)> = derived
        .iter()
        .filter(|(fact, _)| {
            !derived.iter().any(|(other, _)| {
                other.kind == fact.kind
                    && other.cons == fact.cons
                    && other.ante != fact.ante
                    && match fact.kind {
                        FactKind::Imp => other.ante.is_subset(fact.ante.conjuncts()),
                        FactKind::NonImp => fact.ante.is_subset(other.ante.conjuncts()),
                    }
            })
        })
        .cloned()
        .collect();
    let mut kept = kept;
    kept.sort_by_key(|(fact, _)| {
        (
            fact.kind == FactKind::NonImp,
            fact.ante.conjuncts().clone(),
            fact.cons.clone(),
        )
    });
    Ok(kept)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::parser::parse_sformula;
    use crate::semantics::{oracle_consequence, oracle_satisfiable};

    fn fact(s: &str) -> F2Fact {
        to_f2(&parse_sformula(s).unwrap()).expect("in fragment")
    }

    fn facts(lines: &[&str]) -> Vec<F2Fact> {
        lines.iter().map(|l| fact(l)).collect()
    }

    fn ramsey() -> Vec<F2Fact> {
        facts(&[
            "SRT22 & COH => RT22",
            "RT22 => SRT22",
            "RT22 => COH",
            "SRT22 =/> RT22",
            "COH =/> RT22",
        ])
    }

    fn vars(names: &[&str]) -> BTreeSet<VarName> {
        names.iter().map(|n| VarName::new(n).unwrap()).collect()
    }

    #[test]
    fn horn_closure_fires_conjunctive_rule() {
        let imps = imps_of(&ramsey());
        assert_eq!(
            horn_closure(&imps, &vars(&["SRT22", "COH"])),
            vars(&["SRT22", "COH", "RT22"])
        );
        assert_eq!(horn_closure(&imps, &vars(&["COH"])), vars(&["COH"]));
        assert_eq!(horn_closure(&[], &vars(&["X"])), vars(&["X"]));
    }

    #[test]
    fn consistency_direct_clash() {
        let err = f2_consistency(&facts(&["X => Y", "X =/> Y"])).unwrap_err();
        assert_eq!(err.nonimp, fact("X =/> Y"));
        err.derivation.replay(&imps_of(&facts(&["X => Y", "X =/> Y"]))).unwrap();
    }

    #[test]
    fn consistency_of_ramsey_theory() {
        assert!(f2_consistency(&ramsey()).is_ok());
        assert!(oracle_satisfiable(
            &ramsey().iter().map(|f| f.to_sformula()).collect()
        )
        .is_some());
    }

    #[test]
    fn conjunctive_antecedent_does_not_clash_with_partial_nonimp() {
        assert!(f2_consistency(&facts(&["X & Y => Z", "X =/> Z"])).is_ok());
    }

    #[test]
    fn f2_nonimp_consequence_via_rule_n() {
        let gamma = ramsey();
        let phi = fact("COH =/> SRT22");
        match f2_decide(&gamma, &phi).unwrap() {
            FragmentVerdict::Consequence(trace) => {
                trace.replay(&gamma).unwrap();
                let last = trace.steps.last().unwrap();
                assert_eq!(last.rule, RuleId::N);
                assert_eq!(last.premises[0], fact("COH =/> RT22"));
                assert_eq!(last.premises[1], fact("COH & SRT22 => RT22"));
            }
            FragmentVerdict::NotConsequence(_) => panic!("expected consequence"),
        }
        // independently confirmed by the semantic oracle
        let theory = gamma.iter().map(|f| f.to_sformula()).collect();
        assert!(oracle_consequence(&theory, &phi.to_sformula()).is_consequence());
    }

    #[test]
    fn f2_imp_chain_is_consequence() {
        let gamma = facts(&["X => A", "A => B", "B => Y"]);
        match f2_decide(&gamma, &fact("X => Y")).unwrap() {
            FragmentVerdict::Consequence(trace) => trace.replay(&gamma).unwrap(),
            FragmentVerdict::NotConsequence(_) => panic!("expected consequence"),
        }
    }

    #[test]
    fn f2_fork_is_independent_with_countermodel() {
        let gamma = facts(&["A => B", "A => C"]);
        match f2_decide(&gamma, &fact("B => C")).unwrap() {
            FragmentVerdict::NotConsequence(frame) => {
                let theory = gamma.iter().map(|f| f.to_sformula()).collect();
                assert!(frame.satisfies_theory(&theory));
                assert!(!frame.satisfies(&fact("B => C").to_sformula()));
            }
            FragmentVerdict::Consequence(_) => panic!("expected countermodel"),
        }
    }

    #[test]
    fn f1_nonimp_consequence_via_rule_n() {
        let gamma = facts(&["X =/> Y", "X => A", "B => Y"]);
        match f1_decide(&gamma, &fact("A =/> B")).unwrap() {
            FragmentVerdict::Consequence(trace) => {
                assert_eq!(trace.system, RuleSystem::F1);
                trace.replay(&gamma).unwrap();
                let last = trace.steps.last().unwrap();
                assert_eq!(last.rule, RuleId::N);
            }
            FragmentVerdict::NotConsequence(_) => panic!("expected consequence"),
        }
    }

    #[test]
    fn f1_identity_from_empty_theory() {
        match f1_decide(&[], &fact("X => X")).unwrap() {
            FragmentVerdict::Consequence(trace) => {
                assert_eq!(trace.steps.len(), 1);
                assert_eq!(trace.steps[0].rule, RuleId::I);
                trace.replay(&[]).unwrap();
            }
            FragmentVerdict::NotConsequence(_) => panic!("expected consequence"),
        }
    }

    #[test]
    fn f1_reverse_edge_is_not_a_consequence() {
        let gamma = facts(&["A => B"]);
        match f1_decide(&gamma, &fact("B => A")).unwrap() {
            FragmentVerdict::NotConsequence(frame) => {
                let theory = gamma.iter().map(|f| f.to_sformula()).collect();
                assert!(frame.satisfies_theory(&theory));
                assert!(!frame.satisfies(&fact("B => A").to_sformula()));
            }
            FragmentVerdict::Consequence(_) => panic!("expected countermodel"),
        }
    }

    #[test]
    fn inconsistent_theory_is_refused() {
        let gamma = facts(&["X => Y", "X =/> Y"]);
        assert!(matches!(
            f2_decide(&gamma, &fact("X => X")),
            Err(FragmentError::Inconsistent(_))
        ));
    }

    #[test]
    fn saturate_ramsey_strongest_facts() {
        let gamma = ramsey();
        let universe = vars(&["COH", "RT22", "SRT22"]);
        let out = saturate(&gamma, &universe, 1).unwrap();
        let derived: Vec<&F2Fact> = out.iter().map(|(f, _)| f).collect();
        assert!(derived.contains(&&fact("COH =/> SRT22")));
        assert!(derived.contains(&&fact("SRT22 =/> COH")));
        assert!(!derived.contains(&&fact("COH => SRT22")));
        for (_, trace) in &out {
            trace.replay(&gamma).unwrap();
        }
    }

    #[test]
    fn saturate_single_edge() {
        let gamma = facts(&["A => B"]);
        let universe = vars(&["A", "B"]);
        let out = saturate(&gamma, &universe, 1).unwrap();
        let derived: Vec<String> = out.iter().map(|(f, _)| f.to_string()).collect();
        assert_eq!(derived, vec!["A => A", "A => B", "B => B"]);
    }

    #[test]
    fn saturate_empty_theory_over_declared_var() {
        let out = saturate(&[], &vars(&["X"]), 1).unwrap();
        let derived: Vec<String> = out.iter().map(|(f, _)| f.to_string()).collect();
        assert_eq!(derived, vec!["X => X"]);
    }

    #[test]
    fn f1_matches_f2_on_f1_inputs() {
        let gamma = facts(&["X =/> Y", "X => A", "B => Y", "A => B"]);
        // inconsistent: A => B with X => A, B => Y makes X => Y derivable
        assert!(f2_consistency(&gamma).is_err());
        let gamma = facts(&["X =/> Y", "X => A", "B => Y"]);
        for q in ["A =/> B", "A => B", "X => A", "Y => X", "B =/> A"] {
            let phi = fact(q);
            let v1 = f1_decide(&gamma, &phi).unwrap().is_consequence();
            let v2 = f2_decide(&gamma, &phi).unwrap().is_consequence();
            assert_eq!(v1, v2, "disagreement on {q}");
        }
    }

    #[test]
    fn conjunction_canonicalizes() {
        let a = fact("X & Y & X => Z");
        let b = fact("Y & X => Z");
        assert_eq!(a, b);
        assert_eq!(a.to_string(), "X & Y => Z");
    }

    #[test]
    fn out_of_fragment_formulas_are_rejected() {
        assert!(to_f2(&parse_sformula("X | Y => Z").unwrap()).is_none());
        assert!(to_f2(&parse_sformula("X => Y & Z").unwrap()).is_none());
        assert!(to_f2(&parse_sformula("~X => Y").unwrap()).is_none());
        let gamma = facts(&["X & Y => Z"]);
        assert!(matches!(
            f1_decide(&gamma, &fact("X => X")),
            Err(FragmentError::NotInFragment(_))
        ));
    }
}
