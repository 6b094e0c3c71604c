//! Refutational tableau calculus for s-logic.
//!
//! A tableau refutes a theory by decomposing its s-formulas into
//! world-labeled propositional facts until every branch carries a clash
//! `(A,w)` / `(~A,w)`. A fully expanded open branch instead yields a
//! countermodel frame. Nodes store only the formulas they add; the
//! branch label is the union of deltas from the root.

use std::collections::{BTreeSet, HashSet};
use std::fmt;

use serde_json::json;

use crate::formula::{PropFormula, SFormula, SKind, Theory, VarName};
use crate::semantics::{Evidence, Frame, Valuation, Verdict};

/// A world variable `w1, w2, ...` from the world alphabet.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct WorldVar(pub u32);

impl fmt::Display for WorldVar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "w{}", self.0)
    }
}

/// A formula as it appears on a tableau node: either an s-formula or a
/// propositional formula asserted at a particular world.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum TableauFormula {
    S(SFormula),
    Labeled(PropFormula, WorldVar),
}

impl fmt::Display for TableauFormula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TableauFormula::S(s) => write!(f, "{s}"),
            TableauFormula::Labeled(p, w) => write!(f, "({p}, {w})"),
        }
    }
}

/// Names of the inference rules.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RuleName {
    Root,
    Or,
    NotOr,
    And,
    NotAnd,
    Arrow,
    NotArrow,
    SImp,
    SNonImp,
    NotNot,
    Cut,
}

impl RuleName {
    pub fn as_str(self) -> &'static str {
        match self {
            RuleName::Root => "root",
            RuleName::Or => "|",
            RuleName::NotOr => "~|",
            RuleName::And => "&",
            RuleName::NotAnd => "~&",
            RuleName::Arrow => "->",
            RuleName::NotArrow => "~->",
            RuleName::SImp => "=>",
            RuleName::SNonImp => "=/>",
            RuleName::NotNot => "~~",
            RuleName::Cut => "C",
        }
    }
}

impl fmt::Display for RuleName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum RuleError {
    #[error("principal formula is not on the branch")]
    NotOnBranch,
    #[error("rule does not apply to `{0}`")]
    RuleMismatch(String),
    #[error("the strict implication rule needs a target world")]
    MissingWorld,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum TableauError {
    #[error("tableau node budget exceeded after {nodes} nodes")]
    BudgetExceeded { nodes: usize },
    #[error("open branch leaves {atom} undecided at {world}")]
    IncompleteBranch { atom: VarName, world: WorldVar },
}

enum Shape {
    Linear(RuleName, Vec<TableauFormula>),
    Branching(RuleName, TableauFormula, TableauFormula),
    Atomic,
}

fn labeled_shape(f: &PropFormula, w: WorldVar) -> Shape {
    use PropFormula as P;
    use TableauFormula::Labeled;
    match f {
        P::And(a, b) => Shape::Linear(
            RuleName::And,
            vec![Labeled((**a).clone(), w), Labeled((**b).clone(), w)],
        ),
        P::Or(a, b) => Shape::Branching(
            RuleName::Or,
            Labeled((**a).clone(), w),
            Labeled((**b).clone(), w),
        ),
        P::Implies(a, b) => Shape::Branching(
            RuleName::Arrow,
            Labeled(P::not((**a).clone()), w),
            Labeled((**b).clone(), w),
        ),
        P::Not(inner) => match &**inner {
            P::Not(a) => Shape::Linear(RuleName::NotNot, vec![Labeled((**a).clone(), w)]),
            P::Or(a, b) => Shape::Linear(
                RuleName::NotOr,
                vec![
                    Labeled(P::not((**a).clone()), w),
                    Labeled(P::not((**b).clone()), w),
                ],
            ),
            P::Implies(a, b) => Shape::Linear(
                RuleName::NotArrow,
                vec![
                    Labeled((**a).clone(), w),
                    Labeled(P::not((**b).clone()), w),
                ],
            ),
            P::And(a, b) => Shape::Branching(
                RuleName::NotAnd,
                Labeled(P::not((**a).clone()), w),
                Labeled(P::not((**b).clone()), w),
            ),
            P::Var(_) => Shape::Atomic,
        },
        P::Var(_) => Shape::Atomic,
    }
}

/// Smallest world id not mentioned on the label.
fn fresh_world(label: &[TableauFormula]) -> WorldVar {
    let max = label
        .iter()
        .filter_map(|f| match f {
            TableauFormula::Labeled(_, w) => Some(w.0),
            TableauFormula::S(_) => None,
        })
        .max()
        .unwrap_or(0);
    WorldVar(max + 1)
}

/// Applies the rule matching `principal` to a branch label, returning
/// the rule name and one or two successor delta sets.
///
/// The strict implication rule needs a target `world`; the strict
/// nonimplication rule mints a fresh world when `world` is not given.
pub fn apply_rule(
    label: &[TableauFormula],
    principal: &TableauFormula,
    world: Option<WorldVar>,
) -> Result<(RuleName, Vec<Vec<TableauFormula>>), RuleError> {
    if !label.contains(principal) {
        return Err(RuleError::NotOnBranch);
    }
    match principal {
        TableauFormula::S(s) => match s.kind {
            SKind::StrictImp => {
                let w = world.ok_or(RuleError::MissingWorld)?;
                Ok((
                    RuleName::SImp,
                    vec![
                        vec![TableauFormula::Labeled(PropFormula::not(s.lhs.clone()), w)],
                        vec![TableauFormula::Labeled(s.rhs.clone(), w)],
                    ],
                ))
            }
            SKind::StrictNonImp => {
                let v = world.unwrap_or_else(|| fresh_world(label));
                Ok((
                    RuleName::SNonImp,
                    vec![vec![
                        TableauFormula::Labeled(s.lhs.clone(), v),
                        TableauFormula::Labeled(PropFormula::not(s.rhs.clone()), v),
                    ]],
                ))
            }
        },
        TableauFormula::Labeled(f, w) => match labeled_shape(f, *w) {
            Shape::Linear(rule, delta) => Ok((rule, vec![delta])),
            Shape::Branching(rule, left, right) => Ok((rule, vec![vec![left], vec![right]])),
            Shape::Atomic => Err(RuleError::RuleMismatch(principal.to_string())),
        },
    }
}

/// The two successor deltas of the cut rule C on an atom at a world.
pub fn cut_deltas(atom: &VarName, w: WorldVar) -> Vec<Vec<TableauFormula>> {
    let var = PropFormula::Var(atom.clone());
    vec![
        vec![TableauFormula::Labeled(var.clone(), w)],
        vec![TableauFormula::Labeled(PropFormula::not(var), w)],
    ]
}

/// A tableau node. `delta` holds the formulas this node adds to its
/// branch; the full label is the union of deltas from the root.
#[derive(Debug, Clone)]
pub struct TableauNode {
    pub delta: Vec<TableauFormula>,
    pub rule: RuleName,
    pub principal: Option<TableauFormula>,
    pub world: Option<WorldVar>,
    pub children: Vec<TableauNode>,
    /// On closed leaves, the positive half `A` of the clash pair
    /// `(A,w)` / `(~A,w)`.
    pub clash: Option<(PropFormula, WorldVar)>,
    /// True on a fully expanded open leaf.
    pub open: bool,
}

impl TableauNode {
    fn is_closed(&self) -> bool {
        if self.children.is_empty() {
            self.clash.is_some()
        } else {
            self.children.iter().all(TableauNode::is_closed)
        }
    }

    fn to_json(&self) -> serde_json::Value {
        json!({
            "rule": self.rule.as_str(),
            "principal": self.principal.as_ref().map(|p| p.to_string()),
            "added": self.delta.iter().map(|f| f.to_string()).collect::<Vec<_>>(),
            "children": self.children.iter().map(TableauNode::to_json).collect::<Vec<_>>(),
            "clash": self.clash.as_ref().map(|(a, w)| format!("({a}, {w})")),
        })
    }

    fn render_text(&self, out: &mut String, depth: usize) {
        for _ in 0..depth {
            out.push_str("  ");
        }
        if self.rule == RuleName::Root {
            let label: Vec<String> = self.delta.iter().map(|f| f.to_string()).collect();
            out.push_str(&label.join(", "));
        } else {
            out.push('[');
            out.push_str(self.rule.as_str());
            out.push(']');
            if let Some(p) = &self.principal {
                out.push(' ');
                out.push_str(&p.to_string());
            }
            if let (Some(w), RuleName::SImp | RuleName::Cut) = (self.world, self.rule) {
                out.push_str(&format!(" @ {w}"));
            }
            out.push(':');
            for f in &self.delta {
                out.push_str(&format!(" +{f}"));
            }
        }
        if self.clash.is_some() {
            out.push_str("  ⊗");
        } else if self.open {
            out.push_str("  (open)");
        }
        out.push('\n');
        for c in &self.children {
            c.render_text(out, depth + 1);
        }
    }
}

/// A finished tableau for a theory.
#[derive(Debug, Clone)]
pub struct Tableau {
    pub root: TableauNode,
    pub closed: bool,
    /// Label of the first fully expanded open branch, when one exists.
    pub open_branch: Option<Vec<TableauFormula>>,
    /// True when the theory had no strict nonimplication and a world
    /// was seeded before expansion to stand for frame nonemptiness.
    pub used_seed_world: bool,
    pub node_count: usize,
    pub atoms: BTreeSet<VarName>,
}

impl Tableau {
    pub fn is_closed(&self) -> bool {
        self.closed
    }

    pub fn render_text(&self) -> String {
        let mut out = String::new();
        self.root.render_text(&mut out, 0);
        out
    }

    pub fn to_json(&self) -> serde_json::Value {
        self.root.to_json()
    }
}

/// A closed tableau serving as a refutation proof.
#[derive(Debug, Clone)]
pub struct Proof {
    pub tableau: Tableau,
}

impl Proof {
    pub fn render_text(&self) -> String {
        self.tableau.render_text()
    }

    pub fn to_json(&self) -> serde_json::Value {
        self.tableau.to_json()
    }

    /// Checks that every node's delta is reproduced by the rules from
    /// its parent label and that every leaf's clash pair is present.
    pub fn replay(&self) -> Result<(), String> {
        let mut label = Vec::new();
        replay_node(&self.tableau.root, &mut label)
    }
}

fn replay_node(node: &TableauNode, label: &mut Vec<TableauFormula>) -> Result<(), String> {
    let before = label.len();
    label.extend(node.delta.iter().cloned());
    if let Some((a, w)) = &node.clash {
        let pos = TableauFormula::Labeled(a.clone(), *w);
        let neg = TableauFormula::Labeled(PropFormula::not(a.clone()), *w);
        if !label.contains(&pos) || !label.contains(&neg) {
            return Err(format!("clash pair ({a}, {w}) not on branch"));
        }
    } else if node.children.is_empty() && !node.open {
        return Err("leaf is neither closed nor open".into());
    }
    if !node.children.is_empty() {
        if node.children[0].rule == RuleName::Cut {
            let two = node.children.len() == 2;
            let complementary = two && {
                match (&node.children[0].delta[..], &node.children[1].delta[..]) {
                    (
                        [TableauFormula::Labeled(pos @ PropFormula::Var(_), w1)],
                        [TableauFormula::Labeled(PropFormula::Not(neg), w2)],
                    ) => w1 == w2 && **neg == *pos,
                    _ => false,
                }
            };
            if !complementary {
                return Err("cut children are not a complementary atom pair".into());
            }
        } else {
            let first = &node.children[0];
            let principal = first
                .principal
                .as_ref()
                .ok_or("non-root child without principal")?;
            let (rule, deltas) = apply_rule(label, principal, first.world)
                .map_err(|e| format!("rule replay failed: {e}"))?;
            if deltas.len() != node.children.len() {
                return Err("child count does not match the rule".into());
            }
            for (child, delta) in node.children.iter().zip(&deltas) {
                if child.rule != rule || child.delta != *delta {
                    return Err(format!(
                        "child delta of rule {} does not match {}",
                        child.rule, rule
                    ));
                }
            }
        }
        for child in &node.children {
            replay_node(child, label)?;
        }
    }
    label.truncate(before);
    Ok(())
}

/// One undoable mutation of a [`BranchState`], recorded on the trail
/// so sibling branches can share a single mutable state.
enum Change {
    Label,
    World,
    Nonimp(SFormula),
    Imp(SFormula, WorldVar),
    Expanded(PropFormula, WorldVar),
}

#[derive(Default)]
struct BranchState {
    label: Vec<TableauFormula>,
    present: HashSet<TableauFormula>,
    worlds: Vec<WorldVar>,
    expanded_nonimp: HashSet<SFormula>,
    expanded_imp: HashSet<(SFormula, WorldVar)>,
    expanded_labeled: HashSet<(PropFormula, WorldVar)>,
    trail: Vec<Change>,
}

impl BranchState {
    fn mark(&self) -> usize {
        self.trail.len()
    }

    /// Rolls the state back to a trail mark taken before a subtree.
    fn undo_to(&mut self, mark: usize) {
        while self.trail.len() > mark {
            match self.trail.pop().expect("trail entry") {
                Change::Label => {
                    let f = self.label.pop().expect("label entry");
                    self.present.remove(&f);
                }
                Change::World => {
                    self.worlds.pop();
                }
                Change::Nonimp(s) => {
                    self.expanded_nonimp.remove(&s);
                }
                Change::Imp(s, w) => {
                    self.expanded_imp.remove(&(s, w));
                }
                Change::Expanded(f, w) => {
                    self.expanded_labeled.remove(&(f, w));
                }
            }
        }
    }

    fn mark_labeled(&mut self, f: PropFormula, w: WorldVar) {
        if self.expanded_labeled.insert((f.clone(), w)) {
            self.trail.push(Change::Expanded(f, w));
        }
    }

    fn mark_imp(&mut self, s: SFormula, w: WorldVar) {
        if self.expanded_imp.insert((s.clone(), w)) {
            self.trail.push(Change::Imp(s, w));
        }
    }

    /// Adds a formula, returning the clash pair if its complement is
    /// already on the branch.
    fn add(&mut self, f: TableauFormula) -> Option<(PropFormula, WorldVar)> {
        if self.present.contains(&f) {
            return None;
        }
        let clash = match &f {
            TableauFormula::Labeled(p, w) => {
                let (positive, complement) = match p {
                    PropFormula::Not(inner) => (
                        (**inner).clone(),
                        TableauFormula::Labeled((**inner).clone(), *w),
                    ),
                    other => (
                        other.clone(),
                        TableauFormula::Labeled(PropFormula::not(other.clone()), *w),
                    ),
                };
                self.present
                    .contains(&complement)
                    .then_some((positive, *w))
            }
            TableauFormula::S(_) => None,
        };
        self.present.insert(f.clone());
        self.label.push(f);
        self.trail.push(Change::Label);
        clash
    }

    fn has(&self, f: &TableauFormula) -> bool {
        self.present.contains(f)
    }

    /// True when adding `f` would clash with the branch at once.
    fn refutes(&self, f: &TableauFormula) -> bool {
        match f {
            TableauFormula::Labeled(p, w) => {
                let complement = match p {
                    PropFormula::Not(inner) => TableauFormula::Labeled((**inner).clone(), *w),
                    other => TableauFormula::Labeled(PropFormula::not(other.clone()), *w),
                };
                self.present.contains(&complement)
            }
            TableauFormula::S(_) => false,
        }
    }
}

struct Plan {
    rule: RuleName,
    principal: Option<TableauFormula>,
    world: Option<WorldVar>,
    deltas: Vec<Vec<TableauFormula>>,
}

struct Builder {
    atoms: Vec<VarName>,
    next_world: u32,
    node_count: usize,
    budget: usize,
    budget_hit: bool,
    open_label: Option<Vec<TableauFormula>>,
}

impl Builder {
    /// Picks the next rule application on the branch, or None when the
    /// branch is fully expanded. Linear rules run before branching
    /// ones, `=/>` before `=>`, and cuts last; applications whose
    /// result is already on the branch are marked expanded and
    /// skipped. Marks the chosen application as expanded.
    fn next_action(&mut self, st: &mut BranchState) -> Option<Plan> {
        // linear labeled rules
        for i in 0..st.label.len() {
            let (f, w) = match &st.label[i] {
                TableauFormula::Labeled(f, w) => (f.clone(), *w),
                TableauFormula::S(_) => continue,
            };
            if let Shape::Linear(rule, delta) = labeled_shape(&f, w) {
                if st.expanded_labeled.contains(&(f.clone(), w)) {
                    continue;
                }
                st.mark_labeled(f.clone(), w);
                if delta.iter().all(|d| st.has(d)) {
                    continue;
                }
                return Some(Plan {
                    rule,
                    principal: Some(TableauFormula::Labeled(f, w)),
                    world: Some(w),
                    deltas: vec![delta],
                });
            }
        }
        // strict nonimplications, each minting a fresh world
        for i in 0..st.label.len() {
            let s = match &st.label[i] {
                TableauFormula::S(s) if s.kind == SKind::StrictNonImp => s.clone(),
                _ => continue,
            };
            if st.expanded_nonimp.contains(&s) {
                continue;
            }
            st.expanded_nonimp.insert(s.clone());
            st.trail.push(Change::Nonimp(s.clone()));
            let v = WorldVar(self.next_world);
            self.next_world += 1;
            st.worlds.push(v);
            st.trail.push(Change::World);
            let delta = vec![
                TableauFormula::Labeled(s.lhs.clone(), v),
                TableauFormula::Labeled(PropFormula::not(s.rhs.clone()), v),
            ];
            return Some(Plan {
                rule: RuleName::SNonImp,
                principal: Some(TableauFormula::S(s)),
                world: Some(v),
                deltas: vec![delta],
            });
        }
        // Branching rules: labeled branchings and strict implications
        // at every world. A candidate with an immediately clashing side
        // is preferred — that side closes as a single leaf, so the
        // application propagates the other side instead of doubling
        // the search. Only the chosen candidate is marked expanded.
        enum Key {
            Labeled(PropFormula, WorldVar),
            Imp(SFormula, WorldVar),
        }
        let mut fallback: Option<(Key, Plan)> = None;
        for i in 0..st.label.len() {
            let (f, w) = match &st.label[i] {
                TableauFormula::Labeled(f, w) => (f.clone(), *w),
                TableauFormula::S(_) => continue,
            };
            if let Shape::Branching(rule, left, right) = labeled_shape(&f, w) {
                if st.expanded_labeled.contains(&(f.clone(), w)) {
                    continue;
                }
                if st.has(&left) || st.has(&right) {
                    st.mark_labeled(f.clone(), w);
                    continue;
                }
                let unit = st.refutes(&left) || st.refutes(&right);
                let plan = Plan {
                    rule,
                    principal: Some(TableauFormula::Labeled(f.clone(), w)),
                    world: Some(w),
                    deltas: vec![vec![left], vec![right]],
                };
                if unit {
                    st.mark_labeled(f, w);
                    return Some(plan);
                }
                if fallback.is_none() {
                    fallback = Some((Key::Labeled(f, w), plan));
                }
            }
        }
        for i in 0..st.label.len() {
            let s = match &st.label[i] {
                TableauFormula::S(s) if s.kind == SKind::StrictImp => s.clone(),
                _ => continue,
            };
            for wi in 0..st.worlds.len() {
                let w = st.worlds[wi];
                if st.expanded_imp.contains(&(s.clone(), w)) {
                    continue;
                }
                let left = TableauFormula::Labeled(PropFormula::not(s.lhs.clone()), w);
                let right = TableauFormula::Labeled(s.rhs.clone(), w);
                if st.has(&left) || st.has(&right) {
                    st.mark_imp(s.clone(), w);
                    continue;
                }
                let unit = st.refutes(&left) || st.refutes(&right);
                let plan = Plan {
                    rule: RuleName::SImp,
                    principal: Some(TableauFormula::S(s.clone())),
                    world: Some(w),
                    deltas: vec![vec![left], vec![right]],
                };
                if unit {
                    st.mark_imp(s, w);
                    return Some(plan);
                }
                if fallback.is_none() {
                    fallback = Some((Key::Imp(s.clone(), w), plan));
                }
            }
        }
        if let Some((key, plan)) = fallback {
            match key {
                Key::Labeled(f, w) => st.mark_labeled(f, w),
                Key::Imp(s, w) => st.mark_imp(s, w),
            }
            return Some(plan);
        }
        // cuts on undecided (atom, world) pairs, last
        for atom in &self.atoms {
            let var = PropFormula::Var(atom.clone());
            for wi in 0..st.worlds.len() {
                let w = st.worlds[wi];
                let pos = TableauFormula::Labeled(var.clone(), w);
                let neg = TableauFormula::Labeled(PropFormula::not(var.clone()), w);
                if st.has(&pos) || st.has(&neg) {
                    continue;
                }
                return Some(Plan {
                    rule: RuleName::Cut,
                    principal: None,
                    world: Some(w),
                    deltas: cut_deltas(atom, w),
                });
            }
        }
        None
    }

    /// Expands one node depth-first on the shared branch state,
    /// rolling the state back to its trail mark before returning.
    fn build_node(
        &mut self,
        st: &mut BranchState,
        delta: Vec<TableauFormula>,
        rule: RuleName,
        principal: Option<TableauFormula>,
        world: Option<WorldVar>,
    ) -> TableauNode {
        self.node_count += 1;
        let mark = st.mark();
        let mut node = TableauNode {
            delta: delta.clone(),
            rule,
            principal,
            world,
            children: Vec::new(),
            clash: None,
            open: false,
        };
        for f in delta {
            if let Some(clash) = st.add(f) {
                node.clash = Some(clash);
                st.undo_to(mark);
                return node;
            }
        }
        if self.open_label.is_some() {
            st.undo_to(mark);
            return node;
        }
        if self.node_count >= self.budget {
            self.budget_hit = true;
            st.undo_to(mark);
            return node;
        }
        match self.next_action(st) {
            None => {
                node.open = true;
                self.open_label = Some(st.label.clone());
            }
            Some(plan) => {
                for d in plan.deltas {
                    node.children.push(self.build_node(
                        st,
                        d,
                        plan.rule,
                        plan.principal.clone(),
                        plan.world,
                    ));
                }
            }
        }
        st.undo_to(mark);
        node
    }
}

fn subformula_count(f: &PropFormula) -> usize {
    match f {
        PropFormula::Var(_) => 1,
        PropFormula::Not(a) => 1 + subformula_count(a),
        PropFormula::And(a, b) | PropFormula::Or(a, b) | PropFormula::Implies(a, b) => {
            1 + subformula_count(a) + subformula_count(b)
        }
    }
}

fn node_budget(theory: &Theory) -> usize {
    let subformulas: usize = theory
        .iter()
        .map(|s| subformula_count(&s.lhs) + subformula_count(&s.rhs))
        .sum();
    let worlds = theory
        .iter()
        .filter(|s| s.kind == SKind::StrictNonImp)
        .count()
        + 1;
    2_000 * (subformulas + 1) * (worlds + 1)
}

/// Builds the systematic tableau for a finite theory.
///
/// On every fully expanded open branch, every compound labeled formula
/// has had its rule applied, every strict nonimplication has minted its
/// world, every strict implication has been expanded at every world on
/// the branch, and the cut rule has decided every (atom, world) pair.
/// Branches close eagerly; expansion stops at the first fully expanded
/// open branch, which already decides the tableau.
pub fn build_systematic(theory: &Theory) -> Result<Tableau, TableauError> {
    let atoms = theory.vars();
    let has_nonimp = theory.iter().any(|s| s.kind == SKind::StrictNonImp);
    let mut builder = Builder {
        atoms: atoms.iter().cloned().collect(),
        next_world: 1,
        node_count: 0,
        budget: node_budget(theory),
        budget_hit: false,
        open_label: None,
    };
    let mut st = BranchState::default();
    let mut used_seed_world = false;
    if !has_nonimp {
        st.worlds.push(WorldVar(1));
        builder.next_world = 2;
        used_seed_world = true;
    }
    let root_delta: Vec<TableauFormula> =
        theory.iter().cloned().map(TableauFormula::S).collect();
    let root = builder.build_node(&mut st, root_delta, RuleName::Root, None, None);
    if builder.budget_hit {
        return Err(TableauError::BudgetExceeded { nodes: builder.node_count });
    }
    let closed = root.is_closed();
    Ok(Tableau {
        root,
        closed,
        open_branch: builder.open_label,
        used_seed_world,
        node_count: builder.node_count,
        atoms,
    })
}

/// Reads a countermodel off a fully expanded open branch: one
/// valuation per world on the branch, with each atom's polarity taken
/// from the cut-decided literal at that world.
pub fn extract_frame(
    label: &[TableauFormula],
    atoms: &BTreeSet<VarName>,
) -> Result<Frame, TableauError> {
    let worlds: BTreeSet<WorldVar> = label
        .iter()
        .filter_map(|f| match f {
            TableauFormula::Labeled(_, w) => Some(*w),
            TableauFormula::S(_) => None,
        })
        .collect();
    if worlds.is_empty() {
        // Empty theory with the seeded world: the all-false valuation.
        return Ok(Frame::single(Valuation::new()));
    }
    let mut valuations = Vec::with_capacity(worlds.len());
    for w in worlds {
        let mut val = Valuation::new();
        for atom in atoms {
            let var = PropFormula::Var(atom.clone());
            let pos = TableauFormula::Labeled(var.clone(), w);
            let neg = TableauFormula::Labeled(PropFormula::not(var), w);
            if label.contains(&pos) {
                val.set(atom.clone(), true);
            } else if label.contains(&neg) {
                val.set(atom.clone(), false);
            } else {
                return Err(TableauError::IncompleteBranch { atom: atom.clone(), world: w });
            }
        }
        valuations.push(val);
    }
    Ok(Frame::new(valuations).expect("at least one world"))
}

/// The tableau decision procedure: `phi` is a strict consequence of
/// the theory iff the systematic tableau for the theory plus the
/// strict negation of `phi` closes. An open tableau yields a
/// countermodel frame from its first open branch.
pub fn decide(theory: &Theory, phi: &SFormula) -> Result<Verdict, TableauError> {
    let augmented = theory.with_negated(phi);
    let tableau = build_systematic(&augmented)?;
    if tableau.closed {
        Ok(Verdict::Consequence(Evidence::Tableau(Proof { tableau })))
    } else {
        let label = tableau
            .open_branch
            .as_ref()
            .expect("open tableau has an open branch");
        let frame = extract_frame(label, &tableau.atoms)?;
        Ok(Verdict::NotConsequence(frame))
    }
}
