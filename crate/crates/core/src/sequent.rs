//! The sequent calculi G, K and D: rule tables, node checking, backward
//! proof search, and the structural transformations on K and D proofs.
//!
//! Left rules name the context formula they act on in the node's
//! `principal` annotation. Eigenvariables and witnesses are annotated as in
//! natural deduction.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::string::{String, ToString};
use alloc::vec;
use alloc::vec::Vec;

use crate::calculus::{
    conclusion_sequent, expect_premise, expect_premises, fresh, principal, witness, CalculusId, Major, Order, Reason,
    RuleInfo, RuleTable, TableData,
};
use crate::order::multiset_order_less;
use crate::proof::{Proof, RuleInstance};
use crate::syntax::{fresh_name, Formula, Sequent, Term};

const COMMON: [&str; 10] = [
    "axiom",
    "top_right",
    "bot_left",
    "and_left",
    "and_right",
    "or_left",
    "or_right_1",
    "or_right_2",
    "imp_right",
    "forall_right",
];
const QUANT: [&str; 2] = ["exists_left", "exists_right"];

pub fn g_rule_table() -> RuleTable {
    let mut rules: Vec<RuleInfo> =
        COMMON.iter().chain(&QUANT).chain(&["imp_left", "forall_left"]).map(|r| RuleInfo::intro(*r)).collect();
    rules.push(RuleInfo::non_intro("contraction", Major::All));
    RuleTable::new(CalculusId::G, Order::Size, rules, TableData::Plain)
}

pub fn k_rule_table() -> RuleTable {
    let mut rules: Vec<RuleInfo> = COMMON.iter().chain(&QUANT).map(|r| RuleInfo::intro(*r)).collect();
    rules.push(RuleInfo::non_intro("contr_imp_left", Major::Leftmost));
    rules.push(RuleInfo::non_intro("contr_forall_left", Major::Leftmost));
    RuleTable::new(CalculusId::K, Order::Size, rules, TableData::Plain)
}

/// D's left implication rules for a universal or existential antecedent
/// keep the implication in their first premise, so they do not decrease
/// the multiset order and are classified with `contr_forall_left`.
const D_NON_INTRO: [&str; 3] = ["imp_left_forall", "imp_left_exists", "contr_forall_left"];

pub fn d_rule_table() -> RuleTable {
    let extra = ["imp_left_axiom", "imp_left_top", "imp_left_and", "imp_left_or_1", "imp_left_or_2", "imp_left_imp"];
    let mut rules: Vec<RuleInfo> = COMMON.iter().chain(&QUANT).chain(&extra).map(|r| RuleInfo::intro(*r)).collect();
    for r in D_NON_INTRO {
        rules.push(RuleInfo::non_intro(r, Major::Leftmost));
    }
    RuleTable::new(CalculusId::D, Order::Multiset, rules, TableData::Plain)
}

pub fn rule_table(calculus: CalculusId) -> Option<RuleTable> {
    match calculus {
        CalculusId::G => Some(g_rule_table()),
        CalculusId::K => Some(k_rule_table()),
        CalculusId::D => Some(d_rule_table()),
        _ => None,
    }
}

/// The principal formula, checked to be in the context.
fn left_principal(node: &Proof) -> Result<&Formula, Reason> {
    let p = principal(node)?;
    if conclusion_sequent(node)?.contains(p) {
        Ok(p)
    } else {
        Err(Reason::shape("principal formula is not in the context"))
    }
}

fn not_free(x: &str, fs: &[&Formula], s: &Sequent) -> Result<(), Reason> {
    if s.context_has_free_var(x) || fs.iter().any(|f| f.has_free_var(x)) {
        Err(Reason::side("eigenvariable occurs free"))
    } else {
        Ok(())
    }
}

fn imp_parts(f: &Formula) -> Result<(&Formula, &Formula), Reason> {
    match f {
        Formula::Imp(a, b) => Ok((a, b)),
        _ => Err(Reason::shape("principal is not an implication")),
    }
}

pub(crate) fn check_node(_calculus: CalculusId, node: &Proof) -> Result<(), Reason> {
    let s = conclusion_sequent(node)?;
    let goal = s.goal();
    match node.rule_id() {
        "axiom" => {
            expect_premises(node, 0)?;
            if !matches!(goal, Formula::Atom(_)) {
                return Err(Reason::side("axiom formula is not atomic"));
            }
            if !s.contains(goal) {
                return Err(Reason::shape("goal is not among the hypotheses"));
            }
        }
        "top_right" => {
            expect_premises(node, 0)?;
            if *goal != Formula::Top {
                return Err(Reason::shape("goal is not top"));
            }
        }
        "bot_left" => {
            expect_premises(node, 0)?;
            if !s.contains(&Formula::Bot) {
                return Err(Reason::shape("bot is not among the hypotheses"));
            }
        }
        "contraction" => {
            expect_premises(node, 1)?;
            let a = left_principal(node)?;
            expect_premise(node, 0, &s.with([a.clone()]))?;
        }
        "and_left" => {
            expect_premises(node, 1)?;
            let p = left_principal(node)?;
            let Formula::And(a, b) = p else { return Err(Reason::shape("principal is not a conjunction")) };
            expect_premise(node, 0, &replaced(s, p, [(**a).clone(), (**b).clone()]))?;
        }
        "and_right" => {
            expect_premises(node, 2)?;
            let Formula::And(a, b) = goal else { return Err(Reason::shape("goal is not a conjunction")) };
            expect_premise(node, 0, &s.with_goal((**a).clone()))?;
            expect_premise(node, 1, &s.with_goal((**b).clone()))?;
        }
        "or_left" => {
            expect_premises(node, 2)?;
            let p = left_principal(node)?;
            let Formula::Or(a, b) = p else { return Err(Reason::shape("principal is not a disjunction")) };
            expect_premise(node, 0, &replaced(s, p, [(**a).clone()]))?;
            expect_premise(node, 1, &replaced(s, p, [(**b).clone()]))?;
        }
        "or_right_1" | "or_right_2" => {
            expect_premises(node, 1)?;
            let Formula::Or(a, b) = goal else { return Err(Reason::shape("goal is not a disjunction")) };
            let chosen = if node.rule_id() == "or_right_1" { a } else { b };
            expect_premise(node, 0, &s.with_goal((**chosen).clone()))?;
        }
        "imp_left" => {
            expect_premises(node, 2)?;
            let p = left_principal(node)?;
            let (a, b) = imp_parts(p)?;
            let rest = s.without(p).expect("principal present");
            expect_premise(node, 0, &rest.with_goal(a.clone()))?;
            expect_premise(node, 1, &rest.with([b.clone()]))?;
        }
        "contr_imp_left" => {
            expect_premises(node, 2)?;
            let p = left_principal(node)?;
            let (a, b) = imp_parts(p)?;
            expect_premise(node, 0, &s.with_goal(a.clone()))?;
            expect_premise(node, 1, &replaced(s, p, [b.clone()]))?;
        }
        "imp_right" => {
            expect_premises(node, 1)?;
            let (a, b) = imp_parts(goal).map_err(|_| Reason::shape("goal is not an implication"))?;
            expect_premise(node, 0, &s.with_goal(b.clone()).with([a.clone()]))?;
        }
        "forall_left" | "contr_forall_left" => {
            expect_premises(node, 1)?;
            let p = left_principal(node)?;
            let Formula::Forall(x, a) = p else { return Err(Reason::shape("principal is not universal")) };
            let inst = a.subst(x, witness(node)?);
            let expected = if node.rule_id() == "forall_left" { replaced(s, p, [inst]) } else { s.with([inst]) };
            expect_premise(node, 0, &expected)?;
        }
        "forall_right" => {
            expect_premises(node, 1)?;
            let Formula::Forall(x, a) = goal else { return Err(Reason::shape("goal is not universal")) };
            let y = fresh(node)?;
            let outer = if y == x { vec![] } else { vec![goal] };
            not_free(y, &outer, s)?;
            expect_premise(node, 0, &s.with_goal(a.subst(x, &Term::var(y))))?;
        }
        "exists_left" => {
            expect_premises(node, 1)?;
            let p = left_principal(node)?;
            let Formula::Exists(x, a) = p else { return Err(Reason::shape("principal is not existential")) };
            let y = fresh(node)?;
            not_free(y, &[goal], &s.without(p).expect("principal present"))?;
            if y != x && p.has_free_var(y) {
                return Err(Reason::side("eigenvariable occurs free"));
            }
            expect_premise(node, 0, &replaced(s, p, [a.subst(x, &Term::var(y))]))?;
        }
        "exists_right" => {
            expect_premises(node, 1)?;
            let Formula::Exists(x, a) = goal else { return Err(Reason::shape("goal is not existential")) };
            expect_premise(node, 0, &s.with_goal(a.subst(x, witness(node)?)))?;
        }
        "imp_left_axiom" => {
            expect_premises(node, 1)?;
            let p = left_principal(node)?;
            let (c, b) = imp_parts(p)?;
            if !matches!(c, Formula::Atom(_)) {
                return Err(Reason::shape("antecedent is not atomic"));
            }
            let rest = s.without(p).expect("principal present");
            if !rest.contains(c) {
                return Err(Reason::side("antecedent is not among the hypotheses"));
            }
            expect_premise(node, 0, &rest.with([b.clone()]))?;
        }
        "imp_left_top" => {
            expect_premises(node, 1)?;
            let p = left_principal(node)?;
            let (c, b) = imp_parts(p)?;
            if *c != Formula::Top {
                return Err(Reason::shape("antecedent is not top"));
            }
            expect_premise(node, 0, &replaced(s, p, [b.clone()]))?;
        }
        "imp_left_and" => {
            expect_premises(node, 3)?;
            let p = left_principal(node)?;
            let (cd, b) = imp_parts(p)?;
            let Formula::And(c, d) = cd else { return Err(Reason::shape("antecedent is not a conjunction")) };
            let rest = s.without(p).expect("principal present");
            expect_premise(node, 0, &rest.with([Formula::imp((**c).clone(), b.clone())]).with_goal((**c).clone()))?;
            expect_premise(node, 1, &rest.with([Formula::imp((**d).clone(), b.clone())]).with_goal((**d).clone()))?;
            expect_premise(node, 2, &rest.with([b.clone()]))?;
        }
        "imp_left_or_1" | "imp_left_or_2" => {
            expect_premises(node, 2)?;
            let p = left_principal(node)?;
            let (cd, b) = imp_parts(p)?;
            let Formula::Or(c, d) = cd else { return Err(Reason::shape("antecedent is not a disjunction")) };
            let rest = s.without(p).expect("principal present");
            let chosen = if node.rule_id() == "imp_left_or_1" { c } else { d };
            let hyps = [Formula::imp((**c).clone(), b.clone()), Formula::imp((**d).clone(), b.clone())];
            expect_premise(node, 0, &rest.with(hyps).with_goal((**chosen).clone()))?;
            expect_premise(node, 1, &rest.with([b.clone()]))?;
        }
        "imp_left_imp" => {
            expect_premises(node, 2)?;
            let p = left_principal(node)?;
            let (cd, b) = imp_parts(p)?;
            let Formula::Imp(c, d) = cd else { return Err(Reason::shape("antecedent is not an implication")) };
            let rest = s.without(p).expect("principal present");
            let hyps = [Formula::imp((**d).clone(), b.clone()), (**c).clone()];
            expect_premise(node, 0, &rest.with(hyps).with_goal((**d).clone()))?;
            expect_premise(node, 1, &rest.with([b.clone()]))?;
        }
        "imp_left_forall" => {
            expect_premises(node, 2)?;
            let p = left_principal(node)?;
            let (cx, b) = imp_parts(p)?;
            let Formula::Forall(x, c) = cx else { return Err(Reason::shape("antecedent is not universal")) };
            let y = fresh(node)?;
            let rest = s.without(p).expect("principal present");
            not_free(y, &[b], &rest)?;
            if y != x && cx.has_free_var(y) {
                return Err(Reason::side("eigenvariable occurs free"));
            }
            expect_premise(node, 0, &s.with_goal(c.subst(x, &Term::var(y))))?;
            expect_premise(node, 1, &rest.with([b.clone()]))?;
        }
        "imp_left_exists" => {
            expect_premises(node, 2)?;
            let p = left_principal(node)?;
            let (cx, b) = imp_parts(p)?;
            let Formula::Exists(x, c) = cx else { return Err(Reason::shape("antecedent is not existential")) };
            let rest = s.without(p).expect("principal present");
            expect_premise(node, 0, &s.with_goal(c.subst(x, witness(node)?)))?;
            expect_premise(node, 1, &rest.with([b.clone()]))?;
        }
        other => return Err(Reason::UnknownRule(other.to_string())),
    }
    Ok(())
}

fn replaced(s: &Sequent, old: &Formula, new: impl IntoIterator<Item = Formula>) -> Sequent {
    s.replace(old, new).expect("formula present in context")
}

/// Limits for backward proof search.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SearchBudget {
    pub max_depth: usize,
    /// Closed terms tried as witnesses, besides the free variables of the
    /// sequent at hand.
    pub witness_universe: Vec<Term>,
    /// Per-branch loop check on the set of formulas of a sequent (G and K).
    pub history: bool,
    /// How often one universal hypothesis may be instantiated on a branch;
    /// in G also how often an implication is used when quantifiers occur.
    pub reuse_cap: usize,
    /// Sequents expanded before the search gives up.
    pub max_steps: usize,
}

impl Default for SearchBudget {
    fn default() -> Self {
        SearchBudget { max_depth: 256, witness_universe: Vec::new(), history: true, reuse_cap: 3, max_steps: 200_000 }
    }
}

impl SearchBudget {
    /// Witnesses: closed subterms of the sequent plus one fresh constant.
    pub fn for_sequent(s: &Sequent) -> SearchBudget {
        let mut terms = BTreeSet::new();
        s.formulas().for_each(|f| f.collect_closed_subterms(&mut terms));
        let mut universe: Vec<Term> = terms.into_iter().collect();
        universe.push(Term::constant(fresh_name("c", &s.names())));
        SearchBudget { witness_universe: universe, ..SearchBudget::default() }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Outcome {
    Proved(Proof),
    Unprovable,
    BudgetExhausted,
}

impl Outcome {
    pub fn proof(&self) -> Option<&Proof> {
        match self {
            Outcome::Proved(p) => Some(p),
            _ => None,
        }
    }

    pub fn is_proved(&self) -> bool {
        matches!(self, Outcome::Proved(_))
    }

    /// `Some(provable)` when the outcome is definitive.
    pub fn decided(&self) -> Option<bool> {
        match self {
            Outcome::Proved(_) => Some(true),
            Outcome::Unprovable => Some(false),
            Outcome::BudgetExhausted => None,
        }
    }
}

/// Context as a set, everything up to bound-variable renaming.
fn set_key(s: &Sequent) -> Sequent {
    let mut ctx: Vec<Formula> = s.context().iter().map(Formula::canonical).collect();
    ctx.sort();
    ctx.dedup();
    Sequent::new(ctx, s.goal().canonical())
}

fn node(rule: RuleInstance, s: &Sequent, premises: Vec<Proof>) -> Proof {
    Proof::new(rule, s.clone(), premises)
}

fn distinct<'a>(fs: &'a [Formula]) -> Vec<&'a Formula> {
    let mut out: Vec<&Formula> = Vec::new();
    for f in fs {
        if !out.iter().any(|g| g.alpha_eq(f)) {
            out.push(f);
        }
    }
    out
}

struct Searcher<'a> {
    calculus: CalculusId,
    budget: &'a SearchBudget,
    /// Set when a failure may be due to the budget rather than the sequent.
    incomplete: bool,
    steps: usize,
    history: BTreeSet<Sequent>,
    uses: Vec<Formula>,
    /// Proofs of propositional sequents already found.
    proved: BTreeMap<Sequent, Proof>,
    failed: BTreeSet<Sequent>,
}

impl<'a> Searcher<'a> {
    fn new(calculus: CalculusId, budget: &'a SearchBudget) -> Self {
        Searcher {
            calculus,
            budget,
            incomplete: false,
            steps: 0,
            history: BTreeSet::new(),
            uses: Vec::new(),
            proved: BTreeMap::new(),
            failed: BTreeSet::new(),
        }
    }

    fn witnesses(&self, s: &Sequent) -> Vec<Term> {
        let mut out = self.budget.witness_universe.clone();
        for v in s.free_vars() {
            let t = Term::var(v);
            if !out.contains(&t) {
                out.push(t);
            }
        }
        out
    }

    fn eigenvariable(&self, base: &str, s: &Sequent) -> String {
        let mut avoid = s.names();
        self.budget.witness_universe.iter().for_each(|t| t.collect_names(&mut avoid));
        fresh_name(base, &avoid)
    }

    fn closing(&self, s: &Sequent) -> Option<Proof> {
        let goal = s.goal();
        if matches!(goal, Formula::Atom(_)) && s.contains(goal) {
            return Some(node(RuleInstance::new("axiom").on(goal.clone()), s, vec![]));
        }
        if *goal == Formula::Top {
            return Some(node(RuleInstance::new("top_right"), s, vec![]));
        }
        if s.contains(&Formula::Bot) {
            return Some(node(RuleInstance::new("bot_left").on(Formula::Bot), s, vec![]));
        }
        None
    }

    fn run(&mut self, s: &Sequent) -> Outcome {
        let found = match self.calculus {
            CalculusId::D => self.prove_d(s, 0),
            _ => self.prove_gk(s, 0),
        };
        match found {
            Some(p) => Outcome::Proved(p),
            None if self.incomplete => Outcome::BudgetExhausted,
            None => Outcome::Unprovable,
        }
    }

    /// All premises proved, or `None`.
    fn all(&mut self, premises: &[Sequent], depth: usize, d: bool) -> Option<Vec<Proof>> {
        let mut out = Vec::with_capacity(premises.len());
        for p in premises {
            out.push(if d { self.prove_d(p, depth + 1)? } else { self.prove_gk(p, depth + 1)? });
        }
        Some(out)
    }

    /// The first invertible rule that applies, as rule and premises.
    fn invertible(&self, s: &Sequent, d: bool) -> Option<(RuleInstance, Vec<Sequent>)> {
        let goal = s.goal();
        for f in s.context() {
            if let Formula::And(a, b) = f {
                return Some((RuleInstance::new("and_left").on(f.clone()), vec![replaced(s, f, [(**a).clone(), (**b).clone()])]));
            }
        }
        if let Formula::And(a, b) = goal {
            return Some((RuleInstance::new("and_right"), vec![s.with_goal((**a).clone()), s.with_goal((**b).clone())]));
        }
        if let Formula::Imp(a, b) = goal {
            return Some((RuleInstance::new("imp_right"), vec![s.with_goal((**b).clone()).with([(**a).clone()])]));
        }
        for f in s.context() {
            if let Formula::Or(a, b) = f {
                let prem = vec![replaced(s, f, [(**a).clone()]), replaced(s, f, [(**b).clone()])];
                return Some((RuleInstance::new("or_left").on(f.clone()), prem));
            }
        }
        for f in s.context() {
            if let Formula::Exists(x, a) = f {
                let y = self.eigenvariable(x, s);
                let prem = replaced(s, f, [a.subst(x, &Term::var(y.clone()))]);
                return Some((RuleInstance::new("exists_left").on(f.clone()).with_fresh(y), vec![prem]));
            }
        }
        if let Formula::Forall(x, a) = goal {
            let y = self.eigenvariable(x, s);
            let prem = s.with_goal(a.subst(x, &Term::var(y.clone())));
            return Some((RuleInstance::new("forall_right").with_fresh(y), vec![prem]));
        }
        if d {
            for f in s.context() {
                let Formula::Imp(c, b) = f else { continue };
                let rest = s.without(f).expect("present");
                if matches!(**c, Formula::Atom(_)) && rest.contains(c) {
                    return Some((RuleInstance::new("imp_left_axiom").on(f.clone()), vec![rest.with([(**b).clone()])]));
                }
                if **c == Formula::Top {
                    return Some((RuleInstance::new("imp_left_top").on(f.clone()), vec![rest.with([(**b).clone()])]));
                }
            }
        }
        None
    }

    fn prove_gk(&mut self, s: &Sequent, depth: usize) -> Option<Proof> {
        if let Some(p) = self.proved.get(s) {
            return Some(p.clone());
        }
        if let Some(p) = self.closing(s) {
            return Some(p);
        }
        self.steps += 1;
        if depth >= self.budget.max_depth || self.steps > self.budget.max_steps {
            self.incomplete = true;
            return None;
        }
        let key = set_key(s);
        if self.budget.history {
            if self.history.contains(&key) {
                return None;
            }
            self.history.insert(key.clone());
        }
        let result = self.expand_gk(s, depth);
        if self.budget.history {
            self.history.remove(&key);
        }
        if let Some(p) = result.as_ref().filter(|_| s.is_propositional()) {
            self.proved.insert(s.clone(), p.clone());
        }
        result
    }

    fn expand_gk(&mut self, s: &Sequent, depth: usize) -> Option<Proof> {
        if let Some((rule, premises)) = self.invertible(s, false) {
            let proofs = self.all(&premises, depth, false)?;
            return Some(node(rule, s, proofs));
        }
        let goal = s.goal().clone();
        if let Formula::Or(a, b) = &goal {
            for (rule, g) in [("or_right_1", a), ("or_right_2", b)] {
                if let Some(p) = self.prove_gk(&s.with_goal((**g).clone()), depth + 1) {
                    return Some(node(RuleInstance::new(rule), s, vec![p]));
                }
            }
        }
        if let Formula::Exists(x, a) = &goal {
            self.incomplete = true;
            for t in self.witnesses(s) {
                if let Some(p) = self.prove_gk(&s.with_goal(a.subst(x, &t)), depth + 1) {
                    return Some(node(RuleInstance::new("exists_right").with_witness(t), s, vec![p]));
                }
            }
        }
        let g = self.calculus == CalculusId::G;
        let capped = g && !s.is_propositional();
        for f in distinct(s.context()) {
            let Formula::Imp(a, b) = f else { continue };
            if capped {
                self.incomplete = true;
                if self.uses.iter().filter(|u| u.alpha_eq(f)).count() >= self.budget.reuse_cap {
                    continue;
                }
                self.uses.push(f.clone());
            }
            let left = s.with_goal((**a).clone());
            let right = if g { s.with([(**b).clone()]) } else { replaced(s, f, [(**b).clone()]) };
            let found = self.all(&[left, right], depth, false);
            if capped {
                self.uses.pop();
            }
            let Some(proofs) = found else { continue };
            return Some(if g {
                let doubled = s.with([f.clone()]);
                let inner = node(RuleInstance::new("imp_left").on(f.clone()), &doubled, proofs);
                node(RuleInstance::new("contraction").on(f.clone()), s, vec![inner])
            } else {
                node(RuleInstance::new("contr_imp_left").on(f.clone()), s, proofs)
            });
        }
        for f in distinct(s.context()) {
            let Formula::Forall(x, a) = f else { continue };
            self.incomplete = true;
            if self.uses.iter().filter(|u| u.alpha_eq(f)).count() >= self.budget.reuse_cap {
                continue;
            }
            for t in self.witnesses(s) {
                let inst = a.subst(x, &t);
                if s.contains(&inst) {
                    continue;
                }
                self.uses.push(f.clone());
                let found = self.prove_gk(&s.with([inst]), depth + 1);
                self.uses.pop();
                if let Some(p) = found {
                    return Some(if g {
                        let doubled = s.with([f.clone()]);
                        let inner = node(RuleInstance::new("forall_left").on(f.clone()).with_witness(t), &doubled, vec![p]);
                        node(RuleInstance::new("contraction").on(f.clone()), s, vec![inner])
                    } else {
                        node(RuleInstance::new("contr_forall_left").on(f.clone()).with_witness(t), s, vec![p])
                    });
                }
            }
        }
        None
    }

    fn prove_d(&mut self, s: &Sequent, depth: usize) -> Option<Proof> {
        if let Some(p) = self.proved.get(s) {
            return Some(p.clone());
        }
        if self.failed.contains(s) {
            return None;
        }
        if let Some(p) = self.closing(s) {
            return Some(p);
        }
        self.steps += 1;
        if depth >= self.budget.max_depth || self.steps > self.budget.max_steps {
            self.incomplete = true;
            return None;
        }
        let outer = core::mem::replace(&mut self.incomplete, false);
        let result = self.expand_d(s, depth);
        match &result {
            Some(p) => {
                debug_assert!(d_node_decreases(p));
                if s.is_propositional() {
                    self.proved.insert(s.clone(), p.clone());
                }
            }
            None if !self.incomplete => {
                self.failed.insert(s.clone());
            }
            None => {}
        }
        self.incomplete |= outer;
        result
    }

    fn expand_d(&mut self, s: &Sequent, depth: usize) -> Option<Proof> {
        if let Some((rule, premises)) = self.invertible(s, true) {
            let proofs = self.all(&premises, depth, true)?;
            return Some(node(rule, s, proofs));
        }
        let goal = s.goal().clone();
        if let Formula::Or(a, b) = &goal {
            for (rule, g) in [("or_right_1", a), ("or_right_2", b)] {
                if let Some(p) = self.prove_d(&s.with_goal((**g).clone()), depth + 1) {
                    return Some(node(RuleInstance::new(rule), s, vec![p]));
                }
            }
        }
        if let Formula::Exists(x, a) = &goal {
            self.incomplete = true;
            for t in self.witnesses(s) {
                if let Some(p) = self.prove_d(&s.with_goal(a.subst(x, &t)), depth + 1) {
                    return Some(node(RuleInstance::new("exists_right").with_witness(t), s, vec![p]));
                }
            }
        }
        for f in distinct(s.context()) {
            let Formula::Imp(cd, b) = f else { continue };
            let rest = s.without(f).expect("present");
            let right = rest.with([(**b).clone()]);
            let imp = |x: &Formula| Formula::imp(x.clone(), (**b).clone());
            let mut options: Vec<(RuleInstance, Vec<Sequent>)> = Vec::new();
            match &**cd {
                Formula::And(c, d) => options.push((
                    RuleInstance::new("imp_left_and"),
                    vec![rest.with([imp(c)]).with_goal((**c).clone()), rest.with([imp(d)]).with_goal((**d).clone()), right],
                )),
                Formula::Or(c, d) => {
                    let hyps = rest.with([imp(c), imp(d)]);
                    options.push((RuleInstance::new("imp_left_or_1"), vec![hyps.with_goal((**c).clone()), right.clone()]));
                    options.push((RuleInstance::new("imp_left_or_2"), vec![hyps.with_goal((**d).clone()), right]));
                }
                Formula::Imp(c, d) => options.push((
                    RuleInstance::new("imp_left_imp"),
                    vec![rest.with([imp(d), (**c).clone()]).with_goal((**d).clone()), right],
                )),
                Formula::Forall(x, c) => {
                    let y = self.eigenvariable(x, s);
                    let left = s.with_goal(c.subst(x, &Term::var(y.clone())));
                    options.push((RuleInstance::new("imp_left_forall").with_fresh(y), vec![left, right]));
                }
                Formula::Exists(x, c) => {
                    self.incomplete = true;
                    for t in self.witnesses(s) {
                        let left = s.with_goal(c.subst(x, &t));
                        options.push((RuleInstance::new("imp_left_exists").with_witness(t), vec![left, right.clone()]));
                    }
                }
                _ => {}
            }
            for (rule, premises) in options {
                if let Some(proofs) = self.all(&premises, depth, true) {
                    return Some(node(rule.on(f.clone()), s, proofs));
                }
            }
        }
        for f in distinct(s.context()) {
            let Formula::Forall(x, a) = f else { continue };
            self.incomplete = true;
            if self.uses.iter().filter(|u| u.alpha_eq(f)).count() >= self.budget.reuse_cap {
                continue;
            }
            for t in self.witnesses(s) {
                let inst = a.subst(x, &t);
                if s.contains(&inst) {
                    continue;
                }
                self.uses.push(f.clone());
                let found = self.prove_d(&s.with([inst]), depth + 1);
                self.uses.pop();
                if let Some(p) = found {
                    return Some(node(RuleInstance::new("contr_forall_left").on(f.clone()).with_witness(t), s, vec![p]));
                }
            }
        }
        None
    }
}

/// Every edge of a D proof below an introduction rule decreases in the
/// multiset order.
pub fn d_edges_decrease(proof: &Proof) -> bool {
    let mut ok = true;
    proof.walk(&mut |_, n| ok &= d_node_decreases(n));
    ok
}

fn d_node_decreases(n: &Proof) -> bool {
    D_NON_INTRO.contains(&n.rule_id()) || n.premises.iter().all(|p| multiset_order_less(p.sequent(), n.sequent()))
}

/// Backward search in G. Implications and universal hypotheses are always
/// contracted before they are used, so the hypothesis stays available.
pub fn prove_g(s: &Sequent, budget: &SearchBudget) -> Outcome {
    Searcher::new(CalculusId::G, budget).run(s)
}

pub fn prove_k(s: &Sequent, budget: &SearchBudget) -> Outcome {
    Searcher::new(CalculusId::K, budget).run(s)
}

/// Backward search in D. No loop check: propositional search terminates
/// because every rule used decreases the multiset order.
pub fn prove_d(s: &Sequent, budget: &SearchBudget) -> Outcome {
    Searcher::new(CalculusId::D, budget).run(s)
}

pub fn prove(calculus: CalculusId, s: &Sequent, budget: &SearchBudget) -> Option<Outcome> {
    match calculus {
        CalculusId::G => Some(prove_g(s, budget)),
        CalculusId::K => Some(prove_k(s, budget)),
        CalculusId::D => Some(prove_d(s, budget)),
        _ => None,
    }
}

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
pub enum TransformError {
    #[error("target formula is not in the context of the conclusion")]
    TargetNotPresent,
    #[error("target formula does not occur twice in the context")]
    TargetNotDuplicated,
    #[error("target must be a conjunction, a disjunction or an existential")]
    BadTarget,
    #[error("proof is not a K proof")]
    NotK,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Inversion {
    Single(Proof),
    Pair(Proof, Proof),
}

fn is_principal(p: &Proof, rule: &str, target: &Formula) -> bool {
    p.rule_id() == rule && p.rule.principal.as_ref().is_some_and(|f| f.alpha_eq(target))
}

fn rebuild(p: &Proof, conclusion: Sequent, premises: Vec<Proof>) -> Proof {
    Proof::new(p.rule.clone(), conclusion, premises)
}

/// Height-preserving inversion of a left rule in K: from a proof of
/// `Γ, T |- G` with `T` a conjunction, disjunction or existential, proofs
/// of the premises of the corresponding left rule. An existential is
/// opened with a variable fresh for the whole proof.
pub fn invert_k(proof: &Proof, target: &Formula) -> Result<Inversion, TransformError> {
    let s = proof.conclusion.as_sequent().ok_or(TransformError::NotK)?;
    if !s.contains(target) {
        return Err(TransformError::TargetNotPresent);
    }
    match target {
        Formula::And(a, b) => Ok(Inversion::Single(invert_one(proof, target, "and_left", &[(**a).clone(), (**b).clone()], None)?)),
        Formula::Exists(x, a) => {
            let mut avoid = proof.names();
            target.collect_names(&mut avoid);
            let y = fresh_name(x, &avoid);
            let inst = a.subst(x, &Term::var(y.clone()));
            Ok(Inversion::Single(invert_one(proof, target, "exists_left", &[inst], Some(&y))?))
        }
        Formula::Or(a, b) => {
            let (l, r) = invert_or(proof, target, a, b)?;
            Ok(Inversion::Pair(l, r))
        }
        _ => Err(TransformError::BadTarget),
    }
}

fn invert_one(p: &Proof, target: &Formula, rule: &str, repl: &[Formula], var: Option<&str>) -> Result<Proof, TransformError> {
    if is_principal(p, rule, target) {
        let prem = p.premises[0].clone();
        return Ok(match (var, &p.rule.fresh) {
            (Some(y), Some(y0)) if y != y0 => prem.subst_var(y0, &Term::var(y)),
            _ => prem,
        });
    }
    let s = p.sequent();
    let concl = s.replace(target, repl.iter().cloned()).ok_or(TransformError::NotK)?;
    let premises = p.premises.iter().map(|q| invert_one(q, target, rule, repl, var)).collect::<Result<_, _>>()?;
    Ok(rebuild(p, concl, premises))
}

fn invert_or(p: &Proof, target: &Formula, a: &Formula, b: &Formula) -> Result<(Proof, Proof), TransformError> {
    if is_principal(p, "or_left", target) {
        return Ok((p.premises[0].clone(), p.premises[1].clone()));
    }
    let s = p.sequent();
    let ls = s.replace(target, [a.clone()]).ok_or(TransformError::NotK)?;
    let rs = s.replace(target, [b.clone()]).ok_or(TransformError::NotK)?;
    let mut lp = Vec::new();
    let mut rp = Vec::new();
    for q in &p.premises {
        let (l, r) = invert_or(q, target, a, b)?;
        lp.push(l);
        rp.push(r);
    }
    Ok((rebuild(p, ls, lp), rebuild(p, rs, rp)))
}

/// From a K proof of `Γ, C -> D |- G`, a proof of `Γ, D |- G` no higher.
pub fn strip_imp_k(proof: &Proof, target: &Formula) -> Result<Proof, TransformError> {
    let Formula::Imp(_, d) = target else { return Err(TransformError::BadTarget) };
    let s = proof.conclusion.as_sequent().ok_or(TransformError::NotK)?;
    if !s.contains(target) {
        return Err(TransformError::TargetNotPresent);
    }
    strip(proof, target, d)
}

fn strip(p: &Proof, target: &Formula, d: &Formula) -> Result<Proof, TransformError> {
    if is_principal(p, "contr_imp_left", target) {
        return Ok(p.premises[1].clone());
    }
    let concl = p.sequent().replace(target, [d.clone()]).ok_or(TransformError::NotK)?;
    let premises = p.premises.iter().map(|q| strip(q, target, d)).collect::<Result<_, _>>()?;
    Ok(rebuild(p, concl, premises))
}

/// Admissibility of contraction in K: from a proof of `Γ, A, A |- G`, a
/// proof of `Γ, A |- G` no higher.
pub fn contract_k(proof: &Proof, target: &Formula) -> Result<Proof, TransformError> {
    let s = proof.conclusion.as_sequent().ok_or(TransformError::NotK)?;
    if s.count(target) < 2 {
        return Err(TransformError::TargetNotDuplicated);
    }
    contract(proof, target)
}

fn single(inv: Inversion) -> Proof {
    match inv {
        Inversion::Single(p) => p,
        Inversion::Pair(..) => unreachable!("single-premise inversion"),
    }
}

fn contract(p: &Proof, a: &Formula) -> Result<Proof, TransformError> {
    let s = p.sequent();
    let concl = s.without(a).ok_or(TransformError::NotK)?;
    let on_a = p.rule.principal.as_ref().is_some_and(|f| f.alpha_eq(a));
    match (p.rule_id(), a) {
        ("and_left", Formula::And(b, c)) if on_a => {
            let inv = single(invert_k(&p.premises[0], a)?);
            let once = contract_k(&inv, b)?;
            let twice = contract_k(&once, c)?;
            Ok(rebuild(p, concl, vec![twice]))
        }
        ("or_left", Formula::Or(b, c)) if on_a => {
            let Inversion::Pair(l, _) = invert_k(&p.premises[0], a)? else { unreachable!() };
            let Inversion::Pair(_, r) = invert_k(&p.premises[1], a)? else { unreachable!() };
            Ok(rebuild(p, concl, vec![contract_k(&l, b)?, contract_k(&r, c)?]))
        }
        ("exists_left", Formula::Exists(x, b)) if on_a => {
            let y = p.rule.fresh.clone().ok_or(TransformError::NotK)?;
            let inv = single(invert_k(&p.premises[0], a)?);
            // the inversion opened the other copy with some fresh y'; rename it to y
            let mut avoid = p.premises[0].names();
            a.collect_names(&mut avoid);
            let y1 = fresh_name(x, &avoid);
            let renamed = inv.subst_var(&y1, &Term::var(y.clone()));
            let inst = b.subst(x, &Term::var(y));
            Ok(rebuild(p, concl, vec![contract_k(&renamed, &inst)?]))
        }
        ("contr_imp_left", Formula::Imp(_, d)) if on_a => {
            let left = contract(&p.premises[0], a)?;
            let stripped = strip_imp_k(&p.premises[1], a)?;
            let right = contract_k(&stripped, d)?;
            Ok(rebuild(p, concl, vec![left, right]))
        }
        ("contr_forall_left", Formula::Forall(..)) if on_a => Ok(rebuild(p, concl, vec![contract(&p.premises[0], a)?])),
        _ => {
            let premises = p.premises.iter().map(|q| contract(q, a)).collect::<Result<_, _>>()?;
            Ok(rebuild(p, concl, premises))
        }
    }
}

/// Adds `extra` to the context of every node. Eigenvariables free in
/// `extra` are renamed first.
pub fn weaken_d(proof: &Proof, extra: &Formula) -> Proof {
    let mut avoid = proof.names();
    extra.collect_names(&mut avoid);
    weaken(proof, extra, &mut avoid)
}

fn weaken(p: &Proof, extra: &Formula, avoid: &mut BTreeSet<String>) -> Proof {
    if let Some(y) = &p.rule.fresh {
        if extra.has_free_var(y) {
            let y2 = fresh_name(y, avoid);
            avoid.insert(y2.clone());
            return weaken(&p.rename_eigenvariable(&y2), extra, avoid);
        }
    }
    let concl = p.sequent().with([extra.clone()]);
    let premises = p.premises.iter().map(|q| weaken(q, extra, avoid)).collect();
    rebuild(p, concl, premises)
}

/// Provability of a propositional sequent in G, K, D and the oracle.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct EquivReport {
    pub g: bool,
    pub k: bool,
    pub d: bool,
    pub oracle: bool,
}

impl EquivReport {
    pub fn agree(&self) -> bool {
        self.g == self.k && self.k == self.d && self.d == self.oracle
    }
}

pub fn equiv_check(s: &Sequent) -> Result<EquivReport, crate::oracle::OracleError> {
    let budget = SearchBudget::default();
    let oracle = crate::oracle::decide_ipl(s)?;
    Ok(EquivReport {
        g: prove_g(s, &budget).is_proved(),
        k: prove_k(s, &budget).is_proved(),
        d: prove_d(s, &budget).is_proved(),
        oracle,
    })
}
