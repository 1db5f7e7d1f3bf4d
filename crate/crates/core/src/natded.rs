//! Constructive natural deduction, specific cuts, the freeze translation
//! and proof search in the pseudo-automaton made of the introduction
//! rules plus `delay`.

use alloc::collections::BTreeSet;
use alloc::string::ToString;
use alloc::vec;
use alloc::vec::Vec;

use crate::calculus::{
    conclusion_sequent, expect_premise, expect_premises, fresh, premise_sequent, witness, CalculusId, Major, Order,
    Reason, RuleInfo, RuleTable, TableData,
};
use crate::proof::{Proof, RuleInstance};
use crate::syntax::{fresh_name, Formula, Sequent, Term};

const INTROS: [&str; 8] =
    ["axiom", "top_intro", "and_intro", "or_intro_1", "or_intro_2", "imp_intro", "forall_intro", "exists_intro"];
const ELIMS: [&str; 7] = ["bot_elim", "and_elim_1", "and_elim_2", "or_elim", "imp_elim", "forall_elim", "exists_elim"];

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
pub enum NatDedError {
    #[error("context formula `{0:?}` is not atomic")]
    NonAtomicContext(Formula),
    #[error("the supplied prover cannot decide this instance")]
    UnsupportedFragment,
}

pub fn nd_rule_table() -> RuleTable {
    let rules = INTROS
        .iter()
        .map(|r| RuleInfo::intro(*r))
        .chain(ELIMS.iter().map(|r| RuleInfo::non_intro(*r, Major::Leftmost)))
        .collect();
    RuleTable::new(CalculusId::Nd, Order::Size, rules, TableData::Plain)
}

/// Introduction rules, axiom included, plus `delay`.
pub fn pseudo_automaton_table() -> RuleTable {
    let rules = INTROS.iter().chain(&["delay"]).map(|r| RuleInfo::intro(*r)).collect();
    RuleTable::new(CalculusId::PseudoA, Order::Size, rules, TableData::Plain)
}

/// `x` may serve as eigenvariable for a node whose conclusion has the given
/// context: not free there, nor in `extra`.
fn eigen_ok(x: &str, concl: &Sequent, extra: &[&Formula]) -> Result<(), Reason> {
    if concl.context_has_free_var(x) || extra.iter().any(|f| f.has_free_var(x)) {
        Err(Reason::side("eigenvariable occurs free"))
    } else {
        Ok(())
    }
}

pub(crate) fn check_node(calculus: CalculusId, node: &Proof) -> Result<(), Reason> {
    let concl = conclusion_sequent(node)?;
    let goal = concl.goal();
    let same_ctx = |g: Formula| concl.with_goal(g);
    match node.rule_id() {
        "axiom" => {
            expect_premises(node, 0)?;
            if !concl.contains(goal) {
                return Err(Reason::shape("goal is not among the hypotheses"));
            }
        }
        "delay" if calculus == CalculusId::PseudoA => {
            expect_premises(node, 0)?;
            if !concl.context().iter().any(|f| matches!(f, Formula::Frozen(_))) {
                return Err(Reason::side("no frozen hypothesis"));
            }
        }
        "top_intro" => {
            expect_premises(node, 0)?;
            if *goal != Formula::Top {
                return Err(Reason::shape("goal is not top"));
            }
        }
        "bot_elim" => {
            expect_premises(node, 1)?;
            expect_premise(node, 0, &same_ctx(Formula::Bot))?;
        }
        "and_intro" => {
            expect_premises(node, 2)?;
            let Formula::And(a, b) = goal else { return Err(Reason::shape("goal is not a conjunction")) };
            expect_premise(node, 0, &same_ctx((**a).clone()))?;
            expect_premise(node, 1, &same_ctx((**b).clone()))?;
        }
        "and_elim_1" | "and_elim_2" => {
            expect_premises(node, 1)?;
            let prem = premise_sequent(node, 0)?;
            let Formula::And(a, b) = prem.goal() else { return Err(Reason::PremiseMismatch(0)) };
            expect_premise(node, 0, &same_ctx(prem.goal().clone()))?;
            let kept = if node.rule_id() == "and_elim_1" { a } else { b };
            if !kept.alpha_eq(goal) {
                return Err(Reason::shape("goal is not the selected conjunct"));
            }
        }
        "or_intro_1" | "or_intro_2" => {
            expect_premises(node, 1)?;
            let Formula::Or(a, b) = goal else { return Err(Reason::shape("goal is not a disjunction")) };
            let chosen = if node.rule_id() == "or_intro_1" { a } else { b };
            expect_premise(node, 0, &same_ctx((**chosen).clone()))?;
        }
        "or_elim" => {
            expect_premises(node, 3)?;
            let prem = premise_sequent(node, 0)?;
            let Formula::Or(a, b) = prem.goal() else { return Err(Reason::PremiseMismatch(0)) };
            expect_premise(node, 0, &same_ctx(prem.goal().clone()))?;
            expect_premise(node, 1, &concl.with([(**a).clone()]))?;
            expect_premise(node, 2, &concl.with([(**b).clone()]))?;
        }
        "imp_intro" => {
            expect_premises(node, 1)?;
            let Formula::Imp(a, b) = goal else { return Err(Reason::shape("goal is not an implication")) };
            expect_premise(node, 0, &Sequent::new(concl.context().to_vec(), (**b).clone()).with([(**a).clone()]))?;
        }
        "imp_elim" => {
            expect_premises(node, 2)?;
            let prem = premise_sequent(node, 0)?;
            let Formula::Imp(a, b) = prem.goal() else { return Err(Reason::PremiseMismatch(0)) };
            expect_premise(node, 0, &same_ctx(prem.goal().clone()))?;
            if !b.alpha_eq(goal) {
                return Err(Reason::shape("goal is not the consequent of the major premise"));
            }
            expect_premise(node, 1, &same_ctx((**a).clone()))?;
        }
        "forall_intro" => {
            expect_premises(node, 1)?;
            let Formula::Forall(x, a) = goal else { return Err(Reason::shape("goal is not universal")) };
            let y = fresh(node)?;
            let outer = if y == x { vec![] } else { vec![goal] };
            eigen_ok(y, concl, &outer)?;
            expect_premise(node, 0, &same_ctx(a.subst(x, &Term::var(y))))?;
        }
        "forall_elim" => {
            expect_premises(node, 1)?;
            let t = witness(node)?;
            let prem = premise_sequent(node, 0)?;
            let Formula::Forall(x, a) = prem.goal() else { return Err(Reason::PremiseMismatch(0)) };
            expect_premise(node, 0, &same_ctx(prem.goal().clone()))?;
            if !a.subst(x, t).alpha_eq(goal) {
                return Err(Reason::shape("goal is not the instance at the witness"));
            }
        }
        "exists_intro" => {
            expect_premises(node, 1)?;
            let Formula::Exists(x, a) = goal else { return Err(Reason::shape("goal is not existential")) };
            expect_premise(node, 0, &same_ctx(a.subst(x, witness(node)?)))?;
        }
        "exists_elim" => {
            expect_premises(node, 2)?;
            let y = fresh(node)?;
            let prem = premise_sequent(node, 0)?;
            let ex = prem.goal().clone();
            let Formula::Exists(x, a) = &ex else { return Err(Reason::PremiseMismatch(0)) };
            expect_premise(node, 0, &same_ctx(ex.clone()))?;
            let outer = if y == x { vec![goal] } else { vec![goal, &ex] };
            eigen_ok(y, concl, &outer)?;
            expect_premise(node, 1, &concl.with([a.subst(x, &Term::var(y))]))?;
        }
        other => return Err(Reason::UnknownRule(other.to_string())),
    }
    Ok(())
}

fn matching_intro(elim: &str) -> &'static [&'static str] {
    match elim {
        "and_elim_1" | "and_elim_2" => &["and_intro"],
        "or_elim" => &["or_intro_1", "or_intro_2"],
        "imp_elim" => &["imp_intro"],
        "forall_elim" => &["forall_intro"],
        "exists_elim" => &["exists_intro"],
        _ => &[],
    }
}

/// An elimination whose major premise ends with the matching introduction.
pub fn is_specific_cut(node: &Proof) -> bool {
    node.premises.first().is_some_and(|major| matching_intro(node.rule_id()).contains(&major.rule_id()))
}

pub fn specific_cuts(proof: &Proof) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    proof.walk(&mut |path, node| {
        if is_specific_cut(node) {
            out.push(path.to_vec());
        }
    });
    out
}

/// Removes specific cuts on conjunction and on the universal quantifier by
/// local rewriting, bottom-up, until none of those remain.
pub fn reduce_specific_cuts(proof: &Proof) -> Proof {
    let premises: Vec<Proof> = proof.premises.iter().map(reduce_specific_cuts).collect();
    let node = Proof { rule: proof.rule.clone(), conclusion: proof.conclusion.clone(), premises };
    match (node.rule_id(), node.premises.first().map(Proof::rule_id)) {
        ("and_elim_1", Some("and_intro")) => reduce_specific_cuts(&node.premises[0].premises[0]),
        ("and_elim_2", Some("and_intro")) => reduce_specific_cuts(&node.premises[0].premises[1]),
        ("forall_elim", Some("forall_intro")) => {
            let intro = &node.premises[0];
            match (&intro.rule.fresh, &node.rule.witness) {
                (Some(y), Some(t)) => reduce_specific_cuts(&intro.premises[0].subst_var(y, t)),
                _ => node,
            }
        }
        _ => node,
    }
}

/// Wraps non-atomic implication antecedents in the freeze modality.
/// `top` and `bot` count as non-atomic.
pub fn freeze(f: &Formula) -> Formula {
    match f {
        Formula::Atom(_) | Formula::NegAtom(_) | Formula::Top | Formula::Bot => f.clone(),
        Formula::And(a, b) => Formula::and(freeze(a), freeze(b)),
        Formula::Or(a, b) => Formula::or(freeze(a), freeze(b)),
        Formula::Imp(a, b) if a.is_atomic() || matches!(**a, Formula::Frozen(_)) => Formula::imp((**a).clone(), freeze(b)),
        Formula::Imp(a, b) => Formula::imp(Formula::frozen((**a).clone()), freeze(b)),
        Formula::Forall(x, a) => Formula::forall(x.clone(), freeze(a)),
        Formula::Exists(x, a) => Formula::exists(x.clone(), freeze(a)),
        Formula::Frozen(_) => f.clone(),
    }
}

pub fn unfreeze(f: &Formula) -> Formula {
    f.unfrozen()
}

/// A leaf closed by `delay`, left for later processing.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DelayedLeaf {
    pub sequent: Sequent,
    pub path: Vec<usize>,
}

/// Searches the pseudo-automaton for a proof of `sequent`, whose context
/// must be atomic and whose goal is expected to be frozen already.
///
/// Existential witnesses come from `universe` plus the eigenvariables of
/// the current branch; an empty `universe` is replaced by the constants of
/// the sequent, or a single fresh constant when it has none.
pub fn prove_delay(sequent: &Sequent, universe: &[Term]) -> Result<Option<(Proof, Vec<DelayedLeaf>)>, NatDedError> {
    if let Some(f) = sequent.context().iter().find(|f| !matches!(f, Formula::Atom(_))) {
        return Err(NatDedError::NonAtomicContext(f.clone()));
    }
    let mut terms: Vec<Term> = universe.to_vec();
    if terms.is_empty() {
        let mut cs = BTreeSet::new();
        sequent.formulas().for_each(|f| f.collect_constants(&mut cs));
        terms = cs.into_iter().collect();
        if terms.is_empty() {
            terms.push(Term::constant(fresh_name("c", &sequent.names())));
        }
    }
    let Some(proof) = delay_search(sequent, &mut terms) else { return Ok(None) };
    let mut leaves = Vec::new();
    proof.walk(&mut |path, node| {
        if node.rule_id() == "delay" {
            leaves.push(DelayedLeaf { sequent: node.sequent().clone(), path: path.to_vec() });
        }
    });
    Ok(Some((proof, leaves)))
}

fn delay_search(s: &Sequent, terms: &mut Vec<Term>) -> Option<Proof> {
    let node = |rule: RuleInstance, premises: Vec<Proof>| Some(Proof::new(rule, s.clone(), premises));
    if s.context().iter().any(|f| matches!(f, Formula::Frozen(_))) {
        return node(RuleInstance::new("delay"), vec![]);
    }
    let goal = s.goal();
    if s.contains(goal) {
        return node(RuleInstance::new("axiom"), vec![]);
    }
    match goal {
        Formula::Top => node(RuleInstance::new("top_intro"), vec![]),
        Formula::And(a, b) => {
            let pa = delay_search(&s.with_goal((**a).clone()), terms)?;
            let pb = delay_search(&s.with_goal((**b).clone()), terms)?;
            node(RuleInstance::new("and_intro"), vec![pa, pb])
        }
        Formula::Or(a, b) => {
            if let Some(p) = delay_search(&s.with_goal((**a).clone()), terms) {
                return node(RuleInstance::new("or_intro_1"), vec![p]);
            }
            let p = delay_search(&s.with_goal((**b).clone()), terms)?;
            node(RuleInstance::new("or_intro_2"), vec![p])
        }
        Formula::Imp(a, b) => {
            let prem = Sequent::new(s.context().to_vec(), (**b).clone()).with([(**a).clone()]);
            let p = delay_search(&prem, terms)?;
            node(RuleInstance::new("imp_intro"), vec![p])
        }
        Formula::Forall(x, a) => {
            let mut avoid = s.names();
            terms.iter().for_each(|t| t.collect_names(&mut avoid));
            let y = fresh_name(x, &avoid);
            terms.push(Term::var(y.clone()));
            let p = delay_search(&s.with_goal(a.subst(x, &Term::var(y.clone()))), terms);
            terms.pop();
            node(RuleInstance::new("forall_intro").with_fresh(y), vec![p?])
        }
        Formula::Exists(x, a) => {
            for t in terms.clone() {
                if let Some(p) = delay_search(&s.with_goal(a.subst(x, &t)), terms) {
                    return node(RuleInstance::new("exists_intro").with_witness(t), vec![p]);
                }
            }
            None
        }
        _ => None,
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Side {
    Left,
    Right,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum DisjunctionOutcome {
    Witnessed(Side),
    NotApplicable,
    Violation,
}

/// Checks the disjunction property on `goal`, possibly under a prefix of
/// universal quantifiers. `decide` answers provability of a sequent, or
/// `None` when it cannot settle it.
///
/// For `forall x1 .. xn (B1 | B2)` the disjuncts checked are
/// `forall x1 .. xn B1` and `forall x1 .. xn B2`.
pub fn check_disjunction_property(
    goal: &Formula,
    decide: &mut dyn FnMut(&Sequent) -> Option<bool>,
) -> Result<DisjunctionOutcome, NatDedError> {
    let mut prefix = Vec::new();
    let mut body = goal;
    while let Formula::Forall(x, a) = body {
        prefix.push(x.clone());
        body = a;
    }
    let Formula::Or(b1, b2) = body else { return Ok(DisjunctionOutcome::NotApplicable) };
    let close = |f: &Formula| prefix.iter().rev().fold(f.clone(), |acc, x| Formula::forall(x.clone(), acc));
    match decide(&Sequent::goal_only(goal.clone())) {
        None => return Err(NatDedError::UnsupportedFragment),
        Some(false) => return Ok(DisjunctionOutcome::NotApplicable),
        Some(true) => {}
    }
    let mut unsure = false;
    for (side, b) in [(Side::Left, b1), (Side::Right, b2)] {
        match decide(&Sequent::goal_only(close(b))) {
            Some(true) => return Ok(DisjunctionOutcome::Witnessed(side)),
            Some(false) => {}
            None => unsure = true,
        }
    }
    if unsure {
        Err(NatDedError::UnsupportedFragment)
    } else {
        Ok(DisjunctionOutcome::Violation)
    }
}
