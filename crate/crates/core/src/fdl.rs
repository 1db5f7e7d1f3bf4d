//! Finite Domain Logic: truth in a finite model, the introduction-only
//! prover, and the full rule table for checking proofs with cuts.
//!
//! Implication is an abbreviation: [`normalize`] rewrites `A -> B` to
//! `~A | B` and pushes negation down to atoms. Quantifiers range over the
//! model's constants.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::string::{String, ToString};
use alloc::vec;
use alloc::vec::Vec;

use crate::calculus::{
    conclusion_sequent, expect_premise, expect_premises, premise_sequent, witness, CalculusId, Major, Order, Reason,
    RuleInfo, RuleTable, TableData,
};
use crate::proof::{Proof, RuleInstance};
use crate::syntax::{Atom, Formula, Sequent, Term};

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
pub enum FdlError {
    #[error("the domain is empty")]
    EmptyDomain,
    #[error("constant `{0}` is not in the domain")]
    UnknownConstant(String),
    #[error("duplicate domain element `{0}`")]
    DuplicateConstant(String),
    #[error("predicate `{0}` has no relation in the model")]
    UnknownPredicate(String),
    #[error("`{pred}` has arity {expected}, used with {found} arguments")]
    Arity { pred: String, expected: usize, found: usize },
    #[error("formula is not closed")]
    NotClosed,
    #[error("formula is not in finite-domain normal form")]
    NotFdlNormalized,
    #[error("function symbol `{0}` in a finite-domain term")]
    FunctionSymbol(String),
}

/// A finite domain plus one relation table per predicate.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FdlModel {
    domain: Vec<String>,
    relations: BTreeMap<String, (usize, BTreeSet<Vec<String>>)>,
}

impl FdlModel {
    pub fn new(domain: Vec<String>) -> Result<FdlModel, FdlError> {
        if domain.is_empty() {
            return Err(FdlError::EmptyDomain);
        }
        let mut seen = BTreeSet::new();
        for c in &domain {
            if !seen.insert(c.clone()) {
                return Err(FdlError::DuplicateConstant(c.clone()));
            }
        }
        Ok(FdlModel { domain, relations: BTreeMap::new() })
    }

    /// Declares a relation; tuples must use domain constants and the arity.
    pub fn add_relation(&mut self, pred: &str, arity: usize, tuples: Vec<Vec<String>>) -> Result<(), FdlError> {
        let mut set = BTreeSet::new();
        for t in tuples {
            if t.len() != arity {
                return Err(FdlError::Arity { pred: pred.to_string(), expected: arity, found: t.len() });
            }
            if let Some(c) = t.iter().find(|c| !self.domain.contains(c)) {
                return Err(FdlError::UnknownConstant(c.clone()));
            }
            set.insert(t);
        }
        self.relations.insert(pred.to_string(), (arity, set));
        Ok(())
    }

    pub fn domain(&self) -> &[String] {
        &self.domain
    }

    pub fn relations(&self) -> impl Iterator<Item = (&str, usize, &BTreeSet<Vec<String>>)> {
        self.relations.iter().map(|(p, (k, t))| (p.as_str(), *k, t))
    }

    pub fn constants(&self) -> impl Iterator<Item = Term> + '_ {
        self.domain.iter().map(|c| Term::Const(c.clone()))
    }

    /// Truth of a closed atom in the model.
    pub fn holds(&self, atom: &Atom) -> Result<bool, FdlError> {
        let (arity, tuples) =
            self.relations.get(&atom.pred).ok_or_else(|| FdlError::UnknownPredicate(atom.pred.clone()))?;
        if *arity != atom.args.len() {
            return Err(FdlError::Arity { pred: atom.pred.clone(), expected: *arity, found: atom.args.len() });
        }
        let mut tuple = Vec::with_capacity(atom.args.len());
        for t in &atom.args {
            match t {
                Term::Const(c) if self.domain.contains(c) => tuple.push(c.clone()),
                Term::Const(c) => return Err(FdlError::UnknownConstant(c.clone())),
                Term::Var(_) => return Err(FdlError::NotClosed),
                Term::App(f, _) => return Err(FdlError::FunctionSymbol(f.clone())),
            }
        }
        Ok(tuples.contains(&tuple))
    }

    /// Membership of a literal in the set of true literals of the model.
    pub fn literal_true(&self, lit: &Formula) -> Result<bool, FdlError> {
        match lit {
            Formula::Atom(a) => self.holds(a),
            Formula::NegAtom(a) => Ok(!self.holds(a)?),
            _ => Err(FdlError::NotFdlNormalized),
        }
    }
}

/// Rewrites implications as disjunctions and pushes negation to atoms.
pub fn normalize(f: &Formula) -> Result<Formula, FdlError> {
    fn pos(f: &Formula) -> Result<Formula, FdlError> {
        Ok(match f {
            Formula::Atom(_) | Formula::NegAtom(_) | Formula::Top | Formula::Bot => f.clone(),
            Formula::And(a, b) => Formula::and(pos(a)?, pos(b)?),
            Formula::Or(a, b) => Formula::or(pos(a)?, pos(b)?),
            Formula::Imp(a, b) => Formula::or(neg(a)?, pos(b)?),
            Formula::Forall(x, a) => Formula::forall(x.clone(), pos(a)?),
            Formula::Exists(x, a) => Formula::exists(x.clone(), pos(a)?),
            Formula::Frozen(_) => return Err(FdlError::NotFdlNormalized),
        })
    }
    fn neg(f: &Formula) -> Result<Formula, FdlError> {
        Ok(match f {
            Formula::Atom(a) => Formula::NegAtom(a.clone()),
            Formula::NegAtom(a) => Formula::Atom(a.clone()),
            Formula::Top => Formula::Bot,
            Formula::Bot => Formula::Top,
            Formula::And(a, b) => Formula::or(neg(a)?, neg(b)?),
            Formula::Or(a, b) => Formula::and(neg(a)?, neg(b)?),
            Formula::Imp(a, b) => Formula::and(pos(a)?, neg(b)?),
            Formula::Forall(x, a) => Formula::exists(x.clone(), neg(a)?),
            Formula::Exists(x, a) => Formula::forall(x.clone(), neg(a)?),
            Formula::Frozen(_) => return Err(FdlError::NotFdlNormalized),
        })
    }
    pos(f)
}

fn is_normalized(f: &Formula) -> bool {
    match f {
        Formula::Atom(_) | Formula::NegAtom(_) | Formula::Top | Formula::Bot => true,
        Formula::And(a, b) | Formula::Or(a, b) => is_normalized(a) && is_normalized(b),
        Formula::Forall(_, a) | Formula::Exists(_, a) => is_normalized(a),
        Formula::Imp(..) | Formula::Frozen(_) => false,
    }
}

fn precheck(f: &Formula) -> Result<(), FdlError> {
    if !is_normalized(f) {
        return Err(FdlError::NotFdlNormalized);
    }
    if !f.is_closed() {
        return Err(FdlError::NotClosed);
    }
    Ok(())
}

/// Tarskian truth of a closed normalized formula.
pub fn eval(model: &FdlModel, f: &Formula) -> Result<bool, FdlError> {
    precheck(f)?;
    eval_inner(model, f)
}

fn eval_inner(model: &FdlModel, f: &Formula) -> Result<bool, FdlError> {
    Ok(match f {
        Formula::Atom(_) | Formula::NegAtom(_) => model.literal_true(f)?,
        Formula::Top => true,
        Formula::Bot => false,
        Formula::And(a, b) => eval_inner(model, a)? && eval_inner(model, b)?,
        Formula::Or(a, b) => eval_inner(model, a)? || eval_inner(model, b)?,
        Formula::Forall(x, a) => {
            for c in model.constants() {
                if !eval_inner(model, &a.subst(x, &c))? {
                    return Ok(false);
                }
            }
            true
        }
        Formula::Exists(x, a) => {
            for c in model.constants() {
                if eval_inner(model, &a.subst(x, &c))? {
                    return Ok(true);
                }
            }
            false
        }
        Formula::Imp(..) | Formula::Frozen(_) => return Err(FdlError::NotFdlNormalized),
    })
}

/// Searches the introduction-only automaton for a proof of `|- goal`.
///
/// Contexts stay empty. Disjunctions try the left branch first and
/// existentials try witnesses in domain order, so the result is
/// deterministic. `Ok(None)` means no proof exists.
pub fn prove_fdl(model: &FdlModel, goal: &Formula) -> Result<Option<Proof>, FdlError> {
    precheck(goal)?;
    let mut memo = BTreeMap::new();
    search(model, goal, &mut memo)
}

fn search(
    model: &FdlModel,
    f: &Formula,
    memo: &mut BTreeMap<Formula, Option<Proof>>,
) -> Result<Option<Proof>, FdlError> {
    if let Some(hit) = memo.get(f) {
        return Ok(hit.clone());
    }
    let concl = Sequent::goal_only(f.clone());
    let node = |rule: RuleInstance, premises: Vec<Proof>| Some(Proof::new(rule, concl.clone(), premises));
    let result = match f {
        Formula::Atom(_) | Formula::NegAtom(_) => {
            if model.literal_true(f)? {
                node(RuleInstance::new("atom"), vec![])
            } else {
                None
            }
        }
        Formula::Top => node(RuleInstance::new("top_intro"), vec![]),
        Formula::Bot => None,
        Formula::And(a, b) => match search(model, a, memo)? {
            Some(pa) => search(model, b, memo)?.and_then(|pb| node(RuleInstance::new("and_intro"), vec![pa, pb])),
            None => None,
        },
        Formula::Or(a, b) => {
            if let Some(pa) = search(model, a, memo)? {
                node(RuleInstance::new("or_intro_1"), vec![pa])
            } else {
                search(model, b, memo)?.and_then(|pb| node(RuleInstance::new("or_intro_2"), vec![pb]))
            }
        }
        Formula::Forall(x, a) => {
            let mut premises = Vec::with_capacity(model.domain.len());
            let mut ok = true;
            for c in model.constants() {
                match search(model, &a.subst(x, &c), memo)? {
                    Some(p) => premises.push(p),
                    None => {
                        ok = false;
                        break;
                    }
                }
            }
            if ok {
                node(RuleInstance::new("forall_intro"), premises)
            } else {
                None
            }
        }
        Formula::Exists(x, a) => {
            let mut found = None;
            for c in model.constants() {
                if let Some(p) = search(model, &a.subst(x, &c), memo)? {
                    found = node(RuleInstance::new("exists_intro").with_witness(c), vec![p]);
                    break;
                }
            }
            found
        }
        Formula::Imp(..) | Formula::Frozen(_) => return Err(FdlError::NotFdlNormalized),
    };
    memo.insert(f.clone(), result.clone());
    Ok(result)
}

pub fn fdl_rule_table(model: &FdlModel) -> RuleTable {
    let intro = ["axiom", "atom", "top_intro", "and_intro", "or_intro_1", "or_intro_2", "forall_intro", "exists_intro"];
    let elim = ["bot_elim", "and_elim_1", "and_elim_2", "or_elim", "forall_elim", "exists_elim"];
    let rules = intro
        .iter()
        .map(|r| RuleInfo::intro(*r))
        .chain(elim.iter().map(|r| RuleInfo::non_intro(*r, Major::Leftmost)))
        .collect();
    RuleTable::new(CalculusId::Fdl, Order::Size, rules, TableData::Fdl(model.clone()))
}

fn domain_witness<'a>(model: &FdlModel, node: &'a Proof) -> Result<&'a Term, Reason> {
    let t = witness(node)?;
    match t {
        Term::Const(c) if model.domain.contains(c) => Ok(t),
        _ => Err(Reason::side("witness is not a domain constant")),
    }
}

pub(crate) fn check_node(model: &FdlModel, node: &Proof) -> Result<(), Reason> {
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
        "atom" => {
            expect_premises(node, 0)?;
            if !goal.is_atomic() {
                return Err(Reason::shape("goal is not a literal"));
            }
            match model.literal_true(goal) {
                Ok(true) => {}
                Ok(false) => return Err(Reason::side("literal is false in the model")),
                Err(e) => return Err(Reason::SideCondition(e.to_string())),
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
            let kept = if node.rule_id() == "and_elim_1" { a } else { b };
            expect_premise(node, 0, &same_ctx(Formula::and((**a).clone(), (**b).clone())))?;
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
        "forall_intro" => {
            let Formula::Forall(x, a) = goal else { return Err(Reason::shape("goal is not universal")) };
            expect_premises(node, model.domain.len())?;
            for (i, c) in model.constants().enumerate() {
                expect_premise(node, i, &same_ctx(a.subst(x, &c)))?;
            }
        }
        "forall_elim" => {
            expect_premises(node, 1)?;
            let c = domain_witness(model, node)?;
            let prem = premise_sequent(node, 0)?;
            let Formula::Forall(x, a) = prem.goal() else { return Err(Reason::PremiseMismatch(0)) };
            expect_premise(node, 0, &same_ctx(prem.goal().clone()))?;
            if !a.subst(x, c).alpha_eq(goal) {
                return Err(Reason::shape("goal is not the instance at the witness"));
            }
        }
        "exists_intro" => {
            expect_premises(node, 1)?;
            let Formula::Exists(x, a) = goal else { return Err(Reason::shape("goal is not existential")) };
            let c = domain_witness(model, node)?;
            expect_premise(node, 0, &same_ctx(a.subst(x, c)))?;
        }
        "exists_elim" => {
            expect_premises(node, 1 + model.domain.len())?;
            let prem = premise_sequent(node, 0)?;
            let Formula::Exists(x, a) = prem.goal() else { return Err(Reason::PremiseMismatch(0)) };
            expect_premise(node, 0, &same_ctx(prem.goal().clone()))?;
            for (i, c) in model.constants().enumerate() {
                expect_premise(node, i + 1, &concl.with([a.subst(x, &c)]))?;
            }
        }
        other => return Err(Reason::UnknownRule(other.to_string())),
    }
    Ok(())
}
