#![allow(dead_code)]

use std::collections::{BTreeMap, BTreeSet};

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use satcut_core::apds::{ApdsKind, ApdsRule, ApdsSystem};
use satcut_core::fdl::FdlModel;
use satcut_core::oracle::{count_formulas, unrank};
use satcut_core::proof::{Proof, RuleInstance};
use satcut_core::sequent::SearchBudget;
use satcut_core::syntax::{Atom, Formula, Sequent, Term};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Uniform among formulas with exactly `k` connectives.
pub fn prop_formula_sized(rng: &mut impl Rng, atoms: &[&str], k: usize) -> Formula {
    let n = count_formulas(atoms.len(), k);
    unrank(atoms, k, rng.gen_range(0..n))
}

pub fn prop_formula(rng: &mut impl Rng, atoms: &[&str], max_connectives: usize) -> Formula {
    let k = rng.gen_range(0..=max_connectives);
    prop_formula_sized(rng, atoms, k)
}

pub fn prop_sequent(rng: &mut impl Rng, atoms: &[&str], max_context: usize, max_connectives: usize) -> Sequent {
    let n = rng.gen_range(0..=max_context);
    let context = (0..n).map(|_| prop_formula(rng, atoms, max_connectives)).collect();
    Sequent::new(context, prop_formula(rng, atoms, max_connectives))
}

/// First-order formula over unary `P`, `Q`, nullary `R`, the constant `c`
/// and the variables in `scope`.
pub fn fo_formula(rng: &mut impl Rng, depth: usize, scope: &mut Vec<String>) -> Formula {
    let term = |rng: &mut dyn rand::RngCore, scope: &[String]| -> Term {
        if scope.is_empty() || rng.gen_bool(0.2) {
            Term::constant("c")
        } else {
            Term::var(scope.choose(rng).unwrap().clone())
        }
    };
    if depth == 0 || rng.gen_bool(0.25) {
        return match rng.gen_range(0..6) {
            0 => Formula::prop("R"),
            1 => Formula::Top,
            2 => Formula::Bot,
            3 => Formula::atom("Q", vec![term(rng, scope)]),
            _ => Formula::atom("P", vec![term(rng, scope)]),
        };
    }
    match rng.gen_range(0..5) {
        0 => Formula::and(fo_formula(rng, depth - 1, scope), fo_formula(rng, depth - 1, scope)),
        1 => Formula::or(fo_formula(rng, depth - 1, scope), fo_formula(rng, depth - 1, scope)),
        2 => Formula::imp(fo_formula(rng, depth - 1, scope), fo_formula(rng, depth - 1, scope)),
        q => {
            let x = ["x", "y", "z"][scope.len() % 3].to_string();
            scope.push(x.clone());
            let body = fo_formula(rng, depth - 1, scope);
            scope.pop();
            if q == 3 {
                Formula::forall(x, body)
            } else {
                Formula::exists(x, body)
            }
        }
    }
}

pub fn fo_sentence(rng: &mut impl Rng, depth: usize) -> Formula {
    fo_formula(rng, depth, &mut Vec::new()).rectify()
}

pub fn fo_sequent(rng: &mut impl Rng, max_context: usize, depth: usize) -> Sequent {
    let n = rng.gen_range(0..=max_context);
    let context = (0..n).map(|_| fo_sentence(rng, depth)).collect();
    Sequent::new(context, fo_sentence(rng, depth))
}

/// A model with 1 to 3 elements and 1 or 2 relations of arity 1 or 2.
pub fn fdl_model(rng: &mut impl Rng) -> (FdlModel, Vec<(String, usize)>) {
    let size = rng.gen_range(1..=3);
    let domain: Vec<String> = (1..=size).map(|i| format!("c{i}")).collect();
    let mut model = FdlModel::new(domain.clone()).unwrap();
    let mut sig = Vec::new();
    for (i, name) in ["P", "R"].iter().enumerate().take(rng.gen_range(1..=2)) {
        let arity = if i == 0 { 1 } else { rng.gen_range(1..=2) };
        let mut tuples = Vec::new();
        let all: Vec<Vec<String>> = if arity == 1 {
            domain.iter().map(|c| vec![c.clone()]).collect()
        } else {
            domain.iter().flat_map(|a| domain.iter().map(move |b| vec![a.clone(), b.clone()])).collect()
        };
        for t in all {
            if rng.gen_bool(0.5) {
                tuples.push(t);
            }
        }
        model.add_relation(name, arity, tuples).unwrap();
        sig.push((name.to_string(), arity));
    }
    (model, sig)
}

/// A closed formula of depth at most `depth` over the model's signature,
/// implications included.
pub fn fdl_formula(rng: &mut impl Rng, model: &FdlModel, sig: &[(String, usize)], depth: usize) -> Formula {
    fn go(rng: &mut dyn rand::RngCore, model: &FdlModel, sig: &[(String, usize)], depth: usize, scope: &mut Vec<String>) -> Formula {
        if depth == 0 || rng.gen_bool(0.2) {
            if rng.gen_bool(0.1) {
                return if rng.gen_bool(0.5) { Formula::Top } else { Formula::Bot };
            }
            let (pred, arity) = sig.choose(rng).unwrap();
            let args = (0..*arity)
                .map(|_| {
                    if !scope.is_empty() && rng.gen_bool(0.7) {
                        Term::var(scope.choose(rng).unwrap().clone())
                    } else {
                        Term::constant(model.domain().choose(rng).unwrap().clone())
                    }
                })
                .collect();
            let a = Atom::new(pred.clone(), args);
            return if rng.gen_bool(0.3) { Formula::NegAtom(a) } else { Formula::Atom(a) };
        }
        match rng.gen_range(0..6) {
            0 => Formula::and(go(rng, model, sig, depth - 1, scope), go(rng, model, sig, depth - 1, scope)),
            1 => Formula::or(go(rng, model, sig, depth - 1, scope), go(rng, model, sig, depth - 1, scope)),
            2 => Formula::imp(go(rng, model, sig, depth - 1, scope), go(rng, model, sig, depth - 1, scope)),
            q => {
                let x = format!("x{}", scope.len());
                scope.push(x.clone());
                let body = go(rng, model, sig, depth - 1, scope);
                scope.pop();
                if q == 3 {
                    Formula::forall(x, body)
                } else {
                    Formula::exists(x, body)
                }
            }
        }
    }
    go(rng, model, sig, depth, &mut Vec::new())
}

/// A system with at most 4 predicates, 2 symbols and 6 rules.
pub fn apds_system(rng: &mut impl Rng) -> ApdsSystem {
    let np = rng.gen_range(1..=4);
    let ns = rng.gen_range(1..=2);
    let preds: Vec<String> = (0..np).map(|i| format!("P{i}")).collect();
    let syms: Vec<String> = ["a", "b"][..ns].iter().map(|s| s.to_string()).collect();
    let mut system = ApdsSystem::new(preds.clone(), syms.clone());
    let nr = rng.gen_range(1..=6);
    for i in 0..nr {
        let head = preds.choose(rng).unwrap().clone();
        let (kind, min) = match rng.gen_range(0..4) {
            0 => (ApdsKind::IntroEps, 0),
            1 => (ApdsKind::IntroPush(syms.choose(rng).unwrap().clone()), 0),
            2 => (ApdsKind::Elim(syms.choose(rng).unwrap().clone()), 1),
            _ => (ApdsKind::Neutral, 1),
        };
        let k = if kind == ApdsKind::IntroEps { 0 } else { rng.gen_range(min..=2) };
        let premises = (0..k).map(|_| preds.choose(rng).unwrap().clone()).collect();
        let _ = system.add_rule(ApdsRule::new(format!("r{}", i + 1), kind, head, premises));
    }
    system
}

/// Every word over `symbols` of length at most `max_len`, shortest first.
pub fn words(symbols: &[String], max_len: usize) -> Vec<Vec<String>> {
    let mut out = vec![vec![]];
    let mut layer = vec![vec![]];
    for _ in 0..max_len {
        let mut next = Vec::new();
        for w in &layer {
            for g in symbols {
                let mut v = vec![g.clone()];
                v.extend(w.iter().cloned());
                next.push(v);
            }
        }
        out.extend(next.iter().cloned());
        layer = next;
    }
    out
}

pub fn word_fact(pred: &str, word: &[String]) -> Atom {
    Atom::new(pred, vec![Term::word(word)])
}

/// Forward chaining in the unsaturated system over words of length at most
/// `max_len`, keeping the first derivation of every fact. Cuts included.
pub fn forward_proofs(system: &ApdsSystem, max_len: usize) -> BTreeMap<(String, Vec<String>), Proof> {
    let syms: Vec<String> = system.symbols().iter().cloned().collect();
    let all = words(&syms, max_len);
    let mut proofs: BTreeMap<(String, Vec<String>), Proof> = BTreeMap::new();
    loop {
        let mut added = Vec::new();
        for rule in system.rules() {
            for w in &all {
                let key = (rule.head.clone(), w.clone());
                if proofs.contains_key(&key) || added.iter().any(|(k, _): &((String, Vec<String>), Proof)| *k == key) {
                    continue;
                }
                let premise_facts: Option<Vec<(String, Vec<String>)>> = match &rule.kind {
                    ApdsKind::IntroEps => w.is_empty().then(Vec::new),
                    ApdsKind::IntroPush(g) => (w.first() == Some(g))
                        .then(|| rule.premises.iter().map(|p| (p.clone(), w[1..].to_vec())).collect()),
                    ApdsKind::Neutral => Some(rule.premises.iter().map(|p| (p.clone(), w.clone())).collect()),
                    ApdsKind::Elim(g) => {
                        let mut gw = vec![g.clone()];
                        gw.extend(w.iter().cloned());
                        (gw.len() <= max_len).then(|| {
                            let mut v = vec![(rule.premises[0].clone(), gw)];
                            v.extend(rule.premises[1..].iter().map(|p| (p.clone(), w.clone())));
                            v
                        })
                    }
                };
                let Some(facts) = premise_facts else { continue };
                let Some(premises) = facts.iter().map(|k| proofs.get(k).cloned()).collect::<Option<Vec<_>>>() else {
                    continue;
                };
                let node = Proof::new(RuleInstance::new(rule.name.clone()), word_fact(&key.0, w), premises);
                added.push((key, node));
            }
        }
        if added.is_empty() {
            return proofs;
        }
        proofs.extend(added);
    }
}

/// Adds `extra` to the context of every node of an FDL proof.
pub fn weaken_fdl(p: &Proof, extra: &Formula) -> Proof {
    Proof::new(
        p.rule.clone(),
        p.sequent().with([extra.clone()]),
        p.premises.iter().map(|q| weaken_fdl(q, extra)).collect(),
    )
}

/// Wraps a proof of `Γ |- C` in an introduction/elimination detour that
/// still concludes `Γ |- C`.
pub fn fdl_detour(rng: &mut impl Rng, model: &FdlModel, p: &Proof) -> Proof {
    let s = p.sequent().clone();
    let c = s.goal().clone();
    let top = Proof::leaf(RuleInstance::new("top_intro"), s.with_goal(Formula::Top));
    let consts: Vec<Term> = model.constants().collect();
    let node = |rule: RuleInstance, concl: Sequent, premises: Vec<Proof>| Proof::new(rule, concl, premises);
    match rng.gen_range(0..5) {
        0 => {
            let pair = node(RuleInstance::new("and_intro"), s.with_goal(Formula::and(c.clone(), Formula::Top)), vec![p.clone(), top]);
            node(RuleInstance::new("and_elim_1"), s.clone(), vec![pair])
        }
        1 => {
            let pair = node(RuleInstance::new("and_intro"), s.with_goal(Formula::and(Formula::Top, c.clone())), vec![top, p.clone()]);
            node(RuleInstance::new("and_elim_2"), s.clone(), vec![pair])
        }
        2 => {
            let disj = Formula::or(c.clone(), Formula::Top);
            let major = node(RuleInstance::new("or_intro_1"), s.with_goal(disj), vec![p.clone()]);
            let left = Proof::leaf(RuleInstance::new("axiom"), s.with([c.clone()]));
            let right = weaken_fdl(p, &Formula::Top);
            node(RuleInstance::new("or_elim"), s.clone(), vec![major, left, right])
        }
        3 => {
            let all = Formula::forall("v", c.clone());
            let major = node(RuleInstance::new("forall_intro"), s.with_goal(all), consts.iter().map(|_| p.clone()).collect());
            let w = consts.choose(rng).unwrap().clone();
            node(RuleInstance::new("forall_elim").with_witness(w), s.clone(), vec![major])
        }
        _ => {
            let ex = Formula::exists("v", c.clone());
            let w = consts.choose(rng).unwrap().clone();
            let major = node(RuleInstance::new("exists_intro").with_witness(w), s.with_goal(ex), vec![p.clone()]);
            let mut premises = vec![major];
            premises.extend(consts.iter().map(|_| Proof::leaf(RuleInstance::new("axiom"), s.with([c.clone()]))));
            node(RuleInstance::new("exists_elim"), s.clone(), premises)
        }
    }
}

/// Replaces the subproof at `path` by `f` of it.
pub fn rewrite_at(p: &Proof, path: &[usize], f: &mut dyn FnMut(&Proof) -> Proof) -> Proof {
    match path.split_first() {
        None => f(p),
        Some((&i, rest)) => {
            let mut premises = p.premises.clone();
            premises[i] = rewrite_at(&p.premises[i], rest, f);
            Proof::new(p.rule.clone(), p.conclusion.clone(), premises)
        }
    }
}

pub fn paths(p: &Proof) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    p.walk(&mut |path, _| out.push(path.to_vec()));
    out
}

/// Context formulas of the conclusion satisfying `pred`, deduplicated.
pub fn context_targets(p: &Proof, pred: &dyn Fn(&Formula) -> bool) -> Vec<Formula> {
    let set: BTreeSet<Formula> = p.sequent().context().iter().filter(|f| pred(f)).cloned().collect();
    set.into_iter().collect()
}

/// Search limits for generated sequents; first-order ones get fewer steps.
pub fn budget(s: &Sequent) -> SearchBudget {
    if s.is_propositional() {
        SearchBudget::default()
    } else {
        SearchBudget { max_steps: 3_000, ..SearchBudget::for_sequent(s) }
    }
}
