//! Alternating pushdown systems over unary predicates and unary symbols,
//! the finite-automaton encoding, saturation, and the automaton decision
//! procedure with cut-free proof reconstruction.
//!
//! Premise lists are canonical: sorted and deduplicated, except for the
//! first premise of an elimination rule, which stays in front.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec;
use alloc::vec::Vec;

use crate::calculus::{expect_premises, CalculusId, Major, Order, Reason, RuleInfo, RuleTable, TableData};
use crate::proof::{Judgement, Proof, RuleInstance};
use crate::syntax::{Atom, Term, EPS};

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
pub enum ApdsError {
    #[error("undeclared predicate `{0}`")]
    UnknownPredicate(String),
    #[error("undeclared symbol `{0}`")]
    UnknownSymbol(String),
    #[error("duplicate rule name `{0}`")]
    DuplicateName(String),
    #[error("an elimination rule needs at least one premise")]
    ElimWithoutPremise,
    #[error("query argument is not a word")]
    NotAWord,
    #[error("query must be a unary atom")]
    NotUnary,
    #[error("at most 64 predicates are supported, found {0}")]
    TooManyPredicates(usize),
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum ApdsKind {
    /// `Q(g x) <- P1(x) ... Pn(x)`
    IntroPush(String),
    /// `Q(eps)`
    IntroEps,
    /// `Q(x) <- P1(g x) P2(x) ... Pn(x)`
    Elim(String),
    /// `Q(x) <- P1(x) ... Pn(x)`
    Neutral,
}

impl ApdsKind {
    pub fn is_intro(&self) -> bool {
        matches!(self, ApdsKind::IntroPush(_) | ApdsKind::IntroEps)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ApdsRule {
    pub name: String,
    pub kind: ApdsKind,
    pub head: String,
    pub premises: Vec<String>,
}

impl ApdsRule {
    /// Builds a rule with its premise list put in canonical order.
    pub fn new(name: impl Into<String>, kind: ApdsKind, head: impl Into<String>, premises: Vec<String>) -> ApdsRule {
        let premises = match kind {
            ApdsKind::Elim(_) if !premises.is_empty() => {
                let mut rest: Vec<String> = premises[1..].to_vec();
                rest.sort();
                rest.dedup();
                let mut out = vec![premises[0].clone()];
                out.extend(rest);
                out
            }
            ApdsKind::IntroEps => premises,
            _ => {
                let mut p = premises;
                p.sort();
                p.dedup();
                p
            }
        };
        ApdsRule { name: name.into(), kind, head: head.into(), premises }
    }

    /// The rule without its name; two rules with the same shape are the same rule.
    pub fn shape(&self) -> (&ApdsKind, &str, &[String]) {
        (&self.kind, &self.head, &self.premises)
    }
}

#[derive(Clone, Debug, Default)]
pub struct ApdsSystem {
    predicates: BTreeSet<String>,
    symbols: BTreeSet<String>,
    rules: Vec<ApdsRule>,
}

impl PartialEq for ApdsSystem {
    /// Equal alphabets and equal rule sets, names ignored.
    fn eq(&self, other: &Self) -> bool {
        self.predicates == other.predicates && self.symbols == other.symbols && self.shapes() == other.shapes()
    }
}

impl Eq for ApdsSystem {}

impl ApdsSystem {
    pub fn new(predicates: impl IntoIterator<Item = String>, symbols: impl IntoIterator<Item = String>) -> ApdsSystem {
        ApdsSystem { predicates: predicates.into_iter().collect(), symbols: symbols.into_iter().collect(), rules: Vec::new() }
    }

    pub fn predicates(&self) -> &BTreeSet<String> {
        &self.predicates
    }

    pub fn symbols(&self) -> &BTreeSet<String> {
        &self.symbols
    }

    pub fn rules(&self) -> &[ApdsRule] {
        &self.rules
    }

    pub fn rule(&self, name: &str) -> Option<&ApdsRule> {
        self.rules.iter().find(|r| r.name == name)
    }

    pub fn declare_predicate(&mut self, p: impl Into<String>) {
        self.predicates.insert(p.into());
    }

    pub fn declare_symbol(&mut self, g: impl Into<String>) {
        self.symbols.insert(g.into());
    }

    pub fn shapes(&self) -> BTreeSet<(ApdsKind, String, Vec<String>)> {
        self.rules.iter().map(|r| (r.kind.clone(), r.head.clone(), r.premises.clone())).collect()
    }

    /// Adds a rule. Returns `Ok(false)` when a rule of the same shape is
    /// already present, in which case nothing changes.
    pub fn add_rule(&mut self, rule: ApdsRule) -> Result<bool, ApdsError> {
        for p in core::iter::once(&rule.head).chain(&rule.premises) {
            if !self.predicates.contains(p) {
                return Err(ApdsError::UnknownPredicate(p.clone()));
            }
        }
        if let ApdsKind::IntroPush(g) | ApdsKind::Elim(g) = &rule.kind {
            if !self.symbols.contains(g) {
                return Err(ApdsError::UnknownSymbol(g.clone()));
            }
        }
        if matches!(rule.kind, ApdsKind::Elim(_)) && rule.premises.is_empty() {
            return Err(ApdsError::ElimWithoutPremise);
        }
        if self.rules.iter().any(|r| r.shape() == rule.shape()) {
            return Ok(false);
        }
        if self.rules.iter().any(|r| r.name == rule.name) {
            return Err(ApdsError::DuplicateName(rule.name));
        }
        self.rules.push(rule);
        Ok(true)
    }

    /// A rule name not used yet, of the form `{base}{k}`.
    pub fn fresh_rule_name(&self, base: &str) -> String {
        (1..)
            .map(|k| format!("{base}{k}"))
            .find(|n| self.rule(n).is_none())
            .expect("unbounded name supply")
    }

    fn index(&self) -> Result<Index, ApdsError> {
        if self.predicates.len() > 64 {
            return Err(ApdsError::TooManyPredicates(self.predicates.len()));
        }
        Ok(Index { preds: self.predicates.iter().cloned().collect() })
    }
}

struct Index {
    preds: Vec<String>,
}

impl Index {
    fn pred(&self, p: &str) -> usize {
        self.preds.binary_search_by(|q| q.as_str().cmp(p)).expect("declared predicate")
    }

    fn mask(&self, ps: &[String]) -> u64 {
        ps.iter().fold(0, |m, p| m | (1u64 << self.pred(p)))
    }

    fn names(&self, mask: u64) -> Vec<String> {
        (0..self.preds.len()).filter(|i| mask & (1 << i) != 0).map(|i| self.preds[i].clone()).collect()
    }
}

/// A nondeterministic finite automaton.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Fsa {
    pub states: BTreeSet<String>,
    pub alphabet: BTreeSet<String>,
    pub transitions: BTreeMap<(String, String), BTreeSet<String>>,
    pub finals: BTreeSet<String>,
}

impl Fsa {
    pub fn add_transition(&mut self, from: &str, symbol: &str, to: &str) -> Result<(), ApdsError> {
        for s in [from, to] {
            if !self.states.contains(s) {
                return Err(ApdsError::UnknownPredicate(s.to_string()));
            }
        }
        if !self.alphabet.contains(symbol) {
            return Err(ApdsError::UnknownSymbol(symbol.to_string()));
        }
        self.transitions.entry((from.to_string(), symbol.to_string())).or_default().insert(to.to_string());
        Ok(())
    }

    /// Forward run from `state` reading `word` left to right.
    pub fn accepts(&self, state: &str, word: &[&str]) -> bool {
        let mut cur: BTreeSet<&str> = BTreeSet::from([state]);
        for g in word {
            let mut next = BTreeSet::new();
            for s in &cur {
                if let Some(ts) = self.transitions.get(&(s.to_string(), g.to_string())) {
                    next.extend(ts.iter().map(String::as_str));
                }
            }
            cur = next;
        }
        cur.iter().any(|s| self.finals.contains(*s))
    }
}

/// One `P(g x) <- Q(x)` rule per transition `P -g-> Q` and one `F(eps)` per
/// final state `F`.
pub fn from_fsa(machine: &Fsa) -> ApdsSystem {
    let mut sys = ApdsSystem::new(machine.states.iter().cloned(), machine.alphabet.iter().cloned());
    for f in &machine.finals {
        let name = format!("fin_{f}");
        sys.add_rule(ApdsRule::new(name, ApdsKind::IntroEps, f.clone(), vec![])).expect("declared state");
    }
    for ((from, g), tos) in &machine.transitions {
        for to in tos {
            let name = format!("{from}_{g}_{to}");
            sys.add_rule(ApdsRule::new(name, ApdsKind::IntroPush(g.clone()), from.clone(), vec![to.clone()]))
                .expect("declared states and symbols");
        }
    }
    sys
}

/// Upper bound on the number of distinct rules saturation can ever hold.
pub fn saturation_bound(system: &ApdsSystem) -> usize {
    let p = system.predicates.len();
    let sets = 1usize.checked_shl(p as u32).unwrap_or(usize::MAX);
    let per_head = p.saturating_mul(sets);
    p.saturating_add(per_head.saturating_mul(system.symbols.len())).saturating_add(per_head).saturating_add(system.rules.len())
}

/// Closes the system under the three saturation clauses. New rules are
/// named `sat_k` in order of discovery.
pub fn saturate(system: &ApdsSystem) -> Result<ApdsSystem, ApdsError> {
    let idx = system.index()?;
    let mut eps: BTreeSet<usize> = BTreeSet::new();
    let mut push: BTreeMap<(String, usize), BTreeSet<u64>> = BTreeMap::new();
    let mut neutral: BTreeMap<usize, BTreeSet<u64>> = BTreeMap::new();
    let mut elims: Vec<(String, usize, usize, u64)> = Vec::new();
    for r in &system.rules {
        let head = idx.pred(&r.head);
        match &r.kind {
            ApdsKind::IntroEps => {
                eps.insert(head);
            }
            ApdsKind::IntroPush(g) => {
                push.entry((g.clone(), head)).or_default().insert(idx.mask(&r.premises));
            }
            ApdsKind::Neutral => {
                neutral.entry(head).or_default().insert(idx.mask(&r.premises));
            }
            ApdsKind::Elim(g) => elims.push((g.clone(), idx.pred(&r.premises[0]), head, idx.mask(&r.premises[1..]))),
        }
    }

    let mut out = system.clone();
    let mut k = 0usize;
    let mut add = |out: &mut ApdsSystem, kind: ApdsKind, head: usize, prem: u64| {
        let rule = ApdsRule::new("", kind, idx.preds[head].clone(), idx.names(prem));
        if out.rules.iter().any(|r| r.shape() == rule.shape()) {
            return;
        }
        let name = loop {
            k += 1;
            let n = format!("sat_{k}");
            if out.rule(&n).is_none() {
                break n;
            }
        };
        out.rules.push(ApdsRule { name, ..rule });
    };

    let bound = saturation_bound(system);
    let mut rounds = 0usize;
    loop {
        rounds += 1;
        assert!(rounds <= bound + 1, "saturation exceeded its finite rule bound");
        let mut changed = false;

        // clause 1: intro Q1(g x) <- Ps  and  elim R(x) <- Q1(g x), Qs  give  R(x) <- Ps, Qs
        for (g, q1, r, tail) in &elims {
            let Some(masks) = push.get(&(g.clone(), *q1)) else { continue };
            for m in masks.clone() {
                if neutral.entry(*r).or_default().insert(m | tail) {
                    add(&mut out, ApdsKind::Neutral, *r, m | tail);
                    changed = true;
                }
            }
        }

        // clause 2: intros Qi(g x) <- Ps_i for every premise of a neutral R(x) <- Q1..Qn
        let symbols: Vec<String> = system.symbols.iter().cloned().collect();
        for (r, masks) in neutral.clone() {
            for m in masks {
                for g in &symbols {
                    let mut combos: BTreeSet<u64> = BTreeSet::from([0]);
                    for q in (0..idx.preds.len()).filter(|q| m & (1 << q) != 0) {
                        let Some(opts) = push.get(&(g.clone(), q)) else {
                            combos.clear();
                            break;
                        };
                        combos = combos.iter().flat_map(|c| opts.iter().map(move |o| c | o)).collect();
                    }
                    for c in combos {
                        if push.entry((g.clone(), r)).or_default().insert(c) {
                            add(&mut out, ApdsKind::IntroPush(g.clone()), r, c);
                            changed = true;
                        }
                    }
                }
                // clause 3: Qi(eps) for every premise gives R(eps)
                let all_eps = (0..idx.preds.len()).filter(|q| m & (1 << q) != 0).all(|q| eps.contains(&q));
                if all_eps && eps.insert(r) {
                    add(&mut out, ApdsKind::IntroEps, r, 0);
                    changed = true;
                }
            }
        }

        if !changed {
            break;
        }
    }
    debug_assert!(out.rules.len() <= bound);
    Ok(out)
}

/// The introduction rules of a system, the automaton left after dropping
/// every non-introduction rule.
pub fn intro_part(system: &ApdsSystem) -> ApdsSystem {
    ApdsSystem {
        predicates: system.predicates.clone(),
        symbols: system.symbols.clone(),
        rules: system.rules.iter().filter(|r| r.kind.is_intro()).cloned().collect(),
    }
}

fn query_word(atom: &Atom) -> Result<Vec<String>, ApdsError> {
    if atom.args.len() != 1 {
        return Err(ApdsError::NotUnary);
    }
    let w = atom.args[0].as_word().ok_or(ApdsError::NotAWord)?;
    Ok(w.into_iter().map(str::to_string).collect())
}

/// For each suffix of `word` (longest first), the rule chosen to prove
/// each predicate on that suffix, using introduction rules only.
fn suffix_table<'a>(auto: &'a ApdsSystem, word: &[String]) -> Vec<BTreeMap<&'a str, &'a ApdsRule>> {
    let mut tables: Vec<BTreeMap<&str, &ApdsRule>> = vec![BTreeMap::new(); word.len() + 1];
    for r in &auto.rules {
        if r.kind == ApdsKind::IntroEps {
            tables[word.len()].entry(r.head.as_str()).or_insert(r);
        }
    }
    for i in (0..word.len()).rev() {
        let (head, tail) = tables.split_at_mut(i + 1);
        let prev = &tail[0];
        for r in &auto.rules {
            if r.kind == ApdsKind::IntroPush(word[i].clone()) && r.premises.iter().all(|p| prev.contains_key(p.as_str())) {
                head[i].entry(r.head.as_str()).or_insert(r);
            }
        }
    }
    tables
}

/// Provability of a closed unary atom over a word.
pub fn decide(system: &ApdsSystem, atom: &Atom) -> Result<bool, ApdsError> {
    let word = query_word(atom)?;
    let auto = intro_part(&saturate(system)?);
    Ok(suffix_table(&auto, &word)[0].contains_key(atom.pred.as_str()))
}

/// Predicates provable on `word` in an already saturated system.
pub fn provable_predicates(saturated: &ApdsSystem, word: &[String]) -> BTreeSet<String> {
    let auto = intro_part(saturated);
    suffix_table(&auto, word)[0].keys().map(|s| s.to_string()).collect()
}

/// A cut-free proof of `atom` in the saturated system, or `None`.
/// Rule names in the proof refer to `saturate(system)`.
pub fn prove(system: &ApdsSystem, atom: &Atom) -> Result<Option<Proof>, ApdsError> {
    let word = query_word(atom)?;
    let auto = intro_part(&saturate(system)?);
    let tables = suffix_table(&auto, &word);
    fn build(tables: &[BTreeMap<&str, &ApdsRule>], word: &[String], i: usize, pred: &str) -> Proof {
        let rule = tables[i][pred];
        let fact = Atom::new(pred, vec![Term::word(&word[i..])]);
        let premises = match rule.kind {
            ApdsKind::IntroEps => vec![],
            _ => rule.premises.iter().map(|p| build(tables, word, i + 1, p)).collect(),
        };
        Proof::new(RuleInstance::new(rule.name.clone()), fact, premises)
    }
    if !tables[0].contains_key(atom.pred.as_str()) {
        return Ok(None);
    }
    Ok(Some(build(&tables, &word, 0, &atom.pred)))
}

/// Bottom-up least fixpoint of the rules, unsaturated, over all words of
/// length at most `max_len`. Returns every derived `(predicate, word)`.
pub fn naive_fixpoint(system: &ApdsSystem, max_len: usize) -> Result<BTreeSet<(String, Vec<String>)>, ApdsError> {
    let idx = system.index()?;
    let symbols: Vec<&String> = system.symbols.iter().collect();
    let sym_id = |g: &str| symbols.iter().position(|s| s.as_str() == g).expect("declared symbol");
    // trie of words by prepending: node 0 is eps, child[w][g] is g w
    let mut child: Vec<Vec<Option<usize>>> = vec![vec![None; symbols.len()]];
    let mut parent: Vec<Option<(usize, usize)>> = vec![None];
    let mut depth = vec![0usize];
    let mut frontier = vec![0usize];
    for _ in 0..max_len {
        let mut next = Vec::new();
        for &w in &frontier {
            for g in 0..symbols.len() {
                let id = child.len();
                child.push(vec![None; symbols.len()]);
                parent.push(Some((g, w)));
                depth.push(depth[w] + 1);
                child[w][g] = Some(id);
                next.push(id);
            }
        }
        frontier = next;
    }

    struct Compiled {
        kind: u8,
        sym: usize,
        head: u64,
        first: u64,
        rest: u64,
    }
    let rules: Vec<Compiled> = system
        .rules
        .iter()
        .map(|r| {
            let head = 1u64 << idx.pred(&r.head);
            match &r.kind {
                ApdsKind::IntroEps => Compiled { kind: 0, sym: 0, head, first: 0, rest: 0 },
                ApdsKind::IntroPush(g) => Compiled { kind: 1, sym: sym_id(g), head, first: 0, rest: idx.mask(&r.premises) },
                ApdsKind::Neutral => Compiled { kind: 2, sym: 0, head, first: 0, rest: idx.mask(&r.premises) },
                ApdsKind::Elim(g) => Compiled {
                    kind: 3,
                    sym: sym_id(g),
                    head,
                    first: 1u64 << idx.pred(&r.premises[0]),
                    rest: idx.mask(&r.premises[1..]),
                },
            }
        })
        .collect();

    let n = child.len();
    let mut facts = vec![0u64; n];
    let mut queued = vec![true; n];
    let mut work: Vec<usize> = (0..n).collect();
    while let Some(w) = work.pop() {
        queued[w] = false;
        let mut derived = facts[w];
        for r in &rules {
            let fires = match r.kind {
                0 => w == 0,
                1 => matches!(parent[w], Some((g, u)) if g == r.sym && facts[u] & r.rest == r.rest),
                2 => derived & r.rest == r.rest,
                _ => child[w][r.sym].is_some_and(|c| facts[c] & r.first != 0) && derived & r.rest == r.rest,
            };
            if fires {
                derived |= r.head;
            }
        }
        if derived != facts[w] {
            facts[w] = derived;
            let mut touch = |v: usize, work: &mut Vec<usize>| {
                if !queued[v] {
                    queued[v] = true;
                    work.push(v);
                }
            };
            touch(w, &mut work);
            for c in child[w].iter().flatten() {
                touch(*c, &mut work);
            }
            if let Some((_, u)) = parent[w] {
                touch(u, &mut work);
            }
        }
    }

    let mut out = BTreeSet::new();
    for w in 0..n {
        if facts[w] == 0 {
            continue;
        }
        let mut word = Vec::with_capacity(depth[w]);
        let mut cur = w;
        while let Some((g, u)) = parent[cur] {
            word.push(symbols[g].clone());
            cur = u;
        }
        for p in idx.names(facts[w]) {
            out.insert((p, word.clone()));
        }
    }
    Ok(out)
}

/// Default word-length cap for [`naive_fixpoint`] when checking a query of
/// length `query_len`.
pub fn fixpoint_slack(system: &ApdsSystem, query_len: usize) -> usize {
    let p = system.predicates.len();
    let grow = p.saturating_mul(1usize.checked_shl(p as u32).unwrap_or(usize::MAX));
    query_len + grow.min(8)
}

pub fn apds_rule_table(system: &ApdsSystem) -> RuleTable {
    let rules = system
        .rules
        .iter()
        .map(|r| match r.kind {
            ApdsKind::IntroPush(_) | ApdsKind::IntroEps => RuleInfo::intro(r.name.clone()),
            ApdsKind::Elim(_) => RuleInfo::non_intro(r.name.clone(), Major::Leftmost),
            ApdsKind::Neutral => RuleInfo::non_intro(r.name.clone(), Major::All),
        })
        .collect();
    RuleTable::new(CalculusId::Apds, Order::Size, rules, TableData::Apds(system.clone()))
}

fn unary_arg(a: &Atom) -> Result<&Term, Reason> {
    match a.args.as_slice() {
        [t] if t.is_closed() => Ok(t),
        _ => Err(Reason::shape("fact must be a closed unary atom")),
    }
}

pub(crate) fn check_node(system: &ApdsSystem, node: &Proof) -> Result<(), Reason> {
    let rule = system.rule(node.rule_id()).ok_or_else(|| Reason::UnknownRule(node.rule_id().to_string()))?;
    let concl = node.conclusion.as_fact().ok_or(Reason::WrongJudgement)?;
    let t = unary_arg(concl)?;
    if concl.pred != rule.head {
        return Err(Reason::shape("head predicate differs from the rule"));
    }
    expect_premises(node, rule.premises.len())?;
    let expect = |i: usize, pred: &str, arg: &Term| -> Result<(), Reason> {
        match &node.premises[i].conclusion {
            Judgement::Fact(a) if a.pred == pred && a.args.len() == 1 && a.args[0] == *arg => Ok(()),
            Judgement::Fact(_) => Err(Reason::PremiseMismatch(i)),
            Judgement::Sequent(_) => Err(Reason::WrongJudgement),
        }
    };
    match &rule.kind {
        ApdsKind::IntroEps => {
            if !matches!(t, Term::Const(c) if c == EPS) {
                return Err(Reason::shape("argument is not eps"));
            }
        }
        ApdsKind::IntroPush(g) => {
            let Term::App(f, args) = t else { return Err(Reason::shape("argument does not start with the rule symbol")) };
            if f != g || args.len() != 1 {
                return Err(Reason::shape("argument does not start with the rule symbol"));
            }
            for (i, p) in rule.premises.iter().enumerate() {
                expect(i, p, &args[0])?;
            }
        }
        ApdsKind::Neutral => {
            for (i, p) in rule.premises.iter().enumerate() {
                expect(i, p, t)?;
            }
        }
        ApdsKind::Elim(g) => {
            expect(0, &rule.premises[0], &Term::app(g.clone(), vec![t.clone()]))?;
            for (i, p) in rule.premises.iter().enumerate().skip(1) {
                expect(i, p, t)?;
            }
        }
    }
    Ok(())
}
