//! Ground truth for propositional intuitionistic provability, and an
//! enumerator of propositional formulas.
//!
//! `decide_ipl` explores every sequent reachable backwards from the input in
//! system G, with contexts recorded as multiplicity vectors over the
//! subformulas of the input. A third copy of a hypothesis is collapsed into
//! the second, which is harmless because contraction is admissible. The
//! provable states are then the least fixpoint of the rules over this finite
//! graph, computed like unit propagation over Horn clauses.

use alloc::collections::{BTreeMap, VecDeque};
use alloc::vec;
use alloc::vec::Vec;

use crate::syntax::{Formula, Sequent};

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
pub enum OracleError {
    #[error("the oracle decides propositional sequents only")]
    QuantifiedInput,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Node {
    Atom,
    Top,
    Bot,
    And(usize, usize),
    Or(usize, usize),
    Imp(usize, usize),
}

#[derive(Default)]
struct Subformulas {
    nodes: Vec<Node>,
    index: BTreeMap<Formula, usize>,
}

impl Subformulas {
    fn intern(&mut self, f: &Formula) -> Result<usize, OracleError> {
        if let Some(&i) = self.index.get(f) {
            return Ok(i);
        }
        let node = match f {
            Formula::Atom(a) if a.args.is_empty() => Node::Atom,
            Formula::Top => Node::Top,
            Formula::Bot => Node::Bot,
            Formula::And(a, b) => Node::And(self.intern(a)?, self.intern(b)?),
            Formula::Or(a, b) => Node::Or(self.intern(a)?, self.intern(b)?),
            Formula::Imp(a, b) => Node::Imp(self.intern(a)?, self.intern(b)?),
            _ => return Err(OracleError::QuantifiedInput),
        };
        self.nodes.push(node);
        self.index.insert(f.clone(), self.nodes.len() - 1);
        Ok(self.nodes.len() - 1)
    }
}

/// Multiplicities of subformulas in a context, each 0, 1 or 2.
trait Ctx: Clone + Ord {
    fn empty(n: usize) -> Self;
    fn get(&self, i: usize) -> u8;
    fn set(&mut self, i: usize, v: u8);
}

impl Ctx for u128 {
    fn empty(_: usize) -> Self {
        0
    }
    fn get(&self, i: usize) -> u8 {
        ((self >> (2 * i)) & 3) as u8
    }
    fn set(&mut self, i: usize, v: u8) {
        *self = (*self & !(3 << (2 * i))) | ((v as u128) << (2 * i));
    }
}

impl Ctx for Vec<u8> {
    fn empty(n: usize) -> Self {
        vec![0; n]
    }
    fn get(&self, i: usize) -> u8 {
        self[i]
    }
    fn set(&mut self, i: usize, v: u8) {
        self[i] = v;
    }
}

fn add<C: Ctx>(ctx: &C, extra: &[usize]) -> C {
    let mut out = ctx.clone();
    for &i in extra {
        out.set(i, (out.get(i) + 1).min(2));
    }
    out
}

fn remove<C: Ctx>(ctx: &C, i: usize) -> C {
    let mut out = ctx.clone();
    out.set(i, out.get(i) - 1);
    out
}

/// Each alternative is the list of premises of one applicable G rule.
/// Only implications are ever contracted: no other left rule needs its
/// principal formula again.
fn rules<C: Ctx>(nodes: &[Node], (ctx, goal): &(C, usize)) -> Vec<Vec<(C, usize)>> {
    let g = *goal;
    let mut alts: Vec<Vec<(C, usize)>> = Vec::new();
    let present = |i: usize| ctx.get(i) > 0;
    if (nodes[g] == Node::Atom && present(g)) || nodes[g] == Node::Top {
        alts.push(vec![]);
    }
    match nodes[g] {
        Node::And(a, b) => alts.push(vec![(ctx.clone(), a), (ctx.clone(), b)]),
        Node::Or(a, b) => {
            alts.push(vec![(ctx.clone(), a)]);
            alts.push(vec![(ctx.clone(), b)]);
        }
        Node::Imp(a, b) => alts.push(vec![(add(ctx, &[a]), b)]),
        _ => {}
    }
    for (i, node) in nodes.iter().enumerate() {
        if !present(i) {
            continue;
        }
        let rest = remove(ctx, i);
        match *node {
            Node::Bot => alts.push(vec![]),
            Node::And(a, b) => alts.push(vec![(add(&rest, &[a, b]), g)]),
            Node::Or(a, b) => alts.push(vec![(add(&rest, &[a]), g), (add(&rest, &[b]), g)]),
            Node::Imp(a, b) => {
                if ctx.get(i) == 1 {
                    alts.push(vec![(add(ctx, &[i]), g)]);
                }
                alts.push(vec![(rest.clone(), a), (add(&rest, &[b]), g)]);
            }
            _ => {}
        }
    }
    alts
}

/// Provability of a propositional sequent in intuitionistic logic.
pub fn decide_ipl(s: &Sequent) -> Result<bool, OracleError> {
    let mut subs = Subformulas::default();
    let hyps = s.context().iter().map(|f| subs.intern(f)).collect::<Result<Vec<_>, _>>()?;
    let goal = subs.intern(s.goal())?;
    Ok(if subs.nodes.len() <= 64 {
        least_fixpoint::<u128>(&subs.nodes, &hyps, goal)
    } else {
        least_fixpoint::<Vec<u8>>(&subs.nodes, &hyps, goal)
    })
}

fn least_fixpoint<C: Ctx>(nodes: &[Node], hyps: &[usize], goal: usize) -> bool {
    let start = (add(&C::empty(nodes.len()), hyps), goal);
    let mut ids: BTreeMap<(C, usize), usize> = BTreeMap::new();
    let mut alts: Vec<Vec<Vec<usize>>> = Vec::new();
    let mut queue = VecDeque::new();
    ids.insert(start.clone(), 0);
    alts.push(Vec::new());
    queue.push_back(start);
    while let Some(state) = queue.pop_front() {
        let id = ids[&state];
        let mut mine = Vec::new();
        for premises in rules(nodes, &state) {
            let mut idxs = Vec::with_capacity(premises.len());
            for p in premises {
                let next = ids.len();
                let pid = *ids.entry(p.clone()).or_insert_with(|| {
                    queue.push_back(p);
                    next
                });
                if pid == alts.len() {
                    alts.push(Vec::new());
                }
                idxs.push(pid);
            }
            idxs.sort_unstable();
            idxs.dedup();
            mine.push(idxs);
        }
        alts[id] = mine;
    }

    let n = alts.len();
    let mut proved = vec![false; n];
    let mut waiting: Vec<Vec<(usize, usize)>> = vec![Vec::new(); n];
    let mut remaining: Vec<Vec<usize>> = Vec::with_capacity(n);
    let mut ready = Vec::new();
    for (sid, list) in alts.iter().enumerate() {
        remaining.push(list.iter().map(Vec::len).collect());
        for (aid, premises) in list.iter().enumerate() {
            if premises.is_empty() {
                ready.push(sid);
            }
            for &p in premises {
                waiting[p].push((sid, aid));
            }
        }
    }
    while let Some(sid) = ready.pop() {
        if proved[sid] {
            continue;
        }
        proved[sid] = true;
        for &(parent, aid) in &waiting[sid] {
            remaining[parent][aid] -= 1;
            if remaining[parent][aid] == 0 && !proved[parent] {
                ready.push(parent);
            }
        }
    }
    proved[0]
}

/// Number of formulas with exactly `k` connectives over `atoms` atoms,
/// counting ⊤ and ⊥ as leaves.
pub fn count_formulas(atoms: usize, k: usize) -> u128 {
    let mut n: Vec<u128> = vec![atoms as u128 + 2];
    for size in 1..=k {
        let pairs: u128 = (0..size).map(|i| n[i] * n[size - 1 - i]).sum();
        n.push(3 * pairs);
    }
    n[k]
}

/// Number of formulas with at most `k` connectives.
pub fn count_formulas_upto(atoms: usize, k: usize) -> u128 {
    (0..=k).map(|i| count_formulas(atoms, i)).sum()
}

/// The `index`-th formula with exactly `k` connectives. Order: connective
/// (∧, ∨, ⇒), then size of the left operand, then left, then right. Leaves
/// are the atoms in the given order, then ⊤, then ⊥.
pub fn unrank(atoms: &[&str], k: usize, index: u128) -> Formula {
    let counts: Vec<u128> = (0..=k).map(|i| count_formulas(atoms.len(), i)).collect();
    unrank_with(atoms, &counts, k, index)
}

fn unrank_with(atoms: &[&str], counts: &[u128], k: usize, index: u128) -> Formula {
    assert!(index < counts[k], "formula index out of range");
    if k == 0 {
        let i = index as usize;
        return match i.checked_sub(atoms.len()) {
            None => Formula::prop(atoms[i]),
            Some(0) => Formula::Top,
            Some(_) => Formula::Bot,
        };
    }
    let per_connective = counts[k] / 3;
    let connective = index / per_connective;
    let mut rest = index % per_connective;
    for left in 0..k {
        let right = k - 1 - left;
        let block = counts[left] * counts[right];
        if rest < block {
            let l = unrank_with(atoms, counts, left, rest / counts[right]);
            let r = unrank_with(atoms, counts, right, rest % counts[right]);
            return match connective {
                0 => Formula::and(l, r),
                1 => Formula::or(l, r),
                _ => Formula::imp(l, r),
            };
        }
        rest -= block;
    }
    unreachable!("block sizes sum to the count")
}

/// All formulas with at most `max_connectives` connectives, by size and
/// then in `unrank` order.
pub fn enumerate_formulas<'a>(atoms: &'a [&'a str], max_connectives: usize) -> impl Iterator<Item = Formula> + 'a {
    enumerate_shard(atoms, max_connectives, 0, 1)
}

/// The formulas of `enumerate_formulas` whose position is `shard` modulo
/// `shards`.
pub fn enumerate_shard<'a>(
    atoms: &'a [&'a str],
    max_connectives: usize,
    shard: usize,
    shards: usize,
) -> impl Iterator<Item = Formula> + 'a {
    assert!(!atoms.is_empty() && shards > 0 && shard < shards);
    let counts: Vec<u128> = (0..=max_connectives).map(|i| count_formulas(atoms.len(), i)).collect();
    let mut offset = 0u128;
    let mut ranges = Vec::new();
    for (k, &c) in counts.iter().enumerate() {
        ranges.push((k, offset, c));
        offset += c;
    }
    ranges.into_iter().flat_map(move |(k, start, c)| {
        let counts = counts.clone();
        let skip = (shard as u128 + shards as u128 - start % shards as u128) % shards as u128;
        (0..)
            .map(move |j: u128| skip + j * shards as u128)
            .take_while(move |&i| i < c)
            .map(move |i| unrank_with(atoms, &counts, k, i))
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::collections::BTreeSet;

    fn p() -> Formula {
        Formula::prop("P")
    }

    fn q() -> Formula {
        Formula::prop("Q")
    }

    fn holds(goal: Formula) -> bool {
        decide_ipl(&Sequent::goal_only(goal)).unwrap()
    }

    #[test]
    fn named_instances() {
        assert!(holds(Formula::imp(p(), Formula::imp(q(), p()))));
        assert!(!holds(Formula::or(p(), Formula::imp(p(), q()))));
        let not = |f: Formula| Formula::imp(f, Formula::Bot);
        assert!(holds(not(not(Formula::or(p(), not(p()))))));
        assert!(!holds(Formula::imp(Formula::imp(Formula::imp(p(), q()), p()), p())));
        let k = Sequent::new(vec![Formula::imp(Formula::or(p(), Formula::imp(p(), q())), q())], q());
        assert!(decide_ipl(&k).unwrap());
    }

    #[test]
    fn needs_the_implication_twice() {
        // ((P -> Q) -> P) -> P is unprovable, but (((P -> Q) -> P) -> P) -> Q) -> Q needs two uses
        let peirce = Formula::imp(Formula::imp(Formula::imp(p(), q()), p()), p());
        assert!(holds(Formula::imp(Formula::imp(peirce, q()), q())));
    }

    #[test]
    fn rejects_quantifiers() {
        let f = Formula::forall("x", Formula::atom("P", vec![crate::syntax::Term::var("x")]));
        assert_eq!(decide_ipl(&Sequent::goal_only(f)), Err(OracleError::QuantifiedInput));
    }

    #[test]
    fn counts() {
        assert_eq!(enumerate_formulas(&["p"], 0).count(), 3);
        assert_eq!(enumerate_formulas(&["p"], 1).count(), 30);
        let expected = [4u128, 48, 1152, 34560, 1161216, 41803776, 1576599552];
        for (k, e) in expected.iter().enumerate() {
            assert_eq!(count_formulas(2, k), *e);
        }
        let all: Vec<Formula> = enumerate_formulas(&["p", "q"], 2).collect();
        assert_eq!(all.len() as u128, count_formulas_upto(2, 2));
        assert_eq!(all.iter().collect::<BTreeSet<_>>().len(), all.len());
        assert!(all.iter().all(|f| f.size() <= 3));
    }

    #[test]
    fn shards_partition_the_enumeration() {
        let all: Vec<Formula> = enumerate_formulas(&["p", "q"], 2).collect();
        let mut merged: Vec<(usize, Formula)> = Vec::new();
        for shard in 0..3 {
            for (j, f) in enumerate_shard(&["p", "q"], 2, shard, 3).enumerate() {
                merged.push((shard + 3 * j, f));
            }
        }
        merged.sort_by_key(|(i, _)| *i);
        assert_eq!(merged.into_iter().map(|(_, f)| f).collect::<Vec<_>>(), all);
    }
}
