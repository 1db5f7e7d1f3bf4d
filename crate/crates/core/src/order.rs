//! Well-founded orders used to classify rules.

use alloc::vec::Vec;

use crate::syntax::{Formula, Sequent};

/// Strict size order on formulas.
pub fn formula_less(a: &Formula, b: &Formula) -> bool {
    a.size() < b.size()
}

/// Strict size order on sequents: total connective count of context and goal.
pub fn size_order_less(a: &Sequent, b: &Sequent) -> bool {
    a.size() < b.size()
}

/// Multiset extension of [`formula_less`] to sequents.
///
/// Each sequent is read as the multiset of its context formulas plus its
/// goal. `a` is below `b` when `a` arises from `b` by removing a nonempty
/// sub-multiset `X` and adding formulas each strictly smaller than some
/// member of `X`.
pub fn multiset_order_less(a: &Sequent, b: &Sequent) -> bool {
    multiset_less(a.formulas(), b.formulas())
}

/// Dershowitz-Manna comparison of two formula multisets.
pub fn multiset_less<'a>(a: impl IntoIterator<Item = &'a Formula>, b: impl IntoIterator<Item = &'a Formula>) -> bool {
    // cancel common elements; what is left of `b` is X, of `a` is Y
    let mut removed: Vec<&Formula> = b.into_iter().collect();
    let mut added: Vec<&Formula> = Vec::new();
    for f in a {
        match removed.iter().position(|g| g.alpha_eq(f)) {
            Some(i) => {
                removed.swap_remove(i);
            }
            None => added.push(f),
        }
    }
    if removed.is_empty() {
        return false;
    }
    let max_removed = removed.iter().map(|f| f.size()).max().unwrap_or(0);
    added.iter().all(|y| y.size() < max_removed)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::Term;
    use alloc::vec;

    fn p() -> Formula {
        Formula::prop("P")
    }

    fn q() -> Formula {
        Formula::prop("Q")
    }

    #[test]
    fn size_order_examples() {
        assert!(formula_less(&p(), &Formula::and(p(), q())));
        let pq = Formula::and(p(), q());
        assert!(!formula_less(&pq, &pq));
        // |- A   vs   |- forall x (A | B) with A = B = P
        let a = Sequent::goal_only(p());
        let b = Sequent::goal_only(Formula::forall("x", Formula::or(p(), p())));
        assert!(size_order_less(&a, &b));
        assert!(!size_order_less(&b, &a));
    }

    #[test]
    fn multiset_order_examples() {
        // premise of the conjunctive left-implication rule
        let (c, d, bb, g, gamma) = (p(), q(), Formula::prop("B"), Formula::prop("G"), Formula::prop("R"));
        let prem = Sequent::new(vec![gamma.clone(), Formula::imp(c.clone(), bb.clone())], c.clone());
        let concl = Sequent::new(vec![gamma, Formula::imp(Formula::and(c, d), bb)], g);
        assert!(multiset_order_less(&prem, &concl));
        assert!(!multiset_order_less(&concl, &prem));
        let pp = Sequent::new(vec![p()], p());
        assert!(!multiset_order_less(&pp, &pp));
    }

    #[test]
    fn multiset_order_uses_alpha_equivalence() {
        let f = Formula::forall("x", Formula::atom("P", vec![Term::var("x")]));
        let g = Formula::forall("y", Formula::atom("P", vec![Term::var("y")]));
        let a = Sequent::new(vec![f], Formula::Top);
        let b = Sequent::new(vec![g], Formula::Top);
        assert!(!multiset_order_less(&a, &b));
        assert!(!multiset_order_less(&b, &a));
    }
}
