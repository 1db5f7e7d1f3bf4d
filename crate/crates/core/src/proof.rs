//! Rule-labelled proof trees.

use alloc::collections::BTreeSet;
use alloc::string::String;
use alloc::vec::Vec;

use crate::syntax::{Atom, Formula, Sequent, Term};

/// The data that makes one rule application concrete.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RuleInstance {
    pub rule: String,
    /// Formula the rule acts on, for rules that pick one from the context.
    pub principal: Option<Formula>,
    /// Instantiating term for rules whose schema mentions `(t/x)`.
    pub witness: Option<Term>,
    /// Eigenvariable introduced by the rule.
    pub fresh: Option<String>,
}

impl RuleInstance {
    pub fn new(rule: impl Into<String>) -> RuleInstance {
        RuleInstance { rule: rule.into(), principal: None, witness: None, fresh: None }
    }

    pub fn on(mut self, principal: Formula) -> RuleInstance {
        self.principal = Some(principal);
        self
    }

    pub fn with_witness(mut self, t: Term) -> RuleInstance {
        self.witness = Some(t);
        self
    }

    pub fn with_fresh(mut self, x: impl Into<String>) -> RuleInstance {
        self.fresh = Some(x.into());
        self
    }
}

/// What a proof node concludes: a sequent, or a bare closed atom for the
/// pushdown systems.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Judgement {
    Sequent(Sequent),
    Fact(Atom),
}

impl Judgement {
    pub fn as_sequent(&self) -> Option<&Sequent> {
        match self {
            Judgement::Sequent(s) => Some(s),
            Judgement::Fact(_) => None,
        }
    }

    pub fn as_fact(&self) -> Option<&Atom> {
        match self {
            Judgement::Fact(a) => Some(a),
            Judgement::Sequent(_) => None,
        }
    }
}

impl From<Sequent> for Judgement {
    fn from(s: Sequent) -> Self {
        Judgement::Sequent(s)
    }
}

impl From<Atom> for Judgement {
    fn from(a: Atom) -> Self {
        Judgement::Fact(a)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Proof {
    pub rule: RuleInstance,
    pub conclusion: Judgement,
    pub premises: Vec<Proof>,
}

impl Proof {
    pub fn new(rule: RuleInstance, conclusion: impl Into<Judgement>, premises: Vec<Proof>) -> Proof {
        Proof { rule, conclusion: conclusion.into(), premises }
    }

    pub fn leaf(rule: RuleInstance, conclusion: impl Into<Judgement>) -> Proof {
        Proof::new(rule, conclusion, Vec::new())
    }

    pub fn rule_id(&self) -> &str {
        &self.rule.rule
    }

    /// Conclusion as a sequent. Panics on fact-valued nodes.
    pub fn sequent(&self) -> &Sequent {
        self.conclusion.as_sequent().expect("proof node concludes a fact, not a sequent")
    }

    /// Height of the tree; a single node has height 1.
    pub fn height(&self) -> usize {
        1 + self.premises.iter().map(Proof::height).max().unwrap_or(0)
    }

    pub fn node_count(&self) -> usize {
        1 + self.premises.iter().map(Proof::node_count).sum::<usize>()
    }

    /// Pre-order walk with child-index paths from the root.
    pub fn walk<'a>(&'a self, f: &mut dyn FnMut(&[usize], &'a Proof)) {
        fn go<'a>(p: &'a Proof, path: &mut Vec<usize>, f: &mut dyn FnMut(&[usize], &'a Proof)) {
            f(path, p);
            for (i, q) in p.premises.iter().enumerate() {
                path.push(i);
                go(q, path, f);
                path.pop();
            }
        }
        go(self, &mut Vec::new(), f)
    }

    pub fn subproof(&self, path: &[usize]) -> Option<&Proof> {
        path.iter().try_fold(self, |p, &i| p.premises.get(i))
    }

    pub fn rule_ids(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        self.walk(&mut |_, p| {
            out.insert(p.rule.rule.clone());
        });
        out
    }

    /// Every identifier used by sequents and annotations in the tree.
    pub fn names(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        self.walk(&mut |_, p| {
            if let Judgement::Sequent(s) = &p.conclusion {
                s.collect_names(&mut out);
            }
            if let Some(x) = &p.rule.fresh {
                out.insert(x.clone());
            }
            if let Some(t) = &p.rule.witness {
                t.collect_names(&mut out);
            }
        });
        out
    }

    /// Substitutes `by` for the free variable `var` throughout a sequent
    /// proof. Eigenvariables clashing with the variables of `by` are renamed
    /// first.
    pub fn subst_var(&self, var: &str, by: &Term) -> Proof {
        let mut by_vars = BTreeSet::new();
        by.collect_vars(&mut by_vars);
        let mut avoid = self.names();
        by.collect_names(&mut avoid);
        avoid.insert(var.into());
        self.subst_inner(var, by, &by_vars, &mut avoid)
    }

    fn subst_inner(&self, var: &str, by: &Term, by_vars: &BTreeSet<String>, avoid: &mut BTreeSet<String>) -> Proof {
        if let Some(y) = self.rule.fresh.as_deref() {
            if y == var {
                // the variable is rebound below this node; nothing free to replace
                return self.clone();
            }
            if by_vars.contains(y) {
                let y2 = crate::syntax::fresh_name(y, avoid);
                avoid.insert(y2.clone());
                let renamed = self.rename_eigenvariable(&y2);
                return renamed.subst_inner(var, by, by_vars, avoid);
            }
        }
        let conclusion = match &self.conclusion {
            Judgement::Sequent(s) => Judgement::Sequent(s.subst(var, by)),
            Judgement::Fact(a) => Judgement::Fact(a.clone()),
        };
        let rule = RuleInstance {
            rule: self.rule.rule.clone(),
            principal: self.rule.principal.as_ref().map(|f| f.subst(var, by)),
            witness: self.rule.witness.as_ref().map(|t| t.subst(var, by)),
            fresh: self.rule.fresh.clone(),
        };
        Proof {
            rule,
            conclusion,
            premises: self.premises.iter().map(|p| p.subst_inner(var, by, by_vars, avoid)).collect(),
        }
    }

    /// Renames the eigenvariable of this node to `to` in the node's premises.
    /// The conclusion does not mention the eigenvariable, so it is unchanged.
    pub fn rename_eigenvariable(&self, to: &str) -> Proof {
        let Some(y) = self.rule.fresh.clone() else {
            return self.clone();
        };
        let t = Term::Var(to.into());
        let mut rule = self.rule.clone();
        rule.fresh = Some(to.into());
        Proof {
            rule,
            conclusion: self.conclusion.clone(),
            premises: self.premises.iter().map(|p| p.subst_var(&y, &t)).collect(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    #[test]
    fn height_and_paths() {
        let s = Sequent::goal_only(Formula::Top);
        let leaf = Proof::leaf(RuleInstance::new("top_right"), s.clone());
        let p = Proof::new(RuleInstance::new("x"), s.clone(), vec![leaf.clone(), Proof::new(RuleInstance::new("y"), s, vec![leaf])]);
        assert_eq!(p.height(), 3);
        assert_eq!(p.node_count(), 4);
        assert_eq!(p.subproof(&[1, 0]).unwrap().rule_id(), "top_right");
        let mut paths = Vec::new();
        p.walk(&mut |path, _| paths.push(path.to_vec()));
        assert_eq!(paths, vec![vec![], vec![0], vec![1], vec![1, 0]]);
    }
}
