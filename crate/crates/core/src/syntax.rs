//! First-order syntax: terms, formulas and sequents.
//!
//! Formulas carry named bound variables. Structural equality (`==` on
//! [`Formula`]) is exact; rule matching goes through [`Formula::alpha_eq`]
//! or the canonical form returned by [`Formula::canonical`], which renames
//! bound variables by binding depth.

use alloc::boxed::Box;
use alloc::collections::BTreeSet;
use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;
use core::cmp::Ordering;
use core::hash::{Hash, Hasher};

/// Name of the distinguished constant ending every word.
pub const EPS: &str = "eps";

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Term {
    Var(String),
    Const(String),
    App(String, Vec<Term>),
}

impl Term {
    pub fn var(name: impl Into<String>) -> Term {
        Term::Var(name.into())
    }

    pub fn constant(name: impl Into<String>) -> Term {
        Term::Const(name.into())
    }

    pub fn app(symbol: impl Into<String>, args: Vec<Term>) -> Term {
        Term::App(symbol.into(), args)
    }

    pub fn eps() -> Term {
        Term::Const(EPS.to_string())
    }

    /// Builds the word `symbols[0](symbols[1](...(eps)))`.
    pub fn word<S: AsRef<str>>(symbols: &[S]) -> Term {
        symbols
            .iter()
            .rev()
            .fold(Term::eps(), |acc, s| Term::App(s.as_ref().to_string(), alloc::vec![acc]))
    }

    /// Reads a word back into its symbol list, outermost symbol first.
    pub fn as_word(&self) -> Option<Vec<&str>> {
        let mut out = Vec::new();
        let mut cur = self;
        loop {
            match cur {
                Term::Const(c) if c == EPS => return Some(out),
                Term::App(f, args) if args.len() == 1 => {
                    out.push(f.as_str());
                    cur = &args[0];
                }
                _ => return None,
            }
        }
    }

    pub fn is_closed(&self) -> bool {
        match self {
            Term::Var(_) => false,
            Term::Const(_) => true,
            Term::App(_, args) => args.iter().all(Term::is_closed),
        }
    }

    pub fn has_var(&self, name: &str) -> bool {
        match self {
            Term::Var(v) => v == name,
            Term::Const(_) => false,
            Term::App(_, args) => args.iter().any(|a| a.has_var(name)),
        }
    }

    pub fn collect_vars(&self, out: &mut BTreeSet<String>) {
        match self {
            Term::Var(v) => {
                out.insert(v.clone());
            }
            Term::Const(_) => {}
            Term::App(_, args) => args.iter().for_each(|a| a.collect_vars(out)),
        }
    }

    /// Every identifier in the term, variables, constants and symbols alike.
    pub fn collect_names(&self, out: &mut BTreeSet<String>) {
        match self {
            Term::Var(v) | Term::Const(v) => {
                out.insert(v.clone());
            }
            Term::App(f, args) => {
                out.insert(f.clone());
                args.iter().for_each(|a| a.collect_names(out));
            }
        }
    }

    pub fn collect_constants(&self, out: &mut BTreeSet<Term>) {
        match self {
            Term::Var(_) => {}
            Term::Const(_) => {
                out.insert(self.clone());
            }
            Term::App(_, args) => args.iter().for_each(|a| a.collect_constants(out)),
        }
    }

    pub fn collect_closed_subterms(&self, out: &mut BTreeSet<Term>) {
        if self.is_closed() {
            out.insert(self.clone());
        }
        if let Term::App(_, args) = self {
            args.iter().for_each(|a| a.collect_closed_subterms(out));
        }
    }

    pub fn subst(&self, var: &str, by: &Term) -> Term {
        match self {
            Term::Var(v) if v == var => by.clone(),
            Term::Var(_) | Term::Const(_) => self.clone(),
            Term::App(f, args) => Term::App(f.clone(), args.iter().map(|a| a.subst(var, by)).collect()),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Atom {
    pub pred: String,
    pub args: Vec<Term>,
}

impl Atom {
    pub fn new(pred: impl Into<String>, args: Vec<Term>) -> Atom {
        Atom { pred: pred.into(), args }
    }

    pub fn prop(pred: impl Into<String>) -> Atom {
        Atom::new(pred, Vec::new())
    }

    pub fn is_closed(&self) -> bool {
        self.args.iter().all(Term::is_closed)
    }

    fn subst(&self, var: &str, by: &Term) -> Atom {
        Atom { pred: self.pred.clone(), args: self.args.iter().map(|a| a.subst(var, by)).collect() }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Formula {
    Atom(Atom),
    /// Negated atom; only produced by finite-domain normalization.
    NegAtom(Atom),
    Top,
    Bot,
    And(Box<Formula>, Box<Formula>),
    Or(Box<Formula>, Box<Formula>),
    Imp(Box<Formula>, Box<Formula>),
    Forall(String, Box<Formula>),
    Exists(String, Box<Formula>),
    /// The freeze modality `[A]`.
    Frozen(Box<Formula>),
}

impl Formula {
    pub fn prop(name: impl Into<String>) -> Formula {
        Formula::Atom(Atom::prop(name))
    }

    pub fn atom(pred: impl Into<String>, args: Vec<Term>) -> Formula {
        Formula::Atom(Atom::new(pred, args))
    }

    pub fn and(l: Formula, r: Formula) -> Formula {
        Formula::And(Box::new(l), Box::new(r))
    }

    pub fn or(l: Formula, r: Formula) -> Formula {
        Formula::Or(Box::new(l), Box::new(r))
    }

    pub fn imp(l: Formula, r: Formula) -> Formula {
        Formula::Imp(Box::new(l), Box::new(r))
    }

    pub fn forall(var: impl Into<String>, body: Formula) -> Formula {
        Formula::Forall(var.into(), Box::new(body))
    }

    pub fn exists(var: impl Into<String>, body: Formula) -> Formula {
        Formula::Exists(var.into(), Box::new(body))
    }

    pub fn frozen(inner: Formula) -> Formula {
        Formula::Frozen(Box::new(inner))
    }

    /// Number of connectives and quantifiers. The freeze modality is not a
    /// connective and does not count.
    pub fn size(&self) -> usize {
        match self {
            Formula::Atom(_) | Formula::NegAtom(_) | Formula::Top | Formula::Bot => 0,
            Formula::And(a, b) | Formula::Or(a, b) | Formula::Imp(a, b) => 1 + a.size() + b.size(),
            Formula::Forall(_, a) | Formula::Exists(_, a) => 1 + a.size(),
            Formula::Frozen(a) => a.size(),
        }
    }

    pub fn is_atomic(&self) -> bool {
        matches!(self, Formula::Atom(_) | Formula::NegAtom(_))
    }

    pub fn has_quantifier(&self) -> bool {
        match self {
            Formula::Atom(_) | Formula::NegAtom(_) | Formula::Top | Formula::Bot => false,
            Formula::And(a, b) | Formula::Or(a, b) | Formula::Imp(a, b) => a.has_quantifier() || b.has_quantifier(),
            Formula::Forall(..) | Formula::Exists(..) => true,
            Formula::Frozen(a) => a.has_quantifier(),
        }
    }

    pub fn has_frozen(&self) -> bool {
        match self {
            Formula::Atom(_) | Formula::NegAtom(_) | Formula::Top | Formula::Bot => false,
            Formula::And(a, b) | Formula::Or(a, b) | Formula::Imp(a, b) => a.has_frozen() || b.has_frozen(),
            Formula::Forall(_, a) | Formula::Exists(_, a) => a.has_frozen(),
            Formula::Frozen(_) => true,
        }
    }

    /// Quantifier-free, freeze-free and without negated atoms.
    pub fn is_propositional(&self) -> bool {
        match self {
            Formula::Atom(_) | Formula::Top | Formula::Bot => true,
            Formula::NegAtom(_) | Formula::Forall(..) | Formula::Exists(..) | Formula::Frozen(_) => false,
            Formula::And(a, b) | Formula::Or(a, b) | Formula::Imp(a, b) => a.is_propositional() && b.is_propositional(),
        }
    }

    pub fn free_vars(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        self.collect_free_vars(&mut Vec::new(), &mut out);
        out
    }

    fn collect_free_vars(&self, bound: &mut Vec<String>, out: &mut BTreeSet<String>) {
        match self {
            Formula::Atom(a) | Formula::NegAtom(a) => {
                for t in &a.args {
                    let mut vs = BTreeSet::new();
                    t.collect_vars(&mut vs);
                    out.extend(vs.into_iter().filter(|v| !bound.contains(v)));
                }
            }
            Formula::Top | Formula::Bot => {}
            Formula::And(a, b) | Formula::Or(a, b) | Formula::Imp(a, b) => {
                a.collect_free_vars(bound, out);
                b.collect_free_vars(bound, out);
            }
            Formula::Forall(x, a) | Formula::Exists(x, a) => {
                bound.push(x.clone());
                a.collect_free_vars(bound, out);
                bound.pop();
            }
            Formula::Frozen(a) => a.collect_free_vars(bound, out),
        }
    }

    pub fn has_free_var(&self, name: &str) -> bool {
        match self {
            Formula::Atom(a) | Formula::NegAtom(a) => a.args.iter().any(|t| t.has_var(name)),
            Formula::Top | Formula::Bot => false,
            Formula::And(a, b) | Formula::Or(a, b) | Formula::Imp(a, b) => a.has_free_var(name) || b.has_free_var(name),
            Formula::Forall(x, a) | Formula::Exists(x, a) => x != name && a.has_free_var(name),
            Formula::Frozen(a) => a.has_free_var(name),
        }
    }

    pub fn is_closed(&self) -> bool {
        self.free_vars().is_empty()
    }

    /// Every identifier occurring in the formula: bound names, variables,
    /// constants and function symbols. Predicate names are left out.
    pub fn collect_names(&self, out: &mut BTreeSet<String>) {
        match self {
            Formula::Atom(a) | Formula::NegAtom(a) => a.args.iter().for_each(|t| t.collect_names(out)),
            Formula::Top | Formula::Bot => {}
            Formula::And(a, b) | Formula::Or(a, b) | Formula::Imp(a, b) => {
                a.collect_names(out);
                b.collect_names(out);
            }
            Formula::Forall(x, a) | Formula::Exists(x, a) => {
                out.insert(x.clone());
                a.collect_names(out);
            }
            Formula::Frozen(a) => a.collect_names(out),
        }
    }

    pub fn collect_constants(&self, out: &mut BTreeSet<Term>) {
        self.visit_atoms(&mut |a| a.args.iter().for_each(|t| t.collect_constants(out)));
    }

    pub fn collect_closed_subterms(&self, out: &mut BTreeSet<Term>) {
        self.visit_atoms(&mut |a| a.args.iter().for_each(|t| t.collect_closed_subterms(out)));
    }

    pub fn visit_atoms(&self, f: &mut dyn FnMut(&Atom)) {
        match self {
            Formula::Atom(a) | Formula::NegAtom(a) => f(a),
            Formula::Top | Formula::Bot => {}
            Formula::And(a, b) | Formula::Or(a, b) | Formula::Imp(a, b) => {
                a.visit_atoms(f);
                b.visit_atoms(f);
            }
            Formula::Forall(_, a) | Formula::Exists(_, a) | Formula::Frozen(a) => a.visit_atoms(f),
        }
    }

    /// Capture-avoiding substitution of `by` for the free variable `var`.
    pub fn subst(&self, var: &str, by: &Term) -> Formula {
        if !self.has_free_var(var) {
            return self.clone();
        }
        let mut by_vars = BTreeSet::new();
        by.collect_vars(&mut by_vars);
        self.subst_inner(var, by, &by_vars)
    }

    fn subst_inner(&self, var: &str, by: &Term, by_vars: &BTreeSet<String>) -> Formula {
        match self {
            Formula::Atom(a) => Formula::Atom(a.subst(var, by)),
            Formula::NegAtom(a) => Formula::NegAtom(a.subst(var, by)),
            Formula::Top | Formula::Bot => self.clone(),
            Formula::And(a, b) => Formula::and(a.subst_inner(var, by, by_vars), b.subst_inner(var, by, by_vars)),
            Formula::Or(a, b) => Formula::or(a.subst_inner(var, by, by_vars), b.subst_inner(var, by, by_vars)),
            Formula::Imp(a, b) => Formula::imp(a.subst_inner(var, by, by_vars), b.subst_inner(var, by, by_vars)),
            Formula::Frozen(a) => Formula::frozen(a.subst_inner(var, by, by_vars)),
            Formula::Forall(x, a) | Formula::Exists(x, a) => {
                if x == var || !a.has_free_var(var) {
                    return self.clone();
                }
                let (x2, body) = if by_vars.contains(x) {
                    let mut avoid = BTreeSet::new();
                    a.collect_names(&mut avoid);
                    by.collect_names(&mut avoid);
                    avoid.insert(var.to_string());
                    let fresh = fresh_name(x, &avoid);
                    let renamed = a.subst(x, &Term::Var(fresh.clone()));
                    (fresh, renamed)
                } else {
                    (x.clone(), (**a).clone())
                };
                let body = body.subst_inner(var, by, by_vars);
                match self {
                    Formula::Forall(..) => Formula::Forall(x2, Box::new(body)),
                    _ => Formula::Exists(x2, Box::new(body)),
                }
            }
        }
    }

    /// Renames bound variables to `#depth` so that alpha-equivalent
    /// formulas become structurally equal.
    pub fn canonical(&self) -> Formula {
        if !self.has_quantifier() {
            return self.clone();
        }
        self.canonical_at(&mut Vec::new())
    }

    fn canonical_at(&self, scope: &mut Vec<(String, String)>) -> Formula {
        fn rename_term(t: &Term, scope: &[(String, String)]) -> Term {
            match t {
                Term::Var(v) => match scope.iter().rev().find(|(from, _)| from == v) {
                    Some((_, to)) => Term::Var(to.clone()),
                    None => t.clone(),
                },
                Term::Const(_) => t.clone(),
                Term::App(f, args) => Term::App(f.clone(), args.iter().map(|a| rename_term(a, scope)).collect()),
            }
        }
        let rename_atom = |a: &Atom, scope: &[(String, String)]| Atom {
            pred: a.pred.clone(),
            args: a.args.iter().map(|t| rename_term(t, scope)).collect(),
        };
        match self {
            Formula::Atom(a) => Formula::Atom(rename_atom(a, scope)),
            Formula::NegAtom(a) => Formula::NegAtom(rename_atom(a, scope)),
            Formula::Top | Formula::Bot => self.clone(),
            Formula::And(a, b) => Formula::and(a.canonical_at(scope), b.canonical_at(scope)),
            Formula::Or(a, b) => Formula::or(a.canonical_at(scope), b.canonical_at(scope)),
            Formula::Imp(a, b) => Formula::imp(a.canonical_at(scope), b.canonical_at(scope)),
            Formula::Frozen(a) => Formula::frozen(a.canonical_at(scope)),
            Formula::Forall(x, a) | Formula::Exists(x, a) => {
                let name = format!("#{}", scope.len());
                scope.push((x.clone(), name.clone()));
                let body = a.canonical_at(scope);
                scope.pop();
                match self {
                    Formula::Forall(..) => Formula::Forall(name, Box::new(body)),
                    _ => Formula::Exists(name, Box::new(body)),
                }
            }
        }
    }

    pub fn alpha_eq(&self, other: &Formula) -> bool {
        self == other || (self.has_quantifier() && self.canonical() == other.canonical())
    }

    /// Renames bound variables apart: every binder gets a name distinct from
    /// all other binders and from every free identifier of the formula.
    pub fn rectify(&self) -> Formula {
        let mut used = self.free_vars();
        self.visit_atoms(&mut |a| {
            for t in &a.args {
                let mut consts = BTreeSet::new();
                t.collect_constants(&mut consts);
                used.extend(consts.into_iter().filter_map(|c| match c {
                    Term::Const(n) => Some(n),
                    _ => None,
                }));
                collect_symbols(t, &mut used);
            }
        });
        self.rectify_inner(&used, &mut BTreeSet::new())
    }

    fn rectify_inner(&self, used: &BTreeSet<String>, binders: &mut BTreeSet<String>) -> Formula {
        match self {
            Formula::Atom(_) | Formula::NegAtom(_) | Formula::Top | Formula::Bot => self.clone(),
            Formula::And(a, b) => Formula::and(a.rectify_inner(used, binders), b.rectify_inner(used, binders)),
            Formula::Or(a, b) => Formula::or(a.rectify_inner(used, binders), b.rectify_inner(used, binders)),
            Formula::Imp(a, b) => Formula::imp(a.rectify_inner(used, binders), b.rectify_inner(used, binders)),
            Formula::Frozen(a) => Formula::frozen(a.rectify_inner(used, binders)),
            Formula::Forall(x, a) | Formula::Exists(x, a) => {
                let (name, body) = if binders.contains(x) || used.contains(x) {
                    let mut avoid = used.clone();
                    avoid.extend(binders.iter().cloned());
                    a.collect_names(&mut avoid);
                    let fresh = fresh_name(x, &avoid);
                    (fresh.clone(), a.subst(x, &Term::Var(fresh)))
                } else {
                    (x.clone(), (**a).clone())
                };
                binders.insert(name.clone());
                let body = body.rectify_inner(used, binders);
                match self {
                    Formula::Forall(..) => Formula::Forall(name, Box::new(body)),
                    _ => Formula::Exists(name, Box::new(body)),
                }
            }
        }
    }

    pub fn unfrozen(&self) -> Formula {
        match self {
            Formula::Frozen(a) => a.unfrozen(),
            Formula::Atom(_) | Formula::NegAtom(_) | Formula::Top | Formula::Bot => self.clone(),
            Formula::And(a, b) => Formula::and(a.unfrozen(), b.unfrozen()),
            Formula::Or(a, b) => Formula::or(a.unfrozen(), b.unfrozen()),
            Formula::Imp(a, b) => Formula::imp(a.unfrozen(), b.unfrozen()),
            Formula::Forall(x, a) => Formula::forall(x.clone(), a.unfrozen()),
            Formula::Exists(x, a) => Formula::exists(x.clone(), a.unfrozen()),
        }
    }
}

fn collect_symbols(t: &Term, out: &mut BTreeSet<String>) {
    if let Term::App(f, args) = t {
        out.insert(f.clone());
        args.iter().for_each(|a| collect_symbols(a, out));
    }
}

/// Returns `base` if unused, otherwise the first of `base_1`, `base_2`, ...
/// not in `avoid`.
pub fn fresh_name(base: &str, avoid: &BTreeSet<String>) -> String {
    let stem = match base.rfind('_') {
        Some(i) if i > 0 && base[i + 1..].chars().all(|c| c.is_ascii_digit()) && i + 1 < base.len() => &base[..i],
        _ => base,
    };
    if !avoid.contains(base) {
        return base.to_string();
    }
    (1..)
        .map(|k| format!("{stem}_{k}"))
        .find(|n| !avoid.contains(n))
        .expect("unbounded name supply")
}

/// A sequent `context |- goal` whose context is a multiset.
///
/// The context is kept sorted, so two sequents built from the same multiset
/// are structurally identical. Equality and hashing are up to alpha-renaming
/// of bound variables.
#[derive(Clone, Debug)]
pub struct Sequent {
    context: Vec<Formula>,
    goal: Formula,
}

impl Sequent {
    pub fn new(mut context: Vec<Formula>, goal: Formula) -> Sequent {
        context.sort();
        Sequent { context, goal }
    }

    pub fn goal_only(goal: Formula) -> Sequent {
        Sequent { context: Vec::new(), goal }
    }

    pub fn context(&self) -> &[Formula] {
        &self.context
    }

    pub fn goal(&self) -> &Formula {
        &self.goal
    }

    pub fn into_parts(self) -> (Vec<Formula>, Formula) {
        (self.context, self.goal)
    }

    pub fn with_goal(&self, goal: Formula) -> Sequent {
        Sequent { context: self.context.clone(), goal }
    }

    /// Adds formulas to the context.
    pub fn with(&self, extra: impl IntoIterator<Item = Formula>) -> Sequent {
        let mut ctx = self.context.clone();
        ctx.extend(extra);
        Sequent::new(ctx, self.goal.clone())
    }

    pub fn count(&self, f: &Formula) -> usize {
        self.context.iter().filter(|g| g.alpha_eq(f)).count()
    }

    pub fn contains(&self, f: &Formula) -> bool {
        self.context.iter().any(|g| g.alpha_eq(f))
    }

    /// Removes one copy of `f` from the context.
    pub fn without(&self, f: &Formula) -> Option<Sequent> {
        let i = self.context.iter().position(|g| g.alpha_eq(f))?;
        let mut ctx = self.context.clone();
        ctx.remove(i);
        Some(Sequent { context: ctx, goal: self.goal.clone() })
    }

    /// Replaces one copy of `old` in the context by `new` formulas.
    pub fn replace(&self, old: &Formula, new: impl IntoIterator<Item = Formula>) -> Option<Sequent> {
        Some(self.without(old)?.with(new))
    }

    pub fn size(&self) -> usize {
        self.context.iter().map(Formula::size).sum::<usize>() + self.goal.size()
    }

    pub fn is_propositional(&self) -> bool {
        self.goal.is_propositional() && self.context.iter().all(Formula::is_propositional)
    }

    pub fn has_quantifier(&self) -> bool {
        self.goal.has_quantifier() || self.context.iter().any(Formula::has_quantifier)
    }

    pub fn has_free_var(&self, name: &str) -> bool {
        self.goal.has_free_var(name) || self.context.iter().any(|f| f.has_free_var(name))
    }

    pub fn context_has_free_var(&self, name: &str) -> bool {
        self.context.iter().any(|f| f.has_free_var(name))
    }

    pub fn free_vars(&self) -> BTreeSet<String> {
        let mut out = self.goal.free_vars();
        for f in &self.context {
            out.extend(f.free_vars());
        }
        out
    }

    pub fn collect_names(&self, out: &mut BTreeSet<String>) {
        self.goal.collect_names(out);
        self.context.iter().for_each(|f| f.collect_names(out));
    }

    pub fn names(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        self.collect_names(&mut out);
        out
    }

    pub fn subst(&self, var: &str, by: &Term) -> Sequent {
        Sequent::new(self.context.iter().map(|f| f.subst(var, by)).collect(), self.goal.subst(var, by))
    }

    /// The formulas of the sequent as one multiset, goal included.
    pub fn formulas(&self) -> impl Iterator<Item = &Formula> {
        self.context.iter().chain(core::iter::once(&self.goal))
    }

    pub fn canonical(&self) -> Sequent {
        if !self.has_quantifier() {
            return self.clone();
        }
        Sequent::new(self.context.iter().map(Formula::canonical).collect(), self.goal.canonical())
    }

    pub fn unfrozen(&self) -> Sequent {
        Sequent::new(self.context.iter().map(Formula::unfrozen).collect(), self.goal.unfrozen())
    }
}

impl PartialEq for Sequent {
    fn eq(&self, other: &Self) -> bool {
        if self.context.len() != other.context.len() {
            return false;
        }
        if self.context == other.context && self.goal == other.goal {
            return true;
        }
        if !self.has_quantifier() && !other.has_quantifier() {
            return false;
        }
        let (a, b) = (self.canonical(), other.canonical());
        a.context == b.context && a.goal == b.goal
    }
}

impl Eq for Sequent {}

impl Hash for Sequent {
    fn hash<H: Hasher>(&self, state: &mut H) {
        let c = self.canonical();
        c.context.hash(state);
        c.goal.hash(state);
    }
}

impl PartialOrd for Sequent {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Sequent {
    fn cmp(&self, other: &Self) -> Ordering {
        if self == other {
            return Ordering::Equal;
        }
        let (a, b) = (self.canonical(), other.canonical());
        (&a.context, &a.goal).cmp(&(&b.context, &b.goal))
    }
}
