//! Rule tables, proof checking and the general notion of cut.
//!
//! A [`RuleTable`] names a calculus, lists its rules with their
//! introduction/non-introduction classification and major-premise tagging,
//! and knows which well-founded order the classification refers to.

use alloc::string::{String, ToString};
use alloc::vec::Vec;
use core::fmt;

use crate::apds::ApdsSystem;
use crate::fdl::FdlModel;
use crate::order::{multiset_order_less, size_order_less};
use crate::proof::{Judgement, Proof};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum CalculusId {
    /// Finite Domain Logic over a fixed model.
    Fdl,
    /// Constructive natural deduction.
    Nd,
    /// Gentzen-style sequent calculus with explicit contraction.
    G,
    /// Kleene-style sequent calculus.
    K,
    /// Contraction-free calculus with case-split left implication rules.
    D,
    /// An alternating pushdown system.
    Apds,
    /// Natural deduction introduction rules plus `delay`.
    PseudoA,
}

impl CalculusId {
    pub fn name(self) -> &'static str {
        match self {
            CalculusId::Fdl => "fdl",
            CalculusId::Nd => "nd",
            CalculusId::G => "g",
            CalculusId::K => "k",
            CalculusId::D => "d",
            CalculusId::Apds => "apds",
            CalculusId::PseudoA => "delay",
        }
    }
}

impl fmt::Display for CalculusId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Order {
    Size,
    Multiset,
}

/// Which premises of a rule are major.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Major {
    Leftmost,
    All,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RuleInfo {
    pub id: String,
    pub intro: bool,
    pub major: Major,
}

impl RuleInfo {
    pub fn intro(id: impl Into<String>) -> RuleInfo {
        RuleInfo { id: id.into(), intro: true, major: Major::All }
    }

    pub fn non_intro(id: impl Into<String>, major: Major) -> RuleInfo {
        RuleInfo { id: id.into(), intro: false, major }
    }

    pub fn is_major(&self, premise: usize) -> bool {
        match self.major {
            Major::All => true,
            Major::Leftmost => premise == 0,
        }
    }
}

#[derive(Clone, Debug)]
pub(crate) enum TableData {
    Plain,
    Fdl(FdlModel),
    Apds(ApdsSystem),
}

#[derive(Clone, Debug)]
pub struct RuleTable {
    calculus: CalculusId,
    order: Order,
    rules: Vec<RuleInfo>,
    pub(crate) data: TableData,
}

impl RuleTable {
    pub(crate) fn new(calculus: CalculusId, order: Order, rules: Vec<RuleInfo>, data: TableData) -> RuleTable {
        RuleTable { calculus, order, rules, data }
    }

    pub fn calculus(&self) -> CalculusId {
        self.calculus
    }

    pub fn order(&self) -> Order {
        self.order
    }

    pub fn rules(&self) -> &[RuleInfo] {
        &self.rules
    }

    pub fn rule(&self, id: &str) -> Option<&RuleInfo> {
        self.rules.iter().find(|r| r.id == id)
    }

    pub fn apds_system(&self) -> Option<&ApdsSystem> {
        match &self.data {
            TableData::Apds(s) => Some(s),
            _ => None,
        }
    }

    pub fn fdl_model(&self) -> Option<&FdlModel> {
        match &self.data {
            TableData::Fdl(m) => Some(m),
            _ => None,
        }
    }

    /// Strict order of the calculus between two judgements of the same kind.
    pub fn less(&self, a: &Judgement, b: &Judgement) -> bool {
        match (a, b) {
            (Judgement::Sequent(x), Judgement::Sequent(y)) => match self.order {
                Order::Size => size_order_less(x, y),
                Order::Multiset => multiset_order_less(x, y),
            },
            (Judgement::Fact(x), Judgement::Fact(y)) => fact_size(x) < fact_size(y),
            _ => false,
        }
    }
}

fn fact_size(a: &crate::syntax::Atom) -> usize {
    fn term_size(t: &crate::syntax::Term) -> usize {
        match t {
            crate::syntax::Term::App(_, args) => 1 + args.iter().map(term_size).sum::<usize>(),
            _ => 0,
        }
    }
    a.args.iter().map(term_size).sum()
}

/// Why a single node fails to be a rule instance.
#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
pub enum Reason {
    #[error("unknown rule `{0}`")]
    UnknownRule(String),
    #[error("node concludes the wrong kind of judgement")]
    WrongJudgement,
    #[error("expected {expected} premises, found {found}")]
    PremiseCount { expected: usize, found: usize },
    #[error("premise {0} does not match the rule schema")]
    PremiseMismatch(usize),
    #[error("conclusion does not match the rule schema: {0}")]
    Shape(String),
    #[error("missing {0} annotation")]
    Missing(&'static str),
    #[error("side condition violated: {0}")]
    SideCondition(String),
}

impl Reason {
    pub(crate) fn shape(msg: &str) -> Reason {
        Reason::Shape(msg.to_string())
    }

    pub(crate) fn side(msg: &str) -> Reason {
        Reason::SideCondition(msg.to_string())
    }
}

/// A proof-check failure located at a node.
#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
#[error("at node {} (rule `{rule}`): {reason}", render_path(.path))]
pub struct CheckError {
    pub path: Vec<usize>,
    pub rule: String,
    pub reason: Reason,
}

pub fn render_path(path: &[usize]) -> String {
    if path.is_empty() {
        return "/".to_string();
    }
    path.iter().fold(String::new(), |mut acc, i| {
        acc.push('/');
        acc.push_str(&i.to_string());
        acc
    })
}

pub(crate) fn expect_premises(node: &Proof, n: usize) -> Result<(), Reason> {
    if node.premises.len() == n {
        Ok(())
    } else {
        Err(Reason::PremiseCount { expected: n, found: node.premises.len() })
    }
}

fn check_node(node: &Proof, table: &RuleTable) -> Result<(), Reason> {
    if table.rule(node.rule_id()).is_none() {
        return Err(Reason::UnknownRule(node.rule_id().to_string()));
    }
    match table.calculus {
        CalculusId::Fdl => match &table.data {
            TableData::Fdl(m) => crate::fdl::check_node(m, node),
            _ => Err(Reason::shape("finite-domain table without a model")),
        },
        CalculusId::Apds => match &table.data {
            TableData::Apds(s) => crate::apds::check_node(s, node),
            _ => Err(Reason::shape("pushdown table without a system")),
        },
        CalculusId::Nd | CalculusId::PseudoA => crate::natded::check_node(table.calculus, node),
        CalculusId::G | CalculusId::K | CalculusId::D => crate::sequent::check_node(table.calculus, node),
    }
}

/// Checks that every node of `proof` is an instance of a rule of `table`,
/// side conditions included. Reports the first failing node in pre-order.
pub fn check_proof(proof: &Proof, table: &RuleTable) -> Result<(), CheckError> {
    let mut err = None;
    proof.walk(&mut |path, node| {
        if err.is_some() {
            return;
        }
        if let Err(reason) = check_node(node, table) {
            err = Some(CheckError { path: path.to_vec(), rule: node.rule_id().to_string(), reason });
        }
    });
    match err {
        Some(e) => Err(e),
        None => Ok(()),
    }
}

/// Whether the node's rule is an introduction rule of the table.
pub fn is_introduction(node: &Proof, table: &RuleTable) -> bool {
    table.rule(node.rule_id()).is_some_and(|r| r.intro)
}

/// Whether every premise of the node lies strictly below its conclusion in
/// the table's order. Holds for every instance of an introduction rule.
pub fn premises_decrease(node: &Proof, table: &RuleTable) -> bool {
    node.premises.iter().all(|p| table.less(&p.conclusion, &node.conclusion))
}

/// A non-introduction node whose major premises all end with introductions.
pub fn is_general_cut(node: &Proof, table: &RuleTable) -> bool {
    let Some(info) = table.rule(node.rule_id()) else {
        return false;
    };
    if info.intro {
        return false;
    }
    node.premises
        .iter()
        .enumerate()
        .filter(|(i, _)| info.is_major(*i))
        .all(|(_, p)| is_introduction(p, table))
}

/// Paths of all general cuts in the proof, in pre-order.
pub fn general_cuts(proof: &Proof, table: &RuleTable) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    proof.walk(&mut |path, node| {
        if is_general_cut(node, table) {
            out.push(path.to_vec());
        }
    });
    out
}

pub fn is_cut_free(proof: &Proof, table: &RuleTable) -> bool {
    let mut free = true;
    proof.walk(&mut |_, node| free &= !is_general_cut(node, table));
    free
}

pub fn contains_only_intros(proof: &Proof, table: &RuleTable) -> bool {
    let mut only = true;
    proof.walk(&mut |_, node| only &= is_introduction(node, table));
    only
}

pub(crate) fn conclusion_sequent(node: &Proof) -> Result<&crate::syntax::Sequent, Reason> {
    node.conclusion.as_sequent().ok_or(Reason::WrongJudgement)
}

pub(crate) fn premise_sequent(node: &Proof, i: usize) -> Result<&crate::syntax::Sequent, Reason> {
    node.premises[i].conclusion.as_sequent().ok_or(Reason::WrongJudgement)
}

/// Compares premise `i` against the sequent the schema predicts.
pub(crate) fn expect_premise(node: &Proof, i: usize, expected: &crate::syntax::Sequent) -> Result<(), Reason> {
    if premise_sequent(node, i)? == expected {
        Ok(())
    } else {
        Err(Reason::PremiseMismatch(i))
    }
}

pub(crate) fn witness(node: &Proof) -> Result<&crate::syntax::Term, Reason> {
    node.rule.witness.as_ref().ok_or(Reason::Missing("witness"))
}

pub(crate) fn fresh(node: &Proof) -> Result<&str, Reason> {
    node.rule.fresh.as_deref().ok_or(Reason::Missing("eigenvariable"))
}

pub(crate) fn principal(node: &Proof) -> Result<&crate::syntax::Formula, Reason> {
    node.rule.principal.as_ref().ok_or(Reason::Missing("principal"))
}
