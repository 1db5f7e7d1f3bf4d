use std::collections::BTreeSet;

use satcut_core::apds::{ApdsKind, ApdsRule, ApdsSystem, Fsa};
use satcut_core::fdl::FdlModel;
use satcut_core::syntax::{Atom, Term};

use super::formula::{lex, Parser};
use super::lexer::{SourceSpan, Tok};
use super::TextError;

/// Non-blank lines with comments removed, as (line number, byte offset, text).
pub(crate) fn lines(text: &str) -> impl Iterator<Item = (usize, usize, &str)> {
    let mut offset = 0;
    text.split_inclusive('\n').enumerate().filter_map(move |(i, raw)| {
        let start = offset;
        offset += raw.len();
        let body = raw.split('#').next().unwrap_or("").trim_end();
        (!body.trim().is_empty()).then_some((i + 1, start, body))
    })
}

fn invalid(span: SourceSpan, message: impl ToString) -> TextError {
    TextError::Invalid { span, message: message.to_string() }
}

/// `name:` directive at the start of a line, and the rest of the line.
fn directive<'a>(body: &'a str, name: &str) -> Option<&'a str> {
    let rest = body.trim_start().strip_prefix(name)?;
    rest.trim_start().strip_prefix(':')
}

fn words(p: &mut Parser) -> Result<Vec<String>, TextError> {
    let mut out = Vec::new();
    while let Tok::Ident(s) = p.peek() {
        out.push(s.clone());
        p.bump();
    }
    p.end()?;
    Ok(out)
}

/// An argument of a pushdown atom: `x`, `eps`, `g x`, or `g(x)`.
#[derive(Clone, Debug)]
enum Raw {
    Leaf(String, SourceSpan),
    App(String, Vec<Raw>, SourceSpan),
}

impl Raw {
    fn span(&self) -> SourceSpan {
        match self {
            Raw::Leaf(_, s) | Raw::App(_, _, s) => *s,
        }
    }
}

fn raw_term(p: &mut Parser) -> Result<Raw, TextError> {
    let span = p.span();
    let name = p.ident("a term")?;
    match p.peek() {
        Tok::LParen => Ok(Raw::App(name, raw_args(p)?, span)),
        Tok::Ident(_) => Ok(Raw::App(name, vec![raw_term(p)?], span)),
        _ => Ok(Raw::Leaf(name, span)),
    }
}

fn raw_args(p: &mut Parser) -> Result<Vec<Raw>, TextError> {
    p.expect(Tok::LParen, "`(`")?;
    let mut args = vec![raw_term(p)?];
    while p.eat(&Tok::Comma) {
        args.push(raw_term(p)?);
    }
    p.expect(Tok::RParen, "`)` or `,`")?;
    Ok(args)
}

struct RawAtom {
    pred: String,
    arg: Raw,
    span: SourceSpan,
}

fn raw_atom(p: &mut Parser) -> Result<RawAtom, TextError> {
    let span = p.span();
    let pred = p.ident("a predicate")?;
    let mut args = raw_args(p)?;
    if args.len() != 1 {
        return Err(TextError::Kind { span, message: format!("`{pred}` is not unary") });
    }
    Ok(RawAtom { pred, arg: args.remove(0), span })
}

fn kind_error(span: SourceSpan, message: &str) -> TextError {
    TextError::Kind { span, message: message.to_string() }
}

/// The premise argument must be the head variable, or `g x` for an
/// eliminated symbol when `allow_push` is set.
fn premise_shape(a: &RawAtom, x: &str, allow_push: bool) -> Result<Option<String>, TextError> {
    match &a.arg {
        Raw::Leaf(y, _) if y == x => Ok(None),
        Raw::App(g, args, _) if allow_push && args.len() == 1 && matches!(&args[0], Raw::Leaf(y, _) if y == x) => {
            Ok(Some(g.clone()))
        }
        other => Err(kind_error(other.span(), "premise argument must be the head variable or a symbol applied to it")),
    }
}

fn classify(name: String, head: RawAtom, premises: Vec<RawAtom>) -> Result<ApdsRule, TextError> {
    let names = |ps: &[RawAtom]| ps.iter().map(|a| a.pred.clone()).collect::<Vec<_>>();
    match &head.arg {
        Raw::Leaf(e, span) if e == "eps" => {
            if !premises.is_empty() {
                return Err(kind_error(*span, "a rule concluding at eps has no premises"));
            }
            Ok(ApdsRule::new(name, ApdsKind::IntroEps, head.pred, vec![]))
        }
        Raw::App(g, args, span) => {
            let [Raw::Leaf(x, _)] = args.as_slice() else {
                return Err(kind_error(*span, "head must be Q(g x), Q(eps) or Q(x)"));
            };
            if x == "eps" {
                return Err(kind_error(*span, "head must push a symbol onto a variable"));
            }
            for a in &premises {
                premise_shape(a, x, false)?;
            }
            Ok(ApdsRule::new(name, ApdsKind::IntroPush(g.clone()), head.pred, names(&premises)))
        }
        Raw::Leaf(x, _) => {
            let mut pushed = None;
            let mut rest = Vec::new();
            for a in &premises {
                match premise_shape(a, x, true)? {
                    Some(g) if pushed.is_none() => pushed = Some((g, a.pred.clone())),
                    Some(_) => return Err(kind_error(a.span, "an elimination rule has exactly one pushed premise")),
                    None => rest.push(a.pred.clone()),
                }
            }
            Ok(match pushed {
                Some((g, first)) => {
                    let mut ps = vec![first];
                    ps.extend(rest);
                    ApdsRule::new(name, ApdsKind::Elim(g), head.pred, ps)
                }
                None => ApdsRule::new(name, ApdsKind::Neutral, head.pred, rest),
            })
        }
    }
}

/// Parses a pushdown system: optional `predicates:` and `symbols:`
/// declarations, then one rule per line, `[name :] Head [<- P1(..), ...] .`
/// Predicates and symbols used by rules are declared implicitly. Unnamed
/// rules are named `r1`, `r2`, ...
pub fn parse_apds(text: &str) -> Result<ApdsSystem, TextError> {
    let mut sys = ApdsSystem::default();
    let mut pending = Vec::new();
    for (line, offset, body) in lines(text) {
        let toks = lex(body, line, offset)?;
        let mut p = Parser::new(&toks);
        if directive(body, "predicates").is_some() || directive(body, "symbols").is_some() {
            let kind = p.ident("a directive")?;
            p.expect(Tok::Colon, "`:`")?;
            for w in words(&mut p)? {
                if kind == "predicates" {
                    sys.declare_predicate(w);
                } else {
                    sys.declare_symbol(w);
                }
            }
            continue;
        }
        let start = p.span();
        let name = match (p.peek().clone(), toks.get(1).map(|t| &t.tok)) {
            (Tok::Ident(n), Some(Tok::Colon)) => {
                p.bump();
                p.bump();
                Some(n)
            }
            _ => None,
        };
        let head = raw_atom(&mut p)?;
        let mut premises = Vec::new();
        if p.eat(&Tok::LeftArrow) && *p.peek() != Tok::Dot {
            premises.push(raw_atom(&mut p)?);
            while p.eat(&Tok::Comma) {
                premises.push(raw_atom(&mut p)?);
            }
        }
        p.expect(Tok::Dot, "`.`")?;
        p.end()?;
        pending.push((start, name, head, premises));
    }
    for (_, _, head, premises) in &pending {
        for a in std::iter::once(head).chain(premises) {
            sys.declare_predicate(a.pred.clone());
            let mut arg = &a.arg;
            while let Raw::App(g, args, _) = arg {
                sys.declare_symbol(g.clone());
                match args.first() {
                    Some(inner) => arg = inner,
                    None => break,
                }
            }
        }
    }
    let mut used: BTreeSet<String> = pending.iter().filter_map(|(_, n, _, _)| n.clone()).collect();
    for (span, name, head, premises) in pending {
        let name = name.unwrap_or_else(|| {
            let n = (1..).map(|k| format!("r{k}")).find(|n| !used.contains(n)).expect("unbounded names");
            used.insert(n.clone());
            n
        });
        let rule = classify(name, head, premises)?;
        match sys.add_rule(rule) {
            Ok(_) => {}
            Err(e) => return Err(invalid(span, e)),
        }
    }
    Ok(sys)
}

fn print_rule(r: &ApdsRule) -> String {
    let head = match &r.kind {
        ApdsKind::IntroPush(g) => format!("{}({g} x)", r.head),
        ApdsKind::IntroEps => format!("{}(eps)", r.head),
        _ => format!("{}(x)", r.head),
    };
    let premises: Vec<String> = r
        .premises
        .iter()
        .enumerate()
        .map(|(i, p)| match &r.kind {
            ApdsKind::Elim(g) if i == 0 => format!("{p}({g} x)"),
            _ => format!("{p}(x)"),
        })
        .collect();
    if premises.is_empty() {
        format!("{} : {head}.", r.name)
    } else {
        format!("{} : {head} <- {}.", r.name, premises.join(", "))
    }
}

/// Prints a pushdown system; rules for which `flag` holds get a `# sat`
/// comment.
pub fn print_apds_flagged(sys: &ApdsSystem, flag: &dyn Fn(&ApdsRule) -> bool) -> String {
    let mut out = String::new();
    out.push_str(&format!("predicates: {}\n", sys.predicates().iter().cloned().collect::<Vec<_>>().join(" ")));
    out.push_str(&format!("symbols: {}\n", sys.symbols().iter().cloned().collect::<Vec<_>>().join(" ")));
    for r in sys.rules() {
        out.push_str(&print_rule(r));
        if flag(r) {
            out.push_str("  # sat");
        }
        out.push('\n');
    }
    out
}

pub fn print_apds(sys: &ApdsSystem) -> String {
    print_apds_flagged(sys, &|_| false)
}

/// `S(a b)` for `S(a(b(eps)))`; the empty word prints as `S(eps)`.
pub fn print_fact(atom: &Atom) -> Option<String> {
    let [arg] = atom.args.as_slice() else { return None };
    let word = arg.as_word()?;
    Some(if word.is_empty() { format!("{}(eps)", atom.pred) } else { format!("{}({})", atom.pred, word.join(" ")) })
}

pub(crate) fn fact(p: &mut Parser) -> Result<Atom, TextError> {
    let pred = p.ident("a predicate")?;
    p.expect(Tok::LParen, "`(`")?;
    let mut word = Vec::new();
    while let Tok::Ident(s) = p.peek() {
        if s != "eps" {
            word.push(s.clone());
        }
        p.bump();
    }
    p.expect(Tok::RParen, "`)`")?;
    Ok(Atom::new(pred, vec![Term::word(&word)]))
}

/// Parses `S(a b)`, `S(eps)` or `S()`.
pub fn parse_fact(text: &str) -> Result<Atom, TextError> {
    let toks = lex(text, 1, 0)?;
    let mut p = Parser::new(&toks);
    let a = fact(&mut p)?;
    p.end()?;
    Ok(a)
}

/// Parses a finite automaton: `states:`, `alphabet:` and `final:` lines,
/// then one transition `from symbol -> to` per line.
pub fn parse_fsa(text: &str) -> Result<Fsa, TextError> {
    let mut m = Fsa::default();
    for (line, offset, body) in lines(text) {
        let toks = lex(body, line, offset)?;
        let mut p = Parser::new(&toks);
        let start = p.span();
        if let Some(key) = ["states", "alphabet", "final"].into_iter().find(|k| directive(body, k).is_some()) {
            p.bump();
            p.bump();
            let ws = words(&mut p)?;
            match key {
                "states" => m.states.extend(ws),
                "alphabet" => m.alphabet.extend(ws),
                _ => m.finals.extend(ws),
            }
            continue;
        }
        let from = p.ident("a state")?;
        let symbol = p.ident("a symbol")?;
        p.expect(Tok::Arrow, "`->`")?;
        let to = p.ident("a state")?;
        p.end()?;
        m.add_transition(&from, &symbol, &to).map_err(|e| invalid(start, e))?;
    }
    if let Some(f) = m.finals.iter().find(|f| !m.states.contains(*f)) {
        return Err(invalid(SourceSpan::default(), format!("final state `{f}` is not declared")));
    }
    Ok(m)
}

pub fn print_fsa(m: &Fsa) -> String {
    let join = |s: &BTreeSet<String>| s.iter().cloned().collect::<Vec<_>>().join(" ");
    let mut out =
        format!("states: {}\nalphabet: {}\nfinal: {}\n", join(&m.states), join(&m.alphabet), join(&m.finals));
    for ((from, g), tos) in &m.transitions {
        for to in tos {
            out.push_str(&format!("{from} {g} -> {to}\n"));
        }
    }
    out
}

/// Parses a finite model: `domain: c1 c2 ...` then `rel P/k: (c, ...) ...`.
pub fn parse_fdl_model(text: &str) -> Result<FdlModel, TextError> {
    let mut model: Option<FdlModel> = None;
    for (line, offset, body) in lines(text) {
        let toks = lex(body, line, offset)?;
        let mut p = Parser::new(&toks);
        let start = p.span();
        let key = p.ident("`domain` or `rel`")?;
        match key.as_str() {
            "domain" => {
                p.expect(Tok::Colon, "`:`")?;
                if model.is_some() {
                    return Err(invalid(start, "domain declared twice"));
                }
                model = Some(FdlModel::new(words(&mut p)?).map_err(|e| invalid(start, e))?);
            }
            "rel" => {
                let Some(m) = model.as_mut() else { return Err(invalid(start, "relation before the domain")) };
                let pred = p.ident("a predicate")?;
                p.expect(Tok::Slash, "`/`")?;
                let arity_span = p.span();
                let arity: usize =
                    p.ident("an arity")?.parse().map_err(|_| invalid(arity_span, "arity is not a number"))?;
                p.expect(Tok::Colon, "`:`")?;
                let mut tuples = Vec::new();
                while p.eat(&Tok::LParen) {
                    let tuple_span = p.span();
                    let mut tuple = Vec::new();
                    if *p.peek() != Tok::RParen {
                        tuple.push(p.ident("a constant")?);
                        while p.eat(&Tok::Comma) {
                            tuple.push(p.ident("a constant")?);
                        }
                    }
                    p.expect(Tok::RParen, "`)` or `,`")?;
                    if tuple.len() != arity {
                        return Err(invalid(tuple_span, format!("tuple has {} elements, arity is {arity}", tuple.len())));
                    }
                    if let Some(c) = tuple.iter().find(|c| !m.domain().contains(c)) {
                        return Err(invalid(tuple_span, format!("`{c}` is not in the domain")));
                    }
                    tuples.push(tuple);
                }
                p.end()?;
                m.add_relation(&pred, arity, tuples).map_err(|e| invalid(start, e))?;
            }
            _ => return Err(TextError::Syntax { span: start, expected: vec!["`domain` or `rel`".into()], found: format!("`{key}`") }),
        }
    }
    model.ok_or_else(|| invalid(SourceSpan::default(), "missing `domain:` line"))
}

pub fn print_fdl_model(m: &FdlModel) -> String {
    let mut out = format!("domain: {}\n", m.domain().join(" "));
    for (pred, arity, tuples) in m.relations() {
        out.push_str(&format!("rel {pred}/{arity}:"));
        for t in tuples {
            out.push_str(&format!(" ({})", t.join(", ")));
        }
        out.push('\n');
    }
    out
}
