use satcut_core::calculus::{check_proof, RuleTable};
use satcut_core::proof::{Judgement, Proof, RuleInstance};

use super::files::{fact, lines, print_fact};
use super::formula::{lex, print_formula, print_sequent, print_term, Parser};
use super::lexer::{SourceSpan, Tok};
use super::TextError;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ProofStyle {
    /// One node per line, children indented by two spaces.
    Records,
    /// Premises above an inference bar labelled with the rule.
    Tree,
}

pub fn print_judgement(j: &Judgement) -> String {
    match j {
        Judgement::Sequent(s) => print_sequent(s),
        Judgement::Fact(a) => print_fact(a).unwrap_or_else(|| print_formula(&satcut_core::syntax::Formula::Atom(a.clone()))),
    }
}

fn record(p: &Proof) -> String {
    let mut line = p.rule_id().to_string();
    if let Some(f) = &p.rule.principal {
        line.push_str(&format!(" {{{}}}", print_formula(f)));
    }
    if let Some(t) = &p.rule.witness {
        line.push_str(&format!(" witness={}", print_term(t)));
    }
    if let Some(x) = &p.rule.fresh {
        line.push_str(&format!(" fresh={x}"));
    }
    line.push_str(" :: ");
    line.push_str(&print_judgement(&p.conclusion));
    line
}

fn write_records(out: &mut String, p: &Proof, depth: usize) {
    out.push_str(&"  ".repeat(depth));
    out.push_str(&record(p));
    out.push('\n');
    for q in &p.premises {
        write_records(out, q, depth + 1);
    }
}

fn width(s: &str) -> usize {
    s.chars().count()
}

/// A block of lines, all padded to the same width.
fn tree_block(p: &Proof) -> Vec<String> {
    let conclusion = print_judgement(&p.conclusion);
    let blocks: Vec<Vec<String>> = p.premises.iter().map(tree_block).collect();
    let height = blocks.iter().map(Vec::len).max().unwrap_or(0);
    let mut rows = vec![String::new(); height];
    for (i, b) in blocks.iter().enumerate() {
        let w = b.first().map_or(0, |l| width(l));
        let pad = height - b.len();
        for (r, row) in rows.iter_mut().enumerate() {
            if i > 0 {
                row.push_str("   ");
            }
            if r < pad {
                row.push_str(&" ".repeat(w));
            } else {
                row.push_str(&b[r - pad]);
            }
        }
    }
    let body = rows.first().map_or(0, |r| width(r)).max(width(&conclusion));
    let label = format!(" {}", p.rule_id());
    let total = body + width(&label);
    let mut out: Vec<String> = rows.into_iter().map(|r| format!("{r:<total$}")).collect();
    out.push(format!("{}{label}", "-".repeat(body)));
    out.push(format!("{conclusion:<total$}"));
    out
}

pub fn print_proof(p: &Proof, style: ProofStyle) -> String {
    match style {
        ProofStyle::Records => {
            let mut out = String::new();
            write_records(&mut out, p, 0);
            out
        }
        ProofStyle::Tree => {
            let mut out = String::new();
            for line in tree_block(p) {
                out.push_str(line.trim_end());
                out.push('\n');
            }
            out
        }
    }
}

fn parse_record(body: &str, line: usize, offset: usize) -> Result<(RuleInstance, Judgement), TextError> {
    let toks = lex(body, line, offset)?;
    let mut p = Parser::new(&toks);
    let mut rule = RuleInstance::new(p.ident("a rule name")?);
    if p.eat(&Tok::LBrace) {
        let f = p.formula()?;
        p.expect(Tok::RBrace, "`}`")?;
        rule = rule.on(f);
    }
    loop {
        match p.peek().clone() {
            Tok::Ident(k) if k == "witness" => {
                p.bump();
                p.expect(Tok::Equals, "`=`")?;
                let t = p.term()?;
                rule = rule.with_witness(t);
            }
            Tok::Ident(k) if k == "fresh" => {
                p.bump();
                p.expect(Tok::Equals, "`=`")?;
                rule = rule.with_fresh(p.ident("a variable")?);
            }
            _ => break,
        }
    }
    if !p.eat(&Tok::DoubleColon) {
        return Err(p.error(&["`witness=`", "`fresh=`", "`::`"]));
    }
    let judgement = if toks.iter().any(|t| t.tok == Tok::Turnstile) {
        Judgement::Sequent(p.sequent()?)
    } else {
        Judgement::Fact(fact(&mut p)?)
    };
    p.end()?;
    Ok((rule, judgement))
}

/// Parses the record format without checking the proof.
pub fn parse_proof_unchecked(text: &str) -> Result<Proof, TextError> {
    // stack of (depth, rule, conclusion, premises so far)
    let mut stack: Vec<(usize, RuleInstance, Judgement, Vec<Proof>)> = Vec::new();
    let mut root: Option<Proof> = None;
    let close = |stack: &mut Vec<(usize, RuleInstance, Judgement, Vec<Proof>)>, root: &mut Option<Proof>| {
        let (_, rule, concl, premises) = stack.pop().expect("nonempty stack");
        let node = Proof::new(rule, concl, premises);
        match stack.last_mut() {
            Some(parent) => parent.3.push(node),
            None => *root = Some(node),
        }
    };
    for (line, offset, body) in lines(text) {
        let indent = body.len() - body.trim_start_matches(' ').len();
        let span = SourceSpan { line, column: 1, start: offset, end: offset + indent };
        if indent % 2 != 0 {
            return Err(TextError::Invalid { span, message: "indentation must be a multiple of two spaces".into() });
        }
        let depth = indent / 2;
        if root.is_some() || (stack.is_empty() && depth != 0) {
            return Err(TextError::Invalid { span, message: "a proof has exactly one root".into() });
        }
        if depth > stack.len() {
            return Err(TextError::Invalid { span, message: "indented more than one level below its parent".into() });
        }
        while stack.len() > depth {
            close(&mut stack, &mut root);
        }
        if root.is_some() {
            return Err(TextError::Invalid { span, message: "a proof has exactly one root".into() });
        }
        let (rule, judgement) = parse_record(&body[indent..], line, offset + indent)?;
        stack.push((depth, rule, judgement, Vec::new()));
    }
    while !stack.is_empty() {
        close(&mut stack, &mut root);
    }
    root.ok_or(TextError::Invalid { span: SourceSpan::default(), message: "empty proof file".into() })
}

/// Parses the record format and checks the proof against `table`.
pub fn parse_proof(text: &str, table: &RuleTable) -> Result<Proof, TextError> {
    let proof = parse_proof_unchecked(text)?;
    check_proof(&proof, table).map_err(TextError::Check)?;
    Ok(proof)
}
