use satcut_core::syntax::{Atom, Formula, Sequent, Term};

use super::lexer::{tokenize, SourceSpan, Tok, Token};
use super::TextError;

const KEYWORDS: [&str; 4] = ["forall", "exists", "top", "bot"];

/// Recursive-descent parser over a token slice. Identifiers under a binder
/// of the same name are variables, `?x` is a free variable, and every other
/// identifier in term position is a constant.
pub(crate) struct Parser<'a> {
    toks: &'a [Token],
    pos: usize,
    bound: Vec<String>,
}

impl<'a> Parser<'a> {
    pub(crate) fn new(toks: &'a [Token]) -> Parser<'a> {
        Parser { toks, pos: 0, bound: Vec::new() }
    }

    pub(crate) fn peek(&self) -> &Tok {
        &self.toks[self.pos].tok
    }

    pub(crate) fn span(&self) -> SourceSpan {
        self.toks[self.pos].span
    }

    pub(crate) fn bump(&mut self) -> &Token {
        let t = &self.toks[self.pos];
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        t
    }

    pub(crate) fn eat(&mut self, tok: &Tok) -> bool {
        if self.peek() == tok {
            self.bump();
            true
        } else {
            false
        }
    }

    pub(crate) fn error(&self, expected: &[&str]) -> TextError {
        TextError::Syntax {
            span: self.span(),
            expected: expected.iter().map(|s| s.to_string()).collect(),
            found: self.peek().describe(),
        }
    }

    pub(crate) fn expect(&mut self, tok: Tok, what: &str) -> Result<(), TextError> {
        if self.eat(&tok) {
            Ok(())
        } else {
            Err(self.error(&[what]))
        }
    }

    pub(crate) fn ident(&mut self, what: &str) -> Result<String, TextError> {
        match self.peek() {
            Tok::Ident(s) => {
                let s = s.clone();
                self.bump();
                Ok(s)
            }
            _ => Err(self.error(&[what])),
        }
    }

    pub(crate) fn end(&self) -> Result<(), TextError> {
        if *self.peek() == Tok::Eof {
            Ok(())
        } else {
            Err(self.error(&["end of input"]))
        }
    }

    pub(crate) fn formula(&mut self) -> Result<Formula, TextError> {
        let left = self.disjunction()?;
        if self.eat(&Tok::Arrow) {
            Ok(Formula::imp(left, self.formula()?))
        } else {
            Ok(left)
        }
    }

    fn disjunction(&mut self) -> Result<Formula, TextError> {
        let left = self.conjunction()?;
        if self.eat(&Tok::Bar) {
            Ok(Formula::or(left, self.disjunction()?))
        } else {
            Ok(left)
        }
    }

    fn conjunction(&mut self) -> Result<Formula, TextError> {
        let left = self.unary()?;
        if self.eat(&Tok::Amp) {
            Ok(Formula::and(left, self.conjunction()?))
        } else {
            Ok(left)
        }
    }

    fn unary(&mut self) -> Result<Formula, TextError> {
        match self.peek().clone() {
            Tok::Ident(k) if k == "forall" || k == "exists" => {
                self.bump();
                let x = self.ident("a variable")?;
                self.expect(Tok::Dot, "`.`")?;
                self.bound.push(x.clone());
                let body = self.formula();
                self.bound.pop();
                let body = body?;
                Ok(if k == "forall" { Formula::forall(x, body) } else { Formula::exists(x, body) })
            }
            Tok::Ident(k) if k == "top" => {
                self.bump();
                Ok(Formula::Top)
            }
            Tok::Ident(k) if k == "bot" => {
                self.bump();
                Ok(Formula::Bot)
            }
            Tok::Tilde => {
                self.bump();
                Ok(Formula::NegAtom(self.atom()?))
            }
            Tok::LBrack => {
                self.bump();
                let inner = self.formula()?;
                self.expect(Tok::RBrack, "`]`")?;
                Ok(Formula::frozen(inner))
            }
            Tok::LParen => {
                self.bump();
                let inner = self.formula()?;
                self.expect(Tok::RParen, "`)`")?;
                Ok(inner)
            }
            Tok::Ident(_) => Ok(Formula::Atom(self.atom()?)),
            _ => Err(self.error(&["a formula"])),
        }
    }

    fn atom(&mut self) -> Result<Atom, TextError> {
        if let Tok::Ident(k) = self.peek() {
            if KEYWORDS.contains(&k.as_str()) {
                return Err(self.error(&["a predicate"]));
            }
        }
        let pred = self.ident("a predicate")?;
        let args = if *self.peek() == Tok::LParen { self.args()? } else { Vec::new() };
        Ok(Atom::new(pred, args))
    }

    fn args(&mut self) -> Result<Vec<Term>, TextError> {
        self.expect(Tok::LParen, "`(`")?;
        let mut args = vec![self.term()?];
        while self.eat(&Tok::Comma) {
            args.push(self.term()?);
        }
        self.expect(Tok::RParen, "`)` or `,`")?;
        Ok(args)
    }

    pub(crate) fn term(&mut self) -> Result<Term, TextError> {
        match self.peek().clone() {
            Tok::FreeVar(x) => {
                self.bump();
                Ok(Term::var(x))
            }
            Tok::Ident(name) if !KEYWORDS.contains(&name.as_str()) => {
                self.bump();
                if *self.peek() == Tok::LParen {
                    Ok(Term::app(name, self.args()?))
                } else if self.bound.contains(&name) {
                    Ok(Term::var(name))
                } else {
                    Ok(Term::constant(name))
                }
            }
            _ => Err(self.error(&["a term"])),
        }
    }

    pub(crate) fn sequent(&mut self) -> Result<Sequent, TextError> {
        let mut context = Vec::new();
        if !self.eat(&Tok::Turnstile) {
            loop {
                context.push(self.formula()?);
                if self.eat(&Tok::Turnstile) {
                    break;
                }
                if !self.eat(&Tok::Comma) {
                    return Err(self.error(&["`,`", "`|-`"]));
                }
            }
        }
        let goal = self.formula()?;
        Ok(Sequent::new(context, goal))
    }
}

pub(crate) fn lex(text: &str, line: usize, offset: usize) -> Result<Vec<Token>, TextError> {
    tokenize(text, line, offset).map_err(|span| TextError::Lex { span })
}

/// Parses a formula exactly as written, without renaming binders.
pub(crate) fn parse_formula_raw(text: &str, line: usize, offset: usize) -> Result<Formula, TextError> {
    let toks = lex(text, line, offset)?;
    let mut p = Parser::new(&toks);
    let f = p.formula()?;
    p.end()?;
    Ok(f)
}

/// Parses a sequent exactly as written, without renaming binders.
pub(crate) fn parse_sequent_raw(text: &str, line: usize, offset: usize) -> Result<Sequent, TextError> {
    let toks = lex(text, line, offset)?;
    let mut p = Parser::new(&toks);
    let s = p.sequent()?;
    p.end()?;
    Ok(s)
}

/// Parses a formula. Bound variables are renamed apart.
pub fn parse_formula(text: &str) -> Result<Formula, TextError> {
    Ok(parse_formula_raw(text, 1, 0)?.rectify())
}

/// Parses `A, B |- G`; the context may be empty. Bound variables are
/// renamed apart in every formula.
pub fn parse_sequent(text: &str) -> Result<Sequent, TextError> {
    let (context, goal) = parse_sequent_raw(text, 1, 0)?.into_parts();
    Ok(Sequent::new(context.iter().map(Formula::rectify).collect(), goal.rectify()))
}

/// Parses a term; plain identifiers are constants and `?x` is a variable.
pub fn parse_term(text: &str) -> Result<Term, TextError> {
    let toks = lex(text, 1, 0)?;
    let mut p = Parser::new(&toks);
    let t = p.term()?;
    p.end()?;
    Ok(t)
}

pub fn print_term(t: &Term) -> String {
    term_in(t, &[])
}

fn term_in(t: &Term, bound: &[String]) -> String {
    match t {
        Term::Var(x) if bound.contains(x) => x.clone(),
        Term::Var(x) => format!("?{x}"),
        Term::Const(c) => c.clone(),
        Term::App(f, args) => {
            let args: Vec<String> = args.iter().map(|a| term_in(a, bound)).collect();
            format!("{f}({})", args.join(", "))
        }
    }
}

fn atom_in(a: &Atom, bound: &[String]) -> String {
    if a.args.is_empty() {
        return a.pred.clone();
    }
    let args: Vec<String> = a.args.iter().map(|t| term_in(t, bound)).collect();
    format!("{}({})", a.pred, args.join(", "))
}

fn precedence(f: &Formula) -> u8 {
    match f {
        Formula::Imp(..) => 1,
        Formula::Or(..) => 2,
        Formula::And(..) => 3,
        Formula::Forall(..) | Formula::Exists(..) => 0,
        _ => 4,
    }
}

/// `open` is whether the text printed here extends to the end of the
/// enclosing group, which a quantifier needs since its body reaches as far
/// right as possible.
fn write_formula(out: &mut String, f: &Formula, min: u8, open: bool, bound: &mut Vec<String>) {
    let quant = matches!(f, Formula::Forall(..) | Formula::Exists(..));
    let parens = if quant { !open } else { precedence(f) < min };
    if parens {
        out.push('(');
    }
    let open = open || parens;
    match f {
        Formula::Atom(a) => out.push_str(&atom_in(a, bound)),
        Formula::NegAtom(a) => {
            out.push('~');
            out.push_str(&atom_in(a, bound));
        }
        Formula::Top => out.push_str("top"),
        Formula::Bot => out.push_str("bot"),
        Formula::And(a, b) | Formula::Or(a, b) | Formula::Imp(a, b) => {
            let (level, op) = match f {
                Formula::And(..) => (3, " & "),
                Formula::Or(..) => (2, " | "),
                _ => (1, " -> "),
            };
            write_formula(out, a, level + 1, false, bound);
            out.push_str(op);
            write_formula(out, b, level, open, bound);
        }
        Formula::Forall(x, a) | Formula::Exists(x, a) => {
            out.push_str(if matches!(f, Formula::Forall(..)) { "forall " } else { "exists " });
            out.push_str(x);
            out.push_str(". ");
            bound.push(x.clone());
            write_formula(out, a, 0, true, bound);
            bound.pop();
        }
        Formula::Frozen(a) => {
            out.push('[');
            write_formula(out, a, 0, true, bound);
            out.push(']');
        }
    }
    if parens {
        out.push(')');
    }
}

pub fn print_formula(f: &Formula) -> String {
    let mut out = String::new();
    write_formula(&mut out, f, 0, true, &mut Vec::new());
    out
}

pub fn print_sequent(s: &Sequent) -> String {
    let context: Vec<String> = s.context().iter().map(print_formula).collect();
    if context.is_empty() {
        format!("|- {}", print_formula(s.goal()))
    } else {
        format!("{} |- {}", context.join(", "), print_formula(s.goal()))
    }
}
