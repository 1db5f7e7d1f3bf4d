use std::fmt;

/// A 1-based position in the input plus the byte range it covers.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub struct SourceSpan {
    pub line: usize,
    pub column: usize,
    pub start: usize,
    pub end: usize,
}

impl fmt::Display for SourceSpan {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.line, self.column)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Tok {
    Ident(String),
    /// `?x`, a free variable.
    FreeVar(String),
    LParen,
    RParen,
    LBrack,
    RBrack,
    LBrace,
    RBrace,
    Comma,
    Dot,
    Colon,
    DoubleColon,
    Slash,
    Equals,
    Arrow,
    LeftArrow,
    Bar,
    Amp,
    Tilde,
    Turnstile,
    Eof,
}

impl Tok {
    pub fn describe(&self) -> String {
        match self {
            Tok::Ident(s) => format!("`{s}`"),
            Tok::FreeVar(s) => format!("`?{s}`"),
            Tok::Eof => "end of input".to_string(),
            other => format!("`{}`", other.symbol()),
        }
    }

    fn symbol(&self) -> &'static str {
        match self {
            Tok::LParen => "(",
            Tok::RParen => ")",
            Tok::LBrack => "[",
            Tok::RBrack => "]",
            Tok::LBrace => "{",
            Tok::RBrace => "}",
            Tok::Comma => ",",
            Tok::Dot => ".",
            Tok::Colon => ":",
            Tok::DoubleColon => "::",
            Tok::Slash => "/",
            Tok::Equals => "=",
            Tok::Arrow => "->",
            Tok::LeftArrow => "<-",
            Tok::Bar => "|",
            Tok::Amp => "&",
            Tok::Tilde => "~",
            Tok::Turnstile => "|-",
            _ => "",
        }
    }
}

#[derive(Clone, Debug)]
pub struct Token {
    pub tok: Tok,
    pub span: SourceSpan,
}

fn ident_char(c: char) -> bool {
    c.is_alphanumeric() || c == '_' || c == '\''
}

/// Splits `text` into tokens. `line` and `offset` locate `text` inside a
/// larger file. An unexpected character is reported with its span.
pub fn tokenize(text: &str, line: usize, offset: usize) -> Result<Vec<Token>, SourceSpan> {
    let mut out = Vec::new();
    let mut chars = text.char_indices().peekable();
    let mut line = line;
    let mut line_start = 0usize;
    while let Some(&(i, c)) = chars.peek() {
        let span_at = |i: usize, len: usize, line: usize, line_start: usize| SourceSpan {
            line,
            column: text[line_start..i].chars().count() + 1,
            start: offset + i,
            end: offset + i + len,
        };
        if c == '\n' {
            chars.next();
            line += 1;
            line_start = i + 1;
            continue;
        }
        if c.is_whitespace() {
            chars.next();
            continue;
        }
        if ident_char(c) || c == '?' {
            chars.next();
            let free = c == '?';
            let mut end = i + c.len_utf8();
            while let Some(&(j, d)) = chars.peek() {
                if !ident_char(d) {
                    break;
                }
                end = j + d.len_utf8();
                chars.next();
            }
            let span = span_at(i, end - i, line, line_start);
            let tok = if free {
                if end == i + 1 {
                    return Err(span);
                }
                Tok::FreeVar(text[i + 1..end].to_string())
            } else {
                Tok::Ident(text[i..end].to_string())
            };
            out.push(Token { tok, span });
            continue;
        }
        chars.next();
        let next = chars.peek().map(|&(_, d)| d);
        let (tok, len) = match (c, next) {
            ('-', Some('>')) => (Tok::Arrow, 2),
            ('<', Some('-')) => (Tok::LeftArrow, 2),
            ('|', Some('-')) => (Tok::Turnstile, 2),
            (':', Some(':')) => (Tok::DoubleColon, 2),
            ('(', _) => (Tok::LParen, 1),
            (')', _) => (Tok::RParen, 1),
            ('[', _) => (Tok::LBrack, 1),
            (']', _) => (Tok::RBrack, 1),
            ('{', _) => (Tok::LBrace, 1),
            ('}', _) => (Tok::RBrace, 1),
            (',', _) => (Tok::Comma, 1),
            ('.', _) => (Tok::Dot, 1),
            (':', _) => (Tok::Colon, 1),
            ('/', _) => (Tok::Slash, 1),
            ('=', _) => (Tok::Equals, 1),
            ('|', _) => (Tok::Bar, 1),
            ('&', _) => (Tok::Amp, 1),
            ('~', _) => (Tok::Tilde, 1),
            _ => return Err(span_at(i, c.len_utf8(), line, line_start)),
        };
        if len == 2 {
            chars.next();
        }
        out.push(Token { tok, span: span_at(i, len, line, line_start) });
    }
    let end = offset + text.len();
    let column = text[line_start..].chars().count() + 1;
    out.push(Token { tok: Tok::Eof, span: SourceSpan { line, column, start: end, end } });
    Ok(out)
}
