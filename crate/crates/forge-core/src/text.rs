//! Shared lexer for the toolchain's text formats.
//!
//! All dialects use the same token shapes; the only switch is `angle_refs`,
//! which makes `<...>` lex as a single reference token (delta, mapping and
//! configuration files) instead of comparison operators (everything else).

use crate::diag::{Diagnostic, Span};

#[derive(Debug, Clone, PartialEq)]
pub enum Tok {
    Ident(String),
    Number(f64),
    Str(String),
    /// `<path/or/name>` in reference-bearing dialects.
    AngleRef(String),
    LBrace,
    RBrace,
    LParen,
    RParen,
    LBracket,
    RBracket,
    Comma,
    Semi,
    Colon,
    Dot,
    Eq,
    Pipe,
    Plus,
    Minus,
    Bang,
    Arrow,    // ->
    BiArrow,  // <->
    Implies,  // =>
    Iff,      // <=>
    AndAnd,   // &&
    OrOr,     // ||
    Lt,
    Gt,
    Le,       // <=
    Ge,       // >=
    Ne,       // !=
    Assign,   // :=
    DotDot,   // ..
    Eof,
}

impl Tok {
    pub fn describe(&self) -> String {
        match self {
            Tok::Ident(s) => format!("identifier `{s}`"),
            Tok::Number(n) => format!("number `{n}`"),
            Tok::Str(s) => format!("string \"{s}\""),
            Tok::AngleRef(s) => format!("reference <{s}>"),
            Tok::Eof => "end of input".to_string(),
            other => format!("`{}`", other.literal()),
        }
    }

    fn literal(&self) -> &'static str {
        match self {
            Tok::LBrace => "{",
            Tok::RBrace => "}",
            Tok::LParen => "(",
            Tok::RParen => ")",
            Tok::LBracket => "[",
            Tok::RBracket => "]",
            Tok::Comma => ",",
            Tok::Semi => ";",
            Tok::Colon => ":",
            Tok::Dot => ".",
            Tok::Eq => "=",
            Tok::Pipe => "|",
            Tok::Plus => "+",
            Tok::Minus => "-",
            Tok::Bang => "!",
            Tok::Arrow => "->",
            Tok::BiArrow => "<->",
            Tok::Implies => "=>",
            Tok::Iff => "<=>",
            Tok::AndAnd => "&&",
            Tok::OrOr => "||",
            Tok::Lt => "<",
            Tok::Gt => ">",
            Tok::Le => "<=",
            Tok::Ge => ">=",
            Tok::Ne => "!=",
            Tok::Assign => ":=",
            Tok::DotDot => "..",
            _ => "",
        }
    }
}

#[derive(Debug, Clone)]
pub struct Token {
    pub tok: Tok,
    pub span: Span,
}

pub fn lex(file: &str, text: &str, angle_refs: bool) -> Result<Vec<Token>, Diagnostic> {
    let bytes = text.as_bytes();
    let mut toks = Vec::new();
    let mut i = 0usize;
    let mut line = 1u32;
    let mut col = 1u32;

    macro_rules! push {
        ($tok:expr, $start:expr, $len:expr, $l:expr, $c:expr) => {
            toks.push(Token { tok: $tok, span: Span::new($start, $len, $l, $c) })
        };
    }

    while i < bytes.len() {
        let (l, c) = (line, col);
        let b = bytes[i];
        match b {
            b' ' | b'\t' | b'\r' => {
                i += 1;
                col += 1;
            }
            b'\n' => {
                i += 1;
                line += 1;
                col = 1;
            }
            b'/' if i + 1 < bytes.len() && bytes[i + 1] == b'/' => {
                while i < bytes.len() && bytes[i] != b'\n' {
                    i += 1;
                    col += 1;
                }
            }
            b'/' if i + 1 < bytes.len() && bytes[i + 1] == b'*' => {
                i += 2;
                col += 2;
                loop {
                    if i + 1 >= bytes.len() {
                        return Err(Diagnostic::error(file, Span::new(i, 0, line, col), "E-LEX", "unterminated block comment"));
                    }
                    if bytes[i] == b'*' && bytes[i + 1] == b'/' {
                        i += 2;
                        col += 2;
                        break;
                    }
                    if bytes[i] == b'\n' {
                        line += 1;
                        col = 1;
                    } else {
                        col += 1;
                    }
                    i += 1;
                }
            }
            b'"' => {
                let start = i;
                i += 1;
                col += 1;
                let mut s = String::new();
                loop {
                    if i >= bytes.len() || bytes[i] == b'\n' {
                        return Err(Diagnostic::error(file, Span::new(start, i - start, l, c), "E-LEX", "unterminated string literal"));
                    }
                    if bytes[i] == b'"' {
                        i += 1;
                        col += 1;
                        break;
                    }
                    s.push(bytes[i] as char);
                    i += 1;
                    col += 1;
                }
                push!(Tok::Str(s), start, i - start, l, c);
            }
            b'<' => {
                // `<->` and `<=>`/`<=` win over references; a reference never
                // starts with `-` or `=`.
                if text[i..].starts_with("<->") {
                    push!(Tok::BiArrow, i, 3, l, c);
                    i += 3;
                    col += 3;
                } else if text[i..].starts_with("<=>") {
                    push!(Tok::Iff, i, 3, l, c);
                    i += 3;
                    col += 3;
                } else if text[i..].starts_with("<=") {
                    push!(Tok::Le, i, 2, l, c);
                    i += 2;
                    col += 2;
                } else if angle_refs {
                    let start = i;
                    i += 1;
                    col += 1;
                    let mut s = String::new();
                    loop {
                        if i >= bytes.len() || bytes[i] == b'\n' {
                            return Err(Diagnostic::error(file, Span::new(start, i - start, l, c), "E-LEX", "unterminated `<...>` reference"));
                        }
                        if bytes[i] == b'>' {
                            i += 1;
                            col += 1;
                            break;
                        }
                        s.push(bytes[i] as char);
                        i += 1;
                        col += 1;
                    }
                    push!(Tok::AngleRef(s.trim().to_string()), start, i - start, l, c);
                } else {
                    push!(Tok::Lt, i, 1, l, c);
                    i += 1;
                    col += 1;
                }
            }
            b'-' => {
                if text[i..].starts_with("->") {
                    push!(Tok::Arrow, i, 2, l, c);
                    i += 2;
                    col += 2;
                } else {
                    push!(Tok::Minus, i, 1, l, c);
                    i += 1;
                    col += 1;
                }
            }
            b'=' => {
                if text[i..].starts_with("=>") {
                    push!(Tok::Implies, i, 2, l, c);
                    i += 2;
                    col += 2;
                } else {
                    push!(Tok::Eq, i, 1, l, c);
                    i += 1;
                    col += 1;
                }
            }
            b'!' => {
                if text[i..].starts_with("!=") {
                    push!(Tok::Ne, i, 2, l, c);
                    i += 2;
                    col += 2;
                } else {
                    push!(Tok::Bang, i, 1, l, c);
                    i += 1;
                    col += 1;
                }
            }
            b'&' if text[i..].starts_with("&&") => {
                push!(Tok::AndAnd, i, 2, l, c);
                i += 2;
                col += 2;
            }
            b'|' => {
                if text[i..].starts_with("||") {
                    push!(Tok::OrOr, i, 2, l, c);
                    i += 2;
                    col += 2;
                } else {
                    push!(Tok::Pipe, i, 1, l, c);
                    i += 1;
                    col += 1;
                }
            }
            b':' => {
                if text[i..].starts_with(":=") {
                    push!(Tok::Assign, i, 2, l, c);
                    i += 2;
                    col += 2;
                } else {
                    push!(Tok::Colon, i, 1, l, c);
                    i += 1;
                    col += 1;
                }
            }
            b'.' => {
                if text[i..].starts_with("..") {
                    push!(Tok::DotDot, i, 2, l, c);
                    i += 2;
                    col += 2;
                } else {
                    push!(Tok::Dot, i, 1, l, c);
                    i += 1;
                    col += 1;
                }
            }
            b'>' => {
                if text[i..].starts_with(">=") {
                    push!(Tok::Ge, i, 2, l, c);
                    i += 2;
                    col += 2;
                } else {
                    push!(Tok::Gt, i, 1, l, c);
                    i += 1;
                    col += 1;
                }
            }
            b'{' | b'}' | b'(' | b')' | b'[' | b']' | b',' | b';' | b'+' => {
                let tok = match b {
                    b'{' => Tok::LBrace,
                    b'}' => Tok::RBrace,
                    b'(' => Tok::LParen,
                    b')' => Tok::RParen,
                    b'[' => Tok::LBracket,
                    b']' => Tok::RBracket,
                    b',' => Tok::Comma,
                    b';' => Tok::Semi,
                    b'+' => Tok::Plus,
                    _ => Tok::Semi,
                };
                push!(tok, i, 1, l, c);
                i += 1;
                col += 1;
            }
            b'0'..=b'9' => {
                let start = i;
                while i < bytes.len() && bytes[i].is_ascii_digit() {
                    i += 1;
                    col += 1;
                }
                // `..` after an integer is a range, not a fraction
                if i + 1 < bytes.len() && bytes[i] == b'.' && bytes[i + 1].is_ascii_digit() {
                    i += 1;
                    col += 1;
                    while i < bytes.len() && bytes[i].is_ascii_digit() {
                        i += 1;
                        col += 1;
                    }
                }
                let s = &text[start..i];
                let n: f64 = s.parse().map_err(|_| {
                    Diagnostic::error(file, Span::new(start, i - start, l, c), "E-LEX", format!("malformed number `{s}`"))
                })?;
                push!(Tok::Number(n), start, i - start, l, c);
            }
            b'A'..=b'Z' | b'a'..=b'z' | b'_' => {
                let start = i;
                while i < bytes.len() && (bytes[i].is_ascii_alphanumeric() || bytes[i] == b'_') {
                    i += 1;
                    col += 1;
                }
                push!(Tok::Ident(text[start..i].to_string()), start, i - start, l, c);
            }
            other => {
                return Err(Diagnostic::error(
                    file,
                    Span::new(i, 1, l, c),
                    "E-LEX",
                    format!("unexpected character `{}`", other as char),
                ));
            }
        }
    }
    toks.push(Token { tok: Tok::Eof, span: Span::new(text.len(), 0, line, col) });
    Ok(toks)
}

/// Cursor over a token stream with the usual recursive-descent helpers.
pub struct Cursor<'a> {
    pub file: &'a str,
    toks: Vec<Token>,
    pos: usize,
}

impl<'a> Cursor<'a> {
    pub fn new(file: &'a str, text: &str, angle_refs: bool) -> Result<Self, Diagnostic> {
        Ok(Cursor { file, toks: lex(file, text, angle_refs)?, pos: 0 })
    }

    pub fn peek(&self) -> &Tok {
        &self.toks[self.pos].tok
    }

    pub fn peek2(&self) -> &Tok {
        &self.toks[(self.pos + 1).min(self.toks.len() - 1)].tok
    }

    pub fn span(&self) -> Span {
        self.toks[self.pos].span
    }

    pub fn prev_span(&self) -> Span {
        self.toks[self.pos.saturating_sub(1)].span
    }

    pub fn bump(&mut self) -> Token {
        let t = self.toks[self.pos].clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        t
    }

    pub fn at_eof(&self) -> bool {
        matches!(self.peek(), Tok::Eof)
    }

    /// Consume `tok` if it is next.
    pub fn eat(&mut self, tok: &Tok) -> bool {
        if self.peek() == tok {
            self.bump();
            true
        } else {
            false
        }
    }

    /// Consume the keyword `kw` (a contextual identifier) if it is next.
    pub fn eat_kw(&mut self, kw: &str) -> bool {
        if let Tok::Ident(s) = self.peek() {
            if s == kw {
                self.bump();
                return true;
            }
        }
        false
    }

    pub fn at_kw(&self, kw: &str) -> bool {
        matches!(self.peek(), Tok::Ident(s) if s == kw)
    }

    pub fn expect(&mut self, tok: &Tok) -> Result<Span, Diagnostic> {
        if self.peek() == tok {
            Ok(self.bump().span)
        } else {
            Err(self.err(format!("expected {}, found {}", tok.describe(), self.peek().describe())))
        }
    }

    pub fn expect_kw(&mut self, kw: &str) -> Result<Span, Diagnostic> {
        if self.at_kw(kw) {
            Ok(self.bump().span)
        } else {
            Err(self.err(format!("expected `{kw}`, found {}", self.peek().describe())))
        }
    }

    pub fn expect_ident(&mut self) -> Result<(String, Span), Diagnostic> {
        match self.peek().clone() {
            Tok::Ident(s) => {
                let sp = self.bump().span;
                Ok((s, sp))
            }
            other => Err(self.err(format!("expected identifier, found {}", other.describe()))),
        }
    }

    pub fn expect_number(&mut self) -> Result<(f64, Span), Diagnostic> {
        let neg = self.eat(&Tok::Minus);
        match self.peek().clone() {
            Tok::Number(n) => {
                let sp = self.bump().span;
                Ok((if neg { -n } else { n }, sp))
            }
            other => Err(self.err(format!("expected number, found {}", other.describe()))),
        }
    }

    pub fn expect_str(&mut self) -> Result<(String, Span), Diagnostic> {
        match self.peek().clone() {
            Tok::Str(s) => {
                let sp = self.bump().span;
                Ok((s, sp))
            }
            other => Err(self.err(format!("expected string literal, found {}", other.describe()))),
        }
    }

    pub fn expect_ref(&mut self) -> Result<(String, Span), Diagnostic> {
        match self.peek().clone() {
            Tok::AngleRef(s) => {
                let sp = self.bump().span;
                Ok((s, sp))
            }
            other => Err(self.err(format!("expected `<...>` reference, found {}", other.describe()))),
        }
    }

    pub fn err(&self, message: impl Into<String>) -> Diagnostic {
        Diagnostic::error(self.file, self.span(), "E-PARSE", message)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn kinds(text: &str, refs: bool) -> Vec<Tok> {
        lex("t", text, refs).unwrap().into_iter().map(|t| t.tok).collect()
    }

    #[test]
    fn arrows_and_refs() {
        let ks = kinds("Above_Belt <-> At_Belt profile normal", false);
        assert!(ks.contains(&Tok::BiArrow));
        let ks = kinds("<deltas/machineDelta.decore>,", true);
        assert_eq!(ks[0], Tok::AngleRef("deltas/machineDelta.decore".into()));
    }

    #[test]
    fn biarrow_beats_ref_mode() {
        let ks = kinds("A <-> B", true);
        assert!(ks.contains(&Tok::BiArrow));
    }

    #[test]
    fn numbers_and_ranges() {
        let ks = kinds("x = 0.12 y in [0..2]", false);
        assert!(ks.contains(&Tok::Number(0.12)));
        assert!(ks.contains(&Tok::DotDot));
    }

    #[test]
    fn line_and_col_tracking() {
        let toks = lex("t", "a\n  bb", false).unwrap();
        assert_eq!(toks[1].span.line, 2);
        assert_eq!(toks[1].span.col, 3);
    }

    #[test]
    fn io_edge_shape() {
        let ks = kinds("loc4 -TURNERDOWNSUCC,TurnerTurnTop-> loc6", false);
        assert_eq!(
            ks,
            vec![
                Tok::Ident("loc4".into()),
                Tok::Minus,
                Tok::Ident("TURNERDOWNSUCC".into()),
                Tok::Comma,
                Tok::Ident("TurnerTurnTop".into()),
                Tok::Arrow,
                Tok::Ident("loc6".into()),
                Tok::Eof
            ]
        );
    }
}
