//! Lexer and recursive-descent parser.
//!
//! ```text
//! expr     := term (('+'|'-') term)*
//! term     := unary (('*'|'/') unary)*
//! unary    := ('+'|'-') unary | factor
//! factor   := base ('^' exponent)?
//! exponent := ('+'|'-')? number
//! base     := number | 's' | 'i' | '(' re ',' im ')' | '(' expr ')'
//!           | 'involute' '(' expr ')'
//! ```
//!
//! `re` and `im` in a complex literal are optionally signed real numbers.

use std::collections::BTreeSet;
use std::fmt;

use num_complex::Complex64;
use thiserror::Error;

use super::Node;

const MAX_DEPTH: usize = 200;

#[derive(Clone, Debug, PartialEq, Error)]
#[error("parse error at offset {offset}: expected {}, found {found}", fmt_expected(.expected))]
pub struct ParseError {
    /// Byte offset into the input.
    pub offset: usize,
    pub expected: Vec<String>,
    pub found: String,
}

fn fmt_expected(expected: &[String]) -> String {
    match expected.len() {
        0 => "nothing".to_string(),
        1 => expected[0].clone(),
        _ => format!("one of {}", expected.join(" ")),
    }
}

#[derive(Clone, Debug, PartialEq)]
enum Tok {
    Num(f64),
    Var,
    Imag,
    Involute,
    Plus,
    Minus,
    Star,
    Slash,
    Caret,
    LParen,
    RParen,
    Comma,
    End,
}

impl Tok {
    fn describe(&self) -> String {
        match self {
            Tok::Num(_) => "number".into(),
            Tok::Var => "'s'".into(),
            Tok::Imag => "'i'".into(),
            Tok::Involute => "'involute'".into(),
            Tok::Plus => "'+'".into(),
            Tok::Minus => "'-'".into(),
            Tok::Star => "'*'".into(),
            Tok::Slash => "'/'".into(),
            Tok::Caret => "'^'".into(),
            Tok::LParen => "'('".into(),
            Tok::RParen => "')'".into(),
            Tok::Comma => "','".into(),
            Tok::End => "end of input".into(),
        }
    }
}

impl fmt::Display for Tok {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Tok::Num(v) => write!(f, "{v:?}"),
            other => f.write_str(&other.describe()),
        }
    }
}

fn lex(text: &str) -> Result<Vec<(Tok, usize)>, ParseError> {
    let bytes = text.as_bytes();
    let mut out = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let b = bytes[i];
        let start = i;
        let tok = match b {
            b' ' | b'\t' | b'\n' | b'\r' => {
                i += 1;
                continue;
            }
            b'+' => Tok::Plus,
            b'-' => Tok::Minus,
            b'*' => Tok::Star,
            b'/' => Tok::Slash,
            b'^' => Tok::Caret,
            b'(' => Tok::LParen,
            b')' => Tok::RParen,
            b',' => Tok::Comma,
            b'0'..=b'9' | b'.' => {
                let end = scan_number(bytes, i);
                let lit = &text[i..end];
                let value: f64 = lit.parse().map_err(|_| ParseError {
                    offset: start,
                    expected: vec!["number".into()],
                    found: format!("'{lit}'"),
                })?;
                out.push((Tok::Num(value), start));
                i = end;
                continue;
            }
            b'a'..=b'z' | b'A'..=b'Z' | b'_' => {
                let mut end = i;
                while end < bytes.len() && (bytes[end].is_ascii_alphanumeric() || bytes[end] == b'_')
                {
                    end += 1;
                }
                let word = &text[i..end];
                let tok = match word {
                    "s" => Tok::Var,
                    "i" => Tok::Imag,
                    "involute" => Tok::Involute,
                    _ => {
                        return Err(ParseError {
                            offset: start,
                            expected: vec!["'s'".into(), "'i'".into(), "'involute'".into()],
                            found: format!("identifier '{word}'"),
                        })
                    }
                };
                out.push((tok, start));
                i = end;
                continue;
            }
            _ => {
                let ch = text[i..].chars().next().unwrap_or('?');
                return Err(ParseError {
                    offset: start,
                    expected: vec!["expression".into()],
                    found: format!("character {ch:?}"),
                });
            }
        };
        out.push((tok, start));
        i += 1;
    }
    out.push((Tok::End, text.len()));
    Ok(out)
}

/// End of a numeric literal `digits [. digits] [e [+-] digits]` starting at `i`.
fn scan_number(bytes: &[u8], mut i: usize) -> usize {
    while i < bytes.len() && bytes[i].is_ascii_digit() {
        i += 1;
    }
    if i < bytes.len() && bytes[i] == b'.' {
        i += 1;
        while i < bytes.len() && bytes[i].is_ascii_digit() {
            i += 1;
        }
    }
    if i < bytes.len() && (bytes[i] == b'e' || bytes[i] == b'E') {
        let mut j = i + 1;
        if j < bytes.len() && (bytes[j] == b'+' || bytes[j] == b'-') {
            j += 1;
        }
        if j < bytes.len() && bytes[j].is_ascii_digit() {
            while j < bytes.len() && bytes[j].is_ascii_digit() {
                j += 1;
            }
            i = j;
        }
    }
    i
}

struct Parser {
    toks: Vec<(Tok, usize)>,
    pos: usize,
    depth: usize,
    /// Tokens tried at the current position since the last consume.
    expected: BTreeSet<String>,
}

impl Parser {
    fn peek(&self) -> &Tok {
        &self.toks[self.pos].0
    }

    fn offset(&self) -> usize {
        self.toks[self.pos].1
    }

    fn peek_at(&self, k: usize) -> &Tok {
        let idx = (self.pos + k).min(self.toks.len() - 1);
        &self.toks[idx].0
    }

    fn advance(&mut self) -> Tok {
        let t = self.toks[self.pos].0.clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        self.expected.clear();
        t
    }

    /// Consume `tok` if it is next; records it as expected either way.
    fn eat(&mut self, tok: &Tok) -> bool {
        if self.peek() == tok {
            self.advance();
            true
        } else {
            self.expected.insert(tok.describe());
            false
        }
    }

    fn error(&mut self, also: &[&str]) -> ParseError {
        for e in also {
            self.expected.insert((*e).to_string());
        }
        ParseError {
            offset: self.offset(),
            expected: self.expected.iter().cloned().collect(),
            found: self.peek().to_string(),
        }
    }

    fn expect(&mut self, tok: &Tok) -> Result<(), ParseError> {
        if self.eat(tok) {
            Ok(())
        } else {
            Err(self.error(&[]))
        }
    }

    fn enter(&mut self) -> Result<(), ParseError> {
        self.depth += 1;
        if self.depth > MAX_DEPTH {
            return Err(ParseError {
                offset: self.offset(),
                expected: vec![format!("nesting depth <= {MAX_DEPTH}")],
                found: self.peek().to_string(),
            });
        }
        Ok(())
    }

    fn expr(&mut self) -> Result<Node, ParseError> {
        self.enter()?;
        let mut lhs = self.term()?;
        loop {
            if self.eat(&Tok::Plus) {
                let rhs = self.term()?;
                lhs = Node::Add(Box::new(lhs), Box::new(rhs));
            } else if self.eat(&Tok::Minus) {
                let rhs = self.term()?;
                lhs = Node::Sub(Box::new(lhs), Box::new(rhs));
            } else {
                break;
            }
        }
        self.depth -= 1;
        Ok(lhs)
    }

    fn term(&mut self) -> Result<Node, ParseError> {
        let mut lhs = self.unary()?;
        loop {
            if self.eat(&Tok::Star) {
                let rhs = self.unary()?;
                lhs = Node::Mul(Box::new(lhs), Box::new(rhs));
            } else if self.eat(&Tok::Slash) {
                let rhs = self.unary()?;
                lhs = Node::Div(Box::new(lhs), Box::new(rhs));
            } else {
                break;
            }
        }
        Ok(lhs)
    }

    fn unary(&mut self) -> Result<Node, ParseError> {
        self.enter()?;
        let node = if self.eat(&Tok::Minus) {
            Node::Neg(Box::new(self.unary()?))
        } else if self.eat(&Tok::Plus) {
            self.unary()?
        } else {
            self.factor()?
        };
        self.depth -= 1;
        Ok(node)
    }

    fn factor(&mut self) -> Result<Node, ParseError> {
        let base = self.base()?;
        if self.eat(&Tok::Caret) {
            let e = self.signed_number()?;
            Ok(Node::Pow(Box::new(base), e))
        } else {
            Ok(base)
        }
    }

    fn signed_number(&mut self) -> Result<f64, ParseError> {
        let sign = if self.eat(&Tok::Minus) {
            -1.0
        } else {
            self.eat(&Tok::Plus);
            1.0
        };
        match *self.peek() {
            Tok::Num(v) => {
                self.advance();
                Ok(sign * v)
            }
            _ => Err(self.error(&["number"])),
        }
    }

    /// Lookahead for `[sign] number ,` after an opening paren; once the comma
    /// is seen the parser is committed to a complex literal.
    fn is_complex_literal(&self) -> bool {
        let k = usize::from(matches!(self.peek(), Tok::Plus | Tok::Minus));
        matches!(self.peek_at(k), Tok::Num(_)) && *self.peek_at(k + 1) == Tok::Comma
    }

    fn base(&mut self) -> Result<Node, ParseError> {
        match *self.peek() {
            Tok::Num(v) => {
                self.advance();
                Ok(Node::Lit(Complex64::new(v, 0.0)))
            }
            Tok::Var => {
                self.advance();
                Ok(Node::Var)
            }
            Tok::Imag => {
                self.advance();
                Ok(Node::Lit(Complex64::new(0.0, 1.0)))
            }
            Tok::Involute => {
                self.advance();
                self.expect(&Tok::LParen)?;
                let inner = self.expr()?;
                self.expect(&Tok::RParen)?;
                Ok(Node::Involute(Box::new(inner)))
            }
            Tok::LParen => {
                self.advance();
                if self.is_complex_literal() {
                    let re = self.signed_number()?;
                    self.expect(&Tok::Comma)?;
                    let im = self.signed_number()?;
                    self.expect(&Tok::RParen)?;
                    return Ok(Node::Lit(Complex64::new(re, im)));
                }
                let inner = self.expr()?;
                self.expect(&Tok::RParen)?;
                Ok(inner)
            }
            _ => Err(self.error(&["number", "'s'", "'i'", "'('", "'involute'"])),
        }
    }
}

pub(super) fn parse(text: &str) -> Result<Node, ParseError> {
    let toks = lex(text)?;
    let mut p = Parser {
        toks,
        pos: 0,
        depth: 0,
        expected: BTreeSet::new(),
    };
    let node = p.expr()?;
    if *p.peek() != Tok::End {
        return Err(p.error(&["end of input"]));
    }
    Ok(node)
}
