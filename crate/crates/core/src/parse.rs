//! Parser for the function DSL.
//!
//! Grammar (lowest binding first):
//!
//! ```text
//! expr    := addend (('+' | '-') addend)*
//! addend  := '-' addend | term
//! term    := factor (('*' | '/') factor)*
//! factor  := atom ('^' natural)?
//! atom    := number | 't' | 'pi'
//!          | ('sin' | 'cos' | 'exp' | 'abs') '(' expr ')'
//!          | 'bump' '(' signed ',' signed ')'
//!          | 'piecewise' '(' branch (';' branch)* ';' 'else' ':' expr ')'
//!          | '(' expr ')'
//! branch  := '[' signed ',' signed ']' ':' expr
//! signed  := '-'? number
//! ```
//!
//! Unary minus therefore binds tighter than `+`/`-` but looser than `*`, so
//! `-t^2/50` is the negation of `t^2/50`. A divisor must be constant (no
//! `t`); the quotient is stored as a product with the reciprocal, so the
//! AST never contains a division node. Errors carry the byte offset at
//! which parsing failed plus what would have been accepted there.

use crate::expr::{Expr, PiecewiseBranch};
use std::fmt;

#[derive(Debug, Clone, PartialEq)]
pub enum ParseErrorKind {
    /// None of the listed tokens matched at this position.
    Expected {
        expected: Vec<&'static str>,
        found: String,
    },
    UnknownName(String),
    /// `^` exponents must be natural numbers.
    BadExponent(String),
    /// Divisor mentions `t` or evaluates to zero.
    BadDivisor(String),
    /// Malformed interval (`lo >= hi`, out-of-order branches, ...).
    BadInterval(String),
    BadNumber(String),
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub struct ParseError {
    pub offset: usize,
    pub kind: ParseErrorKind,
}

impl fmt::Display for ParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "parse error at byte {}: ", self.offset)?;
        match &self.kind {
            ParseErrorKind::Expected { expected, found } => {
                write!(f, "expected {}, found {}", expected.join(" | "), found)
            }
            ParseErrorKind::UnknownName(n) => write!(f, "unknown name '{n}'"),
            ParseErrorKind::BadExponent(m) => write!(f, "bad exponent: {m}"),
            ParseErrorKind::BadDivisor(m) => write!(f, "bad divisor: {m}"),
            ParseErrorKind::BadInterval(m) => write!(f, "bad interval: {m}"),
            ParseErrorKind::BadNumber(m) => write!(f, "bad number: {m}"),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Num(f64),
    Ident(String),
    Plus,
    Minus,
    Star,
    Slash,
    Caret,
    LParen,
    RParen,
    LBracket,
    RBracket,
    Comma,
    Semi,
    Colon,
    Eof,
}

impl Tok {
    fn describe(&self) -> String {
        match self {
            Tok::Num(v) => format!("number {v}"),
            Tok::Ident(s) => format!("'{s}'"),
            Tok::Plus => "'+'".into(),
            Tok::Minus => "'-'".into(),
            Tok::Star => "'*'".into(),
            Tok::Slash => "'/'".into(),
            Tok::Caret => "'^'".into(),
            Tok::LParen => "'('".into(),
            Tok::RParen => "')'".into(),
            Tok::LBracket => "'['".into(),
            Tok::RBracket => "']'".into(),
            Tok::Comma => "','".into(),
            Tok::Semi => "';'".into(),
            Tok::Colon => "':'".into(),
            Tok::Eof => "end of input".into(),
        }
    }
}

struct Lexer<'a> {
    src: &'a [u8],
    pos: usize,
}

impl<'a> Lexer<'a> {
    fn next_token(&mut self) -> Result<(usize, Tok), ParseError> {
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
        let start = self.pos;
        if self.pos >= self.src.len() {
            return Ok((start, Tok::Eof));
        }
        let c = self.src[self.pos];
        let single = match c {
            b'+' => Some(Tok::Plus),
            b'-' => Some(Tok::Minus),
            b'*' => Some(Tok::Star),
            b'/' => Some(Tok::Slash),
            b'^' => Some(Tok::Caret),
            b'(' => Some(Tok::LParen),
            b')' => Some(Tok::RParen),
            b'[' => Some(Tok::LBracket),
            b']' => Some(Tok::RBracket),
            b',' => Some(Tok::Comma),
            b';' => Some(Tok::Semi),
            b':' => Some(Tok::Colon),
            _ => None,
        };
        if let Some(tok) = single {
            self.pos += 1;
            return Ok((start, tok));
        }
        if c.is_ascii_digit() {
            self.pos += 1;
            while self.pos < self.src.len() && self.src[self.pos].is_ascii_digit() {
                self.pos += 1;
            }
            if self.pos < self.src.len() && self.src[self.pos] == b'.' {
                self.pos += 1;
                while self.pos < self.src.len() && self.src[self.pos].is_ascii_digit() {
                    self.pos += 1;
                }
            }
            if self.pos < self.src.len() && (self.src[self.pos] | 0x20) == b'e' {
                let mark = self.pos;
                self.pos += 1;
                if self.pos < self.src.len()
                    && (self.src[self.pos] == b'+' || self.src[self.pos] == b'-')
                {
                    self.pos += 1;
                }
                if self.pos < self.src.len() && self.src[self.pos].is_ascii_digit() {
                    while self.pos < self.src.len() && self.src[self.pos].is_ascii_digit() {
                        self.pos += 1;
                    }
                } else {
                    // Not an exponent after all (e.g. "2*euler"): back off.
                    self.pos = mark;
                }
            }
            let text = std::str::from_utf8(&self.src[start..self.pos]).unwrap();
            let value: f64 = text.parse().map_err(|_| ParseError {
                offset: start,
                kind: ParseErrorKind::BadNumber(text.to_string()),
            })?;
            return Ok((start, Tok::Num(value)));
        }
        if c.is_ascii_alphabetic() || c == b'_' {
            while self.pos < self.src.len()
                && (self.src[self.pos].is_ascii_alphanumeric() || self.src[self.pos] == b'_')
            {
                self.pos += 1;
            }
            let text = std::str::from_utf8(&self.src[start..self.pos]).unwrap();
            return Ok((start, Tok::Ident(text.to_string())));
        }
        Err(ParseError {
            offset: start,
            kind: ParseErrorKind::Expected {
                expected: vec!["a token"],
                found: format!("'{}'", c as char),
            },
        })
    }
}

struct Parser {
    toks: Vec<(usize, Tok)>,
    pos: usize,
}

pub fn parse(src: &str) -> Result<Expr, ParseError> {
    let mut lexer = Lexer {
        src: src.as_bytes(),
        pos: 0,
    };
    let mut toks = Vec::new();
    loop {
        let (off, tok) = lexer.next_token()?;
        let done = tok == Tok::Eof;
        toks.push((off, tok));
        if done {
            break;
        }
    }
    let mut p = Parser { toks, pos: 0 };
    let expr = p.expr()?;
    p.expect(Tok::Eof, "end of input")?;
    Ok(expr)
}

/// `-e`, folding literal constants so `-2` stays a single node.
fn negate(e: Expr) -> Expr {
    match e {
        Expr::Const(c) => Expr::Const(-c),
        other => Expr::ScalarMul(-1.0, Box::new(other)),
    }
}

impl Parser {
    fn peek(&self) -> &Tok {
        &self.toks[self.pos].1
    }

    fn offset(&self) -> usize {
        self.toks[self.pos].0
    }

    fn bump_tok(&mut self) -> Tok {
        let tok = self.toks[self.pos].1.clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        tok
    }

    fn expect(&mut self, want: Tok, label: &'static str) -> Result<(), ParseError> {
        if *self.peek() == want {
            self.bump_tok();
            Ok(())
        } else {
            Err(self.expected(vec![label]))
        }
    }

    fn expected(&self, expected: Vec<&'static str>) -> ParseError {
        ParseError {
            offset: self.offset(),
            kind: ParseErrorKind::Expected {
                expected,
                found: self.peek().describe(),
            },
        }
    }

    fn expr(&mut self) -> Result<Expr, ParseError> {
        let mut acc = self.addend()?;
        loop {
            match self.peek() {
                Tok::Plus => {
                    self.bump_tok();
                    let rhs = self.addend()?;
                    acc = Expr::Sum(Box::new(acc), Box::new(rhs));
                }
                Tok::Minus => {
                    self.bump_tok();
                    let rhs = self.addend()?;
                    acc = Expr::Sum(Box::new(acc), Box::new(negate(rhs)));
                }
                _ => return Ok(acc),
            }
        }
    }

    fn addend(&mut self) -> Result<Expr, ParseError> {
        if *self.peek() == Tok::Minus {
            self.bump_tok();
            let inner = self.addend()?;
            Ok(negate(inner))
        } else {
            self.term()
        }
    }

    fn term(&mut self) -> Result<Expr, ParseError> {
        let mut acc = self.factor()?;
        loop {
            match self.peek() {
                Tok::Star => {
                    self.bump_tok();
                    let rhs = self.factor()?;
                    acc = Expr::Product(Box::new(acc), Box::new(rhs));
                }
                Tok::Slash => {
                    let op_off = self.offset();
                    self.bump_tok();
                    let rhs = self.factor()?;
                    if rhs.contains_var() {
                        return Err(ParseError {
                            offset: op_off,
                            kind: ParseErrorKind::BadDivisor(
                                "divisor must be constant (must not mention t)".into(),
                            ),
                        });
                    }
                    let value = rhs.eval(0.0);
                    if value == 0.0 {
                        return Err(ParseError {
                            offset: op_off,
                            kind: ParseErrorKind::BadDivisor("division by zero".into()),
                        });
                    }
                    acc = Expr::Product(Box::new(acc), Box::new(Expr::Const(1.0 / value)));
                }
                _ => return Ok(acc),
            }
        }
    }

    fn factor(&mut self) -> Result<Expr, ParseError> {
        let base = self.atom()?;
        if *self.peek() == Tok::Caret {
            self.bump_tok();
            let off = self.offset();
            match self.bump_tok() {
                Tok::Num(v) => {
                    if v.fract() != 0.0 || !(0.0..=1_000_000.0).contains(&v) {
                        return Err(ParseError {
                            offset: off,
                            kind: ParseErrorKind::BadExponent(format!(
                                "expected a natural number <= 1000000, got {v}"
                            )),
                        });
                    }
                    Ok(Expr::Pow(Box::new(base), v as u32))
                }
                tok => Err(ParseError {
                    offset: off,
                    kind: ParseErrorKind::Expected {
                        expected: vec!["a natural exponent"],
                        found: tok.describe(),
                    },
                }),
            }
        } else {
            Ok(base)
        }
    }

    fn atom(&mut self) -> Result<Expr, ParseError> {
        let off = self.offset();
        match self.peek().clone() {
            Tok::Num(v) => {
                self.bump_tok();
                Ok(Expr::Const(v))
            }
            Tok::LParen => {
                self.bump_tok();
                let inner = self.expr()?;
                self.expect(Tok::RParen, "')'")?;
                Ok(inner)
            }
            Tok::Ident(name) => {
                self.bump_tok();
                match name.as_str() {
                    "t" => Ok(Expr::Var),
                    "pi" => Ok(Expr::Const(std::f64::consts::PI)),
                    "sin" => Ok(Expr::Sin(Box::new(self.call_arg()?))),
                    "cos" => Ok(Expr::Cos(Box::new(self.call_arg()?))),
                    "exp" => Ok(Expr::Exp(Box::new(self.call_arg()?))),
                    "abs" => Ok(Expr::Abs(Box::new(self.call_arg()?))),
                    "bump" => self.bump_call(off),
                    "piecewise" => self.piecewise_call(),
                    _ => Err(ParseError {
                        offset: off,
                        kind: ParseErrorKind::UnknownName(name),
                    }),
                }
            }
            _ => Err(self.expected(vec!["number", "'t'", "'pi'", "function call", "'('"])),
        }
    }

    fn call_arg(&mut self) -> Result<Expr, ParseError> {
        self.expect(Tok::LParen, "'('")?;
        let arg = self.expr()?;
        self.expect(Tok::RParen, "')'")?;
        Ok(arg)
    }

    fn signed_number(&mut self) -> Result<f64, ParseError> {
        let neg = if *self.peek() == Tok::Minus {
            self.bump_tok();
            true
        } else {
            false
        };
        match self.peek().clone() {
            Tok::Num(v) => {
                self.bump_tok();
                Ok(if neg { -v } else { v })
            }
            _ => Err(self.expected(vec!["number"])),
        }
    }

    fn bump_call(&mut self, off: usize) -> Result<Expr, ParseError> {
        self.expect(Tok::LParen, "'('")?;
        let lo = self.signed_number()?;
        self.expect(Tok::Comma, "','")?;
        let hi = self.signed_number()?;
        self.expect(Tok::RParen, "')'")?;
        if !(lo < hi) {
            return Err(ParseError {
                offset: off,
                kind: ParseErrorKind::BadInterval(format!("bump needs lo < hi, got [{lo}, {hi}]")),
            });
        }
        Ok(Expr::Bump { lo, hi })
    }

    fn piecewise_call(&mut self) -> Result<Expr, ParseError> {
        self.expect(Tok::LParen, "'('")?;
        let mut branches = Vec::new();
        loop {
            match self.peek().clone() {
                Tok::LBracket => {
                    let off = self.offset();
                    self.bump_tok();
                    let lo = self.signed_number()?;
                    self.expect(Tok::Comma, "','")?;
                    let hi = self.signed_number()?;
                    self.expect(Tok::RBracket, "']'")?;
                    self.expect(Tok::Colon, "':'")?;
                    let body = self.expr()?;
                    if !(lo < hi) {
                        return Err(ParseError {
                            offset: off,
                            kind: ParseErrorKind::BadInterval(format!(
                                "branch needs lo < hi, got [{lo}, {hi}]"
                            )),
                        });
                    }
                    if let Some(prev) = branches.last() {
                        let prev: &PiecewiseBranch = prev;
                        if lo < prev.hi {
                            return Err(ParseError {
                                offset: off,
                                kind: ParseErrorKind::BadInterval(format!(
                                    "branches must have increasing, disjoint intervals; \
                                     [{lo}, {hi}] starts before {}",
                                    prev.hi
                                )),
                            });
                        }
                    }
                    branches.push(PiecewiseBranch { lo, hi, body });
                    self.expect(Tok::Semi, "';'")?;
                }
                Tok::Ident(name) if name == "else" => {
                    self.bump_tok();
                    self.expect(Tok::Colon, "':'")?;
                    let otherwise = self.expr()?;
                    self.expect(Tok::RParen, "')'")?;
                    if branches.is_empty() {
                        return Err(self.expected(vec!["at least one '[lo,hi]:' branch"]));
                    }
                    return Ok(Expr::Piecewise {
                        branches,
                        otherwise: Box::new(otherwise),
                    });
                }
                _ => return Err(self.expected(vec!["'[lo,hi]:' branch", "'else:'"])),
            }
        }
    }
}
