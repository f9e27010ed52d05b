//! Polynomial text syntax: `x^5+4*x+7`, `3x^2 - x`, `(t+1)^3*a1`.
//!
//! Coefficients are decimal integers reduced into the prime field; `*` is
//! optional between factors.

use thiserror::Error;

use crate::field::FieldSpec;
use crate::mpoly::{MPoly, PolyRing};
use crate::upoly::UPoly;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ParseError {
    #[error("empty polynomial")]
    Empty,
    #[error("unexpected character {ch:?} at position {pos}")]
    UnexpectedChar { pos: usize, ch: char },
    #[error("unexpected end of input")]
    UnexpectedEnd,
    #[error("unknown variable {0:?}")]
    UnknownVariable(String),
    #[error("expected a single variable, found {0:?} and {1:?}")]
    TooManyVariables(String, String),
    #[error("exponent {0} is too large")]
    ExponentTooLarge(String),
}

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Num(String),
    Ident(String),
    Plus,
    Minus,
    Star,
    Caret,
    LParen,
    RParen,
}

fn tokenize(text: &str) -> Result<Vec<(usize, Tok)>, ParseError> {
    let chars: Vec<char> = text.chars().collect();
    let mut out = Vec::new();
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        let start = i;
        let tok = match c {
            ' ' | '\t' => {
                i += 1;
                continue;
            }
            '+' => Tok::Plus,
            '-' | '\u{2212}' => Tok::Minus,
            '*' => Tok::Star,
            '^' => Tok::Caret,
            '(' => Tok::LParen,
            ')' => Tok::RParen,
            '0'..='9' => {
                while i + 1 < chars.len() && chars[i + 1].is_ascii_digit() {
                    i += 1;
                }
                Tok::Num(chars[start..=i].iter().collect())
            }
            c if c.is_ascii_alphabetic() => {
                while i + 1 < chars.len() && (chars[i + 1].is_ascii_alphanumeric() || chars[i + 1] == '_') {
                    i += 1;
                }
                Tok::Ident(chars[start..=i].iter().collect())
            }
            ch => return Err(ParseError::UnexpectedChar { pos: i, ch }),
        };
        out.push((start, tok));
        i += 1;
    }
    Ok(out)
}

struct Parser<'a> {
    toks: Vec<(usize, Tok)>,
    pos: usize,
    ring: &'a PolyRing,
}

impl Parser<'_> {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos).map(|(_, t)| t)
    }

    fn next(&mut self) -> Option<Tok> {
        let t = self.toks.get(self.pos).map(|(_, t)| t.clone());
        self.pos += 1;
        t
    }

    fn unexpected(&self) -> ParseError {
        match self.toks.get(self.pos) {
            None => ParseError::UnexpectedEnd,
            Some((pos, t)) => {
                let ch = match t {
                    Tok::Num(s) | Tok::Ident(s) => s.chars().next().unwrap(),
                    Tok::Plus => '+',
                    Tok::Minus => '-',
                    Tok::Star => '*',
                    Tok::Caret => '^',
                    Tok::LParen => '(',
                    Tok::RParen => ')',
                };
                ParseError::UnexpectedChar { pos: *pos, ch }
            }
        }
    }

    fn expr(&mut self) -> Result<MPoly, ParseError> {
        let mut acc = self.ring.zero();
        let mut first = true;
        loop {
            let neg = match self.peek() {
                Some(Tok::Plus) => {
                    self.pos += 1;
                    false
                }
                Some(Tok::Minus) => {
                    self.pos += 1;
                    true
                }
                _ if first => false,
                _ => return Ok(acc),
            };
            first = false;
            let t = self.term()?;
            acc = if neg { acc.sub(&t) } else { acc.add(&t) };
        }
    }

    fn term(&mut self) -> Result<MPoly, ParseError> {
        let mut acc = self.factor()?;
        loop {
            match self.peek() {
                Some(Tok::Star) => {
                    self.pos += 1;
                    acc = acc.mul(&self.factor()?);
                }
                Some(Tok::Num(_)) | Some(Tok::Ident(_)) | Some(Tok::LParen) => {
                    acc = acc.mul(&self.factor()?);
                }
                _ => return Ok(acc),
            }
        }
    }

    fn exponent(&mut self) -> Result<u32, ParseError> {
        if self.peek() != Some(&Tok::Caret) {
            return Ok(1);
        }
        self.pos += 1;
        match self.next() {
            Some(Tok::Num(s)) => s.parse::<u32>().map_err(|_| ParseError::ExponentTooLarge(s)),
            _ => {
                self.pos -= 1;
                Err(self.unexpected())
            }
        }
    }

    fn factor(&mut self) -> Result<MPoly, ParseError> {
        let base = match self.next() {
            Some(Tok::Num(s)) => {
                let p = self.ring.field().characteristic() as u128;
                let v = s.bytes().fold(0u128, |acc, b| (acc * 10 + (b - b'0') as u128) % p);
                self.ring.int(v as i64)
            }
            Some(Tok::Ident(name)) => match self.ring.index_of(&name) {
                Some(i) => self.ring.var(i),
                None => return Err(ParseError::UnknownVariable(name)),
            },
            Some(Tok::LParen) => {
                let inner = self.expr()?;
                if self.next() != Some(Tok::RParen) {
                    self.pos -= 1;
                    return Err(self.unexpected());
                }
                inner
            }
            _ => {
                self.pos -= 1;
                return Err(self.unexpected());
            }
        };
        let e = self.exponent()?;
        Ok(base.pow(e))
    }
}

/// Name of the field generator in coefficients.
pub const GENERATOR: &str = "z";

/// Parses a polynomial in the variables of `ring`.
pub fn parse_mpoly(ring: &PolyRing, text: &str) -> Result<MPoly, ParseError> {
    let toks = tokenize(text)?;
    if toks.is_empty() {
        return Err(ParseError::Empty);
    }
    let mut parser = Parser { toks, pos: 0, ring };
    let p = parser.expr()?;
    if parser.pos < parser.toks.len() {
        return Err(parser.unexpected());
    }
    Ok(p)
}

/// Parses a univariate polynomial; any single identifier names the variable.
/// Over a proper extension `z` denotes the field generator.
pub fn parse_upoly(field: &FieldSpec, text: &str) -> Result<UPoly, ParseError> {
    let toks = tokenize(text)?;
    let has_gen = !field.is_prime_field();
    let mut var: Option<String> = None;
    for (_, t) in &toks {
        if let Tok::Ident(name) = t {
            if has_gen && name == GENERATOR {
                continue;
            }
            match &var {
                None => var = Some(name.clone()),
                Some(v) if v != name => return Err(ParseError::TooManyVariables(v.clone(), name.clone())),
                _ => {}
            }
        }
    }
    let var = var.unwrap_or_else(|| "x".into());
    if !has_gen {
        let ring = PolyRing::new(field, &[var]);
        return Ok(parse_mpoly(&ring, text)?.to_upoly(0).expect("single variable"));
    }
    let ring = PolyRing::new(field, &[var, GENERATOR.to_string()]);
    let p = parse_mpoly(&ring, text)?.substitute(1, &field.generator());
    Ok(p.to_upoly(0).expect("single variable"))
}
