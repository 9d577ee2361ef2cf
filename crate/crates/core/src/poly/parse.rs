//! Text input for polynomials.
//!
//! ```text
//! expr   := '-'? term (('+' | '-') term)*
//! term   := factor ('*' factor)*
//! factor := coeff | var ('^' nat)?
//! coeff  := nat | 'u' ('^' nat)?        ('u' only in characteristic p)
//! var    := 'x' | 'y' | 'z' | 'w' | 'x' nat
//! ```
//!
//! Letter variables map to indices 0..=3; indexed variables `x1, x2, …` map to
//! 0, 1, …. The two styles cannot be mixed in one expression.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_traits::ToPrimitive;

use super::MultiPoly;
use crate::coeff::LocalRing;
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Num(BigInt),
    Letter(usize),
    Indexed(usize),
    Uniformizer,
    Caret,
    Star,
    Plus,
    Minus,
}

fn syntax(position: usize, message: impl Into<String>) -> Error {
    Error::Syntax { position, message: message.into() }
}

fn tokenize(text: &str) -> Result<Vec<(usize, Tok)>> {
    let bytes = text.as_bytes();
    let mut out = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i];
        let start = i;
        match c {
            b' ' | b'\t' | b'\n' | b'\r' => {
                i += 1;
                continue;
            }
            b'^' => out.push((start, Tok::Caret)),
            b'*' => out.push((start, Tok::Star)),
            b'+' => out.push((start, Tok::Plus)),
            b'-' => out.push((start, Tok::Minus)),
            b'0'..=b'9' => {
                while i < bytes.len() && bytes[i].is_ascii_digit() {
                    i += 1;
                }
                let n: BigInt = text[start..i].parse().expect("digit run parses");
                out.push((start, Tok::Num(n)));
                continue;
            }
            c if c.is_ascii_alphabetic() => {
                while i < bytes.len() && bytes[i].is_ascii_alphanumeric() {
                    i += 1;
                }
                let word = &text[start..i];
                let tok = match word {
                    "x" => Tok::Letter(0),
                    "y" => Tok::Letter(1),
                    "z" => Tok::Letter(2),
                    "w" => Tok::Letter(3),
                    "u" => Tok::Uniformizer,
                    w if w.len() > 1 && w.starts_with('x') && w[1..].bytes().all(|b| b.is_ascii_digit()) => {
                        let k: usize = w[1..].parse().map_err(|_| syntax(start, "variable index too large"))?;
                        if k == 0 {
                            return Err(syntax(start, "variable indices start at 1"));
                        }
                        Tok::Indexed(k - 1)
                    }
                    w => return Err(syntax(start, format!("unknown identifier '{w}'"))),
                };
                out.push((start, tok));
                continue;
            }
            _ => return Err(syntax(start, format!("unexpected character '{}'", c as char))),
        }
        i += 1;
    }
    Ok(out)
}

struct Term<E> {
    coeff: E,
    exps: BTreeMap<usize, u32>,
}

struct Parser<'a, R: LocalRing> {
    ring: &'a R,
    toks: Vec<(usize, Tok)>,
    pos: usize,
    end: usize,
    letters: Option<usize>,
    indexed: Option<usize>,
}

impl<'a, R: LocalRing> Parser<'a, R> {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos).map(|(_, t)| t)
    }

    fn here(&self) -> usize {
        self.toks.get(self.pos).map(|(p, _)| *p).unwrap_or(self.end)
    }

    fn exponent(&mut self) -> Result<u32> {
        if self.peek() != Some(&Tok::Caret) {
            return Ok(1);
        }
        self.pos += 1;
        let at = self.here();
        match self.toks.get(self.pos) {
            Some((_, Tok::Num(n))) => {
                let e = n.to_u32().ok_or_else(|| syntax(at, "exponent too large"))?;
                self.pos += 1;
                Ok(e)
            }
            _ => Err(syntax(at, "expected a natural number after '^'")),
        }
    }

    fn factor(&mut self, term: &mut Term<R::Elem>) -> Result<()> {
        let at = self.here();
        let tok = self.toks.get(self.pos).map(|(_, t)| t.clone());
        match tok {
            Some(Tok::Num(n)) => {
                self.pos += 1;
                term.coeff = self.ring.mul(&term.coeff, &self.ring.from_bigint(&n));
            }
            Some(Tok::Uniformizer) => {
                if self.ring.characteristic() == 0 {
                    return Err(Error::UniformizerInCharZero { position: at });
                }
                self.pos += 1;
                let e = self.exponent()?;
                term.coeff = self.ring.mul(&term.coeff, &self.ring.uniformizer_pow(e));
            }
            Some(Tok::Letter(i)) | Some(Tok::Indexed(i)) => {
                let indexed = matches!(tok, Some(Tok::Indexed(_)));
                let (mine, other) = if indexed { (&mut self.indexed, self.letters) } else { (&mut self.letters, self.indexed) };
                if other.is_some() {
                    return Err(syntax(at, "cannot mix x,y,z,w with indexed variables x1, x2, …"));
                }
                *mine = Some(mine.map_or(i, |m| m.max(i)));
                self.pos += 1;
                let e = self.exponent()?;
                *term.exps.entry(i).or_insert(0) += e;
            }
            Some(_) => return Err(syntax(at, "expected a number, 'u' or a variable")),
            None => return Err(syntax(at, "unexpected end of input")),
        }
        Ok(())
    }

    fn term(&mut self, negative: bool) -> Result<Term<R::Elem>> {
        let one = self.ring.one();
        let mut term = Term { coeff: if negative { self.ring.neg(&one) } else { one }, exps: BTreeMap::new() };
        self.factor(&mut term)?;
        while self.peek() == Some(&Tok::Star) {
            self.pos += 1;
            self.factor(&mut term)?;
        }
        Ok(term)
    }

    fn expr(&mut self) -> Result<Vec<Term<R::Elem>>> {
        let mut terms = Vec::new();
        let mut negative = false;
        if self.peek() == Some(&Tok::Minus) {
            self.pos += 1;
            negative = true;
        }
        terms.push(self.term(negative)?);
        loop {
            match self.peek() {
                Some(Tok::Plus) => negative = false,
                Some(Tok::Minus) => negative = true,
                Some(_) => return Err(syntax(self.here(), "expected '+', '-' or '*'")),
                None => break,
            }
            self.pos += 1;
            terms.push(self.term(negative)?);
        }
        Ok(terms)
    }
}

/// Parses `text` into a polynomial over `ring`.
///
/// The variable count is the largest variable index used, raised to `n_hint`
/// when that is larger. A constant with no hint has one variable.
pub fn parse<R: LocalRing>(text: &str, n_hint: Option<usize>, ring: &R) -> Result<MultiPoly<R>> {
    let toks = tokenize(text)?;
    let mut parser = Parser { ring, toks, pos: 0, end: text.len(), letters: None, indexed: None };
    let terms = parser.expr()?;
    let needed = parser.letters.or(parser.indexed).map_or(0, |m| m + 1);
    if let Some(h) = n_hint {
        if h < needed {
            return Err(syntax(0, format!("expression uses {needed} variables but {h} were requested")));
        }
    }
    let n = n_hint.unwrap_or(needed).max(needed).max(1);
    let mut out = MultiPoly::zero(ring, n);
    for t in terms {
        let mut e = vec![0u32; n];
        for (i, k) in t.exps {
            e[i] = k;
        }
        out = out.add(&MultiPoly::from_terms(ring, n, [(e, t.coeff)]));
    }
    Ok(out)
}
