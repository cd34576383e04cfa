//! Expression grammar for field elements:
//!
//! ```text
//! expr  := term (('+' | '-') term)*
//! term  := unary (('*' | '/') unary)*
//! unary := '-' unary | power
//! power := atom ('^' '-'? integer)?
//! atom  := integer | 'a' | 'i' | 't' | '(' expr ')'
//! ```
//!
//! `a` names the generator `α` of a quadratic base; `i` is accepted when
//! `α² = −1`.

use num_bigint::BigInt;

use super::{Elem, Field};
use crate::rat::Rat;
use crate::{Error, Result};

struct Parser<'a> {
    field: &'a Field,
    chars: Vec<char>,
    pos: usize,
}

pub fn parse(field: &Field, src: &str) -> Result<Elem> {
    let mut p = Parser { field, chars: src.chars().collect(), pos: 0 };
    let e = p.expr()?;
    p.skip_ws();
    if p.pos < p.chars.len() {
        return Err(p.err(format!("unexpected {:?}", p.chars[p.pos])));
    }
    Ok(e)
}

impl Parser<'_> {
    fn err(&self, msg: impl Into<String>) -> Error {
        Error::Parse { pos: self.pos, msg: msg.into() }
    }

    fn skip_ws(&mut self) {
        while self.pos < self.chars.len() && self.chars[self.pos].is_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<char> {
        self.skip_ws();
        self.chars.get(self.pos).copied()
    }

    fn eat(&mut self, c: char) -> bool {
        if self.peek() == Some(c) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expr(&mut self) -> Result<Elem> {
        let k = self.field;
        let mut acc = self.term()?;
        loop {
            if self.eat('+') {
                acc = k.add(&acc, &self.term()?);
            } else if self.eat('-') {
                acc = k.sub(&acc, &self.term()?);
            } else {
                return Ok(acc);
            }
        }
    }

    fn term(&mut self) -> Result<Elem> {
        let k = self.field;
        let mut acc = self.unary()?;
        loop {
            if self.eat('*') {
                acc = k.mul(&acc, &self.unary()?);
            } else if self.eat('/') {
                let at = self.pos;
                let d = self.unary()?;
                acc = k.div(&acc, &d).map_err(|_| Error::Parse { pos: at, msg: "division by zero".into() })?;
            } else {
                return Ok(acc);
            }
        }
    }

    fn unary(&mut self) -> Result<Elem> {
        if self.eat('-') {
            let x = self.unary()?;
            return Ok(self.field.neg(&x));
        }
        self.power()
    }

    fn power(&mut self) -> Result<Elem> {
        let base = self.atom()?;
        if !self.eat('^') {
            return Ok(base);
        }
        let negative = self.eat('-');
        self.skip_ws();
        let at = self.pos;
        let n = self.integer()?;
        let e: i64 = n.try_into().map_err(|_| Error::Parse { pos: at, msg: "exponent too large".into() })?;
        let e = if negative { -e } else { e };
        self.field.pow(&base, e).map_err(|_| Error::Parse { pos: at, msg: "negative power of zero".into() })
    }

    fn integer(&mut self) -> Result<BigInt> {
        let start = self.pos;
        while self.pos < self.chars.len() && self.chars[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        if start == self.pos {
            return Err(self.err("expected an integer"));
        }
        let s: String = self.chars[start..self.pos].iter().collect();
        Ok(s.parse().expect("digits"))
    }

    fn atom(&mut self) -> Result<Elem> {
        let k = self.field;
        match self.peek() {
            None => Err(self.err("unexpected end of input")),
            Some('(') => {
                self.pos += 1;
                let e = self.expr()?;
                if !self.eat(')') {
                    return Err(self.err("expected ')'"));
                }
                Ok(e)
            }
            Some(c) if c.is_ascii_digit() => {
                let at = self.pos;
                let n = self.integer()?;
                k.rat(&Rat::from_integer(n)).map_err(|e| Error::Parse { pos: at, msg: e.to_string() })
            }
            Some('t') => {
                self.pos += 1;
                Ok(k.t())
            }
            Some('a') if k.base().is_quadratic() => {
                self.pos += 1;
                Ok(k.alpha().expect("quadratic base"))
            }
            Some('i') if k.is_gaussian() => {
                self.pos += 1;
                Ok(k.alpha().expect("quadratic base"))
            }
            Some(c) => Err(self.err(format!("symbol {c:?} is not available in this field"))),
        }
    }
}
