//! Recursive-descent parser.
//!
//! ```text
//! expr   := term (("+"|"-") term)*
//! term   := factor (("*"|"/") factor)*
//! factor := atom ("^" integer)? | "-" factor
//! atom   := number | ident | "(" expr ")"
//! number := integer ("/" positive-integer)?
//! ident  := letter (letter|digit)*
//! ```
//!
//! `integer "/" positive-integer` is read as one rational literal whenever it
//! can be, so `6/2^2` is `(6/2)^2` and `x/2/3` is `x/(2/3)`. A zero
//! denominator never forms a literal: `1/0` is a quotient and fails at
//! evaluation time. A minus sign applied directly to a literal folds into a
//! negative constant.

use std::str::FromStr;

use num_bigint::BigInt;
use num_traits::Zero;
use thiserror::Error;

use super::Expr;
use crate::scalar::ExactScalar;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("syntax error at byte {offset}: {message}")]
pub struct ParseError {
    pub offset: usize,
    pub message: String,
}

pub fn parse(text: &str) -> Result<Expr, ParseError> {
    let mut p = Parser { src: text.as_bytes(), pos: 0 };
    let e = p.expr()?;
    p.skip_ws();
    if p.pos < p.src.len() {
        return Err(p.error(format!("unexpected `{}`", p.src[p.pos] as char)));
    }
    Ok(e)
}

struct Parser<'a> {
    src: &'a [u8],
    pos: usize,
}

impl Parser<'_> {
    fn error(&self, message: impl Into<String>) -> ParseError {
        ParseError { offset: self.pos, message: message.into() }
    }

    fn skip_ws(&mut self) {
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.src.get(self.pos).copied()
    }

    fn eat(&mut self, c: u8) -> bool {
        if self.peek() == Some(c) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expr(&mut self) -> Result<Expr, ParseError> {
        let mut lhs = self.term()?;
        loop {
            if self.eat(b'+') {
                let rhs = self.term()?;
                lhs = Expr::Add(Box::new(lhs), Box::new(rhs));
            } else if self.eat(b'-') {
                let rhs = self.term()?;
                lhs = Expr::Sub(Box::new(lhs), Box::new(rhs));
            } else {
                return Ok(lhs);
            }
        }
    }

    fn term(&mut self) -> Result<Expr, ParseError> {
        let mut lhs = self.factor()?.0;
        loop {
            if self.eat(b'*') {
                let rhs = self.factor()?.0;
                lhs = Expr::Mul(Box::new(lhs), Box::new(rhs));
            } else if self.eat(b'/') {
                let rhs = self.factor()?.0;
                lhs = Expr::Div(Box::new(lhs), Box::new(rhs));
            } else {
                return Ok(lhs);
            }
        }
    }

    /// Returns the factor and whether it is a bare numeric literal.
    fn factor(&mut self) -> Result<(Expr, bool), ParseError> {
        if self.eat(b'-') {
            let (inner, literal) = self.factor()?;
            return Ok(match inner {
                Expr::Const(c) if literal => (Expr::Const(-c), true),
                other => (Expr::Neg(Box::new(other)), false),
            });
        }
        let (atom, literal) = self.atom()?;
        if self.eat(b'^') {
            self.skip_ws();
            let start = self.pos;
            let digits = self.digits();
            if digits.is_empty() {
                return Err(self.error("expected a non-negative integer exponent"));
            }
            let n: u32 = digits.parse().map_err(|_| ParseError {
                offset: start,
                message: format!("exponent `{digits}` is too large"),
            })?;
            return Ok((Expr::Pow(Box::new(atom), n), false));
        }
        Ok((atom, literal))
    }

    fn atom(&mut self) -> Result<(Expr, bool), ParseError> {
        match self.peek() {
            Some(b'(') => {
                self.pos += 1;
                let e = self.expr()?;
                if !self.eat(b')') {
                    return Err(self.error("expected `)`"));
                }
                Ok((e, false))
            }
            Some(c) if c.is_ascii_digit() => Ok((Expr::Const(self.number()), true)),
            Some(c) if c.is_ascii_alphabetic() => {
                let start = self.pos;
                while self.pos < self.src.len() && self.src[self.pos].is_ascii_alphanumeric() {
                    self.pos += 1;
                }
                let name = std::str::from_utf8(&self.src[start..self.pos]).expect("ascii");
                Ok((Expr::var(name), false))
            }
            Some(c) => Err(self.error(format!("unexpected `{}`", c as char))),
            None => Err(self.error("unexpected end of input")),
        }
    }

    fn digits(&mut self) -> String {
        let start = self.pos;
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        String::from_utf8_lossy(&self.src[start..self.pos]).into_owned()
    }

    fn number(&mut self) -> ExactScalar {
        let num = BigInt::from_str(&self.digits()).expect("digits");
        let save = self.pos;
        if self.eat(b'/') {
            self.skip_ws();
            if self.src.get(self.pos).is_some_and(u8::is_ascii_digit) {
                let den = BigInt::from_str(&self.digits()).expect("digits");
                if !den.is_zero() {
                    return ExactScalar::from_bigints(num, den).expect("nonzero");
                }
            }
            self.pos = save;
        }
        ExactScalar::from(num)
    }
}
