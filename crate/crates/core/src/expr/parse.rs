//! Recursive-descent parser for coefficient formulas.
//!
//! ```text
//! expr     := term (('+' | '-') term)*
//! term     := unary (('*' | '/') unary)*
//! unary    := ('-' | '+') unary | power
//! power    := atom ('^' exponent)?
//! exponent := ('-' | '+')* power        (must fold to an integer constant)
//! atom     := number | 'x' | 'y' | '(' expr ')'
//! ```

use super::CoeffExpr;
use crate::error::{Error, Result};

const MAX_EXPONENT: i64 = 1024;

struct Parser<'a> {
    src: &'a [u8],
    pos: usize,
}

fn err<T>(offset: usize, message: impl Into<String>) -> Result<T> {
    Err(Error::Parse { offset, message: message.into() })
}

impl<'a> Parser<'a> {
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

    fn expr(&mut self) -> Result<CoeffExpr> {
        let mut acc = self.term()?;
        loop {
            if self.eat(b'+') {
                acc = &acc + &self.term()?;
            } else if self.eat(b'-') {
                acc = &acc - &self.term()?;
            } else {
                return Ok(acc);
            }
        }
    }

    fn term(&mut self) -> Result<CoeffExpr> {
        let mut acc = self.unary()?;
        loop {
            if self.eat(b'*') {
                acc = &acc * &self.unary()?;
            } else if self.peek() == Some(b'/') {
                let at = self.pos;
                self.pos += 1;
                let d = self.unary()?;
                if d.is_zero_const() {
                    return err(at, "division by the zero constant");
                }
                acc = &acc / &d;
            } else {
                return Ok(acc);
            }
        }
    }

    fn unary(&mut self) -> Result<CoeffExpr> {
        if self.eat(b'-') {
            Ok(-&self.unary()?)
        } else if self.eat(b'+') {
            self.unary()
        } else {
            self.power()
        }
    }

    fn power(&mut self) -> Result<CoeffExpr> {
        let base = self.atom()?;
        if !self.eat(b'^') {
            return Ok(base);
        }
        self.skip_ws();
        let at = self.pos;
        let exp = self.exponent()?;
        let n = match exp.as_const() {
            Some(c) if c.is_integer() => c.to_integer(),
            Some(_) => return err(at, "non-integer exponent"),
            None => return err(at, "exponent must be an integer constant"),
        };
        let n: i64 = match i64::try_from(&n) {
            Ok(n) if n.abs() <= MAX_EXPONENT => n,
            _ => return err(at, "exponent out of range"),
        };
        if base.is_zero_const() && n < 0 {
            return err(at, "negative power of zero");
        }
        Ok(base.pow(n as i32))
    }

    fn exponent(&mut self) -> Result<CoeffExpr> {
        if self.eat(b'-') {
            Ok(-&self.exponent()?)
        } else if self.eat(b'+') {
            self.exponent()
        } else {
            self.power()
        }
    }

    fn atom(&mut self) -> Result<CoeffExpr> {
        let at = {
            self.skip_ws();
            self.pos
        };
        match self.peek() {
            Some(b'(') => {
                self.pos += 1;
                let e = self.expr()?;
                if !self.eat(b')') {
                    self.skip_ws();
                    return err(self.pos, "expected ')'");
                }
                Ok(e)
            }
            Some(b'x') => {
                self.pos += 1;
                Ok(CoeffExpr::x())
            }
            Some(b'y') => {
                self.pos += 1;
                Ok(CoeffExpr::y())
            }
            Some(c) if c.is_ascii_digit() || c == b'.' => {
                let start = self.pos;
                while self.pos < self.src.len() && (self.src[self.pos].is_ascii_digit() || self.src[self.pos] == b'.') {
                    self.pos += 1;
                }
                let text = std::str::from_utf8(&self.src[start..self.pos]).unwrap_or("");
                match crate::scalar::parse_rational(text) {
                    Some(v) => Ok(CoeffExpr::constant(v)),
                    None => err(start, format!("malformed number '{}'", text)),
                }
            }
            Some(_) => err(at, "unexpected character"),
            None => err(at, "unexpected end of input"),
        }
    }
}

/// Parse a formula over `x`, `y`, rational literals, `+ - * / ^` and parentheses.
pub fn parse_expr(text: &str) -> Result<CoeffExpr> {
    let mut p = Parser { src: text.as_bytes(), pos: 0 };
    let e = p.expr()?;
    if p.peek().is_some() {
        return err(p.pos, "unexpected trailing input");
    }
    Ok(e)
}
