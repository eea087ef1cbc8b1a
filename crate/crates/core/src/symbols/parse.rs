//! Recursive-descent parser for symbol expressions.
//!
//! ```text
//! expr    := term ('+' term)*
//! term    := factor ('*' factor)*
//! factor  := number | family '(' args ')' | '(' expr ')'
//! family  := constant | bracket_power | separable_x | separable_omega | trig | chirp
//! profile := number | gauss(a) | bracket(m) | sin(a) | cos(a)
//! ```
//!
//! A bare number is a constant symbol; a bare number inside `separable_*` is a
//! Gaussian profile `exp(-a t^2)`.

use super::{Profile, SymbolSpec};
use crate::error::{Error, Result};

pub fn parse_symbol(input: &str) -> Result<SymbolSpec> {
    let mut p = Parser { src: input, pos: 0 };
    let e = p.expr()?;
    p.skip_ws();
    if p.pos != input.len() {
        return Err(p.error("unexpected trailing input"));
    }
    Ok(e)
}

struct Parser<'a> {
    src: &'a str,
    pos: usize,
}

impl<'a> Parser<'a> {
    fn error(&self, msg: &str) -> Error {
        Error::Parse {
            pos: self.pos,
            msg: msg.to_string(),
        }
    }

    fn skip_ws(&mut self) {
        while let Some(c) = self.peek() {
            if c.is_whitespace() {
                self.pos += c.len_utf8();
            } else {
                break;
            }
        }
    }

    fn peek(&self) -> Option<char> {
        self.src[self.pos..].chars().next()
    }

    fn eat(&mut self, c: char) -> bool {
        self.skip_ws();
        if self.peek() == Some(c) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expect(&mut self, c: char) -> Result<()> {
        if self.eat(c) {
            Ok(())
        } else {
            Err(self.error(&format!("expected `{c}`")))
        }
    }

    fn expr(&mut self) -> Result<SymbolSpec> {
        let mut terms = vec![self.term()?];
        while self.eat('+') {
            terms.push(self.term()?);
        }
        Ok(if terms.len() == 1 {
            terms.pop().unwrap()
        } else {
            SymbolSpec::Sum(terms)
        })
    }

    fn term(&mut self) -> Result<SymbolSpec> {
        let mut factors = vec![self.factor()?];
        while self.eat('*') {
            factors.push(self.factor()?);
        }
        Ok(if factors.len() == 1 {
            factors.pop().unwrap()
        } else {
            SymbolSpec::Product(factors)
        })
    }

    fn factor(&mut self) -> Result<SymbolSpec> {
        self.skip_ws();
        if self.eat('(') {
            let e = self.expr()?;
            self.expect(')')?;
            return Ok(e);
        }
        match self.peek() {
            Some(c) if c.is_ascii_digit() || c == '-' || c == '.' => Ok(SymbolSpec::Constant(self.number()?)),
            Some(c) if c.is_ascii_alphabetic() => self.family(),
            _ => Err(self.error("expected a symbol")),
        }
    }

    fn ident(&mut self) -> &'a str {
        self.skip_ws();
        let start = self.pos;
        while let Some(c) = self.peek() {
            if c.is_ascii_alphanumeric() || c == '_' {
                self.pos += 1;
            } else {
                break;
            }
        }
        &self.src[start..self.pos]
    }

    fn number(&mut self) -> Result<f64> {
        self.skip_ws();
        let start = self.pos;
        let bytes = self.src.as_bytes();
        let mut i = self.pos;
        if i < bytes.len() && (bytes[i] == b'-' || bytes[i] == b'+') {
            i += 1;
        }
        while i < bytes.len() {
            let c = bytes[i];
            let exp_sign = (c == b'-' || c == b'+') && i > start && matches!(bytes[i - 1], b'e' | b'E');
            if c.is_ascii_digit() || c == b'.' || c == b'e' || c == b'E' || exp_sign {
                i += 1;
            } else {
                break;
            }
        }
        let text = &self.src[start..i];
        match text.parse::<f64>() {
            Ok(v) if v.is_finite() => {
                self.pos = i;
                Ok(v)
            }
            _ => Err(self.error("expected a finite number")),
        }
    }

    fn args(&mut self, count: usize) -> Result<Vec<f64>> {
        self.expect('(')?;
        let mut out = Vec::with_capacity(count);
        for i in 0..count {
            if i > 0 {
                self.expect(',')?;
            }
            out.push(self.number()?);
        }
        self.expect(')')?;
        Ok(out)
    }

    fn profile(&mut self) -> Result<Profile> {
        self.skip_ws();
        if matches!(self.peek(), Some(c) if c.is_ascii_digit() || c == '-' || c == '.') {
            return Ok(Profile::Gauss(self.number()?));
        }
        let at = self.pos;
        let name = self.ident();
        let a = self.args(1)?[0];
        match name {
            "gauss" => Ok(Profile::Gauss(a)),
            "bracket" => Ok(Profile::Bracket(a)),
            "sin" => Ok(Profile::Sin(a)),
            "cos" => Ok(Profile::Cos(a)),
            _ => Err(Error::Parse {
                pos: at,
                msg: format!("unknown profile `{name}`"),
            }),
        }
    }

    fn family(&mut self) -> Result<SymbolSpec> {
        let at = self.pos;
        let name = self.ident();
        match name {
            "constant" => Ok(SymbolSpec::Constant(self.args(1)?[0])),
            "bracket_power" => Ok(SymbolSpec::BracketPower(self.args(1)?[0])),
            "chirp" => Ok(SymbolSpec::Chirp(self.args(1)?[0])),
            "trig" => {
                let a = self.args(2)?;
                Ok(SymbolSpec::Trig { a: a[0], b: a[1] })
            }
            "separable_x" | "separable_omega" => {
                self.expect('(')?;
                let p = self.profile()?;
                self.expect(')')?;
                Ok(if name == "separable_x" {
                    SymbolSpec::SeparableX(p)
                } else {
                    SymbolSpec::SeparableOmega(p)
                })
            }
            _ => Err(Error::Parse {
                pos: at,
                msg: format!("unknown symbol family `{name}`"),
            }),
        }
    }
}
