//! Canonical text form and parser.
//!
//! Canonical output lists terms in descending graded-lex order, writes every
//! coefficient (as `num` or `num/den`) and every exponent explicitly, e.g.
//! `1*x0^2*x1^1 - 3/2*x2^2 + 7`. The parser accepts that form and the usual
//! relaxed notation (`x^2 + 2*x*y - (y - 1)^3 / 4`).

use num_traits::{Signed, Zero};

use super::scalar::{format_rational, parse_rational};
use super::{MultiPoly, MAX_VARS};
use crate::error::{Error, Result};

pub fn var_name(nvars: usize, i: usize) -> &'static str {
    match (nvars, i) {
        (1, 0) => "x",
        (2, 0) => "x",
        (2, 1) => "y",
        (3, 0) => "x0",
        (3, 1) => "x1",
        (3, 2) => "x2",
        _ => panic!("variable {i} out of range for {nvars} variables"),
    }
}

pub fn to_canonical(p: &MultiPoly) -> String {
    if p.is_zero() {
        return "0".to_string();
    }
    let mut out = String::new();
    for (k, (e, c)) in p.terms().iter().enumerate() {
        let mag = c.abs();
        if k == 0 {
            if c.is_negative() {
                out.push('-');
            }
        } else {
            out.push_str(if c.is_negative() { " - " } else { " + " });
        }
        out.push_str(&format_rational(&mag));
        for (i, &x) in e.iter().enumerate().take(p.nvars()) {
            if x > 0 {
                out.push_str(&format!("*{}^{}", var_name(p.nvars(), i), x));
            }
        }
    }
    out
}

pub fn parse_infer(s: &str) -> Result<MultiPoly> {
    let idents = identifiers(s);
    let nvars = if idents.iter().any(|t| matches!(t.as_str(), "x0" | "x1" | "x2")) {
        3
    } else if idents.iter().any(|t| t == "y") {
        2
    } else {
        1
    };
    parse(s, nvars)
}

fn identifiers(s: &str) -> Vec<String> {
    let mut out = Vec::new();
    let mut cur = String::new();
    for ch in s.chars() {
        if ch.is_ascii_alphanumeric() || ch == '_' {
            cur.push(ch);
        } else if !cur.is_empty() {
            out.push(std::mem::take(&mut cur));
        }
    }
    if !cur.is_empty() {
        out.push(cur);
    }
    out.into_iter().filter(|t| t.chars().next().is_some_and(|c| c.is_ascii_alphabetic())).collect()
}

pub fn parse(s: &str, nvars: usize) -> Result<MultiPoly> {
    if !(1..=MAX_VARS).contains(&nvars) {
        return Err(Error::Parse { pos: 0, msg: format!("unsupported variable count {nvars}") });
    }
    let mut p = Parser { src: s.as_bytes(), pos: 0, nvars };
    let r = p.expr()?;
    p.skip_ws();
    if p.pos != p.src.len() {
        return Err(p.err("trailing input"));
    }
    Ok(r)
}

struct Parser<'a> {
    src: &'a [u8],
    pos: usize,
    nvars: usize,
}

impl Parser<'_> {
    fn err(&self, msg: &str) -> Error {
        Error::Parse { pos: self.pos, msg: msg.to_string() }
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

    fn expr(&mut self) -> Result<MultiPoly> {
        let mut acc = self.term()?;
        while let Some(c @ (b'+' | b'-')) = self.peek() {
            self.pos += 1;
            let t = self.term()?;
            acc = if c == b'+' { &acc + &t } else { &acc - &t };
        }
        Ok(acc)
    }

    fn term(&mut self) -> Result<MultiPoly> {
        let mut acc = self.unary()?;
        while let Some(c @ (b'*' | b'/')) = self.peek() {
            self.pos += 1;
            let f = self.unary()?;
            if c == b'*' {
                acc = &acc * &f;
            } else {
                match f.constant_value() {
                    Some(v) if !v.is_zero() => acc = acc.scale(&v.recip()),
                    Some(_) => return Err(self.err("division by zero")),
                    None => return Err(self.err("division by a non-constant polynomial")),
                }
            }
        }
        Ok(acc)
    }

    fn unary(&mut self) -> Result<MultiPoly> {
        match self.peek() {
            Some(b'-') => {
                self.pos += 1;
                Ok(-&self.unary()?)
            }
            Some(b'+') => {
                self.pos += 1;
                self.unary()
            }
            _ => self.power(),
        }
    }

    fn power(&mut self) -> Result<MultiPoly> {
        let base = self.atom()?;
        if self.peek() == Some(b'^') {
            self.pos += 1;
            self.skip_ws();
            let start = self.pos;
            while self.pos < self.src.len() && self.src[self.pos].is_ascii_digit() {
                self.pos += 1;
            }
            let digits = std::str::from_utf8(&self.src[start..self.pos]).unwrap();
            let k: u32 = digits.parse().map_err(|_| self.err("expected exponent"))?;
            return Ok(base.pow(k));
        }
        Ok(base)
    }

    fn atom(&mut self) -> Result<MultiPoly> {
        match self.peek() {
            Some(b'(') => {
                self.pos += 1;
                let e = self.expr()?;
                if self.peek() != Some(b')') {
                    return Err(self.err("expected ')'"));
                }
                self.pos += 1;
                Ok(e)
            }
            Some(c) if c.is_ascii_digit() || c == b'.' => {
                let start = self.pos;
                while self.pos < self.src.len() && (self.src[self.pos].is_ascii_digit() || self.src[self.pos] == b'.') {
                    self.pos += 1;
                }
                let t = std::str::from_utf8(&self.src[start..self.pos]).unwrap();
                let v = parse_rational(t).map_err(|_| Error::Parse { pos: start, msg: format!("bad number {t:?}") })?;
                Ok(MultiPoly::constant(self.nvars, v))
            }
            Some(c) if c.is_ascii_alphabetic() => {
                let start = self.pos;
                while self.pos < self.src.len() && self.src[self.pos].is_ascii_alphanumeric() {
                    self.pos += 1;
                }
                let name = std::str::from_utf8(&self.src[start..self.pos]).unwrap();
                (0..self.nvars)
                    .find(|&i| var_name(self.nvars, i) == name)
                    .map(|i| MultiPoly::var(self.nvars, i))
                    .ok_or_else(|| Error::Parse { pos: start, msg: format!("unknown variable {name:?}") })
            }
            Some(_) => Err(self.err("unexpected character")),
            None => Err(self.err("unexpected end of input")),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn canonical_form_is_explicit() {
        let p = parse("x0^2*x1 - 3/2*x2^2 + 7", 3).unwrap();
        assert_eq!(to_canonical(&p), "1*x0^2*x1^1 - 3/2*x2^2 + 7");
        assert_eq!(to_canonical(&MultiPoly::zero(2)), "0");
        assert_eq!(to_canonical(&parse("-y", 2).unwrap()), "-1*y^1");
    }

    #[test]
    fn relaxed_input() {
        let p = parse("(x - y)*(x + y)", 2).unwrap();
        let q = parse("x^2 - y^2", 2).unwrap();
        assert_eq!(p, q);
        let r = parse("(2*x + 1)/4", 1).unwrap();
        assert_eq!(to_canonical(&r), "1/2*x^1 + 1/4");
        assert_eq!(parse_infer("x1 + 1").unwrap().nvars(), 3);
        assert_eq!(parse_infer("x + y").unwrap().nvars(), 2);
    }

    #[test]
    fn parse_errors_carry_positions() {
        match parse("x + z", 2) {
            Err(Error::Parse { pos, .. }) => assert_eq!(pos, 4),
            other => panic!("unexpected {other:?}"),
        }
        assert!(parse("x / y", 2).is_err());
        assert!(parse("(x + 1", 1).is_err());
        assert!(parse("x^", 1).is_err());
    }
}
