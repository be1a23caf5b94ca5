//! Text form of a polynomial: `c * x0^e0 * x1^e1 + ...` with rational `c`
//! written as `p/q`.

use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use num_traits::{One, Signed};

use super::rational::parse_rational;
use super::{Poly, PolyError, Rational};

impl fmt::Display for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write_poly(f, self, &|i| format!("x{i}"))
    }
}

/// Renders with custom variable names (`names[i]` for variable `i`).
pub fn render_poly_with_names(p: &Poly, names: &[&str]) -> String {
    struct W<'a>(&'a Poly, &'a [&'a str]);
    impl fmt::Display for W<'_> {
        fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
            write_poly(f, self.0, &|i| self.1.get(i).map_or_else(|| format!("x{i}"), |s| s.to_string()))
        }
    }
    W(p, names).to_string()
}

fn write_poly(f: &mut fmt::Formatter<'_>, p: &Poly, name: &dyn Fn(usize) -> String) -> fmt::Result {
    if p.is_zero() {
        return f.write_str("0");
    }
    for (n, (exps, c)) in p.terms().rev().enumerate() {
        let neg = c.is_negative();
        match (n, neg) {
            (0, true) => f.write_str("-")?,
            (0, false) => {}
            (_, true) => f.write_str(" - ")?,
            (_, false) => f.write_str(" + ")?,
        }
        let mag = c.abs();
        let is_const = exps.iter().all(|&e| e == 0);
        let mut first = true;
        if is_const || !mag.is_one() {
            write!(f, "{mag}")?;
            first = false;
        }
        for (i, &e) in exps.iter().enumerate() {
            if e == 0 {
                continue;
            }
            if !first {
                f.write_str(" * ")?;
            }
            first = false;
            f.write_str(&name(i))?;
            if e > 1 {
                write!(f, "^{e}")?;
            }
        }
    }
    Ok(())
}

/// Parses a polynomial in `nvars` variables named `x0, x1, ...`.
pub fn parse_poly(s: &str, nvars: usize) -> Result<Poly, PolyError> {
    parse_poly_with_names(s, nvars, &[])
}

/// Parses a polynomial; `aliases[i]` is accepted as a name for variable `i`
/// in addition to `x<i>`.
pub fn parse_poly_with_names(s: &str, nvars: usize, aliases: &[&str]) -> Result<Poly, PolyError> {
    Parser { src: s.as_bytes(), pos: 0, nvars, aliases }.poly()
}

struct Parser<'a> {
    src: &'a [u8],
    pos: usize,
    nvars: usize,
    aliases: &'a [&'a str],
}

impl Parser<'_> {
    fn err(&self, msg: impl Into<String>) -> PolyError {
        PolyError::Parse { pos: self.pos, msg: msg.into() }
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

    fn poly(&mut self) -> Result<Poly, PolyError> {
        let mut terms: Vec<(Vec<u32>, Rational)> = Vec::new();
        let mut first = true;
        loop {
            let mut sign = Rational::one();
            let mut saw_sign = false;
            while let Some(c @ (b'+' | b'-')) = self.peek() {
                self.pos += 1;
                saw_sign = true;
                if c == b'-' {
                    sign = -sign;
                }
            }
            match self.peek() {
                None if first && !saw_sign => return Err(self.err("empty polynomial")),
                None => return Err(self.err("dangling operator")),
                _ => {}
            }
            if !first && !saw_sign {
                return Err(self.err("expected '+' or '-' between terms"));
            }
            let (exps, c) = self.term()?;
            terms.push((exps, c * sign));
            first = false;
            if self.peek().is_none() {
                break;
            }
        }
        Poly::from_terms(self.nvars, terms)
    }

    fn term(&mut self) -> Result<(Vec<u32>, Rational), PolyError> {
        let mut exps = vec![0u32; self.nvars];
        let mut coeff = Rational::one();
        loop {
            match self.peek() {
                Some(b'-') => {
                    self.pos += 1;
                    coeff = -coeff;
                    continue;
                }
                Some(c) if c.is_ascii_digit() || c == b'.' => {
                    coeff *= self.number()?;
                }
                Some(c) if c.is_ascii_alphabetic() || c == b'_' => {
                    let var = self.ident()?;
                    let mut e = 1u32;
                    if self.peek() == Some(b'^') {
                        self.pos += 1;
                        e = self.exponent()?;
                    }
                    exps[var] += e;
                }
                _ => return Err(self.err("expected a number or variable")),
            }
            if self.peek() == Some(b'*') {
                self.pos += 1;
            } else {
                break;
            }
        }
        Ok((exps, coeff))
    }

    fn number(&mut self) -> Result<Rational, PolyError> {
        let start = self.pos;
        let digits = |p: &mut Self| {
            while p.pos < p.src.len() && (p.src[p.pos].is_ascii_digit() || p.src[p.pos] == b'.') {
                p.pos += 1;
            }
        };
        digits(self);
        let mut end = self.pos;
        // Optional "/q" immediately forming a rational literal.
        let save = self.pos;
        if self.peek() == Some(b'/') {
            self.pos += 1;
            self.skip_ws();
            let den_start = self.pos;
            digits(self);
            if self.pos == den_start {
                self.pos = save;
                return Err(self.err("expected denominator"));
            }
            end = self.pos;
        }
        let text: String = self.src[start..end].iter().map(|&b| b as char).filter(|c| !c.is_whitespace()).collect();
        parse_rational(&text).map_err(|_| PolyError::Parse { pos: start, msg: format!("bad number {text:?}") })
    }

    fn exponent(&mut self) -> Result<u32, PolyError> {
        self.skip_ws();
        let start = self.pos;
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        let text = core::str::from_utf8(&self.src[start..self.pos]).unwrap_or("");
        text.parse().map_err(|_| PolyError::Parse { pos: start, msg: "expected a non-negative integer exponent".into() })
    }

    fn ident(&mut self) -> Result<usize, PolyError> {
        let start = self.pos;
        while self.pos < self.src.len() && (self.src[self.pos].is_ascii_alphanumeric() || self.src[self.pos] == b'_') {
            self.pos += 1;
        }
        let name = core::str::from_utf8(&self.src[start..self.pos]).unwrap_or("");
        if let Some(i) = self.aliases.iter().position(|a| *a == name) {
            if i < self.nvars {
                return Ok(i);
            }
        }
        if let Some(idx) = name.strip_prefix('x').and_then(|d| d.parse::<usize>().ok()) {
            if idx < self.nvars {
                return Ok(idx);
            }
            return Err(PolyError::Parse {
                pos: start,
                msg: format!("variable {name} out of range for {} variables", self.nvars),
            });
        }
        Err(PolyError::Parse { pos: start, msg: format!("unknown variable {name:?}") })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::polyalg::rat;

    #[test]
    fn renders_canonically() {
        let p = parse_poly("x1 - 3/2*x0^2 + 1 + x0", 2).unwrap();
        assert_eq!(p.to_string(), "-3/2 * x0^2 + x0 + x1 + 1");
        assert_eq!(Poly::zero(3).to_string(), "0");
        assert_eq!(parse_poly("-x0*x1", 2).unwrap().to_string(), "-x0 * x1");
    }

    #[test]
    fn accepts_loose_spelling() {
        let a = parse_poly("2 * x0 * x0 + - 3/6 * x1 ^ 2", 2).unwrap();
        let b = parse_poly("2*x0^2 - 1/2*x1^2", 2).unwrap();
        assert_eq!(a, b);
        assert_eq!(parse_poly("0.5 * x0", 1).unwrap(), Poly::var(1, 0).unwrap().scale(&rat(1, 2)));
    }

    #[test]
    fn aliases() {
        let k = parse_poly_with_names("1 + t^2", 1, &["t"]).unwrap();
        assert_eq!(render_poly_with_names(&k, &["t"]), "t^2 + 1");
    }

    #[test]
    fn rejects_garbage() {
        assert!(parse_poly("", 1).is_err());
        assert!(parse_poly("x0 +", 1).is_err());
        assert!(parse_poly("x3", 2).is_err());
        assert!(parse_poly("y", 2).is_err());
        assert!(parse_poly("x0 x1", 2).is_err());
        assert!(parse_poly("1/0", 1).is_err());
    }
}
