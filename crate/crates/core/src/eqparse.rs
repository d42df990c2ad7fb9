//! Text form of `F(X) = A` equations.
//!
//! ```text
//! equation := polyexpr "=" rhs
//! rhs      := "O" | "[[" num "," num "],[" num "," num "]]"
//! polyexpr := term (("+" | "-") term)*
//! term     := factor ("*" factor)*
//! factor   := ["-"] atom ("^" uint)?
//! atom     := "X" | "I" | num | "(" polyexpr ")"
//! ```
//!
//! Whitespace is ignored. The left side is expanded to one polynomial; if
//! its leading coefficient is not 1, both sides are divided by it.

use alloc::format;
use alloc::string::{String, ToString};
use core::fmt;

use crate::error::{Error, Result};
use crate::mat2::Mat2;
use crate::rpoly::{Poly, RealPoly};

/// Largest degree the parser will expand to.
pub const MAX_DEGREE: usize = 256;

/// A parsed equation `f(X) = rhs` with `f` monic.
#[derive(Debug, Clone, PartialEq)]
pub struct EquationSpec {
    pub f: RealPoly,
    pub rhs: Mat2,
}

impl EquationSpec {
    pub fn new(f: RealPoly, rhs: Mat2) -> Result<Self> {
        if !rhs.is_finite() {
            return Err(Error::InvalidInput(format!("right-hand side {rhs} is not finite")));
        }
        Ok(Self { f, rhs })
    }

    pub fn is_homogeneous(&self) -> bool {
        self.rhs == Mat2::ZERO
    }
}

impl fmt::Display for EquationSpec {
    fn fmt(&self, out: &mut fmt::Formatter<'_>) -> fmt::Result {
        let c = self.f.coeffs();
        let mut first = true;
        for k in (0..c.len()).rev() {
            let a = c[k];
            if a == 0.0 {
                continue;
            }
            let mag = a.abs();
            match (first, a < 0.0) {
                (true, true) => write!(out, "-")?,
                (true, false) => {}
                (false, true) => write!(out, " - ")?,
                (false, false) => write!(out, " + ")?,
            }
            first = false;
            let basis = match k {
                0 => "I".to_string(),
                1 => "X".to_string(),
                _ => format!("X^{k}"),
            };
            if mag == 1.0 {
                write!(out, "{basis}")?;
            } else {
                write!(out, "{mag}*{basis}")?;
            }
        }
        if self.is_homogeneous() {
            write!(out, " = O")
        } else {
            write!(out, " = {}", self.rhs)
        }
    }
}

pub fn parse_equation(text: &str) -> Result<EquationSpec> {
    if text.trim().is_empty() {
        return Err(syntax(0, "empty input"));
    }
    let mut p = Parser { src: text.as_bytes(), pos: 0 };
    let lhs = p.polyexpr()?;
    p.expect(b'=')?;
    let rhs = p.rhs()?;
    p.skip_ws();
    if p.pos < p.src.len() {
        return Err(syntax(p.pos, "unexpected trailing input"));
    }
    let lhs = lhs.trimmed();
    let lead = *lhs.coeffs().last().unwrap();
    if lhs.coeffs().len() < 2 || lead == 0.0 {
        return Err(Error::DegenerateResult);
    }
    // `+ 0.0` turns the `-0.0` left by a negative leading coefficient into `0.0`.
    let rhs = if lead == 1.0 {
        rhs
    } else {
        let [a, b, c, d] = (rhs * (1.0 / lead)).to_array().map(|v| v + 0.0);
        Mat2::new(a, b, c, d)
    };
    EquationSpec::new(lhs.into_monic()?, rhs)
}

fn syntax(position: usize, message: &str) -> Error {
    Error::Syntax { position, message: message.to_string() }
}

struct Parser<'a> {
    src: &'a [u8],
    pos: usize,
}

impl Parser<'_> {
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

    fn expect(&mut self, c: u8) -> Result<()> {
        if self.eat(c) {
            Ok(())
        } else {
            let found = match self.peek() {
                Some(f) => format!("found '{}'", f as char),
                None => String::from("found end of input"),
            };
            Err(Error::Syntax { position: self.pos, message: format!("expected '{}', {found}", c as char) })
        }
    }

    fn polyexpr(&mut self) -> Result<Poly> {
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

    fn term(&mut self) -> Result<Poly> {
        let mut acc = self.factor()?;
        while self.eat(b'*') {
            let start = self.pos;
            let rhs = self.factor()?;
            acc = &acc * &rhs;
            check_degree(&acc, start)?;
        }
        Ok(acc)
    }

    fn factor(&mut self) -> Result<Poly> {
        let start = self.peek().map(|_| self.pos).unwrap_or(self.pos);
        if self.eat(b'-') {
            let inner = self.factor()?;
            return Ok(-&inner);
        }
        let base = self.atom()?;
        if self.eat(b'^') {
            self.skip_ws();
            let at = self.pos;
            let n = self.uint()?;
            let n = u32::try_from(n).ok().filter(|&n| n as usize <= MAX_DEGREE).ok_or_else(|| {
                Error::Syntax { position: at, message: format!("exponent exceeds {MAX_DEGREE}") }
            })?;
            let out = base.pow(n);
            check_degree(&out, start)?;
            return Ok(out);
        }
        Ok(base)
    }

    fn atom(&mut self) -> Result<Poly> {
        match self.peek() {
            Some(b'X') => {
                self.pos += 1;
                Ok(Poly::x())
            }
            Some(b'I') => {
                self.pos += 1;
                Ok(Poly::constant(1.0))
            }
            Some(b'(') => {
                self.pos += 1;
                let inner = self.polyexpr()?;
                self.expect(b')')?;
                Ok(inner)
            }
            Some(b'[') => Err(Error::NonScalarCoefficient { position: self.pos }),
            Some(b'O') => Err(syntax(self.pos, "the zero matrix O may only appear on the right-hand side")),
            Some(c) if c.is_ascii_digit() || c == b'.' => Ok(Poly::constant(self.number()?)),
            Some(c) => Err(syntax(self.pos, &format!("unexpected '{}'", c as char))),
            None => Err(syntax(self.pos, "unexpected end of input")),
        }
    }

    fn uint(&mut self) -> Result<u64> {
        let start = self.pos;
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        let digits = core::str::from_utf8(&self.src[start..self.pos]).unwrap();
        if digits.is_empty() {
            return Err(syntax(start, "expected a nonnegative integer exponent"));
        }
        digits.parse().map_err(|_| syntax(start, "exponent out of range"))
    }

    /// Unsigned decimal or scientific literal at the cursor.
    fn number(&mut self) -> Result<f64> {
        self.skip_ws();
        let start = self.pos;
        let digits = |p: &mut Self| {
            let s = p.pos;
            while p.pos < p.src.len() && p.src[p.pos].is_ascii_digit() {
                p.pos += 1;
            }
            p.pos - s
        };
        let mut n = digits(self);
        if self.src.get(self.pos) == Some(&b'.') {
            self.pos += 1;
            n += digits(self);
        }
        if n == 0 {
            return Err(syntax(start, "expected a number"));
        }
        if matches!(self.src.get(self.pos), Some(b'e' | b'E')) {
            self.pos += 1;
            if matches!(self.src.get(self.pos), Some(b'+' | b'-')) {
                self.pos += 1;
            }
            if digits(self) == 0 {
                return Err(syntax(self.pos, "expected exponent digits"));
            }
        }
        let text = core::str::from_utf8(&self.src[start..self.pos]).unwrap();
        let v: f64 = text.parse().map_err(|_| syntax(start, "malformed number"))?;
        if !v.is_finite() {
            return Err(syntax(start, "number out of range"));
        }
        Ok(v)
    }

    fn signed_number(&mut self) -> Result<f64> {
        let neg = self.eat(b'-');
        let v = self.number()?;
        Ok(if neg { -v } else { v })
    }

    fn rhs(&mut self) -> Result<Mat2> {
        if self.eat(b'O') {
            return Ok(Mat2::ZERO);
        }
        if self.peek() != Some(b'[') {
            return Err(syntax(self.pos, "expected 'O' or a matrix literal [[a,b],[c,d]]"));
        }
        self.expect(b'[')?;
        self.expect(b'[')?;
        let a = self.signed_number()?;
        self.expect(b',')?;
        let b = self.signed_number()?;
        self.expect(b']')?;
        self.expect(b',')?;
        self.expect(b'[')?;
        let c = self.signed_number()?;
        self.expect(b',')?;
        let d = self.signed_number()?;
        self.expect(b']')?;
        self.expect(b']')?;
        Ok(Mat2::new(a, b, c, d))
    }
}

fn check_degree(p: &Poly, position: usize) -> Result<()> {
    if p.coeffs().len() > MAX_DEGREE + 1 {
        return Err(Error::Syntax { position, message: format!("expansion exceeds degree {MAX_DEGREE}") });
    }
    Ok(())
}
