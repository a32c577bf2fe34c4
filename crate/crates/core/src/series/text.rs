//! Text syntax for series: a sum of terms `C*x^a*y1^b*y2^c`.
//!
//! A coefficient is a real literal `R`, an imaginary literal `Ii`, a pair
//! `(R,I)` or a parenthesised `(R+Ii)`. Unit factors and `^1` may be
//! omitted and whitespace is ignored.

use std::fmt;

use super::{Complex, Exponent, TruncatedSeries, Var, ONE};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("line {line}, column {column}: {message}")]
pub struct ParseError {
    pub line: usize,
    pub column: usize,
    pub message: String,
}

/// Parses a series and truncates it at `order`.
pub fn parse_series(text: &str, order: u32) -> Result<TruncatedSeries, ParseError> {
    parse_series_at(text, order, 1, 1)
}

/// Like [`parse_series`], reporting positions relative to `(line, column)`.
pub(crate) fn parse_series_at(
    text: &str,
    order: u32,
    line: usize,
    column: usize,
) -> Result<TruncatedSeries, ParseError> {
    let mut p = Parser { chars: text.chars().collect(), pos: 0, line, column };
    let terms = p.series()?;
    Ok(TruncatedSeries::from_terms(order, terms))
}

struct Parser {
    chars: Vec<char>,
    pos: usize,
    line: usize,
    column: usize,
}

impl Parser {
    fn error(&self, message: impl Into<String>) -> ParseError {
        ParseError { line: self.line, column: self.column + self.pos, message: message.into() }
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

    fn expect(&mut self, c: char) -> Result<(), ParseError> {
        if self.peek() == Some(c) {
            self.pos += 1;
            Ok(())
        } else {
            Err(self.error(format!("expected '{c}'")))
        }
    }

    fn sign(&mut self) -> Option<f64> {
        match self.peek() {
            Some('+') => {
                self.pos += 1;
                Some(1.0)
            }
            Some('-') => {
                self.pos += 1;
                Some(-1.0)
            }
            _ => None,
        }
    }

    fn series(&mut self) -> Result<Vec<(Exponent, Complex)>, ParseError> {
        let mut terms = Vec::new();
        if self.peek().is_none() {
            return Err(self.error("empty series"));
        }
        let mut sign = self.sign().unwrap_or(1.0);
        loop {
            let (e, c) = self.term()?;
            terms.push((e, c * sign));
            match self.sign() {
                Some(s) => sign = s,
                None => break,
            }
        }
        if let Some(c) = self.peek() {
            return Err(self.error(format!("unexpected character '{c}'")));
        }
        Ok(terms)
    }

    fn term(&mut self) -> Result<(Exponent, Complex), ParseError> {
        let mut coeff = ONE;
        if let Some(s) = self.sign() {
            coeff *= s;
        }
        let mut exp = Exponent::default();
        loop {
            self.factor(&mut coeff, &mut exp)?;
            if self.peek() == Some('*') {
                self.pos += 1;
            } else {
                break;
            }
        }
        Ok((exp, coeff))
    }

    fn factor(&mut self, coeff: &mut Complex, exp: &mut Exponent) -> Result<(), ParseError> {
        match self.peek() {
            Some('(') => {
                self.pos += 1;
                *coeff *= self.paren_complex()?;
            }
            Some(c) if c.is_ascii_digit() || c == '.' => {
                let r = self.real()?;
                if self.chars.get(self.pos) == Some(&'i') {
                    self.pos += 1;
                    *coeff *= Complex::new(0.0, r);
                } else {
                    *coeff *= r;
                }
            }
            Some('i') => {
                self.pos += 1;
                *coeff *= Complex::new(0.0, 1.0);
            }
            Some('x') | Some('y') => {
                let var = self.var()?;
                let mut power = 1;
                if self.peek() == Some('^') {
                    self.pos += 1;
                    self.skip_ws();
                    power = self.uint()?;
                }
                let k = exp.get(var);
                *exp = exp.with(var, k + power);
            }
            Some(c) => return Err(self.error(format!("unexpected character '{c}'"))),
            None => return Err(self.error("unexpected end of input")),
        }
        Ok(())
    }

    fn var(&mut self) -> Result<Var, ParseError> {
        let start = self.pos;
        let c = self.chars[self.pos];
        self.pos += 1;
        if c == 'x' {
            return Ok(Var::X);
        }
        match self.chars.get(self.pos) {
            Some('1') => {
                self.pos += 1;
                Ok(Var::Y1)
            }
            Some('2') => {
                self.pos += 1;
                Ok(Var::Y2)
            }
            _ => {
                self.pos = start;
                Err(self.error("unknown variable, expected x, y1 or y2"))
            }
        }
    }

    fn uint(&mut self) -> Result<u32, ParseError> {
        let start = self.pos;
        while self.pos < self.chars.len() && self.chars[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        if start == self.pos {
            self.pos = start;
            return Err(self.error("expected a non-negative integer exponent"));
        }
        let s: String = self.chars[start..self.pos].iter().collect();
        s.parse().map_err(|_| {
            self.pos = start;
            self.error("exponent out of range")
        })
    }

    fn real(&mut self) -> Result<f64, ParseError> {
        self.skip_ws();
        let start = self.pos;
        let digits = |p: &mut Parser| {
            let s = p.pos;
            while p.pos < p.chars.len() && p.chars[p.pos].is_ascii_digit() {
                p.pos += 1;
            }
            p.pos - s
        };
        let mut n = digits(self);
        if self.chars.get(self.pos) == Some(&'.') {
            self.pos += 1;
            n += digits(self);
        }
        if n == 0 {
            self.pos = start;
            return Err(self.error("expected a number"));
        }
        if matches!(self.chars.get(self.pos), Some('e') | Some('E')) {
            let save = self.pos;
            self.pos += 1;
            if matches!(self.chars.get(self.pos), Some('+') | Some('-')) {
                self.pos += 1;
            }
            if digits(self) == 0 {
                self.pos = save;
            }
        }
        let s: String = self.chars[start..self.pos].iter().collect();
        s.parse().map_err(|_| {
            self.pos = start;
            self.error(format!("invalid number '{s}'"))
        })
    }

    fn signed_real(&mut self) -> Result<f64, ParseError> {
        let s = self.sign().unwrap_or(1.0);
        Ok(s * self.real()?)
    }

    /// After the opening parenthesis: `R,I)`, `R+Ii)`, `R)` or `Ii)`.
    fn paren_complex(&mut self) -> Result<Complex, ParseError> {
        let first = self.signed_real()?;
        let value = match self.peek() {
            Some(',') => {
                self.pos += 1;
                Complex::new(first, self.signed_real()?)
            }
            Some('i') => {
                self.pos += 1;
                Complex::new(0.0, first)
            }
            Some('+') | Some('-') => {
                let im = self.signed_real()?;
                self.expect('i')?;
                Complex::new(first, im)
            }
            _ => Complex::new(first, 0.0),
        };
        self.expect(')')?;
        Ok(value)
    }
}

fn fmt_real(v: f64) -> String {
    format!("{v:.16e}")
}

pub(super) fn write_series(s: &TruncatedSeries, f: &mut fmt::Formatter<'_>) -> fmt::Result {
    if s.is_zero() {
        return write!(f, "0");
    }
    for (i, (e, c)) in s.terms().enumerate() {
        let coeff = if c.im == 0.0 {
            if i > 0 {
                let sep = if c.re < 0.0 { " - " } else { " + " };
                format!("{sep}{}", fmt_real(c.re.abs()))
            } else {
                fmt_real(c.re)
            }
        } else {
            let sep = if i > 0 { " + " } else { "" };
            format!("{sep}({},{})", fmt_real(c.re), fmt_real(c.im))
        };
        write!(f, "{coeff}")?;
        for var in Var::ALL {
            match e.get(var) {
                0 => {}
                1 => write!(f, "*{}", var.name())?,
                k => write!(f, "*{}^{k}", var.name())?,
            }
        }
    }
    Ok(())
}
