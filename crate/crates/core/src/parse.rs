//! A small grammar for polynomial and rational functions of `z`.
//!
//! ```text
//! expr   := ['-'|'+'] term (('+'|'-') term)*
//! term   := power (['*'|'/'] power)*        juxtaposition multiplies
//! power  := atom ['^' integer]
//! atom   := number | 'i' | 'z' | '(' expr ')'
//! ```
//!
//! Complex literals are written `(a+bi)`; `0.5z`, `2iz^3` and `(z+0.2)/2`
//! are accepted. Division by a non-constant polynomial yields a rational
//! function; [`parse_polynomial`] refuses those.

use crate::error::{HbError, Result};
use crate::scalar::{cone, czero, Cx, Real};
use crate::series::TaylorSeries;

/// `numerator / denominator` with exact polynomial parts.
#[derive(Clone, Debug, PartialEq)]
pub struct Rational<T> {
    pub numerator: TaylorSeries<T>,
    pub denominator: TaylorSeries<T>,
}

impl<T: Real> Rational<T> {
    fn constant(c: Cx<T>) -> Self {
        Rational {
            numerator: TaylorSeries::constant(c),
            denominator: TaylorSeries::constant(cone()),
        }
    }

    fn add(&self, other: &Self, sign: T) -> Self {
        let lhs = self.numerator.multiply(&other.denominator);
        let rhs = other
            .numerator
            .multiply(&self.denominator)
            .scale(Cx::new(sign, T::zero()));
        Rational {
            numerator: lhs.add(&rhs),
            denominator: self.denominator.multiply(&other.denominator),
        }
    }

    fn mul(&self, other: &Self) -> Self {
        Rational {
            numerator: self.numerator.multiply(&other.numerator),
            denominator: self.denominator.multiply(&other.denominator),
        }
    }

    fn div(&self, other: &Self) -> Result<Self> {
        if other.numerator.coeffs().iter().all(|c| *c == czero()) {
            return Err(HbError::Invalid("division by zero".into()));
        }
        Ok(Rational {
            numerator: self.numerator.multiply(&other.denominator),
            denominator: self.denominator.multiply(&other.numerator),
        })
    }

    fn tidy(self) -> Self {
        let zero = T::zero();
        Rational {
            numerator: self.numerator.trimmed(zero),
            denominator: self.denominator.trimmed(zero),
        }
    }
}

struct Parser<'a> {
    chars: Vec<char>,
    pos: usize,
    source: &'a str,
}

impl<'a> Parser<'a> {
    fn new(source: &'a str) -> Self {
        Parser {
            chars: source.chars().filter(|c| !c.is_whitespace()).collect(),
            pos: 0,
            source,
        }
    }

    fn peek(&self) -> Option<char> {
        self.chars.get(self.pos).copied()
    }

    fn error(&self, what: &str) -> HbError {
        HbError::Invalid(format!(
            "cannot parse {:?} at position {}: {what}",
            self.source, self.pos
        ))
    }

    fn expr<T: Real>(&mut self) -> Result<Rational<T>> {
        let mut sign = T::one();
        match self.peek() {
            Some('-') => {
                sign = -T::one();
                self.pos += 1;
            }
            Some('+') => self.pos += 1,
            _ => {}
        }
        let first = self.term::<T>()?;
        let mut acc = Rational::constant(czero()).add(&first, sign);
        while let Some(c @ ('+' | '-')) = self.peek() {
            self.pos += 1;
            let next = self.term::<T>()?;
            acc = acc.add(&next, if c == '-' { -T::one() } else { T::one() });
        }
        Ok(acc)
    }

    fn term<T: Real>(&mut self) -> Result<Rational<T>> {
        let mut acc = self.power::<T>()?;
        loop {
            match self.peek() {
                Some('*') => {
                    self.pos += 1;
                    acc = acc.mul(&self.power()?);
                }
                Some('/') => {
                    self.pos += 1;
                    acc = acc.div(&self.power()?)?;
                }
                Some(c) if c == '(' || c == 'z' || c == 'i' || c.is_ascii_digit() || c == '.' => {
                    acc = acc.mul(&self.power()?);
                }
                _ => return Ok(acc),
            }
        }
    }

    fn power<T: Real>(&mut self) -> Result<Rational<T>> {
        let base = self.atom::<T>()?;
        if self.peek() != Some('^') {
            return Ok(base);
        }
        self.pos += 1;
        let start = self.pos;
        while self.peek().is_some_and(|c| c.is_ascii_digit()) {
            self.pos += 1;
        }
        let exponent: usize = self.chars[start..self.pos]
            .iter()
            .collect::<String>()
            .parse()
            .map_err(|_| self.error("expected a nonnegative integer exponent"))?;
        let mut out = Rational::constant(cone());
        for _ in 0..exponent {
            out = out.mul(&base);
        }
        Ok(out)
    }

    fn atom<T: Real>(&mut self) -> Result<Rational<T>> {
        match self.peek() {
            Some('z') => {
                self.pos += 1;
                Ok(Rational {
                    numerator: TaylorSeries::monomial(1),
                    denominator: TaylorSeries::constant(cone()),
                })
            }
            Some('i') => {
                self.pos += 1;
                Ok(Rational::constant(Cx::new(T::zero(), T::one())))
            }
            Some('(') => {
                self.pos += 1;
                let inner = self.expr()?;
                if self.peek() != Some(')') {
                    return Err(self.error("expected ')'"));
                }
                self.pos += 1;
                Ok(inner)
            }
            Some(c) if c.is_ascii_digit() || c == '.' => {
                let start = self.pos;
                while self.peek().is_some_and(|c| c.is_ascii_digit() || c == '.') {
                    self.pos += 1;
                }
                // Scientific notation such as 1e-3.
                if self.peek() == Some('e') {
                    let save = self.pos;
                    self.pos += 1;
                    if matches!(self.peek(), Some('+' | '-')) {
                        self.pos += 1;
                    }
                    if self.peek().is_some_and(|c| c.is_ascii_digit()) {
                        while self.peek().is_some_and(|c| c.is_ascii_digit()) {
                            self.pos += 1;
                        }
                    } else {
                        self.pos = save;
                    }
                }
                let text: String = self.chars[start..self.pos].iter().collect();
                let value: f64 = text.parse().map_err(|_| self.error("malformed number"))?;
                Ok(Rational::constant(Cx::new(
                    crate::scalar::lit(value),
                    T::zero(),
                )))
            }
            _ => Err(self.error("expected a number, 'z', 'i' or '('")),
        }
    }
}

/// Parses a rational function of `z`.
pub fn parse_rational<T: Real>(source: &str) -> Result<Rational<T>> {
    let mut parser = Parser::new(source);
    if parser.chars.is_empty() {
        return Err(HbError::Invalid("empty expression".into()));
    }
    let out = parser.expr::<T>()?;
    if parser.pos != parser.chars.len() {
        return Err(parser.error("unexpected trailing input"));
    }
    Ok(out.tidy())
}

/// Parses a polynomial in `z`; rational expressions are rejected.
pub fn parse_polynomial<T: Real>(source: &str) -> Result<TaylorSeries<T>> {
    let r = parse_rational::<T>(source)?;
    if r.denominator.degree() > 0 {
        return Err(HbError::Invalid(format!("{source:?} is not a polynomial")));
    }
    Ok(r.numerator.scale(cone::<T>() / r.denominator.coeff(0)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::cx;

    fn coeffs(s: &TaylorSeries<f64>) -> Vec<(f64, f64)> {
        s.coeffs().iter().map(|c| (c.re, c.im)).collect()
    }

    #[test]
    fn polynomials() {
        let p = parse_polynomial::<f64>("1 + z^3").unwrap();
        assert_eq!(
            coeffs(&p),
            vec![(1.0, 0.0), (0.0, 0.0), (0.0, 0.0), (1.0, 0.0)]
        );
        let p = parse_polynomial::<f64>("(1+2i)z - 0.5z^2").unwrap();
        assert_eq!(coeffs(&p), vec![(0.0, 0.0), (1.0, 2.0), (-0.5, 0.0)]);
        let p = parse_polynomial::<f64>("(z+0.2)/2").unwrap();
        assert_eq!(coeffs(&p), vec![(0.1, 0.0), (0.5, 0.0)]);
        let p = parse_polynomial::<f64>("-z").unwrap();
        assert_eq!(coeffs(&p), vec![(0.0, 0.0), (-1.0, 0.0)]);
        assert!(parse_polynomial::<f64>("1/(1-z)").is_err());
        assert!(parse_polynomial::<f64>("z +").is_err());
        assert!(parse_polynomial::<f64>("").is_err());
        assert!(parse_polynomial::<f64>("2e-1z").is_ok());
    }

    #[test]
    fn rationals() {
        let r = parse_rational::<f64>("0.4/(1-0.5z)").unwrap();
        assert_eq!(coeffs(&r.numerator), vec![(0.4, 0.0)]);
        assert_eq!(coeffs(&r.denominator), vec![(1.0, 0.0), (-0.5, 0.0)]);
        let value = r.numerator.evaluate_unchecked(cx(0.5, 0.0))
            / r.denominator.evaluate_unchecked(cx(0.5, 0.0));
        assert!((value.re - 0.4 / 0.75).abs() < 1e-15);
    }
}
