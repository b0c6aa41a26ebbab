//! Dense univariate polynomials with exact rational coefficients.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_traits::Zero;

use crate::rational::{format_rational, rat_int, Rational};

/// Polynomial with `coeffs[i]` the coefficient of `x^i`.
///
/// No trailing zero coefficients are stored; the zero polynomial is the empty
/// coefficient list. All arithmetic is exact.
#[derive(Clone, PartialEq, Eq, Default)]
pub struct RationalPolynomial {
    coeffs: Vec<Rational>,
}

impl RationalPolynomial {
    pub fn zero() -> Self {
        Self { coeffs: Vec::new() }
    }

    pub fn one() -> Self {
        Self::constant(rat_int(1))
    }

    pub fn constant(c: Rational) -> Self {
        Self::from_coeffs(vec![c])
    }

    /// `x^k` with coefficient 1.
    pub fn monomial(k: usize) -> Self {
        let mut coeffs = vec![Rational::zero(); k + 1];
        coeffs[k] = rat_int(1);
        Self { coeffs }
    }

    pub fn x() -> Self {
        Self::monomial(1)
    }

    /// Build from a coefficient list (constant term first), trimming trailing
    /// zeros.
    pub fn from_coeffs(mut coeffs: Vec<Rational>) -> Self {
        while coeffs.last().is_some_and(|c| c.is_zero()) {
            coeffs.pop();
        }
        Self { coeffs }
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Degree of the polynomial; `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    /// Coefficient of `x^i` (zero beyond the stored degree).
    pub fn coeff(&self, i: usize) -> Rational {
        self.coeffs.get(i).cloned().unwrap_or_else(Rational::zero)
    }

    pub fn coeffs(&self) -> &[Rational] {
        &self.coeffs
    }

    pub fn leading_coeff(&self) -> Option<&Rational> {
        self.coeffs.last()
    }

    /// Exact Horner evaluation.
    pub fn eval(&self, x: &Rational) -> Rational {
        let mut acc = Rational::zero();
        for c in self.coeffs.iter().rev() {
            acc = acc * x + c;
        }
        acc
    }

    pub fn scale(&self, s: &Rational) -> Self {
        if s.is_zero() {
            return Self::zero();
        }
        Self {
            coeffs: self.coeffs.iter().map(|c| c * s).collect(),
        }
    }

    /// Termwise derivative.
    pub fn derivative(&self) -> Self {
        if self.coeffs.len() <= 1 {
            return Self::zero();
        }
        let coeffs = self
            .coeffs
            .iter()
            .enumerate()
            .skip(1)
            .map(|(i, c)| c * rat_int(i as i64))
            .collect();
        Self::from_coeffs(coeffs)
    }

    /// The unique antiderivative whose integral over \[0,1\] is zero.
    pub fn antiderivative_zero_mean(&self) -> Self {
        if self.is_zero() {
            return Self::zero();
        }
        let mut coeffs = Vec::with_capacity(self.coeffs.len() + 1);
        coeffs.push(Rational::zero());
        for (i, c) in self.coeffs.iter().enumerate() {
            coeffs.push(c / rat_int(i as i64 + 1));
        }
        let mut p = Self::from_coeffs(coeffs);
        let mean = p.integral_unit_interval();
        p = p - RationalPolynomial::constant(mean);
        p
    }

    /// Exact integral over \[0,1\].
    pub fn integral_unit_interval(&self) -> Rational {
        let mut acc = Rational::zero();
        for (i, c) in self.coeffs.iter().enumerate() {
            acc += c / rat_int(i as i64 + 1);
        }
        acc
    }

    /// Composition `p(x + c)` computed by repeated binomial expansion.
    pub fn shift(&self, c: &Rational) -> Self {
        // Horner on the shifted variable: p(x+c) built from the top down.
        let mut acc = Self::zero();
        for coeff in self.coeffs.iter().rev() {
            // acc <- acc * (x + c) + coeff
            let shifted = acc.mul_by_linear(c);
            acc = shifted + Self::constant(coeff.clone());
        }
        acc
    }

    /// Multiply by `(x + c)`.
    fn mul_by_linear(&self, c: &Rational) -> Self {
        if self.is_zero() {
            return Self::zero();
        }
        let n = self.coeffs.len();
        let mut coeffs = vec![Rational::zero(); n + 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            coeffs[i + 1] += a;
            coeffs[i] += a * c;
        }
        Self::from_coeffs(coeffs)
    }

    /// Composition `p(1 - x)`.
    pub fn compose_one_minus_x(&self) -> Self {
        let mut acc = Self::zero();
        let one_minus_x = Self::from_coeffs(vec![rat_int(1), rat_int(-1)]);
        for coeff in self.coeffs.iter().rev() {
            acc = &acc * &one_minus_x + Self::constant(coeff.clone());
        }
        acc
    }

    /// Exact division by `x`; `None` if the constant term is nonzero.
    pub fn div_by_x(&self) -> Option<Self> {
        if self.is_zero() {
            return Some(Self::zero());
        }
        if !self.coeffs[0].is_zero() {
            return None;
        }
        Some(Self::from_coeffs(self.coeffs[1..].to_vec()))
    }

    /// Coefficient list reversed: `x^d p(1/x)` for degree-`d` `p`.
    pub fn reversed(&self) -> Self {
        let mut coeffs = self.coeffs.clone();
        coeffs.reverse();
        Self::from_coeffs(coeffs)
    }
}

impl Add for RationalPolynomial {
    type Output = RationalPolynomial;
    fn add(self, rhs: Self) -> Self {
        &self + &rhs
    }
}

impl Add for &RationalPolynomial {
    type Output = RationalPolynomial;
    fn add(self, rhs: Self) -> RationalPolynomial {
        let n = self.coeffs.len().max(rhs.coeffs.len());
        let mut coeffs = Vec::with_capacity(n);
        for i in 0..n {
            coeffs.push(self.coeff(i) + rhs.coeff(i));
        }
        RationalPolynomial::from_coeffs(coeffs)
    }
}

impl Sub for RationalPolynomial {
    type Output = RationalPolynomial;
    fn sub(self, rhs: Self) -> Self {
        &self - &rhs
    }
}

impl Sub for &RationalPolynomial {
    type Output = RationalPolynomial;
    fn sub(self, rhs: Self) -> RationalPolynomial {
        let n = self.coeffs.len().max(rhs.coeffs.len());
        let mut coeffs = Vec::with_capacity(n);
        for i in 0..n {
            coeffs.push(self.coeff(i) - rhs.coeff(i));
        }
        RationalPolynomial::from_coeffs(coeffs)
    }
}

impl Mul for &RationalPolynomial {
    type Output = RationalPolynomial;
    fn mul(self, rhs: Self) -> RationalPolynomial {
        if self.is_zero() || rhs.is_zero() {
            return RationalPolynomial::zero();
        }
        let mut coeffs = vec![Rational::zero(); self.coeffs.len() + rhs.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in rhs.coeffs.iter().enumerate() {
                coeffs[i + j] += a * b;
            }
        }
        RationalPolynomial::from_coeffs(coeffs)
    }
}

impl Mul for RationalPolynomial {
    type Output = RationalPolynomial;
    fn mul(self, rhs: Self) -> Self {
        &self * &rhs
    }
}

impl Neg for RationalPolynomial {
    type Output = RationalPolynomial;
    fn neg(self) -> Self {
        self.scale(&rat_int(-1))
    }
}

impl fmt::Display for RationalPolynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (i, c) in self.coeffs.iter().enumerate().rev() {
            if c.is_zero() {
                continue;
            }
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            match i {
                0 => write!(f, "{}", format_rational(c))?,
                1 => write!(f, "{}*x", format_rational(c))?,
                _ => write!(f, "{}*x^{}", format_rational(c), i)?,
            }
        }
        Ok(())
    }
}

impl fmt::Debug for RationalPolynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}
