//! Exact circular convolution of polynomials on the circle [0,1).
//!
//! For integrable f, g on the circle, `(f ⊛ g)(u) = ∫₀¹ f(v) g({u−v}) dv`
//! with the argument reduced mod 1. The convolution of two polynomials
//! restricted to [0,1) is again a single polynomial, and for monomials it has
//! a closed form:
//!
//! `1 ⊛ x^n = 1/(n+1)` and, for m, n ≥ 1,
//! `x^m ⊛ x^n = n! m! / (n+m+1)!
//!    + Σ_{k=0}^{n-1} n! / ((n-k)! (m+1)⋯(m+k+1)) (x^{n-k} − x^{m+k+1})`.
//!
//! General products are the bilinear extension of the memoized monomial table,
//! so one convolution costs O(deg²) rational polynomial work.

use std::collections::HashMap;
use std::sync::Mutex;

use num_bigint::BigInt;
use num_traits::{One, Zero};

use crate::bernoulli::normalized_bernoulli_poly;
use crate::hiprec::{rational_to_float, BigFloat};
use crate::poly::RationalPolynomial;
use crate::rational::{factorial, Rational};

/// A polynomial interpreted as a function on the circle [0,1).
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct CircleFunctionPoly(pub RationalPolynomial);

impl CircleFunctionPoly {
    pub fn poly(&self) -> &RationalPolynomial {
        &self.0
    }
}

impl From<RationalPolynomial> for CircleFunctionPoly {
    fn from(p: RationalPolynomial) -> Self {
        CircleFunctionPoly(p)
    }
}

static MONOMIAL_TABLE: Mutex<Option<HashMap<(usize, usize), RationalPolynomial>>> =
    Mutex::new(None);

/// `x^m ⊛ x^n` on [0,1) by the closed form; symmetric in (m, n).
pub fn monomial_circular_conv(m: usize, n: usize) -> RationalPolynomial {
    let key = (m.min(n), m.max(n));
    {
        let table = MONOMIAL_TABLE.lock().unwrap();
        if let Some(p) = table.as_ref().and_then(|t| t.get(&key)) {
            return p.clone();
        }
    }
    let p = monomial_conv_uncached(key.1, key.0);
    MONOMIAL_TABLE
        .lock()
        .unwrap()
        .get_or_insert_with(HashMap::new)
        .insert(key, p.clone());
    p
}

/// Closed form with the sum running over the smaller exponent `n`.
fn monomial_conv_uncached(m: usize, n: usize) -> RationalPolynomial {
    if n == 0 {
        // 1 ⊛ x^m = 1/(m+1)
        return RationalPolynomial::constant(Rational::new(BigInt::one(), BigInt::from(m + 1)));
    }
    let constant = Rational::new(factorial(n) * factorial(m), factorial(n + m + 1));
    let mut acc = RationalPolynomial::constant(constant);
    // rising factorial (m+1)(m+2)...(m+k+1), maintained incrementally
    let mut pochhammer = BigInt::from(m + 1);
    for k in 0..n {
        let coeff = Rational::new(factorial(n), factorial(n - k) * &pochhammer);
        let diff = RationalPolynomial::monomial(n - k) - RationalPolynomial::monomial(m + k + 1);
        acc = acc + diff.scale(&coeff);
        pochhammer *= BigInt::from(m + k + 2);
    }
    acc
}

/// Circular convolution of two polynomials on [0,1), by bilinear extension of
/// the monomial table. Exact.
pub fn circular_conv(f: &CircleFunctionPoly, g: &CircleFunctionPoly) -> CircleFunctionPoly {
    let mut acc = RationalPolynomial::zero();
    for (i, a) in f.0.coeffs().iter().enumerate() {
        if a.is_zero() {
            continue;
        }
        for (j, b) in g.0.coeffs().iter().enumerate() {
            if b.is_zero() {
                continue;
            }
            acc = acc + monomial_circular_conv(i, j).scale(&(a * b));
        }
    }
    CircleFunctionPoly(acc)
}

/// The n-fold circular convolution power of `b_1(x) = x - 1/2`, n ≥ 1.
///
/// Equals `(-1)^(n-1) b_n(x)` exactly.
pub fn b1_conv_power(n: usize) -> CircleFunctionPoly {
    assert!(n >= 1, "convolution power needs n >= 1");
    let b1 = CircleFunctionPoly(normalized_bernoulli_poly(1));
    let mut acc = b1.clone();
    for _ in 1..n {
        acc = circular_conv(&acc, &b1);
    }
    acc
}

/// Midpoint-rule approximation of `(f ⊛ g)(u)`, used as an independent check
/// on the closed form. The quadrature nodes are rational, so the sum is
/// evaluated exactly and converted to a float once at the end. Accuracy is
/// O(grid⁻²) when `u` lies on the grid.
pub fn quadrature_conv_oracle(
    f: &RationalPolynomial,
    g: &RationalPolynomial,
    u: &Rational,
    grid: u32,
    precision_bits: usize,
) -> BigFloat {
    assert!(grid >= 16, "quadrature grid too coarse");
    let step = Rational::new(BigInt::one(), BigInt::from(grid));
    let mut acc = Rational::zero();
    for i in 0..grid {
        let v = Rational::new(BigInt::from(2 * i + 1), BigInt::from(2 * grid));
        let mut w = u - &v;
        let fl = w.floor();
        w -= fl; // fractional part in [0,1)
        acc += f.eval(&v) * g.eval(&w);
    }
    acc *= step;
    rational_to_float(&acc, precision_bits)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hiprec::float_to_f64;
    use crate::rational::{rat, rat_int};

    fn b(n: usize) -> RationalPolynomial {
        normalized_bernoulli_poly(n)
    }

    #[test]
    fn monomial_base_cases() {
        // 1 ⊛ x^n = 1/(n+1)
        for n in 0..8 {
            assert_eq!(
                monomial_circular_conv(0, n),
                RationalPolynomial::constant(rat(1, n as i64 + 1))
            );
        }
        // x ⊛ x^n = (x - x^{n+1})/(n+1) + 1/((n+1)(n+2))
        for n in 1..8usize {
            let expect = (RationalPolynomial::x() - RationalPolynomial::monomial(n + 1))
                .scale(&rat(1, n as i64 + 1))
                + RationalPolynomial::constant(rat(1, (n as i64 + 1) * (n as i64 + 2)));
            assert_eq!(monomial_circular_conv(1, n), expect);
            assert_eq!(monomial_circular_conv(n, 1), expect);
        }
        // x ⊛ x = (x - x^2)/2 + 1/6
        let expect = RationalPolynomial::from_coeffs(vec![rat(1, 6), rat(1, 2), rat(-1, 2)]);
        assert_eq!(monomial_circular_conv(1, 1), expect);
    }

    #[test]
    fn bernoulli_convolution_identities() {
        let b0 = CircleFunctionPoly(b(0));
        assert_eq!(circular_conv(&b0, &b0).0, b(0));
        for n in 1..=12 {
            let bn = CircleFunctionPoly(b(n));
            assert!(circular_conv(&b0, &bn).0.is_zero(), "b_0 ⊛ b_{n} != 0");
        }
        // b_n ⊛ b_m = -b_{n+m}
        for n in 1..=7usize {
            for m in 1..=(8 - n) {
                let lhs = circular_conv(&CircleFunctionPoly(b(n)), &CircleFunctionPoly(b(m)));
                assert_eq!(lhs.0, -b(n + m), "b_{n} ⊛ b_{m}");
            }
        }
    }

    #[test]
    fn convolution_powers_of_b1() {
        assert_eq!(b1_conv_power(1).0, b(1));
        assert_eq!(b1_conv_power(2).0, -b(2));
        assert_eq!(b1_conv_power(5).0, b(5));
    }

    #[test]
    fn mean_multiplicativity() {
        let f = RationalPolynomial::from_coeffs(vec![rat(1, 3), rat(-2, 1), rat(5, 7)]);
        let g = RationalPolynomial::from_coeffs(vec![rat(-1, 2), rat(0, 1), rat(1, 1), rat(3, 4)]);
        let fg = circular_conv(&f.clone().into(), &g.clone().into());
        assert_eq!(
            fg.0.integral_unit_interval(),
            f.integral_unit_interval() * g.integral_unit_interval()
        );
        // convolving with the constant 1 projects onto the mean
        let one = CircleFunctionPoly(RationalPolynomial::one());
        assert_eq!(
            circular_conv(&one, &f.clone().into()).0,
            RationalPolynomial::constant(f.integral_unit_interval())
        );
    }

    #[test]
    fn smoothing_action_of_minus_b1() {
        // h = f ⊛ (-b_1) has h' = f - ∫f, zero mean, and h(0) = h(1).
        let fs = [
            RationalPolynomial::one(),
            RationalPolynomial::from_coeffs(vec![rat(2, 3), rat(1, 1), rat(-4, 5), rat(1, 2)]),
            b(3),
        ];
        let minus_b1 = CircleFunctionPoly(-b(1));
        for f in fs {
            let h = circular_conv(&f.clone().into(), &minus_b1).0;
            let mean = f.integral_unit_interval();
            assert_eq!(h.derivative(), &f - &RationalPolynomial::constant(mean));
            assert!(h.integral_unit_interval().is_zero());
            assert_eq!(h.eval(&rat_int(0)), h.eval(&rat_int(1)));
        }
    }

    #[test]
    fn anti_reciprocal_structure() {
        // q(x) = (x^n ⊛ x^m - n!m!/(n+m+1)!)/x satisfies q(x) = -x^deg q(1/x).
        for n in 1..=6usize {
            for m in 1..=6usize {
                let c = Rational::new(factorial(n) * factorial(m), factorial(n + m + 1));
                let q = (monomial_circular_conv(n, m) - RationalPolynomial::constant(c))
                    .div_by_x()
                    .expect("constant term cancels exactly");
                assert_eq!(q.reversed(), -q.clone(), "not anti-reciprocal at ({n},{m})");
            }
        }
    }

    #[test]
    fn quadrature_agrees_with_closed_form() {
        // constant x constant
        let one = RationalPolynomial::one();
        let v = quadrature_conv_oracle(&one, &one, &rat(3, 7), 1024, 128);
        assert!((float_to_f64(&v) - 1.0).abs() < 1e-12);

        // b1 ⊛ b1 at 0 -> -b_2(0) = -1/12
        let v = quadrature_conv_oracle(&b(1), &b(1), &rat_int(0), 4096, 128);
        assert!((float_to_f64(&v) + 1.0 / 12.0).abs() < 1e-6);

        // x ⊛ x^2 at 1/2 against the monomial table
        let exact = monomial_circular_conv(1, 2).eval(&rat(1, 2));
        let v = quadrature_conv_oracle(
            &RationalPolynomial::x(),
            &RationalPolynomial::monomial(2),
            &rat(1, 2),
            4096,
            128,
        );
        let expect = crate::rational::rational_to_f64(&exact);
        assert!((float_to_f64(&v) - expect).abs() < 1e-6);
    }
}
