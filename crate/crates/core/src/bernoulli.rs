//! Bernoulli numbers and (factorially normalized) Bernoulli polynomials.
//!
//! `B_n` is computed by the standard recursion
//! `B_n = -1/(n+1) * sum_{k<n} C(n+1,k) B_k` and memoized; `B_n(x)` is then
//! assembled from the binomial expansion `sum_k C(n,k) B_{n-k} x^k`. The
//! normalized polynomials `b_n = B_n / n!` satisfy `b_n' = b_{n-1}` with zero
//! mean on \[0,1\], which the tests use as the defining property.

use std::sync::Mutex;

use num_traits::Zero;

use crate::poly::RationalPolynomial;
use crate::rational::{binomial, factorial, rat_int, Rational};

static BERNOULLI_NUMBERS: Mutex<Vec<Rational>> = Mutex::new(Vec::new());

/// The `n`th Bernoulli number `B_n = B_n(0)`, with `B_1 = -1/2`.
pub fn bernoulli_number(n: usize) -> Rational {
    let mut cache = BERNOULLI_NUMBERS.lock().unwrap();
    if cache.is_empty() {
        cache.push(rat_int(1));
    }
    while cache.len() <= n {
        let m = cache.len();
        if m % 2 == 1 && m > 1 {
            cache.push(Rational::zero());
            continue;
        }
        let mut sum = Rational::zero();
        for (k, b) in cache.iter().enumerate() {
            if !b.is_zero() {
                sum += Rational::from_integer(binomial(m + 1, k)) * b;
            }
        }
        let next = -sum / rat_int(m as i64 + 1);
        cache.push(next);
    }
    cache[n].clone()
}

/// The Bernoulli polynomial `B_n(x)`, degree exactly `n`, leading coefficient 1.
pub fn bernoulli_poly(n: usize) -> RationalPolynomial {
    let mut coeffs = Vec::with_capacity(n + 1);
    for k in 0..=n {
        coeffs.push(Rational::from_integer(binomial(n, k)) * bernoulli_number(n - k));
    }
    RationalPolynomial::from_coeffs(coeffs)
}

static NORMALIZED_POLYS: Mutex<Vec<RationalPolynomial>> = Mutex::new(Vec::new());

/// The factorially normalized Bernoulli polynomial `b_n(x) = B_n(x)/n!`.
pub fn normalized_bernoulli_poly(n: usize) -> RationalPolynomial {
    {
        let cache = NORMALIZED_POLYS.lock().unwrap();
        if let Some(p) = cache.get(n) {
            return p.clone();
        }
    }
    let p = bernoulli_poly(n).scale(&Rational::new(1.into(), factorial(n)));
    let mut cache = NORMALIZED_POLYS.lock().unwrap();
    while cache.len() <= n {
        let m = cache.len();
        if m == n {
            cache.push(p.clone());
        } else {
            let q = bernoulli_poly(m).scale(&Rational::new(1.into(), factorial(m)));
            cache.push(q);
        }
    }
    p
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::rat;

    #[test]
    fn small_bernoulli_numbers() {
        assert_eq!(bernoulli_number(0), rat_int(1));
        assert_eq!(bernoulli_number(1), rat(-1, 2));
        assert_eq!(bernoulli_number(2), rat(1, 6));
        assert_eq!(bernoulli_number(4), rat(-1, 30));
        for n in (3..=15).step_by(2) {
            assert!(bernoulli_number(n).is_zero(), "B_{n} should vanish");
        }
        // B_12 has the first nontrivial numerator.
        assert_eq!(bernoulli_number(12), rat(-691, 2730));
    }

    #[test]
    fn bernoulli_polys_match_known_forms() {
        assert_eq!(bernoulli_poly(0), RationalPolynomial::one());
        let b1 = RationalPolynomial::from_coeffs(vec![rat(-1, 2), rat_int(1)]);
        assert_eq!(bernoulli_poly(1), b1);
        let b2 = RationalPolynomial::from_coeffs(vec![rat(1, 6), rat_int(-1), rat_int(1)]);
        assert_eq!(bernoulli_poly(2), b2);
        for n in 1..=12 {
            let p = bernoulli_poly(n);
            assert_eq!(p.degree(), Some(n));
            assert_eq!(p.leading_coeff().unwrap(), &rat_int(1));
        }
    }

    #[test]
    fn normalized_polys() {
        assert_eq!(normalized_bernoulli_poly(0), RationalPolynomial::one());
        assert_eq!(
            normalized_bernoulli_poly(1),
            RationalPolynomial::from_coeffs(vec![rat(-1, 2), rat_int(1)])
        );
        // b_3 = (x^3 - 3x^2/2 + x/2)/6
        assert_eq!(
            normalized_bernoulli_poly(3),
            RationalPolynomial::from_coeffs(vec![rat_int(0), rat(1, 12), rat(-1, 4), rat(1, 6)])
        );
    }

    #[test]
    fn antiderivative_characterization() {
        // b_n is the zero-mean antiderivative of b_{n-1}; equivalently
        // d/dx b_n = b_{n-1} and the mean of b_n over [0,1] vanishes.
        for n in 1..=8 {
            let bn = normalized_bernoulli_poly(n);
            assert_eq!(bn.derivative(), normalized_bernoulli_poly(n - 1));
            assert!(bn.integral_unit_interval().is_zero());
        }
        assert_eq!(
            RationalPolynomial::one().antiderivative_zero_mean(),
            normalized_bernoulli_poly(1)
        );
    }

    #[test]
    fn reflection_symmetry() {
        // b_n(1-x) = (-1)^n b_n(x), full coefficient vectors.
        for n in 0..=16 {
            let bn = normalized_bernoulli_poly(n);
            let sign = if n % 2 == 0 { 1 } else { -1 };
            assert_eq!(
                bn.compose_one_minus_x(),
                bn.scale(&rat_int(sign)),
                "reflection failed at n={n}"
            );
        }
    }

    #[test]
    fn power_sum_identity() {
        // sum_{k=0}^{n-1} (x+k)^m = (B_{m+1}(x+n) - B_{m+1}(x))/(m+1), as
        // polynomials in x.
        for m in 0..=6usize {
            for n in 1..=10usize {
                let mut lhs = RationalPolynomial::zero();
                for k in 0..n {
                    let mut pow = RationalPolynomial::one();
                    let xk = RationalPolynomial::from_coeffs(vec![rat_int(k as i64), rat_int(1)]);
                    for _ in 0..m {
                        pow = &pow * &xk;
                    }
                    lhs = lhs + pow;
                }
                let bm1 = bernoulli_poly(m + 1);
                let rhs = (bm1.shift(&rat_int(n as i64)) - bm1).scale(&rat(1, m as i64 + 1));
                assert_eq!(lhs, rhs, "power sum failed at m={m}, n={n}");
            }
        }
    }

    #[test]
    fn convolution_flavored_number_identity() {
        // B_{n+1}/(n+1)! = sum_{k=0}^{n} B_{n-k} / ((k+2) k! (n-k)!) for n >= 1.
        // (Fails at n = 0, where the two sides differ in sign; not asserted there.)
        for n in 1..=12usize {
            let lhs = bernoulli_number(n + 1) / Rational::from_integer(factorial(n + 1));
            let mut rhs = Rational::zero();
            for k in 0..=n {
                let denom = Rational::from_integer(
                    (factorial(k) * factorial(n - k)) * num_bigint::BigInt::from(k + 2),
                );
                rhs += bernoulli_number(n - k) / denom;
            }
            assert_eq!(lhs, rhs, "identity failed at n={n}");
        }
    }

    #[test]
    fn generating_function_oracle() {
        // Independent route: B_n = n! [x^n] x/(e^x - 1). The reciprocal of
        // (e^x - 1)/x = sum_k x^k/(k+1)! comes from the series-inversion
        // recurrence b_0 = 1, b_n = -sum_{k=1..n} d_k b_{n-k}, all exact.
        let terms = 24usize;
        let d: Vec<Rational> = (0..=terms)
            .map(|k| Rational::from_integer(factorial(k + 1)).recip())
            .collect();
        let mut inv: Vec<Rational> = vec![rat_int(1)];
        for n in 1..=terms {
            let mut acc = Rational::zero();
            for k in 1..=n {
                acc += &d[k] * &inv[n - k];
            }
            inv.push(-acc);
        }
        for (n, coeff) in inv.iter().enumerate() {
            assert_eq!(
                coeff * Rational::from_integer(factorial(n)),
                bernoulli_number(n),
                "generating function disagrees at n={n}"
            );
        }
    }
}
