//! Exact distribution of sums of beta(1, m) variables, the lap-count law,
//! and complete-subsequence permutation counts.
//!
//! The Laplace transform of a beta(1,m) jump involves the truncated
//! exponential `E_{m-1}(-θ)`; inverting the product transform term by term
//! against `∫ θ e^{-θt} (t-k)_+^p / p! dt = e^{-kθ}/θ^p` yields piecewise
//! polynomial CDFs with integer knots. Everything here stays in exact
//! rationals; the alternating sums are hostile to floating point.

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

use crate::bernstein::{pair_permutation_count, DistributionVector, VectorKind};
use crate::clock::BetaSumSpec;
use crate::error::{Error, Result};
use crate::poly::RationalPolynomial;
use crate::rational::{binomial, factorial, rat_int, Rational};

/// CDF of a sum supported on [0, n], stored piecewise: `pieces[k]` is the
/// polynomial valid on [k, k+1).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PiecewiseCdf {
    pieces: Vec<RationalPolynomial>,
}

impl PiecewiseCdf {
    /// Assemble from truncated-power terms `c (x - knot)^power`.
    fn from_terms(n_pieces: usize, terms: &[(usize, Rational, usize)]) -> Self {
        let mut pieces = Vec::with_capacity(n_pieces);
        let mut acc = RationalPolynomial::zero();
        for k in 0..n_pieces {
            for (knot, c, power) in terms.iter().filter(|(knot, _, _)| *knot == k) {
                let shifted = RationalPolynomial::monomial(*power).shift(&rat_int(-(*knot as i64)));
                acc = acc + shifted.scale(c);
            }
            pieces.push(acc.clone());
        }
        Self { pieces }
    }

    /// Number of unit intervals; the support is [0, pieces].
    pub fn knots(&self) -> usize {
        self.pieces.len()
    }

    pub fn piece(&self, k: usize) -> Option<&RationalPolynomial> {
        self.pieces.get(k)
    }

    /// Exact evaluation at rational `x` in [0, n].
    pub fn eval(&self, x: &Rational) -> Result<Rational> {
        let n = self.pieces.len();
        if x.is_negative() || *x > rat_int(n as i64) {
            return Err(Error::Domain(format!(
                "argument {x} outside the support [0, {n}]"
            )));
        }
        let k = if *x == rat_int(n as i64) {
            n - 1
        } else {
            x.floor().to_integer().try_into().unwrap_or(0usize)
        };
        Ok(self.pieces[k].eval(x))
    }
}

/// Piecewise CDF of the sum of n independent beta(1,2) variables:
/// `F(x) = 2^n Σ_{k,j} C(n,k) C(n-k,j) (-1)^{n-k-j} (x-k)_+^{2n-j} / (2n-j)!`.
pub fn beta12_sum_cdf(n: usize) -> PiecewiseCdf {
    assert!(n >= 1);
    let two_n = Rational::from_integer(BigInt::one() << n);
    let mut terms = Vec::new();
    for k in 0..=n {
        for j in 0..=(n - k) {
            let sign = if (n - k - j).is_multiple_of(2) { 1 } else { -1 };
            let c = Rational::new(
                binomial(n, k) * binomial(n - k, j) * BigInt::from(sign),
                factorial(2 * n - j),
            ) * &two_n;
            terms.push((k, c, 2 * n - j));
        }
    }
    PiecewiseCdf::from_terms(n, &terms)
}

/// `P(S_n <= x)` for the n-fold beta(1,2) sum, exact.
pub fn cdf_beta12_sum(n: usize, x: &Rational) -> Result<Rational> {
    beta12_sum_cdf(n).eval(x)
}

/// `E_{m-1}(-θ)` as a polynomial in θ.
fn truncated_exp_neg(m: u32) -> RationalPolynomial {
    RationalPolynomial::from_coeffs(
        (0..m as usize)
            .map(|l| {
                let sign = if l.is_multiple_of(2) { 1 } else { -1 };
                Rational::new(BigInt::from(sign), factorial(l))
            })
            .collect(),
    )
}

/// The coefficients of `Π_i E_{m_i - 1}(-θ)` as a polynomial in θ.
fn truncated_exponential_product(spec: &BetaSumSpec) -> RationalPolynomial {
    let mut acc = RationalPolynomial::one();
    for &m in spec.multiplicities() {
        acc = &acc * &truncated_exp_neg(m);
    }
    acc
}

/// Bivariate expansion `Π_i (X - E_{m_i-1}(-θ)) = Σ α_{k,j} θ^j X^k`;
/// returns `alpha[k]` as the θ-polynomial coefficient of `X^k`.
fn alpha_expansion(spec: &BetaSumSpec) -> Vec<RationalPolynomial> {
    let mut coeffs: Vec<RationalPolynomial> = vec![RationalPolynomial::one()];
    for &m in spec.multiplicities() {
        let e = truncated_exp_neg(m);
        let mut next = vec![RationalPolynomial::zero(); coeffs.len() + 1];
        for (k, c) in coeffs.iter().enumerate() {
            next[k + 1] = &next[k + 1] + c;
            next[k] = &next[k] - &(c * &e);
        }
        coeffs = next;
    }
    coeffs
}

/// Piecewise CDF of `S_n = Σ X_i` with `X_i ~ beta(1, m_i)`:
/// `P(S_n <= x) = (-1)^M (Π m_i!) Σ_{k,j} α_{k,j} (x-k)_+^{M-j} / (M-j)!`.
pub fn general_sum_cdf(spec: &BetaSumSpec) -> PiecewiseCdf {
    let m_total = spec.total();
    let n = spec.n_symbols();
    let mut prefactor = Rational::from_integer(if m_total.is_multiple_of(2) {
        BigInt::one()
    } else {
        -BigInt::one()
    });
    for &m in spec.multiplicities() {
        prefactor *= Rational::from_integer(factorial(m as usize));
    }
    let alpha = alpha_expansion(spec);
    let mut terms = Vec::new();
    // the k = n knot never contributes on [0, n]: its truncated power vanishes
    // on the whole support
    for (k, theta_poly) in alpha.iter().enumerate().take(n) {
        for (j, a) in theta_poly.coeffs().iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            let c = &prefactor * a / Rational::from_integer(factorial(m_total - j));
            terms.push((k, c, m_total - j));
        }
    }
    PiecewiseCdf::from_terms(n, &terms)
}

/// `P(S_n <= x)` for independent beta(1, m_i) jumps, exact.
pub fn cdf_general(spec: &BetaSumSpec, x: &Rational) -> Result<Rational> {
    general_sum_cdf(spec).eval(x)
}

/// Exact law of the lap count for the n-pairs clock:
/// `P(D_n = d) = F(d+1) - F(d)` for the beta(1,2) sum CDF. Scaled by
/// `(2n)!/2^n` the entries are integers.
pub fn dist_d(n: usize) -> DistributionVector {
    assert!(n >= 1);
    let cdf = beta12_sum_cdf(n);
    let mut values = Vec::with_capacity(n);
    let mut prev = Rational::zero();
    for d in 1..=n {
        let here = cdf.eval(&rat_int(d as i64)).expect("in support");
        values.push(&here - &prev);
        prev = here;
    }
    DistributionVector::new(VectorKind::Probability, values, pair_permutation_count(n))
}

/// Number of n-pairs permutations scanned without a wrap:
/// `a(n) = Σ_j (-1)^(n-j) C(n,j) (2n)!/(2n-j)!`.
pub fn a_count(n: usize) -> BigInt {
    assert!(n >= 1);
    let mut acc = BigInt::zero();
    for j in 0..=n {
        let term = binomial(n, j) * (factorial(2 * n) / factorial(2 * n - j));
        if (n - j).is_multiple_of(2) {
            acc += term;
        } else {
            acc -= term;
        }
    }
    acc
}

/// Number of permutations of the multiset that contain `1, 2, ..., n` as a
/// subsequence: `(-1)^M Σ_j M! c_j / (M-j)!` with
/// `c_j = (-1)^n [θ^j] Π E_{m_i-1}(-θ)`.
pub fn complete_count(spec: &BetaSumSpec) -> BigInt {
    let m_total = spec.total();
    let n = spec.n_symbols();
    let q = truncated_exponential_product(spec);
    let mut acc = Rational::zero();
    for (j, qj) in q.coeffs().iter().enumerate() {
        if qj.is_zero() {
            continue;
        }
        let c_j = if n.is_multiple_of(2) {
            qj.clone()
        } else {
            -qj.clone()
        };
        acc += c_j * Rational::from_integer(factorial(m_total) / factorial(m_total - j));
    }
    if !m_total.is_multiple_of(2) {
        acc = -acc;
    }
    assert!(acc.denom().is_one(), "complete count must be an integer");
    acc.to_integer()
}

/// `P(L_n >= k) = P(S_k <= 1)`, via the CDF of the prefix spec.
pub fn prob_l_ge(spec: &BetaSumSpec, k: usize) -> Result<Rational> {
    let prefix = spec.prefix(k)?;
    cdf_general(&prefix, &rat_int(1))
}
