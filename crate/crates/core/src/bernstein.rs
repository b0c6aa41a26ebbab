//! Bernstein density basis, exact index distributions, and the positivity /
//! approximation probes.
//!
//! The working basis is the *density-normalized* Bernstein basis
//! `f_{k:N}(u) = N C(N-1,k-1) u^{k-1} (1-u)^{N-k}` for `1 <= k <= N`: each
//! element is the beta(k, N+1-k) density, i.e. the law of the k-th order
//! statistic of N uniforms, so it integrates to 1 and `sum_k (1/N) f_{k:N} = 1`.
//!
//! In this basis the degree-n Bernoulli polynomial expands with coefficients
//! proportional to the deviation `delta_{k:2n} = 1/(2n) - P(index = k)` of the
//! clock-scan stopping index from uniform, which is what ties the exact
//! vectors here to the combinatorics in [`crate::clock`].

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use rayon::prelude::*;

use crate::bernoulli::{bernoulli_number, normalized_bernoulli_poly};
use crate::error::{Error, Result};
use crate::hiprec::{self, BigFloat};
use crate::poly::RationalPolynomial;
use crate::rational::{binomial, factorial, rat_int, Rational};

/// Expansion `sum_k coeffs[k-1] f_{k:N}` in the density basis of `N` elements
/// (polynomial degree N-1).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BernsteinExpansion {
    n_basis: usize,
    coeffs: Vec<Rational>,
}

impl BernsteinExpansion {
    pub fn new(n_basis: usize, coeffs: Vec<Rational>) -> Self {
        assert_eq!(coeffs.len(), n_basis);
        Self { n_basis, coeffs }
    }

    pub fn n_basis(&self) -> usize {
        self.n_basis
    }

    /// Coefficients `c_1 .. c_N` on the density basis.
    pub fn coeffs(&self) -> &[Rational] {
        &self.coeffs
    }

    /// Coefficients on the classical Bernstein basis
    /// `C(N-1,k) x^k (1-x)^(N-1-k)`, k = 0..N-1; these are `N` times the
    /// density-basis coefficients.
    pub fn classical_coeffs(&self) -> Vec<Rational> {
        let n = rat_int(self.n_basis as i64);
        self.coeffs.iter().map(|c| c * &n).collect()
    }

    /// Expand the mixture back into the monomial basis.
    pub fn to_polynomial(&self) -> RationalPolynomial {
        let mut acc = RationalPolynomial::zero();
        for (k, c) in self.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            acc = acc + bernstein_density(k + 1, self.n_basis).unwrap().scale(c);
        }
        acc
    }
}

/// The density basis element `f_{k:N}(u) = N C(N-1,k-1) u^(k-1) (1-u)^(N-k)`,
/// for `1 <= k <= N`. Integrates to 1 exactly.
pub fn bernstein_density(k: usize, n_basis: usize) -> Result<RationalPolynomial> {
    if k == 0 || k > n_basis {
        return Err(Error::Domain(format!(
            "basis index k={k} outside 1..={n_basis}"
        )));
    }
    let scale = Rational::from_integer(BigInt::from(n_basis) * binomial(n_basis - 1, k - 1));
    let mut p = RationalPolynomial::monomial(k - 1);
    let one_minus_x = RationalPolynomial::from_coeffs(vec![rat_int(1), rat_int(-1)]);
    for _ in 0..(n_basis - k) {
        p = &p * &one_minus_x;
    }
    Ok(p.scale(&scale))
}

/// The monomial `x^i` as a density-basis mixture:
/// `c_j = C(j-1,i) / (N C(N-1,i))` for `j > i`, zero otherwise. Exact.
pub fn monomial_to_bernstein(i: usize, n_basis: usize) -> Result<BernsteinExpansion> {
    if i >= n_basis {
        return Err(Error::Domain(format!(
            "monomial degree {i} needs a basis larger than {n_basis}"
        )));
    }
    let denom = BigInt::from(n_basis) * binomial(n_basis - 1, i);
    let coeffs = (1..=n_basis)
        .map(|j| {
            if j <= i {
                Rational::zero()
            } else {
                Rational::new(binomial(j - 1, i), denom.clone())
            }
        })
        .collect();
    Ok(BernsteinExpansion::new(n_basis, coeffs))
}

/// Any polynomial of degree < N as a density-basis mixture, by linearity.
pub fn polynomial_to_bernstein(
    p: &RationalPolynomial,
    n_basis: usize,
) -> Result<BernsteinExpansion> {
    if p.degree().is_some_and(|d| d >= n_basis) {
        return Err(Error::Domain(format!(
            "degree {:?} polynomial does not fit a {n_basis}-element basis",
            p.degree()
        )));
    }
    let mut coeffs = vec![Rational::zero(); n_basis];
    for (i, a) in p.coeffs().iter().enumerate() {
        if a.is_zero() {
            continue;
        }
        let mono = monomial_to_bernstein(i, n_basis)?;
        for (c, m) in coeffs.iter_mut().zip(mono.coeffs()) {
            *c += a * m;
        }
    }
    Ok(BernsteinExpansion::new(n_basis, coeffs))
}

/// Expansion of `b_n` in the density basis of `N > n` elements; coefficient j
/// is `sum_i C(j-1,i) C(n,i) B_{n-i} / (n! N C(N-1,i))`.
pub fn bernoulli_in_bernstein(n: usize, n_basis: usize) -> Result<BernsteinExpansion> {
    if n >= n_basis {
        return Err(Error::Domain(format!(
            "b_{n} does not fit a {n_basis}-element basis"
        )));
    }
    let nfact = factorial(n);
    let coeffs = (1..=n_basis)
        .map(|j| {
            let mut acc = Rational::zero();
            for i in 0..=n {
                let c_ji = binomial(j - 1, i);
                if c_ji.is_zero() {
                    continue;
                }
                let b = bernoulli_number(n - i);
                if b.is_zero() {
                    continue;
                }
                let num = c_ji * binomial(n, i);
                let den = &nfact * BigInt::from(n_basis) * binomial(n_basis - 1, i);
                acc += Rational::new(num, den) * b;
            }
            acc
        })
        .collect();
    Ok(BernsteinExpansion::new(n_basis, coeffs))
}

/// Whether a vector is a probability law or a deviation from uniform.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum VectorKind {
    Probability,
    Deviation,
}

/// Exact rational vector (probability or deviation) with a canonical display
/// denominator.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DistributionVector {
    kind: VectorKind,
    values: Vec<Rational>,
    canonical_denom: BigInt,
}

impl DistributionVector {
    pub fn new(kind: VectorKind, values: Vec<Rational>, canonical_denom: BigInt) -> Self {
        match kind {
            VectorKind::Probability => {
                let sum: Rational = values.iter().sum();
                assert!(sum.is_one(), "probability vector must sum to 1");
                assert!(
                    values.iter().all(|v| !v.is_negative()),
                    "probability vector must be nonnegative"
                );
            }
            VectorKind::Deviation => {
                let sum: Rational = values.iter().sum();
                assert!(sum.is_zero(), "deviation vector must sum to 0");
            }
        }
        Self {
            kind,
            values,
            canonical_denom,
        }
    }

    pub fn kind(&self) -> VectorKind {
        self.kind
    }

    pub fn values(&self) -> &[Rational] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// Numerators over the canonical denominator (exact; the denominator is
    /// always a common multiple of the entries' denominators).
    pub fn common_numerators(&self) -> (Vec<BigInt>, BigInt) {
        let d = &self.canonical_denom;
        let nums = self
            .values
            .iter()
            .map(|v| {
                let scaled = v * Rational::from_integer(d.clone());
                assert!(
                    scaled.denom().is_one(),
                    "canonical denominator must clear all entries"
                );
                scaled.to_integer()
            })
            .collect();
        (nums, d.clone())
    }
}

/// `(2n)! / 2^n`, the number of distinct pair-multiset permutations.
pub fn pair_permutation_count(n: usize) -> BigInt {
    factorial(2 * n) >> n
}

/// Deviation of the stopping-index law from uniform:
/// `delta_k = (2^{n-1}/(n n!)) sum_i C(k-1,i) C(n,i) B_{n-i} / C(2n-1,i)`.
pub fn delta_vector(n: usize) -> DistributionVector {
    assert!(n >= 1);
    let scale = Rational::new(BigInt::one() << (n - 1), BigInt::from(n) * factorial(n));
    let values: Vec<Rational> = (1..=2 * n)
        .map(|k| {
            let mut acc = Rational::zero();
            for i in 0..=n {
                let c_ki = binomial(k - 1, i);
                if c_ki.is_zero() {
                    continue;
                }
                let b = bernoulli_number(n - i);
                if b.is_zero() {
                    continue;
                }
                acc += Rational::new(c_ki * binomial(n, i), binomial(2 * n - 1, i)) * b;
            }
            acc * &scale
        })
        .collect();
    let denom = BigInt::from(2 * n).lcm(&pair_permutation_count(n));
    DistributionVector::new(VectorKind::Deviation, values, denom)
}

/// The exact law of the stopping index: `p_k = 1/(2n) - delta_k`.
pub fn p_vector_exact(n: usize) -> DistributionVector {
    let delta = delta_vector(n);
    let uniform = Rational::new(BigInt::one(), BigInt::from(2 * n));
    let values = delta.values().iter().map(|d| &uniform - d).collect();
    DistributionVector::new(VectorKind::Probability, values, pair_permutation_count(n))
}

/// Largest multiplier for which `1 - c b_n` keeps nonnegative degree-n
/// Bernstein coefficients.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum MaxMultiplier {
    Finite(Rational),
    /// `b_n` has no positive coefficient in the basis, so every multiplier works.
    Unbounded,
}

/// The greatest `c` such that every degree-n Bernstein coefficient of
/// `1 - c b_n(x)` is nonnegative. Basis-independent between the density and
/// classical normalizations, since corresponding coefficients differ by the
/// positive factor N.
pub fn max_multiplier_c(n: usize) -> MaxMultiplier {
    assert!(n >= 1);
    let n_basis = n + 1;
    let b = bernoulli_in_bernstein(n, n_basis).expect("n < n+1");
    let uniform = Rational::new(BigInt::one(), BigInt::from(n_basis));
    let mut best: Option<Rational> = None;
    for c in b.coeffs() {
        if c.is_positive() {
            let bound = &uniform / c;
            if best.as_ref().is_none_or(|b| bound < *b) {
                best = Some(bound);
            }
        }
    }
    match best {
        Some(c) => MaxMultiplier::Finite(c),
        None => MaxMultiplier::Unbounded,
    }
}

/// Density-basis coefficients of `1 - 2^n b_n` in the degree-n basis
/// (N = n+1 elements). All nonnegative iff the positivity conjecture holds at n.
pub fn positivity_probe_coefficients(n: usize) -> BernsteinExpansion {
    assert!(n >= 1);
    let n_basis = n + 1;
    let b = bernoulli_in_bernstein(n, n_basis).expect("n < n+1");
    let uniform = Rational::new(BigInt::one(), BigInt::from(n_basis));
    let two_n = Rational::from_integer(BigInt::one() << n);
    let coeffs = b.coeffs().iter().map(|c| &uniform - c * &two_n).collect();
    BernsteinExpansion::new(n_basis, coeffs)
}

/// Result of the uniform-approximation probe at one n.
#[derive(Clone, Debug)]
pub struct GapResult {
    /// `sup_k |2n pi^n delta_k - (2 pi)^n b_n(arg_k)|`.
    pub gap: BigFloat,
    /// Index k attaining the supremum.
    pub attained_k: usize,
    /// The exact rational bracket whose absolute value attains the sup.
    pub bracket: Rational,
}

/// Sup over k of `|2n pi^n delta_{k:2n} - (2 pi)^n b_n((k-1)/(2n-1))|`.
///
/// The bracket `2n delta_k - 2^n b_n(.)` is evaluated exactly in rationals;
/// only the final multiplication by `pi^n` is floating point. With
/// `alt_argument` the polynomial is sampled at `(k-1)/(2n)` instead.
pub fn conjecture1_gap(n: usize, precision_bits: usize, alt_argument: bool) -> Result<GapResult> {
    if n < 1 {
        return Err(Error::Domain("n must be positive".into()));
    }
    if precision_bits < 64 {
        return Err(Error::Precision("need at least 64 bits".into()));
    }
    // pi^n times an exact rational loses half an ulp per operation; demand
    // that the implied enclosure agrees in the leading 10 bits.
    let rel_err = (n as f64 + 4.0) * 2f64.powi(1 - (precision_bits.min(1 << 20) as i32));
    if rel_err >= 2f64.powi(-10) {
        return Err(Error::Precision(format!(
            "{precision_bits} bits cannot separate the leading 10 bits at n={n}"
        )));
    }
    let delta = delta_vector(n);
    let bn = normalized_bernoulli_poly(n);
    let two_n = Rational::from_integer(BigInt::one() << n);
    let arg_denom = if alt_argument { 2 * n } else { 2 * n - 1 };
    let brackets: Vec<(usize, Rational)> = delta
        .values()
        .par_iter()
        .enumerate()
        .map(|(idx, d)| {
            let k = idx + 1;
            let arg = Rational::new(BigInt::from(k - 1), BigInt::from(arg_denom));
            let bracket = rat_int(2 * n as i64) * d - &two_n * bn.eval(&arg);
            (k, bracket)
        })
        .collect();
    // earliest k wins ties (the deviation is symmetric, so ties are common)
    let mut attained_k = 1usize;
    let mut bracket = Rational::zero();
    for (k, b) in brackets {
        if b.abs() > bracket.abs() {
            attained_k = k;
            bracket = b;
        }
    }
    let pi_pow = hiprec::powi(&hiprec::pi(precision_bits), n, precision_bits);
    let gap = pi_pow.mul(
        &hiprec::rational_to_float(&bracket.abs(), precision_bits),
        precision_bits,
        hiprec::RM,
    );
    Ok(GapResult {
        gap,
        attained_k,
        bracket,
    })
}
