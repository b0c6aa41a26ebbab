//! Wrapped gamma densities on the circle and their Bernoulli expansions.
//!
//! Reducing a gamma(r, λ) variable mod 1 gives a density on [0,1) expressible
//! two ways: directly as the lattice sum
//! `(λ^r/Γ(r)) e^{-λu} Σ_{m>=0} (u+m)^{r-1} e^{-λm}`
//! (a Hurwitz-Lerch zeta value), and for `0 < λ < 2π` as the series
//! `1 + Σ_{n>=r} (-1)^{n-r+1} C(n-1, r-1) b_n(u) λ^n`
//! in normalized Bernoulli polynomials. The two routes check each other; the
//! leading deviation from uniformity is `-λ^r b_r(u)`.

use num_bigint::BigInt;
use num_traits::{Signed, Zero};

use crate::bernoulli::normalized_bernoulli_poly;
use crate::error::{Error, Result};
use crate::hiprec::{self, BigFloat, RM};
use crate::poly::RationalPolynomial;
use crate::rational::{binomial, factorial, rat_int, Rational};

/// Shape r (positive integer), rate λ > 0, and circle point u in [0,1).
#[derive(Clone, Debug)]
pub struct WrappedGammaParams {
    pub r: u32,
    pub lambda: f64,
    pub u: Rational,
}

impl WrappedGammaParams {
    pub fn new(r: u32, lambda: f64, u: Rational) -> Result<Self> {
        if r == 0 {
            return Err(Error::Domain("shape r must be a positive integer".into()));
        }
        if lambda.is_nan() || lambda <= 0.0 || lambda.is_infinite() {
            return Err(Error::Domain(format!("rate lambda={lambda} must be > 0")));
        }
        if u.is_negative() || u >= rat_int(1) {
            return Err(Error::Domain(format!("u={u} outside [0,1)")));
        }
        Ok(Self { r, lambda, u })
    }
}

const MAX_SERIES_TERMS: usize = 200_000;

/// Density of the wrapped gamma(r, λ) at u by direct lattice summation,
/// truncated once the analytic geometric tail bound drops below `tol`.
pub fn wrapped_gamma_density_series(
    params: &WrappedGammaParams,
    tol: f64,
    precision_bits: usize,
) -> Result<BigFloat> {
    density_series_at(
        params.r as usize,
        params.lambda,
        &params.u,
        tol,
        precision_bits,
    )
}

/// Lattice-sum evaluation; separated out so integration tests can probe the
/// closed interval including the wrap limit u = 1.
fn density_series_at(
    r: usize,
    lambda_f: f64,
    u_rat: &Rational,
    tol: f64,
    precision_bits: usize,
) -> Result<BigFloat> {
    if tol.is_nan() || tol <= 0.0 {
        return Err(Error::Domain("tolerance must be positive".into()));
    }
    let bits = precision_bits + 32;
    if tol < 2f64.powi(-(precision_bits.min(1 << 20) as i32) + 8) {
        return Err(Error::Precision(format!(
            "tolerance {tol:e} unreachable at {precision_bits} mantissa bits"
        )));
    }
    let lambda = BigFloat::from_f64(lambda_f, bits);
    let u = hiprec::rational_to_float(u_rat, bits);
    // prefactor (λ^r / (r-1)!) e^{-λu}
    let gamma_r = hiprec::bigint_to_float(&factorial(r - 1));
    let prefactor = hiprec::powi(&lambda, r, bits).div(&gamma_r, bits, RM).mul(
        &hiprec::exp(&lambda.mul(&u, bits, RM).neg(), bits),
        bits,
        RM,
    );
    let x = hiprec::exp(&lambda.neg(), bits); // e^{-λ} < 1
    let mut sum = BigFloat::new(bits);
    let mut xpow = BigFloat::from_f64(1.0, bits);
    let tol_f = BigFloat::from_f64(tol, bits);
    let mut converged = false;
    for m in 0..MAX_SERIES_TERMS {
        let base = u.add(&BigFloat::from_f64(m as f64, bits), bits, RM);
        let term = hiprec::powi(&base, r - 1, bits).mul(&xpow, bits, RM);
        sum = sum.add(&term, bits, RM);
        xpow = xpow.mul(&x, bits, RM);
        // tail <= next_term / (1 - e^{-λ} (1 + 1/(m+1))^{r-1}) once the ratio
        // drops below one
        if m >= 1 {
            let growth = (1.0 + 1.0 / (m as f64 + 1.0)).powi(r as i32 - 1);
            let ratio = (-lambda_f).exp() * growth;
            if ratio < 1.0 {
                let next = hiprec::powi(
                    &base.add(&BigFloat::from_f64(1.0, bits), bits, RM),
                    r - 1,
                    bits,
                )
                .mul(&xpow, bits, RM);
                let bound = next.mul(&prefactor, bits, RM).abs().div(
                    &BigFloat::from_f64(1.0 - ratio, bits),
                    bits,
                    RM,
                );
                if bound.cmp(&tol_f).unwrap_or(1) < 0 {
                    converged = true;
                    break;
                }
            }
        }
    }
    if !converged {
        return Err(Error::Precision(format!(
            "series tail above {tol:e} after {MAX_SERIES_TERMS} terms"
        )));
    }
    let mut out = prefactor.mul(&sum, bits, RM);
    out.set_precision(precision_bits, RM)
        .map_err(|e| Error::Precision(format!("{e:?}")))?;
    Ok(out)
}

/// Closed form for the r = 1 case: `λ e^{λ(1-u)} / (e^λ - 1)`.
pub fn wrapped_exponential_closed_form(
    lambda: f64,
    u: &Rational,
    precision_bits: usize,
) -> BigFloat {
    let bits = precision_bits + 32;
    let lam = BigFloat::from_f64(lambda, bits);
    let uf = hiprec::rational_to_float(u, bits);
    let one = BigFloat::from_f64(1.0, bits);
    let num = lam.mul(
        &hiprec::exp(&lam.mul(&one.sub(&uf, bits, RM), bits, RM), bits),
        bits,
        RM,
    );
    let den = hiprec::exp(&lam, bits).sub(&one, bits, RM);
    let mut out = num.div(&den, bits, RM);
    out.set_precision(precision_bits, RM).expect("precision");
    out
}

/// Outcome of the truncated Bernoulli expansion.
#[derive(Clone, Debug)]
pub struct ExpansionValue {
    pub value: BigFloat,
    /// Analytic bound on the discarded tail (infinite when the bound's
    /// geometric ratio is not yet below one at this truncation).
    pub tail_bound: f64,
}

/// Truncated expansion `1 + Σ_{n=r}^{terms} (-1)^{n-r+1} C(n-1,r-1) b_n(u) λ^n`.
///
/// `b_n(u)` is evaluated exactly in rationals and converted once; requires
/// `0 < λ < 2π` (the radius of convergence) and `terms >= r`.
pub fn wrapped_gamma_bernoulli_expansion(
    params: &WrappedGammaParams,
    terms: usize,
    precision_bits: usize,
) -> Result<ExpansionValue> {
    let lambda = params.lambda;
    if lambda >= 2.0 * std::f64::consts::PI {
        return Err(Error::Domain(format!(
            "lambda={lambda} outside the radius of convergence 2*pi"
        )));
    }
    let r = params.r as usize;
    if terms < r {
        return Err(Error::Domain(format!("need at least r={r} terms")));
    }
    let bits = precision_bits + 32;
    let lam = BigFloat::from_f64(lambda, bits);
    let mut acc = BigFloat::from_f64(1.0, bits);
    let mut lampow = hiprec::powi(&lam, r, bits);
    for n in r..=terms {
        let bn_u = normalized_bernoulli_poly(n).eval(&params.u);
        let sign = if (n - r + 1).is_multiple_of(2) { 1 } else { -1 };
        let coeff = Rational::from_integer(binomial(n - 1, r - 1) * BigInt::from(sign)) * bn_u;
        if !coeff.is_zero() {
            acc = acc.add(
                &hiprec::rational_to_float(&coeff, bits).mul(&lampow, bits, RM),
                bits,
                RM,
            );
        }
        lampow = lampow.mul(&lam, bits, RM);
    }
    // |b_n| <= 2 ζ(2) / (2π)^n for n >= 2 bounds the discarded tail by a
    // near-geometric series
    let q = lambda / (2.0 * std::f64::consts::PI);
    let t = terms + 1;
    let ratio = q * (t as f64 + 1.0) / (t as f64 - r as f64 + 2.0);
    let tail_bound = if ratio < 1.0 {
        let zeta2 = std::f64::consts::PI * std::f64::consts::PI / 3.0; // 2 ζ(2)
        let binom =
            crate::rational::rational_to_f64(&Rational::from_integer(binomial(t - 1, r - 1)));
        zeta2 * binom * q.powi(t as i32) / (1.0 - ratio)
    } else {
        f64::INFINITY
    };
    let mut value = acc;
    value
        .set_precision(precision_bits, RM)
        .map_err(|e| Error::Precision(format!("{e:?}")))?;
    Ok(ExpansionValue { value, tail_bound })
}

/// The truncated expansion as an exact polynomial in u, for rational λ:
/// `1 + Σ_{n=r}^{terms} (-1)^{n-r+1} C(n-1,r-1) λ^n b_n(u)`.
pub fn expansion_polynomial(r: usize, lambda: &Rational, terms: usize) -> RationalPolynomial {
    assert!(r >= 1 && terms >= r);
    let mut acc = RationalPolynomial::one();
    let mut lampow = lambda.clone();
    for _ in 1..r {
        lampow *= lambda;
    }
    for n in r..=terms {
        let sign = if (n - r + 1).is_multiple_of(2) { 1 } else { -1 };
        let c = Rational::from_integer(binomial(n - 1, r - 1) * BigInt::from(sign)) * &lampow;
        acc = acc + normalized_bernoulli_poly(n).scale(&c);
        lampow *= lambda;
    }
    acc
}
