//! Renewal process with beta(1, m) jumps: complex roots of the exponential
//! polynomial, the closed-form mean function, expected complete run length,
//! and exact root moments.
//!
//! With `E_m(x) = 1 + x + ... + x^m/m!` and roots `α_1, ..., α_m`, the mean
//! number of renewals by time `t ∈ [0,1]` is
//! `M(t) = -1 - Σ_k α_k^{-1} e^{-α_k t}`.
//! The roots are certified by their inverse power sums
//! (`Σ α_k^{-1} = -1`, `Σ α_k^{-j} = 0` for `2 <= j <= m`,
//! `Σ α_k^{-m-1} = 1/m!`), which pins the root set independently of the
//! iteration that produced it.

use num_bigint::BigInt;
use rand::Rng;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::hiprec::{self, BigFloat, Complex, RM};
use crate::rational::{factorial, falling_factorial, Rational};
use crate::rng::trial_rng;

/// Certified roots of `E_m` at a working precision.
#[derive(Clone, Debug)]
pub struct RootSet {
    pub m: usize,
    pub precision_bits: usize,
    /// Roots, conjugate-paired (exactly one real root when m is odd).
    pub roots: Vec<Complex>,
    /// `|m! E_m(α_k)|` per root.
    pub residuals: Vec<BigFloat>,
}

const MAX_ABERTH_ITERATIONS: usize = 400;

/// Find all m roots of `E_m` by simultaneous (Aberth) iteration from
/// perturbed-circle starting points, then enforce conjugate pairing and
/// certify residuals and inverse power sums.
pub fn exponential_poly_roots(m: usize, precision_bits: usize) -> Result<RootSet> {
    assert!(m >= 1);
    // Extra working bits: the absolute residual bound on m! E_m must beat
    // |α|^{m+1} rounding noise, and |α| grows linearly in m.
    let guard = 64 + ((m + 1) as f64 * (m.max(2) as f64).log2()).ceil() as usize;
    let wbits = precision_bits + guard;

    // coefficients of E_m: 1/k!
    let coeffs: Vec<BigFloat> = (0..=m)
        .map(|k| hiprec::rational_to_float(&Rational::new(BigInt::from(1), factorial(k)), wbits))
        .collect();
    // derivative E_m' = E_{m-1}
    let dcoeffs: Vec<BigFloat> = coeffs[..m].to_vec();

    let mut z: Vec<Complex> = initial_guesses(m, wbits);
    let tiny = -((precision_bits + 16) as i64);
    let mut converged = false;
    for _ in 0..MAX_ABERTH_ITERATIONS {
        let mut max_step_exp = i64::MIN;
        let mut next = z.clone();
        for i in 0..m {
            let p = eval_complex(&coeffs, &z[i], wbits);
            let dp = eval_complex(&dcoeffs, &z[i], wbits);
            if p.re.is_zero() && p.im.is_zero() {
                continue;
            }
            let w = p.div(&dp, wbits);
            let mut s = Complex::zero(wbits);
            for (j, zj) in z.iter().enumerate() {
                if j != i {
                    s = s.add(&z[i].sub(zj, wbits).recip(wbits), wbits);
                }
            }
            let denom = Complex::from_f64(1.0, 0.0, wbits).sub(&w.mul(&s, wbits), wbits);
            let step = w.div(&denom, wbits);
            next[i] = z[i].sub(&step, wbits);
            // relative step size, tracked through exponents
            let rel = step.abs(wbits).div(
                &z[i].abs(wbits).max(&BigFloat::from_f64(1e-30, wbits)),
                wbits,
                RM,
            );
            if let Some(e) = rel.exponent() {
                if !rel.is_zero() {
                    max_step_exp = max_step_exp.max(e as i64);
                }
            }
        }
        z = next;
        if max_step_exp < tiny {
            converged = true;
            break;
        }
    }
    if !converged {
        return Err(Error::NonConvergence(format!(
            "root iteration for E_{m} still moving after {MAX_ABERTH_ITERATIONS} sweeps"
        )));
    }

    let roots = pair_conjugates(z, m, precision_bits, wbits)?;

    // certification: residuals of m! E_m and the inverse power sums
    let int_coeffs: Vec<BigFloat> = (0..=m)
        .map(|k| hiprec::bigint_to_float(&(factorial(m) / factorial(k))))
        .collect();
    let residual_bound = hiprec::pow2(-((precision_bits / 2) as i64));
    let mut residuals = Vec::with_capacity(m);
    for root in &roots {
        let r = eval_complex(&int_coeffs, root, wbits).abs(wbits);
        if r.cmp(&residual_bound).unwrap_or(1) >= 0 {
            return Err(Error::NonConvergence(format!(
                "residual {} above 2^-{} for E_{m}",
                hiprec::float_to_f64(&r),
                precision_bits / 2
            )));
        }
        residuals.push(r);
    }
    certify_power_sums(&roots, m, precision_bits, wbits)?;

    Ok(RootSet {
        m,
        precision_bits,
        roots,
        residuals,
    })
}

fn initial_guesses(m: usize, wbits: usize) -> Vec<Complex> {
    let radius = (m as f64 / std::f64::consts::E).max(1.0);
    (0..m)
        .map(|j| {
            // perturbed circle: fixed angular jitter breaks any symmetric
            // stand-off between guesses and the conjugate root pairs
            let theta = 2.0 * std::f64::consts::PI * (j as f64 + 0.4) / m as f64
                + 0.2566 * (j as f64).sin();
            Complex::from_f64(radius * theta.cos(), radius * theta.sin(), wbits)
        })
        .collect()
}

fn eval_complex(coeffs: &[BigFloat], z: &Complex, bits: usize) -> Complex {
    let mut acc = Complex::zero(bits);
    for c in coeffs.iter().rev() {
        acc = acc.mul(z, bits);
        acc.re = acc.re.add(c, bits, RM);
    }
    acc
}

/// Force exact conjugate symmetry on the converged root cloud.
///
/// Genuinely complex roots sit far from the real axis while a converged real
/// root carries only rounding noise in its imaginary part, so a coarse
/// relative threshold separates the two reliably.
fn pair_conjugates(
    z: Vec<Complex>,
    m: usize,
    precision_bits: usize,
    wbits: usize,
) -> Result<Vec<Complex>> {
    let mut reals = Vec::new();
    let mut upper: Vec<Complex> = Vec::new();
    let mut lower: Vec<Complex> = Vec::new();
    for root in z {
        let scale = root.abs(wbits);
        let thresh = scale.mul(&hiprec::pow2(-(precision_bits as i64 / 4)), wbits, RM);
        if root.im.abs().cmp(&thresh).unwrap_or(1) <= 0 {
            reals.push(Complex::new(root.re.clone(), BigFloat::new(wbits)));
        } else if root.im.is_positive() {
            upper.push(root);
        } else {
            lower.push(root);
        }
    }
    if reals.len() != m % 2 || upper.len() != lower.len() {
        return Err(Error::NonConvergence(format!(
            "root classification failed for E_{m}: {} real, {} upper, {} lower",
            reals.len(),
            upper.len(),
            lower.len()
        )));
    }
    let mut roots = reals;
    let half = BigFloat::from_f64(0.5, wbits);
    let mut used = vec![false; lower.len()];
    for u in upper {
        // closest not-yet-matched lower-half root in conjugate distance
        let mut best: Option<(usize, BigFloat)> = None;
        for (i, l) in lower.iter().enumerate() {
            if used[i] {
                continue;
            }
            let d = u.sub(&l.conj(), wbits).abs(wbits);
            if best
                .as_ref()
                .map(|(_, bd)| d.cmp(bd).unwrap_or(1) < 0)
                .unwrap_or(true)
            {
                best = Some((i, d));
            }
        }
        let (i, _) = best.expect("upper and lower halves have equal size");
        used[i] = true;
        let l = &lower[i];
        let re = u.re.add(&l.re, wbits, RM).mul(&half, wbits, RM);
        let im = u.im.sub(&l.im, wbits, RM).mul(&half, wbits, RM);
        let root = Complex::new(re, im);
        roots.push(root.conj());
        roots.push(root);
    }
    Ok(roots)
}

fn certify_power_sums(
    roots: &[Complex],
    m: usize,
    precision_bits: usize,
    wbits: usize,
) -> Result<()> {
    let tol = hiprec::pow2(-(precision_bits as i64 - 16));
    for j in 1..=m + 1 {
        let mut sum = Complex::zero(wbits);
        for root in roots {
            let mut p = root.recip(wbits);
            let inv = p.clone();
            for _ in 1..j {
                p = p.mul(&inv, wbits);
            }
            sum = sum.add(&p, wbits);
        }
        let expect = if j == 1 {
            BigFloat::from_f64(-1.0, wbits)
        } else if j <= m {
            BigFloat::new(wbits)
        } else {
            hiprec::rational_to_float(&Rational::new(BigInt::from(1), factorial(m)), wbits)
        };
        let err_re = sum.re.sub(&expect, wbits, RM).abs();
        let err_im = sum.im.abs();
        if err_re.cmp(&tol).unwrap_or(1) > 0 || err_im.cmp(&tol).unwrap_or(1) > 0 {
            return Err(Error::NonConvergence(format!(
                "inverse power sum j={j} off by ({}, {}) for E_{m}",
                hiprec::float_to_f64(&err_re),
                hiprec::float_to_f64(&err_im),
            )));
        }
    }
    Ok(())
}

/// `M(t) = -1 - Σ_k α_k^{-1} e^{-α_k t}` for `t ∈ [0, 1]`; the imaginary
/// parts cancel across conjugate pairs and are checked against a tolerance.
pub fn mean_function(roots: &RootSet, t: &BigFloat) -> Result<BigFloat> {
    let one = BigFloat::from_f64(1.0, 64);
    if t.is_negative() || t.cmp(&one).unwrap_or(1) > 0 {
        return Err(Error::Domain(format!(
            "t = {} outside [0, 1]",
            hiprec::float_to_f64(t)
        )));
    }
    mean_function_derivative(roots, 0, t)
}

/// `k`-th derivative of the mean function: `M(t)` at k = 0, and
/// `M^{(k)}(t) = Σ_j (-α_j)^{k-1} e^{-α_j t}` for k >= 1.
pub fn mean_function_derivative(roots: &RootSet, k: usize, t: &BigFloat) -> Result<BigFloat> {
    let bits = roots.precision_bits;
    let wbits = bits + 32;
    let mut sum = Complex::zero(wbits);
    for alpha in &roots.roots {
        let exp_term = alpha.scale(t, wbits).neg().exp(wbits);
        let factor = if k == 0 {
            alpha.recip(wbits).neg()
        } else {
            let neg_alpha = alpha.neg();
            let mut p = Complex::from_f64(1.0, 0.0, wbits);
            for _ in 0..k.saturating_sub(1) {
                p = p.mul(&neg_alpha, wbits);
            }
            p
        };
        sum = sum.add(&factor.mul(&exp_term, wbits), wbits);
    }
    if k == 0 {
        sum.re = sum.re.sub(&BigFloat::from_f64(1.0, wbits), wbits, RM);
    }
    // conjugate pairing forces a real value; anything else means bad roots
    let scale = sum.re.abs().max(&BigFloat::from_f64(1.0, wbits));
    let tol = scale.mul(&hiprec::pow2(-(bits as i64 / 2)), wbits, RM);
    if sum.im.abs().cmp(&tol).unwrap_or(1) > 0 {
        return Err(Error::Precision(format!(
            "imaginary residue {} in the mean function at m={}",
            hiprec::float_to_f64(&sum.im),
            roots.m
        )));
    }
    let mut re = sum.re;
    re.set_precision(bits, RM)
        .map_err(|e| Error::Precision(format!("{e:?}")))?;
    Ok(re)
}

/// Expected length of the longest initial complete run over an infinite
/// supply of symbols with multiplicity m each: `1 + M(1)`.
pub fn expected_longest_run(m: usize, precision_bits: usize) -> Result<BigFloat> {
    let roots = exponential_poly_roots(m, precision_bits)?;
    let one = BigFloat::from_f64(1.0, precision_bits + 32);
    let m1 = mean_function(&roots, &one)?;
    Ok(m1.add(&one, precision_bits, RM))
}

/// Exact power sums of the roots, `μ(j, m) = Σ_k α_k^j`, by the falling
/// factorial recursion `μ(j,m) = (m)_{j+1} - Σ_{i<j} (m)_{i+1} μ(j-i-1, m)`.
pub fn root_moments(j: usize, m: usize) -> Rational {
    assert!(m >= 1);
    // μ(-1) = 0 anchors the recursion; build upward
    let mut mu: Vec<Rational> = Vec::with_capacity(j + 1);
    for jj in 0..=j {
        let mut acc = Rational::from_integer(falling_factorial(m as i64, jj + 1));
        for i in 0..jj {
            let coeff = Rational::from_integer(falling_factorial(m as i64, i + 1));
            acc -= coeff * &mu[jj - i - 1];
        }
        mu.push(acc);
    }
    mu[j].clone()
}

/// Monte Carlo estimate of the renewal count mean `E[N(t)]`.
#[derive(Clone, Copy, Debug)]
pub struct McEstimate {
    pub mean: f64,
    pub std_error: f64,
    pub trials: u64,
}

/// Simulate `N(t) = #{k : S_k <= t}` with beta(1, m) jumps.
pub fn renewal_mc_oracle(m: usize, t: f64, trials: u64, seed: u64) -> McEstimate {
    assert!(trials >= 1);
    let chunk: u64 = 1 << 14;
    let starts: Vec<u64> = (0..trials).step_by(chunk as usize).collect();
    let (sum, sumsq) = starts
        .par_iter()
        .map(|&start| {
            let end = (start + chunk).min(trials);
            let mut s = 0.0f64;
            let mut s2 = 0.0f64;
            for trial in start..end {
                let mut rng = trial_rng(seed, trial);
                let mut walk = 0.0f64;
                let mut count = 0u64;
                loop {
                    let u: f64 = rng.gen();
                    walk += beta_1m(u, m);
                    if walk <= t {
                        count += 1;
                    } else {
                        break;
                    }
                }
                s += count as f64;
                s2 += (count * count) as f64;
            }
            (s, s2)
        })
        .reduce(|| (0.0, 0.0), |a, b| (a.0 + b.0, a.1 + b.1));
    let n = trials as f64;
    let mean = sum / n;
    let var = (sumsq / n - mean * mean).max(0.0);
    McEstimate {
        mean,
        std_error: (var / n).sqrt(),
        trials,
    }
}

/// Inverse-CDF sample of beta(1, m): `1 - (1-u)^(1/m)`.
pub fn beta_1m(u: f64, m: usize) -> f64 {
    if m == 1 {
        u
    } else {
        1.0 - (1.0 - u).powf(1.0 / m as f64)
    }
}
