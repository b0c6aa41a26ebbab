//! Exact rational scalars and integer combinatorial helpers.
//!
//! `Rational` is an arbitrary-precision signed rational, always stored in
//! lowest terms with a positive denominator (both guaranteed by
//! [`num_rational::BigRational`]). Every scalar the exact layers of this crate
//! touch is one of these; floating point only ever appears as a final
//! conversion.

use num_bigint::{BigInt, Sign};
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};

/// Arbitrary-precision rational number in lowest terms, denominator > 0.
pub type Rational = num_rational::BigRational;

/// `n/d` as a rational. Panics if `d == 0`.
pub fn rat(n: i64, d: i64) -> Rational {
    Rational::new(BigInt::from(n), BigInt::from(d))
}

/// The integer `n` as a rational.
pub fn rat_int(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

/// `n!` as a big integer.
pub fn factorial(n: usize) -> BigInt {
    let mut acc = BigInt::one();
    for k in 2..=n {
        acc *= BigInt::from(k);
    }
    acc
}

/// Binomial coefficient `C(n, k)`; zero when `k > n`.
pub fn binomial(n: usize, k: usize) -> BigInt {
    if k > n {
        return BigInt::zero();
    }
    let k = k.min(n - k);
    let mut num = BigInt::one();
    for i in 0..k {
        num *= BigInt::from(n - i);
    }
    num / factorial(k)
}

/// Falling factorial `(x)_k = x (x-1) ... (x-k+1)` for integer `x`.
pub fn falling_factorial(x: i64, k: usize) -> BigInt {
    let mut acc = BigInt::one();
    for i in 0..k {
        acc *= BigInt::from(x - i as i64);
    }
    acc
}

/// Parse a rational from `"p/q"`, a plain integer, or a decimal like `"0.25"`.
pub fn parse_rational(s: &str) -> Result<Rational> {
    let s = s.trim();
    if let Some((num, den)) = s.split_once('/') {
        let n: BigInt = num
            .trim()
            .parse()
            .map_err(|_| Error::Parse(format!("bad numerator in {s:?}")))?;
        let d: BigInt = den
            .trim()
            .parse()
            .map_err(|_| Error::Parse(format!("bad denominator in {s:?}")))?;
        if d.is_zero() {
            return Err(Error::Parse(format!("zero denominator in {s:?}")));
        }
        return Ok(Rational::new(n, d));
    }
    if let Some((int_part, frac_part)) = s.split_once('.') {
        let negative = int_part.trim_start().starts_with('-');
        let i: BigInt = if int_part.is_empty() || int_part == "-" {
            BigInt::zero()
        } else {
            int_part
                .parse()
                .map_err(|_| Error::Parse(format!("bad decimal {s:?}")))?
        };
        if frac_part.is_empty() || !frac_part.bytes().all(|b| b.is_ascii_digit()) {
            return Err(Error::Parse(format!("bad decimal {s:?}")));
        }
        let f: BigInt = frac_part
            .parse()
            .map_err(|_| Error::Parse(format!("bad decimal {s:?}")))?;
        let scale = BigInt::from(10u32).pow(frac_part.len() as u32);
        let frac = Rational::new(f, scale);
        let int = Rational::from_integer(i.clone());
        return Ok(if negative || i.sign() == Sign::Minus {
            int - frac
        } else {
            int + frac
        });
    }
    let n: BigInt = s
        .parse()
        .map_err(|_| Error::Parse(format!("bad rational {s:?}")))?;
    Ok(Rational::from_integer(n))
}

/// Render as `"p/q"`, or just `"p"` when the value is an integer.
pub fn format_rational(q: &Rational) -> String {
    if q.denom().is_one() {
        q.numer().to_string()
    } else {
        format!("{}/{}", q.numer(), q.denom())
    }
}

/// Round to the nearest integer below (floor) as a big integer.
pub fn rational_floor(q: &Rational) -> BigInt {
    q.floor().to_integer()
}

/// Best-effort conversion to `f64` (numerator/denominator in floats after
/// scaling); used only for diagnostics, never inside exact computations.
pub fn rational_to_f64(q: &Rational) -> f64 {
    // Scale so both parts fit comfortably in f64 range.
    let nbits = q.numer().bits() as i64;
    let dbits = q.denom().bits() as i64;
    let shift = (nbits.max(dbits) - 900).max(0) as u64;
    let n = q.numer() >> shift;
    let d = q.denom() >> shift;
    let nf = bigint_to_f64(&n);
    let df = bigint_to_f64(&d);
    if df == 0.0 {
        return if q.is_negative() {
            f64::NEG_INFINITY
        } else {
            f64::INFINITY
        };
    }
    nf / df
}

fn bigint_to_f64(n: &BigInt) -> f64 {
    let (sign, digits) = n.to_u64_digits();
    let mut acc = 0.0f64;
    for d in digits.iter().rev() {
        acc = acc * 1.8446744073709552e19 + *d as f64; // 2^64
    }
    if sign == Sign::Minus {
        -acc
    } else {
        acc
    }
}
