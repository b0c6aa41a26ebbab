//! Arbitrary-precision real and complex floating point, built on
//! [`astro_float`].
//!
//! All exact work in this crate happens in rationals; this module is the
//! single place where values cross into floating point. Every operation takes
//! an explicit mantissa precision in bits. Rounding is to nearest-even unless
//! a directed bound is requested.

use std::cell::RefCell;

pub use astro_float::{BigFloat, RoundingMode, Sign};
use astro_float::{Consts, Exponent};
use num_bigint::BigInt;
use num_traits::Zero;

use crate::rational::Rational;

pub const RM: RoundingMode = RoundingMode::ToEven;

thread_local! {
    static CONSTS: RefCell<Consts> = RefCell::new(Consts::new().expect("constants cache"));
}

/// Run `f` with the thread-local constants cache.
pub fn with_consts<T>(f: impl FnOnce(&mut Consts) -> T) -> T {
    CONSTS.with(|cc| f(&mut cc.borrow_mut()))
}

/// Pi at `bits` of precision.
pub fn pi(bits: usize) -> BigFloat {
    with_consts(|cc| cc.pi(bits, RM))
}

/// The power `2^k` as an exact float.
pub fn pow2(k: i64) -> BigFloat {
    let mut one = BigFloat::from_word(1, 64);
    one.set_exponent((k + 1) as Exponent);
    one
}

/// Exact conversion of a big integer (no rounding; full bit length kept).
pub fn bigint_to_float(n: &BigInt) -> BigFloat {
    if n.is_zero() {
        return BigFloat::from_word(0, 64);
    }
    let (sign, words) = n.to_u64_digits();
    let e = (words.len() * 64) as Exponent;
    let s = if sign == num_bigint::Sign::Minus {
        Sign::Neg
    } else {
        Sign::Pos
    };
    BigFloat::from_words(&words, s, e)
}

/// Convert a rational to a float with `bits` of mantissa (one rounding).
pub fn rational_to_float(q: &Rational, bits: usize) -> BigFloat {
    rational_to_float_rm(q, bits, RM)
}

/// Directed-rounding variant of [`rational_to_float`].
pub fn rational_to_float_rm(q: &Rational, bits: usize, rm: RoundingMode) -> BigFloat {
    let n = bigint_to_float(q.numer());
    let d = bigint_to_float(q.denom());
    n.div(&d, bits, rm)
}

/// Convert to `f64`, saturating out-of-range exponents.
pub fn float_to_f64(x: &BigFloat) -> f64 {
    if x.is_nan() {
        return f64::NAN;
    }
    if x.is_inf_pos() {
        return f64::INFINITY;
    }
    if x.is_inf_neg() {
        return f64::NEG_INFINITY;
    }
    if x.is_zero() {
        return 0.0;
    }
    let Some((words, _, sign, e, _)) = x.as_raw_parts() else {
        return f64::NAN;
    };
    let hi = *words.last().unwrap() as f64;
    let lo = if words.len() > 1 {
        words[words.len() - 2] as f64
    } else {
        0.0
    };
    // mantissa interpreted as a binary fraction in [1/2, 1)
    let frac = hi * 2f64.powi(-64) + lo * 2f64.powi(-128);
    let val = if e > 1030 {
        f64::INFINITY
    } else if e < -1060 {
        0.0
    } else {
        frac * 2f64.powi(e)
    };
    if sign == Sign::Neg {
        -val
    } else {
        val
    }
}

pub fn exp(x: &BigFloat, bits: usize) -> BigFloat {
    with_consts(|cc| x.exp(bits, RM, cc))
}

pub fn sin(x: &BigFloat, bits: usize) -> BigFloat {
    with_consts(|cc| x.sin(bits, RM, cc))
}

pub fn cos(x: &BigFloat, bits: usize) -> BigFloat {
    with_consts(|cc| x.cos(bits, RM, cc))
}

pub fn sqrt(x: &BigFloat, bits: usize) -> BigFloat {
    x.sqrt(bits, RM)
}

/// `x^n` by binary powering at `bits` precision.
pub fn powi(x: &BigFloat, n: usize, bits: usize) -> BigFloat {
    x.powi(n, bits, RM)
}

/// Complex number with [`BigFloat`] parts.
#[derive(Clone, Debug)]
pub struct Complex {
    pub re: BigFloat,
    pub im: BigFloat,
}

impl Complex {
    pub fn new(re: BigFloat, im: BigFloat) -> Self {
        Self { re, im }
    }

    pub fn zero(bits: usize) -> Self {
        Self::new(BigFloat::new(bits), BigFloat::new(bits))
    }

    pub fn from_f64(re: f64, im: f64, bits: usize) -> Self {
        Self::new(BigFloat::from_f64(re, bits), BigFloat::from_f64(im, bits))
    }

    pub fn conj(&self) -> Self {
        Self::new(self.re.clone(), self.im.neg())
    }

    pub fn add(&self, rhs: &Self, bits: usize) -> Self {
        Self::new(
            self.re.add(&rhs.re, bits, RM),
            self.im.add(&rhs.im, bits, RM),
        )
    }

    pub fn sub(&self, rhs: &Self, bits: usize) -> Self {
        Self::new(
            self.re.sub(&rhs.re, bits, RM),
            self.im.sub(&rhs.im, bits, RM),
        )
    }

    pub fn mul(&self, rhs: &Self, bits: usize) -> Self {
        let ac = self.re.mul(&rhs.re, bits, RM);
        let bd = self.im.mul(&rhs.im, bits, RM);
        let ad = self.re.mul(&rhs.im, bits, RM);
        let bc = self.im.mul(&rhs.re, bits, RM);
        Self::new(ac.sub(&bd, bits, RM), ad.add(&bc, bits, RM))
    }

    pub fn scale(&self, s: &BigFloat, bits: usize) -> Self {
        Self::new(self.re.mul(s, bits, RM), self.im.mul(s, bits, RM))
    }

    pub fn neg(&self) -> Self {
        Self::new(self.re.neg(), self.im.neg())
    }

    pub fn div(&self, rhs: &Self, bits: usize) -> Self {
        let denom = rhs
            .re
            .mul(&rhs.re, bits, RM)
            .add(&rhs.im.mul(&rhs.im, bits, RM), bits, RM);
        let num = self.mul(&rhs.conj(), bits);
        Self::new(num.re.div(&denom, bits, RM), num.im.div(&denom, bits, RM))
    }

    pub fn recip(&self, bits: usize) -> Self {
        Complex::from_f64(1.0, 0.0, bits).div(self, bits)
    }

    /// Modulus `sqrt(re^2 + im^2)`.
    pub fn abs(&self, bits: usize) -> BigFloat {
        let s = self
            .re
            .mul(&self.re, bits, RM)
            .add(&self.im.mul(&self.im, bits, RM), bits, RM);
        s.sqrt(bits, RM)
    }

    /// Complex exponential `e^re (cos im + i sin im)`.
    pub fn exp(&self, bits: usize) -> Self {
        let r = exp(&self.re, bits);
        Self::new(
            r.mul(&cos(&self.im, bits), bits, RM),
            r.mul(&sin(&self.im, bits), bits, RM),
        )
    }

    pub fn is_nan(&self) -> bool {
        self.re.is_nan() || self.im.is_nan()
    }

    pub fn to_f64_pair(&self) -> (f64, f64) {
        (float_to_f64(&self.re), float_to_f64(&self.im))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::rat;

    #[test]
    fn rational_round_trip() {
        let x = rational_to_float(&rat(3, 2), 128);
        assert_eq!(float_to_f64(&x), 1.5);
        let y = rational_to_float(&rat(-1, 3), 128);
        assert!((float_to_f64(&y) + 1.0 / 3.0).abs() < 1e-16);
        let z = rational_to_float(&rat(0, 1), 128);
        assert_eq!(float_to_f64(&z), 0.0);
    }

    #[test]
    fn big_integers_convert_exactly() {
        let n: BigInt = BigInt::from(1u64) << 200;
        let x = bigint_to_float(&(n.clone() + 1));
        let y = bigint_to_float(&n);
        let d = x.sub(&y, 256, RM);
        assert_eq!(float_to_f64(&d), 1.0);
    }

    #[test]
    fn pi_and_powers_of_two() {
        let p = pi(128);
        assert!((float_to_f64(&p) - std::f64::consts::PI).abs() < 1e-15);
        assert_eq!(float_to_f64(&pow2(-3)), 0.125);
        assert_eq!(float_to_f64(&pow2(10)), 1024.0);
    }

    #[test]
    fn transcendentals() {
        let one = BigFloat::from_f64(1.0, 128);
        assert!((float_to_f64(&exp(&one, 128)) - 1.0f64.exp()).abs() < 1e-15);
        assert!((float_to_f64(&sin(&one, 128)) - 1.0f64.sin()).abs() < 1e-15);
        assert!((float_to_f64(&cos(&one, 128)) - 1.0f64.cos()).abs() < 1e-15);
    }

    #[test]
    fn complex_arithmetic() {
        let bits = 128;
        let a = Complex::from_f64(1.0, 2.0, bits);
        let b = Complex::from_f64(-3.0, 0.5, bits);
        let prod = a.mul(&b, bits);
        let (re, im) = prod.to_f64_pair();
        assert!((re - (1.0 * -3.0 - 2.0 * 0.5)).abs() < 1e-14);
        assert!((im - (1.0 * 0.5 + 2.0 * -3.0)).abs() < 1e-14);
        let q = a.div(&b, bits);
        let back = q.mul(&b, bits);
        let (re, im) = back.to_f64_pair();
        assert!((re - 1.0).abs() < 1e-14);
        assert!((im - 2.0).abs() < 1e-14);
        // e^{i pi} = -1
        let ipi = Complex::new(BigFloat::new(bits), pi(bits));
        let (re, im) = ipi.exp(bits).to_f64_pair();
        assert!((re + 1.0).abs() < 1e-15);
        assert!(im.abs() < 1e-15);
    }
}
