//! Exact arithmetic for the circle-convolution construction of Bernoulli
//! polynomials and the combinatorics it encodes.
//!
//! The library is organised around one idea: the factorially normalized
//! Bernoulli polynomial `b_n` is, up to sign, the n-fold circular convolution
//! of `b_1(x) = x - 1/2` with itself, and `1 - 2^n b_n` is the density on the
//! circle of a sum of n independent beta(1,2) variables. Everything downstream
//! (index distributions of multiset clock scans, descent/lap counts, beta-sum
//! CDFs, renewal means with beta jumps, wrapped gamma densities) is computed
//! from that picture, in exact rational arithmetic wherever the quantity is
//! rational and in configurable-precision floats where it is not.
//!
//! Modules:
//! - [`rational`]: big-rational scalars and integer combinatorial helpers
//! - [`poly`]: dense univariate polynomials over the rationals
//! - [`bernoulli`]: Bernoulli numbers and (normalized) Bernoulli polynomials
//! - [`conv`]: exact circular convolution of polynomials on [0,1)
//! - [`bernstein`]: Bernstein density basis, index distributions, probes
//! - [`clock`]: multiset clock simulation, enumeration and Markov recursions
//! - [`sumdist`]: exact CDFs of beta sums, lap laws and permutation counts
//! - [`renewal`]: roots of exponential polynomials and renewal mean functions
//! - [`wrapped`]: wrapped gamma densities and their Bernoulli expansions
//! - [`hiprec`]: arbitrary-precision real/complex floating point helpers

pub mod bernoulli;
pub mod bernstein;
pub mod clock;
pub mod conv;
pub mod error;
pub mod hiprec;
pub mod poly;
pub mod rational;
pub mod renewal;
pub mod rng;
pub mod sumdist;
pub mod wrapped;

pub use error::Error;
pub use poly::RationalPolynomial;
pub use rational::Rational;

/// Default mantissa precision (bits) for floating-point evaluation.
pub const DEFAULT_PRECISION_BITS: usize = 128;
