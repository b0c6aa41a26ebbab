//! Property tests: algebraic laws of the circular convolution, basis
//! round-trips, and parsing inverses on randomized inputs.

use num_bigint::BigInt;
use proptest::prelude::*;

use bernoulli_clock::bernstein::polynomial_to_bernstein;
use bernoulli_clock::clock::{next_permutation, MultisetSpec};
use bernoulli_clock::conv::{circular_conv, CircleFunctionPoly};
use bernoulli_clock::poly::RationalPolynomial;
use bernoulli_clock::rational::{format_rational, parse_rational, Rational};

fn rational_strategy() -> impl Strategy<Value = Rational> {
    (-40i64..=40, 1i64..=12).prop_map(|(n, d)| Rational::new(BigInt::from(n), BigInt::from(d)))
}

fn poly_strategy(max_len: usize) -> impl Strategy<Value = RationalPolynomial> {
    prop::collection::vec(rational_strategy(), 0..=max_len)
        .prop_map(RationalPolynomial::from_coeffs)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn convolution_commutes(f in poly_strategy(6), g in poly_strategy(6)) {
        let fg = circular_conv(&CircleFunctionPoly(f.clone()), &CircleFunctionPoly(g.clone()));
        let gf = circular_conv(&CircleFunctionPoly(g), &CircleFunctionPoly(f));
        prop_assert_eq!(fg.0, gf.0);
    }

    #[test]
    fn convolution_associates(
        f in poly_strategy(6),
        g in poly_strategy(6),
        h in poly_strategy(6),
    ) {
        let f = CircleFunctionPoly(f);
        let g = CircleFunctionPoly(g);
        let h = CircleFunctionPoly(h);
        let left = circular_conv(&circular_conv(&f, &g), &h);
        let right = circular_conv(&f, &circular_conv(&g, &h));
        prop_assert_eq!(left.0, right.0);
    }

    #[test]
    fn convolution_multiplies_means(f in poly_strategy(5), g in poly_strategy(5)) {
        let conv = circular_conv(&CircleFunctionPoly(f.clone()), &CircleFunctionPoly(g.clone()));
        prop_assert_eq!(
            conv.0.integral_unit_interval(),
            f.integral_unit_interval() * g.integral_unit_interval()
        );
    }

    #[test]
    fn bernstein_round_trip(p in poly_strategy(6), extra in 0usize..3) {
        let n_basis = p.coeffs().len().max(1) + extra;
        let e = polynomial_to_bernstein(&p, n_basis).unwrap();
        prop_assert_eq!(e.to_polynomial(), p);
    }

    #[test]
    fn rational_text_round_trip(q in rational_strategy()) {
        prop_assert_eq!(parse_rational(&format_rational(&q)).unwrap(), q);
    }

    #[test]
    fn permutation_stream_is_sorted_and_complete(
        multiplicities in prop::collection::vec(1u32..=3, 1..=4)
    ) {
        let spec = MultisetSpec::new(multiplicities).unwrap();
        prop_assume!(spec.total() <= 9);
        let mut perm = spec.first_permutation();
        let mut count = BigInt::from(1);
        let mut prev = perm.clone();
        while next_permutation(&mut perm) {
            prop_assert!(perm > prev, "lexicographic order violated");
            prev = perm.clone();
            count += 1;
        }
        prop_assert_eq!(count, spec.permutation_count());
    }
}
