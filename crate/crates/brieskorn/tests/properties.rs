//! Randomized algebra laws for the truncated series layer: ring axioms
//! over both coefficient domains, the calculus rules the deformation
//! code leans on, and the composition round trips behind the orbit
//! action.

use brieskorn::poly::Poly;
use brieskorn::series::MultiSeries;
use brieskorn::{Rational, Ring};
use proptest::prelude::*;

fn rat() -> impl Strategy<Value = Rational> {
    (-6i64..=6, 1i64..=4).prop_map(|(n, d)| Rational::new(n, d))
}

/// Sparse series in two variables, total degree capped at 5.
fn series2() -> impl Strategy<Value = MultiSeries<Rational>> {
    proptest::collection::vec(((0u32..=3, 0u32..=2), rat()), 0..6).prop_map(|terms| {
        let mut s = MultiSeries::zero(2, 5);
        for ((i, j), c) in terms {
            s = s.add(&MultiSeries::monomial(2, 5, &[i, j], c).unwrap());
        }
        s
    })
}

/// Low-degree variant whose pairwise products stay under the bound, so
/// multiplication is exact rather than truncated.
fn short_series2() -> impl Strategy<Value = MultiSeries<Rational>> {
    proptest::collection::vec(((0u32..=1, 0u32..=1), rat()), 0..5).prop_map(|terms| {
        let mut s = MultiSeries::zero(2, 5);
        for ((i, j), c) in terms {
            s = s.add(&MultiSeries::monomial(2, 5, &[i, j], c).unwrap());
        }
        s
    })
}

fn small_poly() -> impl Strategy<Value = Poly> {
    (-3i64..=3, -3i64..=3, -3i64..=3).prop_map(|(a, b, c)| {
        Poly::constant(Rational::from_int(a))
            .add(&Poly::var(0).mul(&Poly::constant(Rational::from_int(b))))
            .add(&Poly::var(1).mul(&Poly::constant(Rational::from_int(c))))
    })
}

/// Univariate series over a polynomial scalar ring, bound 4.
fn poly_series() -> impl Strategy<Value = MultiSeries<Poly>> {
    proptest::collection::vec(small_poly(), 1..5).prop_map(|coeffs| {
        MultiSeries::from_univariate_coeffs(4, &coeffs)
    })
}

/// Univariate series with zero constant term and invertible linear
/// coefficient, the domain of compositional inversion.
fn invertible_univariate() -> impl Strategy<Value = MultiSeries<Rational>> {
    (
        prop_oneof![Just(1i64), Just(-1), Just(2), Just(-3)],
        proptest::collection::vec(rat(), 0..5),
    )
        .prop_map(|(lin, tail)| {
            let mut coeffs = vec![Rational::zero(), Rational::from_int(lin)];
            coeffs.extend(tail);
            MultiSeries::from_univariate_coeffs(6, &coeffs)
        })
}

proptest! {
    #[test]
    fn addition_and_multiplication_satisfy_the_ring_axioms(
        f in series2(),
        g in series2(),
        k in series2(),
    ) {
        let one = MultiSeries::<Rational>::one(2, 5);
        let zero = MultiSeries::<Rational>::zero(2, 5);

        prop_assert_eq!(f.add(&g), g.add(&f));
        prop_assert_eq!(f.add(&g).add(&k), f.add(&g.add(&k)));
        prop_assert_eq!(f.add(&zero), f.clone());
        prop_assert_eq!(f.add(&f.neg()), zero.clone());
        prop_assert_eq!(f.sub(&g), f.add(&g.neg()));

        prop_assert_eq!(f.mul(&g), g.mul(&f));
        prop_assert_eq!(f.mul(&g).mul(&k), f.mul(&g.mul(&k)));
        prop_assert_eq!(f.mul(&one), f.clone());
        prop_assert_eq!(f.mul(&zero), zero.clone());
        prop_assert_eq!(f.mul(&g.add(&k)), f.mul(&g).add(&f.mul(&k)));
    }

    #[test]
    fn polynomial_coefficients_satisfy_the_same_axioms(
        f in poly_series(),
        g in poly_series(),
        k in poly_series(),
    ) {
        let one = MultiSeries::<Poly>::one(1, 4);

        prop_assert_eq!(f.add(&g), g.add(&f));
        prop_assert_eq!(f.mul(&g), g.mul(&f));
        prop_assert_eq!(f.mul(&g).mul(&k), f.mul(&g.mul(&k)));
        prop_assert_eq!(f.mul(&one), f.clone());
        prop_assert_eq!(f.mul(&g.add(&k)), f.mul(&g).add(&f.mul(&k)));
        prop_assert_eq!(f.sub(&f), MultiSeries::zero(1, 4));
    }

    #[test]
    fn unit_inverse_is_a_two_sided_reciprocal(c0 in rat(), f in series2()) {
        prop_assume!(!c0.is_zero());
        let g = f
            .sub(&MultiSeries::constant(2, 5, f.constant_term()))
            .add(&MultiSeries::constant(2, 5, c0));
        let inv = g.unit_inverse().unwrap();
        let one = MultiSeries::<Rational>::one(2, 5);
        prop_assert_eq!(g.mul(&inv), one.clone());
        prop_assert_eq!(inv.mul(&g), one);
    }

    #[test]
    fn differentiation_obeys_the_product_rule(f in series2(), g in series2()) {
        // A product truncated at total degree 5 only determines its
        // derivative through degree 4, so compare there.
        for var in 0..2 {
            let lhs = f.mul(&g).partial_derivative(var).unwrap().truncated(4);
            let rhs = f
                .partial_derivative(var)
                .unwrap()
                .mul(&g)
                .add(&f.mul(&g.partial_derivative(var).unwrap()))
                .truncated(4);
            prop_assert_eq!(lhs, rhs);
        }
    }

    #[test]
    fn mixed_partials_commute(f in series2()) {
        let xy = f.partial_derivative(0).unwrap().partial_derivative(1).unwrap();
        let yx = f.partial_derivative(1).unwrap().partial_derivative(0).unwrap();
        prop_assert_eq!(xy.truncated(3), yx.truncated(3));
    }

    #[test]
    fn composition_distributes_over_products(
        f in proptest::collection::vec(rat(), 1..6),
        g in proptest::collection::vec(rat(), 1..6),
        inner in invertible_univariate(),
    ) {
        let f = MultiSeries::from_univariate_coeffs(6, &f);
        let g = MultiSeries::from_univariate_coeffs(6, &g);
        let lhs = f.mul(&g).compose_univariate(&inner).unwrap();
        let rhs = f
            .compose_univariate(&inner)
            .unwrap()
            .mul(&g.compose_univariate(&inner).unwrap());
        prop_assert_eq!(lhs, rhs);
    }

    #[test]
    fn compositional_inverse_round_trips_both_ways(f in invertible_univariate()) {
        let back = f.compositional_inverse().unwrap();
        let s = MultiSeries::var(1, 6, 0).unwrap();
        prop_assert_eq!(f.compose_univariate(&back).unwrap(), s.clone());
        prop_assert_eq!(back.compose_univariate(&f).unwrap(), s);
    }

    #[test]
    fn evaluation_respects_sums_and_low_degree_products(
        f in short_series2(),
        g in short_series2(),
        x in rat(),
        y in rat(),
    ) {
        // Factors of degree <= 2 multiply exactly under the bound of 5,
        // so evaluation is a ring homomorphism on them.
        let point = [x, y];
        let fv = f.eval(&point);
        let gv = g.eval(&point);
        prop_assert_eq!(f.add(&g).eval(&point), fv.add(&gv));
        prop_assert_eq!(f.mul(&g).eval(&point), fv.mul(&gv));
    }
}
