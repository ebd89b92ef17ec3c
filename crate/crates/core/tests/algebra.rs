use gburgers::diagnostics::{eigen_residuals, linv_round_trip_failures, moment_identity_error};
use gburgers::operators::{apply_s, hermite_mode, linv, OperatorSigma};
use gburgers::{BigRational, RationalSeries, TermKey, Truncation};
use proptest::prelude::*;

fn q(n: i64, d: i64) -> BigRational {
    BigRational::new(n.into(), d.into())
}

fn wide() -> Truncation {
    Truncation::new(24, 12, 6).unwrap()
}

/// Small series whose products and derivatives stay inside `wide()`.
fn series(max_gauss: u32) -> impl Strategy<Value = RationalSeries> {
    prop::collection::vec((0..=max_gauss, 0u32..=4, 0u32..=3, 0u32..=1, -9i64..=9, 1i64..=6), 0..6).prop_map(
        |terms| {
            RationalSeries::from_terms(
                terms.into_iter().map(|(k, n, p, th, a, b)| (TermKey::new(k, n, p, th), q(a, b))),
            )
        },
    )
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn addition_is_a_group(a in series(3), b in series(3), c in series(3)) {
        prop_assert_eq!(a.add(&b), b.add(&a));
        prop_assert_eq!(a.add(&b).add(&c), a.add(&b.add(&c)));
        prop_assert!(a.sub(&a).is_empty());
        prop_assert_eq!(a.add(&RationalSeries::zero()), a.clone());
    }

    #[test]
    fn multiplication_is_commutative_and_distributes(a in series(3), b in series(3), c in series(3)) {
        let t = wide();
        prop_assert_eq!(a.mul(&b, &t), b.mul(&a, &t));
        prop_assert_eq!(a.mul(&b.add(&c), &t), a.mul(&b, &t).add(&a.mul(&c, &t)));
        prop_assert_eq!(a.mul(&b, &t).mul(&c, &t), a.mul(&b.mul(&c, &t), &t));
    }

    #[test]
    fn zeta_derivative_obeys_product_rule(a in series(3), b in series(3)) {
        let t = wide();
        let lhs = a.mul(&b, &t).diff_zeta();
        let rhs = a.diff_zeta().mul(&b, &t).add(&a.mul(&b.diff_zeta(), &t));
        prop_assert_eq!(lhs, rhs);
    }

    #[test]
    fn amplitude_derivative_obeys_product_rule(a in series(3), b in series(3)) {
        let t = wide();
        let lhs = a.mul(&b, &t).diff_amp();
        let rhs = a.diff_amp().mul(&b, &t).add(&a.mul(&b.diff_amp(), &t));
        prop_assert_eq!(lhs, rhs);
    }

    #[test]
    fn evaluation_is_a_ring_homomorphism(a in series(2), b in series(2), z in -3.0f64..3.0, amp in -1.0f64..1.0) {
        let t = wide();
        let sum = a.add(&b).evaluate(z, amp, 0.5);
        let prod = a.mul(&b, &t).evaluate(z, amp, 0.5);
        let (ea, eb) = (a.evaluate(z, amp, 0.5), b.evaluate(z, amp, 0.5));
        prop_assert!((sum - ea - eb).abs() <= 1e-9 * (1.0 + ea.abs() + eb.abs()));
        prop_assert!((prod - ea * eb).abs() <= 1e-9 * (1.0 + (ea * eb).abs()));
    }

    #[test]
    fn hermite_modes_have_parity(l in 0u32..12, z in -4.0f64..4.0) {
        let m = hermite_mode::<BigRational>(l);
        prop_assert!(m.keys().all(|k| k.zeta % 2 == l % 2 && k.gauss == 1));
        let sign = if l % 2 == 0 { 1.0 } else { -1.0 };
        let (p, n) = (m.evaluate(z, 1.0, 0.0), m.evaluate(-z, 1.0, 0.0));
        prop_assert!((p - sign * n).abs() <= 1e-9 * (1.0 + p.abs()));
    }

    #[test]
    fn eigenrelation_for_any_rational_sigma(num in -20i64..20, den in 1i64..8) {
        let sigma = q(num, den);
        prop_assert!(eigen_residuals(&sigma, 7).iter().all(|r| r.is_empty()));
    }

    #[test]
    fn inverse_round_trip(rhs in prop::collection::vec((2u32..=4, 0u32..=5, 1u32..=3, -9i64..=9, 1i64..=5), 1..5)) {
        let rhs = RationalSeries::from_terms(
            rhs.into_iter().map(|(k, n, p, a, b)| (TermKey::new(k, n, p, 0), q(a, b))),
        );
        let t = Truncation::new(12, 6, 1).unwrap();
        prop_assert_eq!(linv_round_trip_failures(std::slice::from_ref(&rhs), &t, 8), 0);
    }

    #[test]
    fn odd_single_gaussian_terms_invert_exactly(n in 0u32..6, c in 1i64..9) {
        let rhs = RationalSeries::monomial(TermKey::new(1, 2 * n + 1, 1, 0), q(c, 1));
        let t = Truncation::new(20, 2, 1).unwrap();
        let w = linv(&rhs, &t).unwrap();
        prop_assert!(w.keys().all(|k| k.zeta <= 2 * n + 1));
        prop_assert_eq!(apply_s(&OperatorSigma::critical(), &w, &t), rhs);
    }
}

#[test]
fn moment_identity_matches_quadrature() {
    assert!(moment_identity_error(8, 6) <= 1e-12);
}

#[test]
fn kernel_is_the_gaussian() {
    let g = RationalSeries::amplitude_mode();
    let t = wide();
    assert!(apply_s(&OperatorSigma::critical(), &g, &t).is_empty());
    // a non-critical operator only scales it
    let op = OperatorSigma::new(q(1, 2));
    assert_eq!(apply_s(&op, &g, &t), g.scale(&q(-1, 2)));
}
