mod common;

use common::{polynomial, P};
use fischer_core::json::{parse_poly, poly_to_json, AnyPoly};
use fischer_core::{Degree, Poly};
use proptest::prelude::*;

fn dim_and_polys(max_degree: usize) -> impl Strategy<Value = (P, P, P)> {
    (1usize..=3).prop_flat_map(move |d| (polynomial(d, max_degree), polynomial(d, max_degree), polynomial(d, max_degree)))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn star_is_a_multiplicative_involution((p, q, _) in dim_and_polys(4)) {
        prop_assert_eq!(p.star().star(), p.clone());
        prop_assert_eq!((&p * &q).star(), &p.star() * &q.star());
    }

    #[test]
    fn differential_operators_compose((q1, q2, f) in dim_and_polys(3)) {
        let f = &f * &f;
        let nested = Poly::apply_diff_op(&q1, &Poly::apply_diff_op(&q2, &f).unwrap()).unwrap();
        prop_assert_eq!(nested, Poly::apply_diff_op(&(&q1 * &q2), &f).unwrap());
    }

    #[test]
    fn degree_is_additive((p, q, _) in dim_and_polys(4)) {
        prop_assume!(!p.is_zero() && !q.is_zero());
        let (Degree::Finite(a), Degree::Finite(b)) = (p.degree(), q.degree()) else { unreachable!() };
        prop_assert_eq!((&p * &q).degree(), Degree::Finite(a + b));
    }

    #[test]
    fn homogeneous_components_sum_to_the_polynomial((p, _, _) in dim_and_polys(5)) {
        let sum = p.homogeneous_components().values().fold(P::zero(p.dim()), |acc, c| &acc + c);
        prop_assert_eq!(sum, p);
    }

    #[test]
    fn float_backend_tracks_exact((p, q, f) in dim_and_polys(4)) {
        let exact = Poly::apply_diff_op(&p, &(&q * &f)).unwrap();
        let float = Poly::apply_diff_op(&p.to_float(), &(&q.to_float() * &f.to_float())).unwrap();
        let scale = exact.to_float().max_abs_coeff().max(1.0);
        prop_assert!((&float - &exact.to_float()).max_abs_coeff() <= 1e-12 * scale);
    }

    #[test]
    fn json_round_trip_is_identity((p, _, _) in dim_and_polys(5)) {
        prop_assert_eq!(parse_poly(&poly_to_json(&p)).unwrap(), AnyPoly::Exact(p.clone()));
        // A float file without terms is indistinguishable from an exact one.
        if !p.is_zero() {
            let f = p.to_float();
            prop_assert_eq!(parse_poly(&poly_to_json(&f)).unwrap(), AnyPoly::Float(f));
        }
    }
}
