use std::collections::BTreeMap;

use exactalg::{rat, Poly, QuotientPoly, Rat, Signature};
use proptest::prelude::*;

const VARS: [&str; 4] = ["a", "c", "s", "r"];

fn poly_strategy() -> impl Strategy<Value = Poly> {
    prop::collection::vec(
        (-5i64..=5, 1i64..=3, prop::collection::vec(0u32..=3, 4)),
        0..6,
    )
    .prop_map(|terms| {
        Poly::from_terms(
            &VARS,
            terms.into_iter().map(|(p, q, e)| (rat(p, q), e)),
        )
    })
}

fn signature() -> impl Strategy<Value = Signature> {
    prop_oneof![Just(Signature::Sphere), Just(Signature::Hyperboloid)]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn ring_axioms(p in poly_strategy(), q in poly_strategy(), w in poly_strategy()) {
        prop_assert_eq!(&(&p + &q) + &w, &p + &(&q + &w));
        prop_assert_eq!(&(&p * &q) * &w, &p * &(&q * &w));
        prop_assert_eq!(&p * &(&q + &w), &(&p * &q) + &(&p * &w));
        prop_assert_eq!(&p * &q, &q * &p);
        prop_assert_eq!(&p + &q, &q + &p);
        prop_assert!((&p - &p).is_zero());
    }

    #[test]
    fn reduction_is_a_ring_homomorphism(p in poly_strategy(), q in poly_strategy(), sig in signature()) {
        let rp = QuotientPoly::new(p.clone(), sig, "c", "s");
        let rq = QuotientPoly::new(q.clone(), sig, "c", "s");
        let direct = QuotientPoly::new(&p * &q, sig, "c", "s");
        prop_assert!(direct.is_reduced());
        prop_assert_eq!(&direct, &rp.mul(&rq));
        prop_assert_eq!(direct.reduce(), direct.clone());
    }

    #[test]
    fn reduction_preserves_values_on_the_curve(p in poly_strategy(), sig in signature(), angle in -1.5f64..1.5) {
        let mut vals = BTreeMap::new();
        vals.insert("a".to_string(), 0.7);
        vals.insert("r".to_string(), 0.3);
        let raw = QuotientPoly::unreduced(p.clone(), sig, "c", "s");
        let red = raw.reduce();
        let u = raw.eval_at_angle(angle, &vals).unwrap();
        let v = red.eval_at_angle(angle, &vals).unwrap();
        prop_assert!((u - v).abs() <= 1e-9 * (1.0 + u.abs()), "{} vs {}", u, v);
    }

    #[test]
    fn exact_division_inverts_multiplication(p in poly_strategy(), q in poly_strategy()) {
        prop_assume!(!q.is_zero());
        prop_assert_eq!((&p * &q).div_exact(&q).unwrap(), p);
    }

    #[test]
    fn substitution_is_multiplicative(p in poly_strategy(), q in poly_strategy(), b1 in poly_strategy(), b2 in poly_strategy()) {
        let mut bind = BTreeMap::new();
        bind.insert("c".to_string(), b1);
        bind.insert("r".to_string(), b2);
        prop_assert_eq!((&p * &q).substitute(&bind), &p.substitute(&bind) * &q.substitute(&bind));
    }

    #[test]
    fn render_parse_free_rational_roundtrip(n in -1000i64..1000, d in 1i64..1000) {
        let r: Rat = rat(n, d);
        prop_assert_eq!(exactalg::parse_rational(&r.to_string()).unwrap(), r);
    }
}
