use std::collections::BTreeMap;

use desing::charts::{blow_up_in_chart, ChartId};
use desing::dynamo::{integrate, integrate_with, Frame, Integrator, PolyField, DOMAIN_BOUND};
use desing::equilibria::global_divisor_report;
use desing::polar::{desingularize_polar, polar_pushforward, PolarModel};
use desing::quasihom::{infer_weights, verify_weights, Weights};
use desing::reference::reference_field;
use desing::textfront::{parse_field, render_field};
use desing::{Param, VectorField};
use exactalg::{rat, Poly, QuotientPoly};
use num_integer::Integer;
use proptest::prelude::*;

/// Field whose monomials all satisfy the quasi-homogeneity constraints of `w`;
/// `coeffs` picks the coefficient of each admissible slot (0 drops it).
fn qh_field(w: Weights, coeffs: &[i64]) -> VectorField {
    let (al, be, k) = (w.alpha as i64, w.beta as i64, w.k as i64);
    let mut comps = [Vec::new(), Vec::new()];
    let mut next = coeffs.iter().cycle();
    for m in 0..=8i64 {
        for n in 0..=8i64 {
            let hits = [al * (m - 1) + be * n == k, al * m + be * (n - 1) == k];
            for (c, hit) in hits.into_iter().enumerate() {
                if hit {
                    let v = *next.next().unwrap();
                    if v != 0 {
                        comps[c].push((rat(v, 1), vec![m as u32, n as u32]));
                    }
                }
            }
        }
    }
    let [c1, c2] = comps;
    VectorField::new("x", "y", vec![], Poly::from_terms(&["x", "y"], c1), Poly::from_terms(&["x", "y"], c2))
}

fn weights() -> impl Strategy<Value = Weights> {
    (1u32..=3, 1u32..=3, 0u32..=4).prop_map(|(a, b, k)| Weights::new(a, b, k))
}

fn coeffs() -> impl Strategy<Value = Vec<i64>> {
    prop::collection::vec(-3i64..=3, 1..12)
}

fn quadratic() -> impl Strategy<Value = VectorField> {
    prop::collection::vec(-4i64..=4, 6).prop_map(|c| qh_field(Weights::new(1, 1, 1), &c))
}

fn sub_polar(f: &VectorField, c: &str, s: &str, r: &str) -> (Poly, Poly, Poly, Poly) {
    let mut sub = BTreeMap::new();
    sub.insert("x".to_string(), &Poly::var(r) * &Poly::var(c));
    sub.insert("y".to_string(), &Poly::var(r) * &Poly::var(s));
    (
        sub["x"].clone(),
        sub["y"].clone(),
        f.f1().substitute(&sub),
        f.f2().substitute(&sub),
    )
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn rendered_fields_reparse_to_a_fixed_point(w in weights(), c in coeffs(), positive: bool) {
        let f = qh_field(w, &c);
        let f = VectorField::new(
            "x",
            "y",
            vec![Param { name: "b".into(), positive }],
            f.f1() * &Poly::var("b"),
            f.f2().clone(),
        );
        let text = render_field(&f);
        let g = parse_field(&text).unwrap();
        prop_assert_eq!(render_field(&g), text);
        prop_assert_eq!(g.f1(), f.f1());
        prop_assert_eq!(g.f2(), f.f2());
    }

    #[test]
    fn inferred_weights_are_primitive_and_scale(w in weights(), c in coeffs()) {
        let f = qh_field(w, &c);
        prop_assume!(!f.f1().is_zero() || !f.f2().is_zero());
        if let Ok(got) = infer_weights(&f) {
            prop_assert!(verify_weights(&f, &got));
            for t in 2..=3 {
                prop_assert!(verify_weights(&f, &Weights::new(t * got.alpha, t * got.beta, t * got.k)));
            }
            let [a, b, k] = got.triple();
            prop_assert_eq!(a.gcd(&b).gcd(&k), 1);
        }
    }

    #[test]
    fn raw_is_radial_power_times_desing(w in weights(), c in coeffs()) {
        let f = qh_field(w, &c);
        for chart in ChartId::ALL {
            let cf = blow_up_in_chart(&f, &w, chart).unwrap();
            let r = Poly::var(cf.radial_var()).pow(w.k);
            for i in 0..2 {
                prop_assert_eq!(&cf.raw()[i], &(&r * &cf.desing()[i]));
            }
        }
    }

    #[test]
    fn spherical_field_matches_the_polar_oracle(f in quadratic()) {
        let pf = polar_pushforward(&f, PolarModel::Sphere).unwrap();
        let (c, s, r) = (pf.c_var(), pf.s_var(), pf.radial_var());
        let (x, y, f1, f2) = sub_polar(&f, c, s, r);
        let rv = Poly::var(r);
        // r^2 theta' = x f2 - y f1, r r' = x f1 + y f2
        let ang = (&(&x * &f2) - &(&y * &f1)).div_exact(&rv.pow(2)).unwrap();
        let rad = (&(&x * &f1) + &(&y * &f2)).div_exact(&rv).unwrap();
        let sig = PolarModel::Sphere.signature();
        prop_assert_eq!(pf.angular(), &QuotientPoly::new(ang, sig, c, s));
        prop_assert_eq!(pf.radial(), &QuotientPoly::new(rad, sig, c, s));
        let d = desingularize_polar(&pf).unwrap();
        prop_assert_eq!(&d.angular().mul_poly(&rv), pf.angular());
        prop_assert_eq!(&d.radial().mul_poly(&rv), pf.radial());
    }

    #[test]
    fn hyperbolic_field_matches_the_polar_oracle(f in quadratic()) {
        let pf = polar_pushforward(&f, PolarModel::HyperbolicX).unwrap();
        let (c, s, r) = (pf.c_var(), pf.s_var(), pf.radial_var());
        let (x, y, f1, f2) = sub_polar(&f, c, s, r);
        let rv = Poly::var(r);
        // rho^2 phi' = x f2 - y f1, rho rho' = x f1 - y f2
        let ang = (&(&x * &f2) - &(&y * &f1)).div_exact(&rv.pow(2)).unwrap();
        let rad = (&(&x * &f1) - &(&y * &f2)).div_exact(&rv).unwrap();
        let sig = PolarModel::HyperbolicX.signature();
        prop_assert_eq!(pf.angular(), &QuotientPoly::new(ang, sig, c, s));
        prop_assert_eq!(pf.radial(), &QuotientPoly::new(rad, sig, c, s));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn six_saddles_for_every_positive_a(p in 1i64..=200, q in 1i64..=20) {
        let f = reference_field();
        let mut m = BTreeMap::new();
        m.insert("a".to_string(), rat(p, q));
        let b = f.bind(&m).unwrap();
        let g = global_divisor_report(&f, &Weights::new(1, 1, 1), &b).unwrap();
        prop_assert_eq!(g.equilibria.len(), 6);
        prop_assert!(g.disagreements.is_empty());
        for e in &g.equilibria {
            let j = e.jacobian;
            let det = j[0][0] * j[1][1] - j[0][1] * j[1][0];
            prop_assert!(e.classification.is_saddle());
            prop_assert!(det < 0.0);
        }
        // flow alternates between saddles
        for w in g.arcs.windows(2) {
            prop_assert_eq!(w[0].sign, -w[1].sign);
        }
    }

    #[test]
    fn trajectories_are_monotone_and_bounded(x in -1.0f64..1.0, y in -1.0f64..1.0, back: bool) {
        let f = reference_field();
        let mut m = BTreeMap::new();
        m.insert("a".to_string(), rat(1, 1));
        let g = PolyField::original(&f, &f.bind(&m).unwrap()).unwrap();
        let fwd = Integrator::new(1e-2, 3.0);
        let cfg = if back { fwd.backward() } else { fwd };
        let tr = integrate_with(&g, Frame::Original, [x, y], &cfg).unwrap();
        prop_assert_eq!(tr.points[0], (0.0, [x, y]));
        for w in tr.points.windows(2) {
            prop_assert!(w[1].0 > w[0].0);
        }
        for (_, p) in &tr.points {
            prop_assert!(p[0].is_finite() && p[1].is_finite());
            prop_assert!(p[0].abs() <= DOMAIN_BOUND && p[1].abs() <= DOMAIN_BOUND);
        }
        prop_assert_eq!(integrate(&g, Frame::Original, [x, y], 3.0, 1e-2).unwrap().frame, Frame::Original);
    }
}
