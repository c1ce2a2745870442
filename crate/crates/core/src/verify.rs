//! Seeded randomized self-checks behind `desing verify`.
//!
//! Every property draws its cases from its own ChaCha8 stream, so results
//! depend only on the seed and not on scheduling.

use std::collections::BTreeMap;
use std::f64::consts::{FRAC_PI_2, TAU};
use std::fmt::Write as _;

use exactalg::{rat, rat_to_f64, Poly, QuotientPoly, Rat, Signature};
use num_traits::Signed;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::charts::{
    adjacent_pairs, blow_up_in_chart, compatibility_defect, pushforward_identity, transition, ChartId,
};
use crate::dynamo::{
    bridge_beta1_defect, conjugacy_check, fd_jacobian, integrate, observed_order, polar_orbit_defect,
    rescaling_check, ConjugacyOptions, Frame, PolyField, DEFECT_FLOOR,
};
use crate::equilibria::{divisor_equilibria, global_divisor_report, polar_report, DivisorSet};
use crate::error::DesingError;
use crate::field::{Bindings, Param, VectorField};
use crate::polar::{
    bridge_alpha1, bridge_beta1, bridge_beta2, desingularize_polar, polar_determinant, polar_pushforward,
    PolarModel,
};
use crate::quasihom::{infer_weights, infer_weights_or_preferred, verify_weights, Weights};
use crate::reference::reference_field;
use crate::textfront::{parse_expr, parse_field, render_field, Expr};

pub const DEFAULT_SEED: u64 = 0x5eed;

/// Lower bound on the number of cases for each algebraic property.
pub const ALGEBRA_CASES: usize = 100;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PropertyResult {
    pub name: String,
    pub cases: usize,
    pub failures: usize,
    /// First failing case, if any.
    pub detail: Option<String>,
}

impl PropertyResult {
    pub fn passed(&self) -> bool {
        self.failures == 0 && self.cases > 0
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct VerifyReport {
    pub seed: u64,
    pub properties: Vec<PropertyResult>,
}

impl VerifyReport {
    pub fn all_passed(&self) -> bool {
        self.properties.iter().all(PropertyResult::passed)
    }

    pub fn get(&self, name: &str) -> Option<&PropertyResult> {
        self.properties.iter().find(|p| p.name == name)
    }

    pub fn to_text(&self) -> String {
        let mut o = String::new();
        let _ = writeln!(o, "seed {}", self.seed);
        for p in &self.properties {
            let status = if p.passed() { "pass" } else { "FAIL" };
            let _ = writeln!(o, "{status} {:<26} {:>4} cases", p.name, p.cases);
            if let Some(d) = &p.detail {
                let _ = writeln!(o, "     {d}");
            }
        }
        let passed = self.properties.iter().filter(|p| p.passed()).count();
        let _ = writeln!(o, "{passed}/{} properties passed", self.properties.len());
        o
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes") + "\n"
    }
}

type Outcome = std::result::Result<(), String>;
type Check = fn(&mut ChaCha8Rng) -> Vec<Outcome>;

const PROPERTIES: &[(&str, Check)] = &[
    ("ring-axioms", ring_axioms),
    ("quotient-reduction", quotient_reduction),
    ("exact-division", exact_division),
    ("substitution", substitution),
    ("lowering", lowering),
    ("pretty-print", pretty_print),
    ("weight-inference", weight_inference),
    ("chart-pushforward", chart_pushforward),
    ("chart-compatibility", chart_compatibility),
    ("polar-pushforward", polar_pushforward_identity),
    ("polar-orbit-differences", polar_orbit_differences),
    ("bridge-maps", bridge_maps),
    ("rescaling", rescaling),
    ("chart-consistency", chart_consistency),
    ("count-stability", count_stability),
    ("hyperbolic-coverage", hyperbolic_coverage),
    ("exact-eigenvalues", exact_eigenvalues),
    ("jacobian-differences", jacobian_differences),
    ("divisor-invariance", divisor_invariance),
    ("step-halving-order", step_halving_order),
    ("conjugacy", conjugacy),
];

pub fn property_names() -> Vec<&'static str> {
    PROPERTIES.iter().map(|p| p.0).collect()
}

/// Runs every property with streams derived from `seed`.
pub fn run_suite(seed: u64) -> VerifyReport {
    let properties = PROPERTIES
        .par_iter()
        .enumerate()
        .map(|(i, (name, check))| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(i as u64);
            let outcomes = check(&mut rng);
            let failures: Vec<&String> = outcomes.iter().filter_map(|o| o.as_ref().err()).collect();
            PropertyResult {
                name: name.to_string(),
                cases: outcomes.len(),
                failures: failures.len(),
                detail: failures.first().map(|s| s.to_string()),
            }
        })
        .collect();
    VerifyReport { seed, properties }
}

fn check(ok: bool, msg: impl FnOnce() -> String) -> Outcome {
    if ok {
        Ok(())
    } else {
        Err(msg())
    }
}

fn rand_rat(rng: &mut ChaCha8Rng) -> Rat {
    rat(rng.gen_range(-5..=5), rng.gen_range(1..=4))
}

fn rand_nonzero_rat(rng: &mut ChaCha8Rng) -> Rat {
    let p = rng.gen_range(1..=5) * if rng.gen_bool(0.5) { 1 } else { -1 };
    rat(p, rng.gen_range(1..=4))
}

fn rand_poly(rng: &mut ChaCha8Rng, vars: &[&str], max_exp: u32, terms: usize) -> Poly {
    let n = rng.gen_range(0..=terms);
    let t: Vec<(Rat, Vec<u32>)> = (0..n)
        .map(|_| {
            let e = vars.iter().map(|_| rng.gen_range(0..=max_exp)).collect();
            (rand_rat(rng), e)
        })
        .collect();
    Poly::from_terms(vars, t)
}

fn rand_point(rng: &mut ChaCha8Rng, vars: &[&str]) -> BTreeMap<String, Rat> {
    vars.iter().map(|v| (v.to_string(), rand_rat(rng))).collect()
}

fn rand_expr(rng: &mut ChaCha8Rng, depth: u32) -> Expr {
    if depth == 0 || rng.gen_bool(0.25) {
        return match rng.gen_range(0..4) {
            0 => Expr::Var("x".into()),
            1 => Expr::Var("y".into()),
            2 => Expr::Var("a".into()),
            _ => Expr::Num(rand_rat(rng).abs()),
        };
    }
    let sub = |rng: &mut ChaCha8Rng| Box::new(rand_expr(rng, depth - 1));
    match rng.gen_range(0..5) {
        0 => Expr::Add(sub(rng), sub(rng)),
        1 => Expr::Sub(sub(rng), sub(rng)),
        2 => Expr::Mul(sub(rng), sub(rng)),
        3 => Expr::Neg(sub(rng)),
        _ => Expr::Pow(sub(rng), rng.gen_range(0..=3)),
    }
}

fn param_a() -> Vec<Param> {
    vec![Param {
        name: "a".into(),
        positive: true,
    }]
}

/// Random field quasi-homogeneous for `w`, with coefficients that may carry
/// the parameter `a`.
fn qh_field(rng: &mut ChaCha8Rng, w: Weights) -> VectorField {
    let (al, be, k) = (w.alpha as i64, w.beta as i64, w.k as i64);
    let mut comps = [Vec::new(), Vec::new()];
    for m in 0..=8i64 {
        for n in 0..=8i64 {
            let hits = [al * (m - 1) + be * n == k, al * m + be * (n - 1) == k];
            for (c, hit) in hits.into_iter().enumerate() {
                if hit && rng.gen_bool(0.75) {
                    let pa = u32::from(rng.gen_bool(0.3));
                    comps[c].push((rand_nonzero_rat(rng), vec![pa, m as u32, n as u32]));
                }
            }
        }
    }
    let [c1, c2] = comps;
    let vars = ["a", "x", "y"];
    VectorField::new(
        "x",
        "y",
        param_a(),
        Poly::from_terms(&vars, c1),
        Poly::from_terms(&vars, c2),
    )
}

fn rand_weights(rng: &mut ChaCha8Rng) -> Weights {
    Weights::new(rng.gen_range(1..=3), rng.gen_range(1..=3), rng.gen_range(0..=4))
}

fn bind_a(f: &VectorField, a: Rat) -> Bindings {
    let mut m = BTreeMap::new();
    m.insert("a".to_string(), a);
    f.bind(&m).expect("positive binding")
}

fn rand_positive(rng: &mut ChaCha8Rng) -> Rat {
    rat(rng.gen_range(1..=40), rng.gen_range(1..=8))
}

fn ring_axioms(rng: &mut ChaCha8Rng) -> Vec<Outcome> {
    let vars = ["a", "x", "y"];
    (0..ALGEBRA_CASES)
        .map(|_| {
            let p = rand_poly(rng, &vars, 3, 5);
            let q = rand_poly(rng, &vars, 3, 5);
            let w = rand_poly(rng, &vars, 3, 5);
            let ok = &(&p + &q) + &w == &p + &(&q + &w)
                && &(&p * &q) * &w == &p * &(&q * &w)
                && &p * &(&q + &w) == &(&p * &q) + &(&p * &w)
                && &p * &q == &q * &p
                && &p + &q == &q + &p
                && (&p + &(-&p)).is_zero()
                && &(&p - &q) + &q == p
                && &p * &Poly::int(1) == p
                && &p + &Poly::zero() == p;
            check(ok, || format!("axioms fail for p = {p}, q = {q}, w = {w}"))
        })
        .collect()
}

fn quotient_reduction(rng: &mut ChaCha8Rng) -> Vec<Outcome> {
    let vars = ["a", "c", "s", "r"];
    (0..ALGEBRA_CASES)
        .map(|i| {
            let sig = if i % 2 == 0 { Signature::Sphere } else { Signature::Hyperboloid };
            let p = rand_poly(rng, &vars, 3, 5);
            let q = rand_poly(rng, &vars, 3, 5);
            let rp = QuotientPoly::new(p.clone(), sig, "c", "s");
            let rq = QuotientPoly::new(q.clone(), sig, "c", "s");
            let prod = QuotientPoly::new(&p * &q, sig, "c", "s");
            let sum = QuotientPoly::new(&p + &q, sig, "c", "s");
            let hom = prod == rp.mul(&rq) && sum == rp.add(&rq) && prod.is_reduced();
            let angle = rng.gen_range(-1.5..1.5);
            let vals: BTreeMap<String, f64> = [("a".to_string(), 0.7), ("r".to_string(), 0.3)].into();
            let raw = QuotientPoly::unreduced(&p * &q, sig, "c", "s");
            let u = raw.eval_at_angle(angle, &vals).map_err(|e| e.to_string());
            let v = prod.eval_at_angle(angle, &vals).map_err(|e| e.to_string());
            let values = match (u, v) {
                (Ok(u), Ok(v)) => (u - v).abs() <= 1e-9 * (1.0 + u.abs()),
                _ => false,
            };
            check(hom && values, || format!("reduction fails for p = {p}, q = {q} ({sig:?})"))
        })
        .collect()
}

fn exact_division(rng: &mut ChaCha8Rng) -> Vec<Outcome> {
    let vars = ["a", "x", "y"];
    let mut out = Vec::new();
    while out.len() < ALGEBRA_CASES {
        let p = rand_poly(rng, &vars, 3, 4);
        let q = rand_poly(rng, &vars, 2, 3);
        if q.is_zero() {
            continue;
        }
        let back = (&p * &q).div_exact(&q);
        out.push(check(back.as_ref() == Ok(&p), || format!("({p})*({q}) / ({q}) gave {back:?}")));
    }
    out
}

fn substitution(rng: &mut ChaCha8Rng) -> Vec<Outcome> {
    let vars = ["x", "y"];
    (0..ALGEBRA_CASES)
        .map(|_| {
            let p = rand_poly(rng, &vars, 3, 4);
            let g = rand_poly(rng, &vars, 2, 3);
            let h = rand_poly(rng, &vars, 2, 3);
            let pt = rand_point(rng, &vars);
            let mut sub = BTreeMap::new();
            sub.insert("x".to_string(), g.clone());
            sub.insert("y".to_string(), h.clone());
            let lhs = p.substitute(&sub).eval_rat(&pt);
            let inner = (|| {
                let mut v = BTreeMap::new();
                v.insert("x".to_string(), g.eval_rat(&pt)?);
                v.insert("y".to_string(), h.eval_rat(&pt)?);
                p.eval_rat(&v)
            })();
            check(lhs.is_ok() && lhs == inner, || format!("{p} with x -> {g}, y -> {h} at {pt:?}"))
        })
        .collect()
}

fn lowering(rng: &mut ChaCha8Rng) -> Vec<Outcome> {
    let vars = ["x", "y", "a"];
    (0..ALGEBRA_CASES)
        .map(|_| {
            let e = rand_expr(rng, 5);
            let p = e.to_poly();
            let ok = (0..10).all(|_| {
                let pt = rand_point(rng, &vars);
                e.eval(&pt).is_some_and(|v| p.eval_rat(&pt) == Ok(v))
            });
            check(ok, || format!("lowering disagrees with the tree for {e}"))
        })
        .collect()
}

fn pretty_print(rng: &mut ChaCha8Rng) -> Vec<Outcome> {
    (0..ALGEBRA_CASES)
        .map(|_| {
            let e1 = rand_expr(rng, 4);
            let e2 = rand_expr(rng, 4);
            let src = format!("param a > 0; var x y; dx/dt = {e1}; dy/dt = {e2};");
            let ok = (|| {
                let f = parse_field(&src).ok()?;
                let once = render_field(&f);
                let twice = render_field(&parse_field(&once).ok()?);
                let expr_back = parse_expr(&e1.to_string()).ok()?;
                Some(once == twice && expr_back.to_poly() == e1.to_poly())
            })();
            check(ok == Some(true), || format!("round trip fails for {src}"))
        })
        .collect()
}

/// Smallest weights (by `alpha + beta`, then `alpha`, then `k`) passing
/// the symbolic check inside a box.
fn brute_force_weights(f: &VectorField, bound: u32) -> Option<[u32; 3]> {
    for sum in 2..=2 * bound {
        for alpha in 1..sum {
            let beta = sum - alpha;
            if alpha > bound || beta > bound {
                continue;
            }
            for k in 0..=2 * bound {
                if verify_weights(f, &Weights::new(alpha, beta, k)) {
                    return Some([alpha, beta, k]);
                }
            }
        }
    }
    None
}

fn weight_inference(rng: &mut ChaCha8Rng) -> Vec<Outcome> {
    (0..ALGEBRA_CASES)
        .map(|_| {
            let w = rand_weights(rng);
            let f = qh_field(rng, w);
            let Ok(found) = infer_weights_or_preferred(&f) else {
                return Err(format!("no weights for a field built with {w}"));
            };
            if !verify_weights(&f, &found) {
                return Err(format!("inferred {found} fails the symbolic check"));
            }
            match infer_weights(&f) {
                Ok(unique) => {
                    let oracle = brute_force_weights(&f, 4);
                    check(oracle == Some(unique.triple()), || {
                        format!("inferred {unique}, brute force gives {oracle:?}")
                    })
                }
                Err(DesingError::AmbiguousWeights { .. }) => Ok(()),
                Err(e) => Err(e.to_string()),
            }
        })
        .collect()
}

fn chart_pushforward(rng: &mut ChaCha8Rng) -> Vec<Outcome> {
    let mut out = Vec::new();
    while out.len() < ALGEBRA_CASES {
        let w = rand_weights(rng);
        let f = qh_field(rng, w);
        for chart in ChartId::ALL {
            let res = blow_up_in_chart(&f, &w, chart).map_err(|e| e.to_string()).and_then(|cf| {
                let r = Poly::var(cf.radial_var()).pow(w.k);
                let factor = (0..2).all(|i| cf.raw()[i] == &r * &cf.desing()[i]);
                check(pushforward_identity(&f, &cf) && factor, || {
                    format!("{chart} identity fails for {} / {} with {w}", f.f1(), f.f2())
                })
            });
            out.push(res);
        }
    }
    out
}

fn chart_compatibility(rng: &mut ChaCha8Rng) -> Vec<Outcome> {
    let mut out = Vec::new();
    while out.len() < ALGEBRA_CASES {
        let w = if rng.gen_bool(0.5) {
            Weights::new(1, 1, rng.gen_range(0..=3))
        } else if rng.gen_bool(0.5) {
            Weights::new(rng.gen_range(2..=3), 1, rng.gen_range(0..=4))
        } else {
            Weights::new(1, rng.gen_range(2..=3), rng.gen_range(0..=4))
        };
        let f = qh_field(rng, w);
        for (a, b) in adjacent_pairs() {
            match compatibility_defect(&f, &w, a, b) {
                Ok(d) => out.push(check(d[0].is_zero() && d[1].is_zero(), || {
                    format!("{a}->{b} defect ({}, {}) with {w}", d[0], d[1])
                })),
                Err(DesingError::NonMonomialTransition { .. }) => {}
                Err(e) => out.push(Err(e.to_string())),
            }
        }
    }
    out
}

fn polar_pushforward_identity(rng: &mut ChaCha8Rng) -> Vec<Outcome> {
    (0..ALGEBRA_CASES)
        .map(|i| {
            let model = PolarModel::ALL[i % 3];
            let w = Weights::new(1, 1, rng.gen_range(0..=3));
            let f = qh_field(rng, w);
            let pf = polar_pushforward(&f, model).map_err(|e| e.to_string())?;
            let sig = model.signature();
            let (c, s, r) = (pf.c_var(), pf.s_var(), pf.radial_var());
            let (cp, sp, rp) = (Poly::var(c), Poly::var(s), Poly::var(r));
            let dc = &Poly::int(-sig.sigma()) * &sp;
            // (x, y) and their partials in (angle, radius)
            let (x, y, x_a, y_a, x_r, y_r) = match model {
                PolarModel::HyperbolicY => (&rp * &sp, &rp * &cp, &rp * &cp, &rp * &dc, sp.clone(), cp.clone()),
                _ => (&rp * &cp, &rp * &sp, &rp * &dc, &rp * &cp, cp.clone(), sp.clone()),
            };
            let q = |p: Poly| QuotientPoly::new(p, sig, c, s);
            let mut sub = BTreeMap::new();
            sub.insert("x".to_string(), x);
            sub.insert("y".to_string(), y);
            let lhs1 = q(x_a).mul(pf.angular()).add(&q(x_r).mul(pf.radial()));
            let lhs2 = q(y_a).mul(pf.angular()).add(&q(y_r).mul(pf.radial()));
            let ok1 = lhs1.sub(&q(f.f1().substitute(&sub))).is_zero();
            let ok2 = lhs2.sub(&q(f.f2().substitute(&sub))).is_zero();
            let det = polar_determinant(model, c, s, r);
            let want = if model == PolarModel::HyperbolicY { -rp.clone() } else { rp.clone() };
            let ok3 = det.sub(&q(want)).is_zero();
            check(ok1 && ok2 && ok3, || format!("{model} pushforward fails for {} / {}", f.f1(), f.f2()))
        })
        .collect()
}

fn polar_orbit_differences(rng: &mut ChaCha8Rng) -> Vec<Outcome> {
    let f = reference_field();
    let mut out = Vec::new();
    for (model, n, tol) in [
        (PolarModel::Sphere, 50, 1e-8),
        (PolarModel::HyperbolicX, 10, 1e-9),
        (PolarModel::HyperbolicY, 10, 1e-9),
    ] {
        let pf = match polar_pushforward(&f, model) {
            Ok(p) => p,
            Err(e) => {
                out.push(Err(e.to_string()));
                continue;
            }
        };
        for _ in 0..n {
            let b = bind_a(&f, rand_positive(rng));
            let angle = match model {
                PolarModel::Sphere => rng.gen_range(0.0..TAU),
                _ => rng.gen_range(-1.0..1.0),
            };
            let radius = rng.gen_range(0.1..1.0);
            out.push(match polar_orbit_defect(&f, &pf, &b, angle, radius) {
                Ok(d) => check(d < tol, || format!("{model} at ({angle}, {radius}): relative defect {d:e}")),
                Err(e) => Err(e.to_string()),
            });
        }
    }
    out
}

fn bridge_maps(rng: &mut ChaCha8Rng) -> Vec<Outcome> {
    let f = reference_field();
    let w = Weights::new(1, 1, 1);
    let fields = (|| {
        let k1 = blow_up_in_chart(&f, &w, ChartId::K1)?;
        let hx = polar_pushforward(&f, PolarModel::HyperbolicX)?;
        let hd = desingularize_polar(&hx)?;
        Ok::<_, DesingError>((k1, hx, hd))
    })();
    let Ok((k1, hx, hd)) = fields else {
        return vec![Err("could not build the bridge fields".into())];
    };
    let mut out: Vec<Outcome> = (0..20)
        .map(|i| {
            let b = bind_a(&f, rand_positive(rng));
            let (phi, rho) = (rng.gen_range(-2.0..2.0), rng.gen_range(0.05..1.5));
            let field = if i % 2 == 0 { &hx } else { &hd };
            match bridge_beta1_defect(field, &k1, &b, phi, rho) {
                Ok(d) => check(d < 1e-9, || format!("beta1 at ({phi}, {rho}): relative defect {d:e}")),
                Err(e) => Err(e.to_string()),
            }
        })
        .collect();
    out.push(check(matches!(bridge_alpha1(FRAC_PI_2, 0.5), Err(DesingError::SingularAngle(_))), || {
        "alpha1 accepted theta = pi/2".into()
    }));
    out.push(check(matches!(bridge_beta2(0.0, 0.5), Err(DesingError::SingularAngle(_))), || {
        "beta2 accepted phi = 0".into()
    }));
    out.push(check(
        bridge_alpha1(0.3, 0.5).is_ok() && bridge_beta2(0.3, 0.5).is_ok() && bridge_beta1(0.0, 0.5).is_ok(),
        || "bridge maps rejected regular points".into(),
    ));
    out
}

fn rescaling(rng: &mut ChaCha8Rng) -> Vec<Outcome> {
    let f = reference_field();
    let w = Weights::new(1, 1, 1);
    (0..ALGEBRA_CASES)
        .map(|i| {
            let chart = ChartId::ALL[i % 4];
            let b = bind_a(&f, rand_positive(rng));
            let p = [rng.gen_range(0.01..2.0), rng.gen_range(-3.0..3.0)];
            let cf = blow_up_in_chart(&f, &w, chart).map_err(|e| e.to_string())?;
            let d = rescaling_check(&cf, &b, &[p]).map_err(|e| e.to_string())?;
            check(d.max_angle < 1e-10 && d.max_ratio_error < 1e-10, || {
                format!("{chart} at {p:?}: angle {:e}, ratio error {:e}", d.max_angle, d.max_ratio_error)
            })
        })
        .collect()
}

const FIXED_A: [(i64, i64); 5] = [(1, 2), (1, 1), (3, 2), (2, 1), (10, 1)];

fn chart_consistency(_: &mut ChaCha8Rng) -> Vec<Outcome> {
    let f = reference_field();
    let w = Weights::new(1, 1, 1);
    let mut out = Vec::new();
    for (p, q) in FIXED_A {
        let b = bind_a(&f, rat(p, q));
        let per_chart: Vec<_> = ChartId::ALL
            .iter()
            .map(|&c| {
                blow_up_in_chart(&f, &w, c)
                    .and_then(|cf| divisor_equilibria(&cf, &b))
                    .map(|s| (c, s))
            })
            .collect();
        let per_chart: Vec<_> = match per_chart.into_iter().collect::<crate::error::Result<Vec<_>>>() {
            Ok(v) => v,
            Err(e) => {
                out.push(Err(e.to_string()));
                continue;
            }
        };
        for (c, set) in &per_chart {
            for e in set.isolated().unwrap_or_default() {
                let u = e.coords[1].approx();
                for (d, other) in &per_chart {
                    let Ok(mapped) = transition([0.0, u], *c, *d, &w) else {
                        continue;
                    };
                    let found = other.isolated().unwrap_or_default().iter().find(|o| {
                        (o.coords[1].approx() - mapped[1]).abs() < 1e-9 && o.coords[0].approx() == 0.0
                    });
                    out.push(check(
                        found.is_some_and(|o| o.classification == e.classification),
                        || format!("a = {p}/{q}: {c} point u = {u} has no matching {d} point"),
                    ));
                }
            }
        }
    }
    out
}

fn count_stability(rng: &mut ChaCha8Rng) -> Vec<Outcome> {
    let f = reference_field();
    let w = Weights::new(1, 1, 1);
    let mut values: Vec<Rat> = FIXED_A.iter().map(|&(p, q)| rat(p, q)).collect();
    values.extend((0..15).map(|_| rand_positive(rng)));
    values
        .into_iter()
        .map(|a| {
            let g = global_divisor_report(&f, &w, &bind_a(&f, a.clone())).map_err(|e| e.to_string())?;
            let ok = g.equilibria.len() == 6
                && g.equilibria.iter().all(|e| e.classification.is_saddle())
                && g.arcs.len() == 6
                && g.disagreements.is_empty();
            check(ok, || format!("a = {a}: {} equilibria", g.equilibria.len()))
        })
        .collect()
}

fn hyperbolic_coverage(_: &mut ChaCha8Rng) -> Vec<Outcome> {
    let f = reference_field();
    [(PolarModel::HyperbolicX, rat(1, 1), 2), (PolarModel::HyperbolicX, rat(2, 1), 1)]
        .into_iter()
        .map(|(m, a, n)| {
            let pf = polar_pushforward(&f, m).and_then(|p| desingularize_polar(&p)).map_err(|e| e.to_string())?;
            let set = polar_report(&pf, &bind_a(&f, a.clone())).map_err(|e| e.to_string())?;
            let eqs = set.isolated().unwrap_or_default();
            check(eqs.len() == n && eqs.iter().all(|e| e.classification.is_saddle()), || {
                format!("{m} at a = {a}: {} equilibria", eqs.len())
            })
        })
        .collect()
}

fn exact_eigenvalues(_: &mut ChaCha8Rng) -> Vec<Outcome> {
    let f = reference_field();
    let w = Weights::new(1, 1, 1);
    let mut out = Vec::new();
    for (p, q) in FIXED_A {
        let g = match global_divisor_report(&f, &w, &bind_a(&f, rat(p, q))) {
            Ok(g) => g,
            Err(e) => {
                out.push(Err(e.to_string()));
                continue;
            }
        };
        for e in &g.equilibria {
            let Some(ex) = &e.eigenvalues_exact else {
                out.push(Err(format!("a = {p}/{q}: no exact eigenvalues at angle {}", e.divisor_angle)));
                continue;
            };
            let ok = (0..2).all(|i| {
                (rat_to_f64(&ex[i].0) - e.eigenvalues[i][0]).abs() < 1e-12 && e.eigenvalues[i][1] == 0.0
            });
            out.push(check(ok, || format!("a = {p}/{q}: exact {ex:?} vs float {:?}", e.eigenvalues)));
        }
    }
    out
}

fn jacobian_differences(_: &mut ChaCha8Rng) -> Vec<Outcome> {
    let f = reference_field();
    let w = Weights::new(1, 1, 1);
    let mut out = Vec::new();
    for (p, q) in FIXED_A {
        let b = bind_a(&f, rat(p, q));
        for chart in ChartId::ALL {
            let res = (|| {
                let cf = blow_up_in_chart(&f, &w, chart)?;
                let field = PolyField::chart_desing(&cf, &b)?;
                let set = divisor_equilibria(&cf, &b)?;
                Ok::<_, DesingError>((field, set))
            })();
            let (field, set) = match res {
                Ok(v) => v,
                Err(e) => {
                    out.push(Err(e.to_string()));
                    continue;
                }
            };
            let DivisorSet::Isolated(eqs) = set else {
                out.push(Err(format!("{chart}: unexpected line of equilibria")));
                continue;
            };
            for e in eqs {
                let pt = [e.coords[0].approx(), e.coords[1].approx()];
                let j = fd_jacobian(&field, pt, 1e-3);
                let err = (0..4).map(|i| (j[i / 2][i % 2] - e.jacobian[i / 2][i % 2]).abs()).fold(0.0, f64::max);
                out.push(check(err < 1e-7, || format!("{chart} at {pt:?}: finite differences off by {err:e}")));
            }
        }
    }
    out
}

fn divisor_invariance(rng: &mut ChaCha8Rng) -> Vec<Outcome> {
    let f = reference_field();
    let w = Weights::new(1, 1, 1);
    (0..20)
        .map(|i| {
            let chart = ChartId::ALL[i % 4];
            let b = bind_a(&f, rand_positive(rng));
            let cf = blow_up_in_chart(&f, &w, chart).map_err(|e| e.to_string())?;
            let g = PolyField::chart_desing(&cf, &b).map_err(|e| e.to_string())?;
            let seed = [0.0, rng.gen_range(-2.0..2.0)];
            let tr = integrate(&g, Frame::Chart { chart }, seed, 2.0, 1e-3).map_err(|e| e.to_string())?;
            let worst = tr.points.iter().map(|p| p.1[0].abs()).fold(0.0, f64::max);
            check(worst < 1e-12, || format!("{chart} from {seed:?}: |r| reached {worst:e}"))
        })
        .collect()
}

fn step_halving_order(rng: &mut ChaCha8Rng) -> Vec<Outcome> {
    let f = reference_field();
    (0..5)
        .map(|_| {
            let b = bind_a(&f, rat(1, 1));
            let g = PolyField::original(&f, &b).map_err(|e| e.to_string())?;
            // far enough from the origin that truncation error dominates rounding
            let x0 = [rng.gen_range(0.3..0.6), rng.gen_range(0.3..0.6)];
            let p = observed_order(&g, Frame::Original, x0, 1.0, 1e-2).map_err(|e| e.to_string())?;
            check((3.5..=4.5).contains(&p), || format!("observed order {p} from {x0:?}"))
        })
        .collect()
}

/// Chart, seed, and defects at `h` and `h/2`.
pub type ConjugacyRun = std::result::Result<(ChartId, [f64; 2], f64, f64), String>;

/// Defects of the 20 conjugacy seeds at `h` and `h/2`.
pub fn conjugacy_defects(seed: u64, h: f64) -> Vec<ConjugacyRun> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let f = reference_field();
    let w = Weights::new(1, 1, 1);
    let b = bind_a(&f, rat(1, 1));
    let seeds: Vec<(ChartId, [f64; 2])> = (0..20)
        .map(|i| (ChartId::ALL[i % 4], [rng.gen_range(1e-3..=0.5), rng.gen_range(-1.0..=1.0)]))
        .collect();
    seeds
        .par_iter()
        .map(|&(chart, x0)| {
            let cf = blow_up_in_chart(&f, &w, chart).map_err(|e| e.to_string())?;
            let run = |h: f64| {
                let opts = ConjugacyOptions { h, ..ConjugacyOptions::default() };
                conjugacy_check(&f, &cf, x0, &b, &opts).map_err(|e| e.to_string())
            };
            Ok((chart, x0, run(h)?, run(h / 2.0)?))
        })
        .collect()
}

/// Each defect is below `1e-6` and does not grow under halving (unless both
/// sit at the rounding floor); the summed defect strictly decreases.
fn conjugacy(rng: &mut ChaCha8Rng) -> Vec<Outcome> {
    let runs = conjugacy_defects(rng.gen(), 1e-3);
    let (mut s1, mut s2) = (0.0, 0.0);
    let mut out: Vec<Outcome> = runs
        .into_iter()
        .map(|r| {
            let (chart, x0, d1, d2) = r?;
            s1 += d1;
            s2 += d2;
            let shrinks = d2 < d1 || d1.max(d2) < DEFECT_FLOOR;
            check(d1 < 1e-6 && shrinks, || format!("{chart} from {x0:?}: defect {d1:e} at h, {d2:e} at h/2"))
        })
        .collect();
    out.push(check(s2 < s1, || format!("summed defect {s1:e} at h, {s2:e} at h/2")));
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn names_are_unique() {
        let mut n = property_names();
        n.sort();
        n.dedup();
        assert_eq!(n.len(), PROPERTIES.len());
    }

    #[test]
    fn generated_fields_have_their_weights() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..20 {
            let w = rand_weights(&mut rng);
            assert!(verify_weights(&qh_field(&mut rng, w), &w));
        }
    }

    #[test]
    fn brute_force_oracle() {
        let f = reference_field();
        assert_eq!(brute_force_weights(&f, 3), Some([1, 1, 1]));
    }
}
