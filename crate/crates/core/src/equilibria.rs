//! Equilibria on the exceptional divisor.
//!
//! In a directional chart the divisor is `r = 0` and, because the
//! desingularized radial component carries a factor `r`, equilibria there are
//! the real roots of the angular component restricted to `r = 0`. Roots are
//! isolated with Sturm sequences on the exact restriction; rational roots are
//! kept exact and irrational ones as certified intervals.

use std::collections::BTreeMap;
use std::f64::consts::{PI, TAU};
use std::ops::{Add, Div, Mul, Sub};

use exactalg::{rat_to_f64, Poly, QuotientPoly, Rat, RealRoot, Signature, UniPoly};
use num_bigint::BigInt;
use num_traits::{Signed, Zero};
use rayon::prelude::*;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::charts::{blow_up_all, chart_for_angle, divisor_angle, ChartField, ChartId};
use crate::dynamo::Frame;
use crate::error::{DesingError, Result};
use crate::field::{Bindings, VectorField};
use crate::polar::PolarField;
use crate::quasihom::Weights;

/// Isolating intervals are refined below this width.
pub fn root_eps() -> Rat {
    Rat::new(1.into(), BigInt::from(1u64 << 40))
}

/// Angles closer than this are the same divisor point.
pub const ANGLE_DEDUP: f64 = 1e-9;

/// Exact rational, serialized as `"p/q"`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ExactValue(pub Rat);

impl Serialize for ExactValue {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.0.to_string())
    }
}

impl<'de> Deserialize<'de> for ExactValue {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        exactalg::parse_rational(&s)
            .map(ExactValue)
            .map_err(serde::de::Error::custom)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Coord {
    Exact { value: ExactValue },
    /// Irrational algebraic value inside `(lo, hi)`.
    Isolated {
        lo: ExactValue,
        hi: ExactValue,
        approx: f64,
    },
    /// Transcendental value with a floating-point enclosure.
    Enclosed { lo: f64, hi: f64, approx: f64 },
}

impl Coord {
    pub fn approx(&self) -> f64 {
        match self {
            Coord::Exact { value } => rat_to_f64(&value.0),
            Coord::Isolated { approx, .. } | Coord::Enclosed { approx, .. } => *approx,
        }
    }

    pub fn exact(&self) -> Option<&Rat> {
        match self {
            Coord::Exact { value } => Some(&value.0),
            _ => None,
        }
    }

    fn from_root(r: &RealRoot) -> Coord {
        match r {
            RealRoot::Exact(v) => Coord::Exact {
                value: ExactValue(v.clone()),
            },
            RealRoot::Isolated { lo, hi } => Coord::Isolated {
                lo: ExactValue(lo.clone()),
                hi: ExactValue(hi.clone()),
                approx: r.approx(),
            },
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Classification {
    HyperbolicSaddle,
    HyperbolicStableNode,
    HyperbolicUnstableNode,
    HyperbolicFocusStable,
    HyperbolicFocusUnstable,
    NonHyperbolic,
}

impl Classification {
    pub fn label(self) -> &'static str {
        match self {
            Classification::HyperbolicSaddle => "hyperbolic-saddle",
            Classification::HyperbolicStableNode => "hyperbolic-stable-node",
            Classification::HyperbolicUnstableNode => "hyperbolic-unstable-node",
            Classification::HyperbolicFocusStable => "hyperbolic-focus-stable",
            Classification::HyperbolicFocusUnstable => "hyperbolic-focus-unstable",
            Classification::NonHyperbolic => "non-hyperbolic",
        }
    }

    pub fn is_saddle(self) -> bool {
        self == Classification::HyperbolicSaddle
    }

    fn from_signs(det: i8, trace: i8, disc_negative: bool) -> Classification {
        match (det, trace) {
            (d, _) if d < 0 => Classification::HyperbolicSaddle,
            (0, _) | (_, 0) => Classification::NonHyperbolic,
            (_, t) => match (disc_negative, t < 0) {
                (false, true) => Classification::HyperbolicStableNode,
                (false, false) => Classification::HyperbolicUnstableNode,
                (true, true) => Classification::HyperbolicFocusStable,
                (true, false) => Classification::HyperbolicFocusUnstable,
            },
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Equilibrium {
    pub frame: Frame,
    /// `(radial, angular)` in a chart, `(angle, radius)` in a polar model.
    pub coords: [Coord; 2],
    pub jacobian: [[f64; 2]; 2],
    pub jacobian_exact: Option<[[ExactValue; 2]; 2]>,
    /// `[re, im]` pairs.
    pub eigenvalues: [[f64; 2]; 2],
    pub eigenvalues_exact: Option<[ExactValue; 2]>,
    pub classification: Classification,
    pub divisor_angle: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub enum DivisorSet {
    Isolated(Vec<Equilibrium>),
    /// The angular component vanishes identically on the divisor.
    LineOfEquilibria,
}

impl DivisorSet {
    pub fn isolated(&self) -> Option<&[Equilibrium]> {
        match self {
            DivisorSet::Isolated(v) => Some(v),
            DivisorSet::LineOfEquilibria => None,
        }
    }
}

/// Closed floating-point interval, widened outward after every operation.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Interval {
    pub lo: f64,
    pub hi: f64,
}

fn widen(lo: f64, hi: f64) -> Interval {
    Interval {
        lo: lo - (lo.abs() * 4.0 * f64::EPSILON + f64::MIN_POSITIVE),
        hi: hi + (hi.abs() * 4.0 * f64::EPSILON + f64::MIN_POSITIVE),
    }
}

impl Interval {
    pub fn point(x: f64) -> Interval {
        Interval { lo: x, hi: x }
    }

    pub fn from_rat(r: &Rat) -> Interval {
        let x = rat_to_f64(r);
        widen(x, x)
    }

    pub fn from_rats(lo: &Rat, hi: &Rat) -> Interval {
        widen(rat_to_f64(lo), rat_to_f64(hi))
    }

    pub fn mid(&self) -> f64 {
        0.5 * (self.lo + self.hi)
    }

    pub fn contains_zero(&self) -> bool {
        self.lo <= 0.0 && self.hi >= 0.0
    }

    /// `-1`, `0` (undecided) or `1`.
    pub fn sign(&self) -> i8 {
        if self.lo > 0.0 {
            1
        } else if self.hi < 0.0 {
            -1
        } else {
            0
        }
    }

    pub fn sqrt(self) -> Interval {
        widen(self.lo.max(0.0).sqrt(), self.hi.max(0.0).sqrt())
    }

    pub fn powi(self, n: u32) -> Interval {
        (0..n).fold(Interval::point(1.0), |acc, _| acc.mul(self))
    }
}

impl Add for Interval {
    type Output = Interval;

    fn add(self, o: Interval) -> Interval {
        widen(self.lo + o.lo, self.hi + o.hi)
    }
}

impl Sub for Interval {
    type Output = Interval;

    fn sub(self, o: Interval) -> Interval {
        widen(self.lo - o.hi, self.hi - o.lo)
    }
}

impl Mul for Interval {
    type Output = Interval;

    fn mul(self, o: Interval) -> Interval {
        let p = [self.lo * o.lo, self.lo * o.hi, self.hi * o.lo, self.hi * o.hi];
        let lo = p.iter().copied().fold(f64::INFINITY, f64::min);
        let hi = p.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        widen(lo, hi)
    }
}

/// Division by an interval not containing zero.
impl Div for Interval {
    type Output = Interval;

    fn div(self, o: Interval) -> Interval {
        assert!(!o.contains_zero(), "interval division by zero");
        self * widen(1.0 / o.hi, 1.0 / o.lo)
    }
}

/// Interval enclosure of `p` with variables bound to intervals.
pub fn eval_interval(p: &Poly, values: &BTreeMap<String, Interval>) -> Result<Interval> {
    let mut acc = Interval::point(0.0);
    for (m, c) in p.terms() {
        let mut t = Interval::from_rat(c);
        for (name, &e) in p.vars().iter().zip(m.exponents()) {
            if e == 0 {
                continue;
            }
            let v = values
                .get(name)
                .ok_or_else(|| DesingError::UnboundParameter(name.clone()))?;
            t = t.mul(v.powi(e));
        }
        acc = acc.add(t);
    }
    Ok(acc)
}

fn uni_interval(u: &UniPoly, x: Interval) -> Interval {
    u.coeffs()
        .iter()
        .rev()
        .fold(Interval::point(0.0), |acc, c| acc.mul(x).add(Interval::from_rat(c)))
}

fn rat_sign(r: &Rat) -> i8 {
    if r.is_positive() {
        1
    } else if r.is_negative() {
        -1
    } else {
        0
    }
}

/// Eigen-decomposition data shared by both evaluation paths.
struct Linearization {
    jacobian: [[f64; 2]; 2],
    jacobian_exact: Option<[[ExactValue; 2]; 2]>,
    eigenvalues: [[f64; 2]; 2],
    eigenvalues_exact: Option<[ExactValue; 2]>,
    classification: Classification,
}

fn float_eigenvalues(j: &[[f64; 2]; 2]) -> [[f64; 2]; 2] {
    let tr = j[0][0] + j[1][1];
    let det = j[0][0] * j[1][1] - j[0][1] * j[1][0];
    let disc = tr * tr - 4.0 * det;
    if disc >= 0.0 {
        let q = disc.sqrt();
        let (l1, l2) = (0.5 * (tr + q), 0.5 * (tr - q));
        [[l1.max(l2), 0.0], [l1.min(l2), 0.0]]
    } else {
        let im = 0.5 * (-disc).sqrt();
        [[0.5 * tr, im], [0.5 * tr, -im]]
    }
}

fn linearize_exact(j: [[Rat; 2]; 2]) -> Linearization {
    let tr = &j[0][0] + &j[1][1];
    let det = &j[0][0] * &j[1][1] - &j[0][1] * &j[1][0];
    let disc = &tr * &tr - Rat::from_integer(4.into()) * &det;
    let classification =
        Classification::from_signs(rat_sign(&det), rat_sign(&tr), disc.is_negative());
    let jf = [
        [rat_to_f64(&j[0][0]), rat_to_f64(&j[0][1])],
        [rat_to_f64(&j[1][0]), rat_to_f64(&j[1][1])],
    ];
    let triangular = j[0][1].is_zero() || j[1][0].is_zero();
    let eigenvalues_exact = triangular.then(|| {
        let (a, b) = (j[0][0].clone(), j[1][1].clone());
        if a >= b {
            [ExactValue(a), ExactValue(b)]
        } else {
            [ExactValue(b), ExactValue(a)]
        }
    });
    let eigenvalues = match &eigenvalues_exact {
        Some([a, b]) => [[rat_to_f64(&a.0), 0.0], [rat_to_f64(&b.0), 0.0]],
        None => float_eigenvalues(&jf),
    };
    Linearization {
        jacobian: jf,
        jacobian_exact: Some(j.map(|row| row.map(ExactValue))),
        eigenvalues,
        eigenvalues_exact,
        classification,
    }
}

fn linearize_interval(j: [[Interval; 2]; 2]) -> Linearization {
    let tr = j[0][0].add(j[1][1]);
    let det = j[0][0].mul(j[1][1]).sub(j[0][1].mul(j[1][0]));
    let disc = tr.mul(tr).sub(Interval::point(4.0).mul(det));
    let classification = if det.sign() < 0 {
        Classification::HyperbolicSaddle
    } else if det.sign() == 0 || tr.sign() == 0 {
        Classification::NonHyperbolic
    } else {
        Classification::from_signs(1, tr.sign(), disc.hi < 0.0)
    };
    let jf = j.map(|row| row.map(|i| i.mid()));
    Linearization {
        jacobian: jf,
        jacobian_exact: None,
        eigenvalues: float_eigenvalues(&jf),
        eigenvalues_exact: None,
        classification,
    }
}

fn bind_chart(cf: &ChartField, bindings: &Bindings) -> Result<[Poly; 2]> {
    let vars = cf.vars();
    Ok([
        bindings.apply(&cf.desing()[0], &vars)?,
        bindings.apply(&cf.desing()[1], &vars)?,
    ])
}

/// Equilibria of the desingularized chart field on `r = 0`.
pub fn divisor_equilibria(cf: &ChartField, bindings: &Bindings) -> Result<DivisorSet> {
    let [rn, un] = cf.vars();
    let field = bind_chart(cf, bindings)?;
    let mut zero = BTreeMap::new();
    zero.insert(rn.to_string(), Rat::zero());
    let restricted = field[1].partial_eval(&zero).to_univariate(un)?;
    if restricted.is_zero() {
        return Ok(DivisorSet::LineOfEquilibria);
    }
    let partials: Vec<Vec<Poly>> = field
        .iter()
        .map(|p| vec![p.derivative(rn), p.derivative(un)])
        .collect();
    let w = cf.weights();
    let mut out = Vec::new();
    for root in restricted.real_roots(&root_eps()) {
        let lin = match &root {
            RealRoot::Exact(u) => {
                let mut at = BTreeMap::new();
                at.insert(rn.to_string(), Rat::zero());
                at.insert(un.to_string(), u.clone());
                let e = |p: &Poly| p.eval_rat(&at);
                linearize_exact([
                    [e(&partials[0][0])?, e(&partials[0][1])?],
                    [e(&partials[1][0])?, e(&partials[1][1])?],
                ])
            }
            RealRoot::Isolated { lo, hi } => {
                let mut at = BTreeMap::new();
                at.insert(rn.to_string(), Interval::point(0.0));
                at.insert(un.to_string(), Interval::from_rats(lo, hi));
                let e = |p: &Poly| eval_interval(p, &at);
                linearize_interval([
                    [e(&partials[0][0])?, e(&partials[0][1])?],
                    [e(&partials[1][0])?, e(&partials[1][1])?],
                ])
            }
        };
        out.push(Equilibrium {
            frame: Frame::Chart { chart: cf.chart() },
            coords: [
                Coord::Exact {
                    value: ExactValue(Rat::zero()),
                },
                Coord::from_root(&root),
            ],
            jacobian: lin.jacobian,
            jacobian_exact: lin.jacobian_exact,
            eigenvalues: lin.eigenvalues,
            eigenvalues_exact: lin.eigenvalues_exact,
            classification: lin.classification,
            divisor_angle: divisor_angle(cf.chart(), &w, root.approx()),
        });
    }
    Ok(DivisorSet::Isolated(out))
}

/// `sqrt(q)` when `q` is the square of a rational.
fn rat_sqrt(q: &Rat) -> Option<Rat> {
    if q.is_negative() {
        return None;
    }
    let (n, d) = (q.numer(), q.denom());
    let (sn, sd) = (n.sqrt(), d.sqrt());
    (&sn * &sn == *n && &sd * &sd == *d).then(|| Rat::new(sn, sd))
}

/// Angle for `(c, s)`: `atan2(s, c)` in `[0, 2 pi)` on the circle, `asinh(s)` on a hyperbola.
fn angle_of(sig: Signature, c: f64, s: f64) -> f64 {
    match sig {
        Signature::Sphere => {
            let a = s.atan2(c);
            if a < 0.0 {
                a + TAU
            } else {
                a
            }
        }
        Signature::Hyperboloid => s.asinh(),
    }
}

fn angle_enclosure(sig: Signature, c: Interval, s: Interval) -> Coord {
    let mid = angle_of(sig, c.mid(), s.mid());
    let mut lo = mid;
    let mut hi = mid;
    for cc in [c.lo, c.hi] {
        for ss in [s.lo, s.hi] {
            let mut a = angle_of(sig, cc, ss);
            if sig == Signature::Sphere {
                if a - mid > PI {
                    a -= TAU;
                } else if mid - a > PI {
                    a += TAU;
                }
            }
            lo = lo.min(a);
            hi = hi.max(a);
        }
    }
    Coord::Enclosed {
        lo,
        hi,
        approx: mid,
    }
}

/// A candidate `(c, s)` on the divisor, exact or enclosed.
enum CirclePoint {
    Exact(Rat, Rat),
    Enclosed(Interval, Interval),
}

/// Equilibria of a polar field on `r = 0`, coordinates `(angle, r)`.
///
/// Writing the angular component on the divisor as `A0(s) + c A1(s)`, an
/// equilibrium has `A0 = -c A1` with `c^2 = 1 - sigma s^2`, so `s` is a root
/// of `A0^2 - (1 - sigma s^2) A1^2`. On a hyperbola only `c > 0` is on the
/// branch.
pub fn polar_divisor_equilibria(pf: &PolarField, bindings: &Bindings) -> Result<DivisorSet> {
    let (cn, sn, rn) = (pf.c_var(), pf.s_var(), pf.radial_var());
    let free = [cn, sn, rn];
    let sig = pf.model().signature();
    let bind = |q: &QuotientPoly| -> Result<QuotientPoly> {
        let b = bindings.apply(q.base(), &free)?;
        Ok(QuotientPoly::new(b, sig, cn, sn))
    };
    let angular = bind(pf.angular())?;
    let radial = bind(pf.radial())?;
    let mut zero = BTreeMap::new();
    zero.insert(rn.to_string(), Rat::zero());
    let on_div = angular.partial_eval(&zero);
    if on_div.is_zero() {
        return Ok(DivisorSet::LineOfEquilibria);
    }
    let (a0, a1) = on_div.split_c();
    let a0 = a0.to_univariate(sn)?;
    let a1 = a1.to_univariate(sn)?;
    let sigma = Rat::from_integer(sig.sigma().into());
    let c2 = UniPoly::new(vec![Rat::from_integer(1.into()), Rat::zero(), -sigma.clone()]);
    let resultant = {
        let sq0 = mul_uni(&a0, &a0);
        let sq1 = mul_uni(&mul_uni(&a1, &a1), &c2);
        sub_uni(&sq0, &sq1)
    };
    let common = a0.gcd(&a1).squarefree_part();
    let mut points = Vec::new();
    for root in resultant.real_roots(&root_eps()) {
        let on_common = common.degree().unwrap_or(0) > 0 && {
            match &root {
                RealRoot::Exact(v) => common.eval(v).is_zero(),
                RealRoot::Isolated { lo, hi } => {
                    let (l, h) = (common.eval(lo), common.eval(hi));
                    rat_sign(&l) * rat_sign(&h) <= 0
                }
            }
        };
        match &root {
            RealRoot::Exact(s) => {
                let csq = c2.eval(s);
                if on_common {
                    if csq.is_negative() {
                        continue;
                    }
                    match rat_sqrt(&csq) {
                        Some(c) => {
                            points.push(CirclePoint::Exact(c.clone(), s.clone()));
                            if sig == Signature::Sphere && !c.is_zero() {
                                points.push(CirclePoint::Exact(-c, s.clone()));
                            }
                        }
                        None => {
                            let c = Interval::from_rat(&csq).sqrt();
                            let s = Interval::from_rat(s);
                            points.push(CirclePoint::Enclosed(c, s));
                            if sig == Signature::Sphere {
                                let neg = Interval { lo: -c.hi, hi: -c.lo };
                                points.push(CirclePoint::Enclosed(neg, s));
                            }
                        }
                    }
                } else {
                    let c = -a0.eval(s) / a1.eval(s);
                    if sig == Signature::Hyperboloid && !c.is_positive() {
                        continue;
                    }
                    points.push(CirclePoint::Exact(c, s.clone()));
                }
            }
            RealRoot::Isolated { lo, hi } => {
                let s = Interval::from_rats(lo, hi);
                let csq = uni_interval(&c2, s);
                if on_common {
                    if csq.hi < 0.0 {
                        continue;
                    }
                    let c = csq.sqrt();
                    points.push(CirclePoint::Enclosed(c, s));
                    if sig == Signature::Sphere {
                        points.push(CirclePoint::Enclosed(Interval { lo: -c.hi, hi: -c.lo }, s));
                    }
                } else {
                    let den = uni_interval(&a1, s);
                    if den.contains_zero() {
                        return Err(DesingError::Precondition(format!(
                            "cosine component not separated from zero near s = {}",
                            s.mid()
                        )));
                    }
                    let c = uni_interval(&a0, s).div(den).mul(Interval::point(-1.0));
                    if sig == Signature::Hyperboloid && c.sign() <= 0 {
                        continue;
                    }
                    points.push(CirclePoint::Enclosed(c, s));
                }
            }
        }
    }
    let jac = [
        [
            angular.angle_derivative(),
            angular.derivative(rn),
        ],
        [radial.angle_derivative(), radial.derivative(rn)],
    ];
    let frame = Frame::Polar { model: pf.model() };
    let mut out: Vec<Equilibrium> = Vec::new();
    for p in points {
        let (angle_coord, lin) = match &p {
            CirclePoint::Exact(c, s) => {
                let mut at = BTreeMap::new();
                at.insert(cn.to_string(), c.clone());
                at.insert(sn.to_string(), s.clone());
                at.insert(rn.to_string(), Rat::zero());
                let e = |q: &QuotientPoly| q.base().eval_rat(&at);
                let lin = linearize_exact([
                    [e(&jac[0][0])?, e(&jac[0][1])?],
                    [e(&jac[1][0])?, e(&jac[1][1])?],
                ]);
                let (cf, sf) = (rat_to_f64(c), rat_to_f64(s));
                let a = angle_of(sig, cf, sf);
                (
                    Coord::Enclosed {
                        lo: a,
                        hi: a,
                        approx: a,
                    },
                    lin,
                )
            }
            CirclePoint::Enclosed(c, s) => {
                let mut at = BTreeMap::new();
                at.insert(cn.to_string(), *c);
                at.insert(sn.to_string(), *s);
                at.insert(rn.to_string(), Interval::point(0.0));
                let e = |q: &QuotientPoly| eval_interval(q.base(), &at);
                let lin = linearize_interval([
                    [e(&jac[0][0])?, e(&jac[0][1])?],
                    [e(&jac[1][0])?, e(&jac[1][1])?],
                ]);
                (angle_enclosure(sig, *c, *s), lin)
            }
        };
        let angle = angle_coord.approx();
        if out
            .iter()
            .any(|e| (e.coords[0].approx() - angle).abs() < ANGLE_DEDUP)
        {
            continue;
        }
        out.push(Equilibrium {
            frame,
            coords: [
                angle_coord,
                Coord::Exact {
                    value: ExactValue(Rat::zero()),
                },
            ],
            jacobian: lin.jacobian,
            jacobian_exact: lin.jacobian_exact,
            eigenvalues: lin.eigenvalues,
            eigenvalues_exact: lin.eigenvalues_exact,
            classification: lin.classification,
            divisor_angle: angle,
        });
    }
    out.sort_by(|a, b| a.divisor_angle.total_cmp(&b.divisor_angle));
    Ok(DivisorSet::Isolated(out))
}

fn mul_uni(a: &UniPoly, b: &UniPoly) -> UniPoly {
    if a.is_zero() || b.is_zero() {
        return UniPoly::new(vec![]);
    }
    let mut c = vec![Rat::zero(); a.coeffs().len() + b.coeffs().len() - 1];
    for (i, x) in a.coeffs().iter().enumerate() {
        for (j, y) in b.coeffs().iter().enumerate() {
            c[i + j] += x * y;
        }
    }
    UniPoly::new(c)
}

fn sub_uni(a: &UniPoly, b: &UniPoly) -> UniPoly {
    let n = a.coeffs().len().max(b.coeffs().len());
    let get = |p: &UniPoly, i: usize| p.coeffs().get(i).cloned().unwrap_or_else(Rat::zero);
    UniPoly::new((0..n).map(|i| get(a, i) - get(b, i)).collect())
}

/// Direction of the angular flow on an arc of the divisor between two
/// consecutive equilibria; `sign = 1` is counterclockwise.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FlowArc {
    pub from: f64,
    pub to: f64,
    pub sign: i8,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GlobalDivisorReport {
    pub weights: Weights,
    /// Distinct divisor equilibria sorted by angle.
    pub equilibria: Vec<Equilibrium>,
    pub arcs: Vec<FlowArc>,
    /// Charts whose divisor consists entirely of equilibria.
    pub degenerate_charts: Vec<ChartId>,
    /// Pairs of chart-local findings at one angle with different classifications.
    pub disagreements: Vec<String>,
}

/// Runs [`divisor_equilibria`] in all four charts and merges the results by
/// divisor angle.
pub fn global_divisor_report(
    f: &VectorField,
    w: &Weights,
    bindings: &Bindings,
) -> Result<GlobalDivisorReport> {
    let charts = blow_up_all(f, w)?;
    let sets: Vec<DivisorSet> = charts
        .par_iter()
        .map(|cf| divisor_equilibria(cf, bindings))
        .collect::<Result<_>>()?;
    let mut degenerate = Vec::new();
    let mut all: Vec<Equilibrium> = Vec::new();
    for (cf, set) in charts.iter().zip(sets) {
        match set {
            DivisorSet::LineOfEquilibria => degenerate.push(cf.chart()),
            DivisorSet::Isolated(v) => all.extend(v),
        }
    }
    all.sort_by(|a, b| a.divisor_angle.total_cmp(&b.divisor_angle));
    let mut merged: Vec<Equilibrium> = Vec::new();
    let mut disagreements = Vec::new();
    for e in all {
        let dup = merged.iter_mut().find(|m| {
            let d = (m.divisor_angle - e.divisor_angle).abs();
            d.min(TAU - d) < ANGLE_DEDUP
        });
        match dup {
            Some(m) => {
                if m.classification != e.classification {
                    disagreements.push(format!(
                        "{} vs {} at angle {}",
                        m.frame, e.frame, e.divisor_angle
                    ));
                }
                if e.coords[1].approx().abs() < m.coords[1].approx().abs() {
                    *m = e;
                }
            }
            None => merged.push(e),
        }
    }
    let bound: BTreeMap<ChartId, (Poly, String)> = charts
        .iter()
        .map(|cf| {
            let p = bind_chart(cf, bindings).map(|[_, u]| u);
            p.map(|p| {
                let mut zero = BTreeMap::new();
                zero.insert(cf.radial_var().to_string(), Rat::zero());
                (cf.chart(), (p.partial_eval(&zero), cf.angular_var().to_string()))
            })
        })
        .collect::<Result<_>>()?;
    let flow_sign = |angle: f64| -> Result<i8> {
        let (chart, u) = chart_for_angle(angle);
        let (p, name) = &bound[&chart];
        let mut v = BTreeMap::new();
        v.insert(name.clone(), u);
        let val = p.eval_f64(&v)? * chart.orientation();
        Ok(if val > 0.0 {
            1
        } else if val < 0.0 {
            -1
        } else {
            0
        })
    };
    let mut arcs = Vec::new();
    if degenerate.is_empty() {
        if merged.is_empty() {
            arcs.push(FlowArc {
                from: 0.0,
                to: TAU,
                sign: flow_sign(0.0)?,
            });
        }
        for i in 0..merged.len() {
            let from = merged[i].divisor_angle;
            let mut to = merged[(i + 1) % merged.len()].divisor_angle;
            if to <= from {
                to += TAU;
            }
            let mid = (0.5 * (from + to)) % TAU;
            arcs.push(FlowArc {
                from,
                to: to % TAU,
                sign: flow_sign(mid)?,
            });
        }
    }
    Ok(GlobalDivisorReport {
        weights: *w,
        equilibria: merged,
        arcs,
        degenerate_charts: degenerate,
        disagreements,
    })
}

/// Divisor equilibria of a polar model as a sorted list.
pub fn polar_report(pf: &PolarField, bindings: &Bindings) -> Result<DivisorSet> {
    if !pf.is_desingularized() {
        return Err(DesingError::Precondition(format!(
            "{} field must be desingularized before locating divisor equilibria",
            pf.model()
        )));
    }
    polar_divisor_equilibria(pf, bindings)
}

/// Divisor angles of isolated equilibria (empty for a line of equilibria).
pub fn model_angles(set: &DivisorSet) -> Vec<f64> {
    set.isolated()
        .map(|v| v.iter().map(|e| e.divisor_angle).collect())
        .unwrap_or_default()
}
