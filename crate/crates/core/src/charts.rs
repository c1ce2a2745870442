//! Weighted directional blow-up.
//!
//! Chart `K1` sets `x = r^alpha`, `y = r^beta * u`; `K3` is the same with
//! `x = -r^alpha`. `K2` sets `y = r^beta`, `x = r^alpha * u`; `K4` uses
//! `y = -r^beta`. The blown-up field in a chart is obtained by solving the
//! triangular system `D(psi) * (r', u') = f(psi(r, u))` and is divisible by
//! `r^k`; dividing gives the desingularized chart field.

use std::collections::BTreeMap;
use std::fmt;

use exactalg::{Poly, Rat};
use serde::{Deserialize, Serialize};

use crate::error::{DesingError, Result};
use crate::field::{fresh_name, Param, VectorField};
use crate::quasihom::{verify_weights, Weights};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum ChartId {
    /// `x > 0`
    K1,
    /// `y > 0`
    K2,
    /// `x < 0`
    K3,
    /// `y < 0`
    K4,
}

impl ChartId {
    pub const ALL: [ChartId; 4] = [ChartId::K1, ChartId::K2, ChartId::K3, ChartId::K4];

    /// `K1` and `K3` fix the sign of `x`.
    pub fn is_x_chart(self) -> bool {
        matches!(self, ChartId::K1 | ChartId::K3)
    }

    /// Sign of the fixed coordinate.
    pub fn sign(self) -> i64 {
        match self {
            ChartId::K1 | ChartId::K2 => 1,
            ChartId::K3 | ChartId::K4 => -1,
        }
    }

    /// Default names of the radial and angular coordinates.
    pub fn default_names(self) -> (&'static str, &'static str) {
        match self {
            ChartId::K1 => ("r1", "y1"),
            ChartId::K2 => ("r2", "x2"),
            ChartId::K3 => ("r3", "y3"),
            ChartId::K4 => ("r4", "x4"),
        }
    }

    /// Charts whose domains intersect (neighbours around the circle).
    pub fn adjacent(self, other: ChartId) -> bool {
        self.is_x_chart() != other.is_x_chart()
    }

    /// `+1` when the divisor angle increases with the angular coordinate.
    pub fn orientation(self) -> f64 {
        match self {
            ChartId::K1 | ChartId::K4 => 1.0,
            ChartId::K2 | ChartId::K3 => -1.0,
        }
    }

    pub fn parse(name: &str) -> Option<ChartId> {
        match name.to_ascii_uppercase().as_str() {
            "K1" | "1" => Some(ChartId::K1),
            "K2" | "2" => Some(ChartId::K2),
            "K3" | "3" => Some(ChartId::K3),
            "K4" | "4" => Some(ChartId::K4),
            _ => None,
        }
    }
}

impl fmt::Display for ChartId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            ChartId::K1 => "K1",
            ChartId::K2 => "K2",
            ChartId::K3 => "K3",
            ChartId::K4 => "K4",
        };
        f.write_str(s)
    }
}

/// A field expressed in one directional chart, in the order `(r', u')`.
#[derive(Clone, Debug, PartialEq)]
pub struct ChartField {
    chart: ChartId,
    weights: Weights,
    radial: String,
    angular: String,
    params: Vec<Param>,
    raw: [Poly; 2],
    desing: [Poly; 2],
}

impl ChartField {
    pub fn chart(&self) -> ChartId {
        self.chart
    }

    pub fn weights(&self) -> Weights {
        self.weights
    }

    pub fn radial_var(&self) -> &str {
        &self.radial
    }

    pub fn angular_var(&self) -> &str {
        &self.angular
    }

    pub fn vars(&self) -> [&str; 2] {
        [&self.radial, &self.angular]
    }

    pub fn params(&self) -> &[Param] {
        &self.params
    }

    /// Blown-up field before division.
    pub fn raw(&self) -> &[Poly; 2] {
        &self.raw
    }

    /// `raw / r^k`.
    pub fn desing(&self) -> &[Poly; 2] {
        &self.desing
    }

    /// Desingularized angular component restricted to the divisor `r = 0`.
    pub fn divisor_restriction(&self) -> Poly {
        let mut zero = BTreeMap::new();
        zero.insert(self.radial.clone(), Rat::from_integer(0.into()));
        self.desing[1].partial_eval(&zero)
    }

    /// `psi(r, u) = (x, y)` for this chart.
    pub fn chart_map(&self, p: [f64; 2]) -> [f64; 2] {
        chart_map(self.chart, &self.weights, p)
    }

    /// Jacobian of [`ChartField::chart_map`].
    pub fn chart_map_jacobian(&self, p: [f64; 2]) -> [[f64; 2]; 2] {
        chart_map_jacobian(self.chart, &self.weights, p)
    }
}

/// Substitution `x, y -> psi(r, u)` as polynomials.
fn chart_substitution(
    chart: ChartId,
    w: &Weights,
    x: &str,
    y: &str,
    r: &Poly,
    u: &Poly,
) -> BTreeMap<String, Poly> {
    let eps = Poly::int(chart.sign());
    let mut b = BTreeMap::new();
    if chart.is_x_chart() {
        b.insert(x.to_string(), &eps * &r.pow(w.alpha));
        b.insert(y.to_string(), &r.pow(w.beta) * u);
    } else {
        b.insert(x.to_string(), &r.pow(w.alpha) * u);
        b.insert(y.to_string(), &eps * &r.pow(w.beta));
    }
    b
}

/// Blows up the origin of `f` in `chart` with weights `w`.
///
/// Fails with `InvalidWeights` unless `w` satisfies the quasi-homogeneity
/// condition for `f`.
pub fn blow_up_in_chart(f: &VectorField, w: &Weights, chart: ChartId) -> Result<ChartField> {
    if !verify_weights(f, w) {
        return Err(DesingError::InvalidWeights(w.triple()));
    }
    let taken = f.taken_names();
    let (rn, un) = chart.default_names();
    let radial = fresh_name(rn, &taken);
    let mut taken2 = taken.clone();
    taken2.push(radial.clone());
    let angular = fresh_name(un, &taken2);
    let r = Poly::var(&radial);
    let u = Poly::var(&angular);
    let sub = chart_substitution(chart, w, f.x(), f.y(), &r, &u);
    let g1 = f.f1().substitute(&sub);
    let g2 = f.f2().substitute(&sub);
    let eps = Rat::from_integer(chart.sign().into());
    // fixed coordinate c = eps*r^p, free coordinate v = r^q*u:
    // c' = eps*p*r^(p-1)*r',  v' = q*r^(q-1)*u*r' + r^q*u'
    let (p, q, fixed, free) = if chart.is_x_chart() {
        (w.alpha, w.beta, g1, g2)
    } else {
        (w.beta, w.alpha, g2, g1)
    };
    let r_dot = fixed
        .div_exact(&r.pow(p - 1))?
        .scale(&(eps / Rat::from_integer(p.into())));
    let correction = (&Poly::int(q as i64) * &r.pow(q - 1)) * (&u * &r_dot);
    let u_dot = (&free - &correction).div_exact(&r.pow(q))?;
    let mut order = f.param_names();
    order.push(radial.clone());
    order.push(angular.clone());
    let raw = [r_dot.ordered_as(&order), u_dot.ordered_as(&order)];
    let rk = r.pow(w.k);
    let desing = [
        raw[0].div_exact(&rk)?.ordered_as(&order),
        raw[1].div_exact(&rk)?.ordered_as(&order),
    ];
    Ok(ChartField {
        chart,
        weights: *w,
        radial,
        angular,
        params: f.params().to_vec(),
        raw,
        desing,
    })
}

/// All four charts.
pub fn blow_up_all(f: &VectorField, w: &Weights) -> Result<Vec<ChartField>> {
    ChartId::ALL
        .iter()
        .map(|&c| blow_up_in_chart(f, w, c))
        .collect()
}

/// Exact check of `D(psi) * raw = f o psi`.
pub fn pushforward_identity(f: &VectorField, cf: &ChartField) -> bool {
    let w = cf.weights;
    let r = Poly::var(&cf.radial);
    let u = Poly::var(&cf.angular);
    let sub = chart_substitution(cf.chart, &w, f.x(), f.y(), &r, &u);
    let eps = Poly::int(cf.chart.sign());
    let [rd, ud] = &cf.raw;
    let (p, q) = if cf.chart.is_x_chart() {
        (w.alpha, w.beta)
    } else {
        (w.beta, w.alpha)
    };
    let fixed_dot = &(&eps * &Poly::int(p as i64)) * &(&r.pow(p - 1) * rd);
    let free_dot = &(&Poly::int(q as i64) * &r.pow(q - 1)) * &(&u * rd) + &r.pow(q) * ud;
    let (xd, yd) = if cf.chart.is_x_chart() {
        (fixed_dot, free_dot)
    } else {
        (free_dot, fixed_dot)
    };
    xd == f.f1().substitute(&sub) && yd == f.f2().substitute(&sub)
}

fn powf_int(x: f64, n: u32) -> f64 {
    x.powi(n as i32)
}

/// `psi(r, u)` in floating point.
pub fn chart_map(chart: ChartId, w: &Weights, p: [f64; 2]) -> [f64; 2] {
    let [r, u] = p;
    let eps = chart.sign() as f64;
    if chart.is_x_chart() {
        [eps * powf_int(r, w.alpha), powf_int(r, w.beta) * u]
    } else {
        [powf_int(r, w.alpha) * u, eps * powf_int(r, w.beta)]
    }
}

/// Rows `(dx, dy)`, columns `(d/dr, d/du)`.
pub fn chart_map_jacobian(chart: ChartId, w: &Weights, p: [f64; 2]) -> [[f64; 2]; 2] {
    let [r, u] = p;
    let eps = chart.sign() as f64;
    let d = |n: u32| n as f64 * if n == 0 { 0.0 } else { powf_int(r, n - 1) };
    if chart.is_x_chart() {
        [[eps * d(w.alpha), 0.0], [d(w.beta) * u, powf_int(r, w.beta)]]
    } else {
        [[d(w.alpha) * u, powf_int(r, w.alpha)], [eps * d(w.beta), 0.0]]
    }
}

/// Weighted direction `(X, Y)` of a chart point: `psi(r, u) = (r^alpha X, r^beta Y)`.
fn direction(chart: ChartId, u: f64) -> (f64, f64) {
    let eps = chart.sign() as f64;
    if chart.is_x_chart() {
        (eps, u)
    } else {
        (u, eps)
    }
}

/// Chart coordinates of the point with direction `(x_dir, y_dir)` and radius `r`.
fn from_direction(
    chart: ChartId,
    w: &Weights,
    r: f64,
    x_dir: f64,
    y_dir: f64,
) -> std::result::Result<[f64; 2], String> {
    let eps = chart.sign() as f64;
    let (a, b) = (w.alpha as f64, w.beta as f64);
    if chart.is_x_chart() {
        let t = eps * x_dir;
        if t.is_nan() || t <= 0.0 {
            return Err(format!("x-direction {x_dir} has the wrong sign"));
        }
        Ok([r * t.powf(1.0 / a), y_dir / t.powf(b / a)])
    } else {
        let t = eps * y_dir;
        if t.is_nan() || t <= 0.0 {
            return Err(format!("y-direction {y_dir} has the wrong sign"));
        }
        Ok([r * t.powf(1.0 / b), x_dir / t.powf(a / b)])
    }
}

/// Coordinate change between overlapping charts.
pub fn transition(p: [f64; 2], from: ChartId, to: ChartId, w: &Weights) -> Result<[f64; 2]> {
    if from == to {
        return Ok(p);
    }
    if !from.adjacent(to) {
        return Err(DesingError::NoOverlap { from, to });
    }
    let (xd, yd) = direction(from, p[1]);
    from_direction(to, w, p[0], xd, yd)
        .map_err(|reason| DesingError::OutOfDomain { chart: to, reason })
}

/// Exact transition for weights `(1, 1)`: `(r, u) -> (eps' r Z, (other)/(eps' Z))`.
pub fn transition_exact(p: &[Rat; 2], from: ChartId, to: ChartId) -> Result<[Rat; 2]> {
    if from == to {
        return Ok(p.clone());
    }
    if !from.adjacent(to) {
        return Err(DesingError::NoOverlap { from, to });
    }
    let eps_from = Rat::from_integer(from.sign().into());
    let eps_to = Rat::from_integer(to.sign().into());
    // direction of the point: the fixed coordinate is eps_from, the free one u
    let t = &eps_to * &p[1];
    if t <= Rat::from_integer(0.into()) {
        return Err(DesingError::OutOfDomain {
            chart: to,
            reason: format!("angular coordinate {} has the wrong sign", p[1]),
        });
    }
    Ok([&p[0] * &t, eps_from / t])
}

/// Angle of the divisor point with angular coordinate `u`, in `[0, 2 pi)`.
///
/// The weighted direction is scaled onto the boundary of the square
/// `[-1, 1]^2` and the key is the polar angle of that representative.
pub fn divisor_angle(chart: ChartId, w: &Weights, u: f64) -> f64 {
    let (xd, yd) = square_representative(chart, w, u);
    let mut a = yd.atan2(xd);
    if a < 0.0 {
        a += std::f64::consts::TAU;
    }
    if a >= std::f64::consts::TAU {
        a -= std::f64::consts::TAU;
    }
    a
}

fn square_representative(chart: ChartId, w: &Weights, u: f64) -> (f64, f64) {
    let (a, b) = (w.alpha as f64, w.beta as f64);
    let (xd, yd) = direction(chart, u);
    if u.abs() <= 1.0 {
        return (xd, yd);
    }
    // scale by t with |free coordinate| = 1
    if chart.is_x_chart() {
        (xd * u.abs().powf(-a / b), u.signum())
    } else {
        (u.signum(), yd * u.abs().powf(-b / a))
    }
}

/// Chart and angular coordinate covering the divisor point at `angle`, with
/// `|u| <= 1`.
pub fn chart_for_angle(angle: f64) -> (ChartId, f64) {
    let (s, c) = angle.sin_cos();
    let m = c.abs().max(s.abs());
    let (xr, yr) = (c / m, s / m);
    if c.abs() >= s.abs() {
        let chart = if xr > 0.0 { ChartId::K1 } else { ChartId::K3 };
        (chart, yr)
    } else {
        let chart = if yr > 0.0 { ChartId::K2 } else { ChartId::K4 };
        (chart, xr)
    }
}

/// Polynomial times a negative power of the angular variable.
#[derive(Clone, Debug)]
struct Laurent {
    p: Poly,
    /// value is `p * u^(-shift)`
    shift: u32,
}

impl Laurent {
    fn poly(p: Poly) -> Self {
        Laurent { p, shift: 0 }
    }

    fn lift(&self, shift: u32, u: &Poly) -> Poly {
        &self.p * &u.pow(shift - self.shift)
    }

    fn sub(&self, other: &Laurent, u: &Poly) -> Laurent {
        let shift = self.shift.max(other.shift);
        Laurent {
            p: &self.lift(shift, u) - &other.lift(shift, u),
            shift,
        }
    }
}

/// `q(..., w)` with `w = 1/u`, as a Laurent polynomial in `u`.
fn invert_placeholder(q: &Poly, w_name: &str, u: &Poly) -> Laurent {
    let coeffs = q.coefficients_in(w_name);
    let n = (coeffs.len() - 1) as u32;
    let mut p = Poly::zero();
    for (j, c) in coeffs.into_iter().enumerate() {
        if !c.is_zero() {
            p = &p + &(&c * &u.pow(n - j as u32));
        }
    }
    Laurent { p, shift: n }
}

/// `D(T) * from_desing - lambda * (to_desing o T)` with `lambda = (R/r)^k`,
/// cleared of denominators; `to_desing` is given in the variables `to_vars`.
///
/// Needs the transition to be a Laurent monomial map: `beta = 1` out of an
/// x-chart, `alpha = 1` out of a y-chart.
pub fn transition_defect(
    from: &ChartField,
    to: ChartId,
    to_desing: &[Poly; 2],
    to_vars: [&str; 2],
) -> Result<[Poly; 2]> {
    let w = from.weights;
    let fc = from.chart;
    if !fc.adjacent(to) {
        return Err(DesingError::NoOverlap { from: fc, to });
    }
    let (exp_r, m) = if fc.is_x_chart() {
        (w.beta, w.alpha)
    } else {
        (w.alpha, w.beta)
    };
    if exp_r != 1 {
        return Err(DesingError::NonMonomialTransition {
            from: fc,
            to,
            weights: w.triple(),
        });
    }
    let eps_to = to.sign();
    // c = eps_from * eps_to^m
    let c = fc.sign() * if m % 2 == 0 { 1 } else { eps_to };
    let r = Poly::var(&from.radial);
    let u = Poly::var(&from.angular);
    let mut taken: Vec<String> = from.params.iter().map(|p| p.name.clone()).collect();
    taken.extend([from.radial.clone(), from.angular.clone()]);
    taken.extend(to_vars.iter().map(|s| s.to_string()));
    let w_name = fresh_name("w", &taken);
    let wv = Poly::var(&w_name);
    // T(r, u) = (eps_to * r * u, c * u^(-m))
    let mut sub = BTreeMap::new();
    sub.insert(to_vars[0].to_string(), &(&Poly::int(eps_to) * &r) * &u);
    sub.insert(to_vars[1].to_string(), &Poly::int(c) * &wv.pow(m));
    let g: Vec<Laurent> = to_desing
        .iter()
        .map(|p| invert_placeholder(&p.substitute(&sub), &w_name, &u))
        .collect();
    let lambda = &Poly::int(if w.k.is_multiple_of(2) { 1 } else { eps_to }) * &u.pow(w.k);
    let [fr, fu] = &from.desing;
    // D(T) = [[eps_to*u, eps_to*r], [0, -m*c*u^(-m-1)]]
    let e = Poly::int(eps_to);
    let d0 = Laurent::poly(&(&e * &u) * fr + &(&e * &r) * fu);
    let d1 = Laurent {
        p: &Poly::int(-(m as i64) * c) * fu,
        shift: m + 1,
    };
    let l0 = Laurent {
        p: &lambda * &g[0].p,
        shift: g[0].shift,
    };
    let l1 = Laurent {
        p: &lambda * &g[1].p,
        shift: g[1].shift,
    };
    let mut order: Vec<String> = from.params.iter().map(|p| p.name.clone()).collect();
    order.extend([from.radial.clone(), from.angular.clone()]);
    Ok([
        d0.sub(&l0, &u).p.ordered_as(&order),
        d1.sub(&l1, &u).p.ordered_as(&order),
    ])
}

/// [`transition_defect`] between the blown-up fields of two charts.
pub fn compatibility_defect(
    f: &VectorField,
    w: &Weights,
    from: ChartId,
    to: ChartId,
) -> Result<[Poly; 2]> {
    let a = blow_up_in_chart(f, w, from)?;
    let b = blow_up_in_chart(f, w, to)?;
    transition_defect(&a, to, b.desing(), b.vars())
}

/// The four adjacent ordered pairs `K1 -> K2 -> K3 -> K4 -> K1`, plus reverses.
pub fn adjacent_pairs() -> Vec<(ChartId, ChartId)> {
    let mut v = Vec::new();
    for (i, &a) in ChartId::ALL.iter().enumerate() {
        let b = ChartId::ALL[(i + 1) % 4];
        v.push((a, b));
        v.push((b, a));
    }
    v
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::textfront::{parse_field, parse_poly};
    use exactalg::rat;

    fn reference_system() -> VectorField {
        parse_field("param a > 0; var x y; dx/dt = a*x^2 - 2*x*y; dy/dt = y^2 - a*x*y;").unwrap()
    }

    fn unit() -> Weights {
        Weights::new(1, 1, 1)
    }

    fn poly(s: &str) -> Poly {
        parse_poly(s).unwrap()
    }

    fn point(p: (i64, i64), q: (i64, i64)) -> [Rat; 2] {
        [rat(p.0, p.1), rat(q.0, q.1)]
    }

    #[test]
    fn chart_one_matches_hand_expansion() {
        let cf = blow_up_in_chart(&reference_system(), &unit(), ChartId::K1).unwrap();
        assert_eq!(cf.vars(), ["r1", "y1"]);
        assert_eq!(cf.raw()[0], poly("r1^2*(a - 2*y1)"));
        assert_eq!(cf.raw()[1], poly("r1*y1*(3*y1 - 2*a)"));
        assert_eq!(cf.desing()[0], poly("r1*(a - 2*y1)"));
        assert_eq!(cf.desing()[1], poly("y1*(3*y1 - 2*a)"));
    }

    #[test]
    fn remaining_charts() {
        let f = reference_system();
        let k2 = blow_up_in_chart(&f, &unit(), ChartId::K2).unwrap();
        assert_eq!(k2.desing()[0], poly("r2*(1 - a*x2)"));
        assert_eq!(k2.desing()[1], poly("x2*(2*a*x2 - 3)"));
        let k3 = blow_up_in_chart(&f, &unit(), ChartId::K3).unwrap();
        assert_eq!(k3.desing()[0], poly("-r3*(a + 2*y3)"));
        assert_eq!(k3.desing()[1], poly("y3*(3*y3 + 2*a)"));
        let k4 = blow_up_in_chart(&f, &unit(), ChartId::K4).unwrap();
        assert_eq!(k4.desing()[0], poly("-r4*(1 + a*x4)"));
        assert_eq!(k4.desing()[1], poly("x4*(2*a*x4 + 3)"));
        for cf in [k2, k3, k4] {
            assert!(pushforward_identity(&f, &cf));
        }
    }

    #[test]
    fn raw_is_radial_power_times_desing() {
        let f = parse_field("var x y; dx/dt = x^2 - y; dy/dt = x*y;").unwrap();
        let w = crate::quasihom::infer_weights(&f).unwrap();
        assert_eq!(w.triple(), [1, 2, 1]);
        for cf in blow_up_all(&f, &w).unwrap() {
            let r = Poly::var(cf.radial_var());
            for i in 0..2 {
                assert_eq!(cf.raw()[i], &r.pow(w.k) * &cf.desing()[i]);
            }
            assert!(pushforward_identity(&f, &cf));
        }
    }

    #[test]
    fn zero_field_blows_up_to_zero() {
        let f = parse_field("var x y; dx/dt = 0; dy/dt = 0;").unwrap();
        let cf = blow_up_in_chart(&f, &Weights::new(1, 1, 0), ChartId::K2).unwrap();
        assert!(cf.raw().iter().all(Poly::is_zero));
        assert!(cf.desing().iter().all(Poly::is_zero));
    }

    #[test]
    fn wrong_weights_rejected() {
        let e = blow_up_in_chart(&reference_system(), &Weights::new(2, 1, 1), ChartId::K1);
        assert_eq!(e, Err(DesingError::InvalidWeights([2, 1, 1])));
    }

    #[test]
    fn names_avoid_parameters() {
        let f = parse_field("param r1; var x y; dx/dt = r1*x^2; dy/dt = y^2;").unwrap();
        let cf = blow_up_in_chart(&f, &unit(), ChartId::K1).unwrap();
        assert_eq!(cf.vars(), ["r1_", "y1"]);
    }

    #[test]
    fn exact_transition_examples() {
        let t = transition_exact(&point((2, 1), (1, 2)), ChartId::K1, ChartId::K2).unwrap();
        assert_eq!(t, point((1, 1), (2, 1)));
        let t = transition_exact(&point((0, 1), (1, 1)), ChartId::K1, ChartId::K2).unwrap();
        assert_eq!(t, point((0, 1), (1, 1)));
        let there = transition_exact(&point((3, 1), (2, 1)), ChartId::K1, ChartId::K2).unwrap();
        let back = transition_exact(&there, ChartId::K2, ChartId::K1).unwrap();
        assert_eq!(back, point((3, 1), (2, 1)));
        assert!(matches!(
            transition_exact(&point((1, 1), (0, 1)), ChartId::K1, ChartId::K2),
            Err(DesingError::OutOfDomain { .. })
        ));
        assert!(matches!(
            transition_exact(&point((1, 1), (1, 1)), ChartId::K1, ChartId::K3),
            Err(DesingError::NoOverlap { .. })
        ));
    }

    #[test]
    fn float_transition_agrees_with_chart_maps() {
        let w = Weights::new(2, 3, 1);
        for (from, to) in adjacent_pairs() {
            let p = [0.7, 1.3 * to.sign() as f64];
            let q = transition(p, from, to, &w).unwrap();
            let a = chart_map(from, &w, p);
            let b = chart_map(to, &w, q);
            assert!((a[0] - b[0]).abs() < 1e-12 && (a[1] - b[1]).abs() < 1e-12, "{from}->{to}");
        }
    }

    #[test]
    fn compatibility_of_adjacent_charts() {
        let f = reference_system();
        for (a, b) in adjacent_pairs() {
            let d = compatibility_defect(&f, &unit(), a, b).unwrap();
            assert!(d[0].is_zero() && d[1].is_zero(), "{a}->{b}: {} / {}", d[0], d[1]);
        }
        let k1 = blow_up_in_chart(&f, &unit(), ChartId::K1).unwrap();
        let printed = [poly("r2*(1 - a*x2)"), poly("x2*(2*a*r2 - 3)")];
        let d = transition_defect(&k1, ChartId::K2, &printed, ["r2", "x2"]).unwrap();
        assert!(!d[1].is_zero());
    }

    #[test]
    fn angle_keys() {
        let w = unit();
        assert_eq!(divisor_angle(ChartId::K1, &w, 0.0), 0.0);
        assert!((divisor_angle(ChartId::K1, &w, 2.0 / 3.0) - (2.0f64 / 3.0).atan()).abs() < 1e-15);
        assert!((divisor_angle(ChartId::K2, &w, 1.5) - (2.0f64 / 3.0).atan()).abs() < 1e-15);
        assert!((divisor_angle(ChartId::K3, &w, 0.0) - std::f64::consts::PI).abs() < 1e-15);
        assert!((divisor_angle(ChartId::K4, &w, 0.0) - 1.5 * std::f64::consts::PI).abs() < 1e-15);
        for k in 0..64 {
            let a = k as f64 * std::f64::consts::TAU / 64.0 + 0.01;
            let (c, u) = chart_for_angle(a);
            assert!(u.abs() <= 1.0);
            assert!((divisor_angle(c, &w, u) - a).abs() < 1e-12);
        }
    }
}
