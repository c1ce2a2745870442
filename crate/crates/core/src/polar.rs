//! Polar blow-up on the circle and on the hyperbolas `H_x`, `H_y`.
//!
//! Symbolic work happens in `Q[c, s, r, params] / (c^2 + sigma*s^2 - 1)`.
//! On the circle (`sigma = 1`) and on `H_x` (`sigma = -1`) the blow-up is
//! `x = r c`, `y = r s`; on `H_y` it is `x = r s`, `y = r c`.

use std::collections::BTreeMap;
use std::fmt;

use exactalg::{Poly, QuotientPoly, Signature};
use serde::{Deserialize, Serialize};

use crate::error::{DesingError, Result};
use crate::field::{fresh_name, Param, VectorField};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum PolarModel {
    Sphere,
    HyperbolicX,
    HyperbolicY,
}

impl PolarModel {
    pub const ALL: [PolarModel; 3] = [
        PolarModel::Sphere,
        PolarModel::HyperbolicX,
        PolarModel::HyperbolicY,
    ];

    pub fn signature(self) -> Signature {
        match self {
            PolarModel::Sphere => Signature::Sphere,
            _ => Signature::Hyperboloid,
        }
    }

    pub fn angle_name(self) -> &'static str {
        match self {
            PolarModel::Sphere => "theta",
            _ => "phi",
        }
    }

    pub fn radial_name(self) -> &'static str {
        match self {
            PolarModel::Sphere => "r",
            _ => "rho",
        }
    }

    /// `(x, y)` at `(angle, radius)`.
    pub fn embed(self, angle: f64, radius: f64) -> [f64; 2] {
        let (c, s) = self.signature().trig(angle);
        match self {
            PolarModel::HyperbolicY => [radius * s, radius * c],
            _ => [radius * c, radius * s],
        }
    }

    pub fn parse(name: &str) -> Option<PolarModel> {
        match name {
            "sphere" | "spherical" => Some(PolarModel::Sphere),
            "hyperbolic-x" | "hx" => Some(PolarModel::HyperbolicX),
            "hyperbolic-y" | "hy" => Some(PolarModel::HyperbolicY),
            _ => None,
        }
    }
}

impl fmt::Display for PolarModel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            PolarModel::Sphere => "sphere",
            PolarModel::HyperbolicX => "hyperbolic-x",
            PolarModel::HyperbolicY => "hyperbolic-y",
        })
    }
}

/// Polar form `(angle', radius')` of a planar field.
#[derive(Clone, Debug, PartialEq)]
pub struct PolarField {
    model: PolarModel,
    c: String,
    s: String,
    radial: String,
    params: Vec<Param>,
    angular_comp: QuotientPoly,
    radial_comp: QuotientPoly,
    desingularized: bool,
    /// Power of the radius divided out by desingularization.
    divided: u32,
    /// Lowest total degree of the original field (`None` for the zero field).
    order: Option<u32>,
}

impl PolarField {
    pub fn model(&self) -> PolarModel {
        self.model
    }

    pub fn c_var(&self) -> &str {
        &self.c
    }

    pub fn s_var(&self) -> &str {
        &self.s
    }

    pub fn radial_var(&self) -> &str {
        &self.radial
    }

    pub fn params(&self) -> &[Param] {
        &self.params
    }

    pub fn angular(&self) -> &QuotientPoly {
        &self.angular_comp
    }

    pub fn radial(&self) -> &QuotientPoly {
        &self.radial_comp
    }

    pub fn is_desingularized(&self) -> bool {
        self.desingularized
    }

    /// Power of the radius removed by [`desingularize_polar`].
    pub fn divided_power(&self) -> u32 {
        self.divided
    }

    /// Radial component restricted to `r = 0` and angular component at `r = 0`.
    pub fn on_divisor(&self) -> [QuotientPoly; 2] {
        let mut zero = BTreeMap::new();
        zero.insert(self.radial.clone(), exactalg::rat(0, 1));
        [
            self.angular_comp.partial_eval(&zero),
            self.radial_comp.partial_eval(&zero),
        ]
    }

    /// Renders both components with `c`, `s` spelled as functions of the angle.
    pub fn render(&self) -> [String; 2] {
        let a = self.model.angle_name();
        [self.angular_comp.render(a), self.radial_comp.render(a)]
    }
}

/// Names `(c, s, r)` avoiding the identifiers of `f`.
fn polar_names(f: &VectorField, model: PolarModel) -> (String, String, String) {
    let mut taken = f.taken_names();
    let c = fresh_name("c", &taken);
    taken.push(c.clone());
    let s = fresh_name("s", &taken);
    taken.push(s.clone());
    let r = fresh_name(model.radial_name(), &taken);
    (c, s, r)
}

/// Determinant of the Jacobian of `(angle, r) -> (x, y)`, reduced: `r` on
/// the circle and on `H_x`, `-r` on `H_y`.
pub fn polar_determinant(model: PolarModel, c: &str, s: &str, r: &str) -> QuotientPoly {
    let sig = model.signature();
    let (cp, sp, rp) = (Poly::var(c), Poly::var(s), Poly::var(r));
    let sigma = Poly::int(sig.sigma());
    // d/dangle: c -> -sigma*s, s -> c
    let dc = -(&sigma * &sp);
    let ds = cp.clone();
    let (x_r, y_r, x_a, y_a) = match model {
        PolarModel::HyperbolicY => (sp.clone(), cp.clone(), &rp * &ds, &rp * &dc),
        _ => (cp.clone(), sp.clone(), &rp * &dc, &rp * &ds),
    };
    QuotientPoly::new(&x_r * &y_a - &x_a * &y_r, sig, c, s)
}

/// Polar form of `f`: solves `D(Phi) * (angle', r') = f o Phi` in the
/// quotient ring.
pub fn polar_pushforward(f: &VectorField, model: PolarModel) -> Result<PolarField> {
    let sig = model.signature();
    let (c, s, r) = polar_names(f, model);
    let (cp, sp, rp) = (Poly::var(&c), Poly::var(&s), Poly::var(&r));
    let (xs, ys) = match model {
        PolarModel::HyperbolicY => (&rp * &sp, &rp * &cp),
        _ => (&rp * &cp, &rp * &sp),
    };
    let mut sub = BTreeMap::new();
    sub.insert(f.x().to_string(), xs);
    sub.insert(f.y().to_string(), ys);
    let g1 = f.f1().substitute(&sub);
    let g2 = f.f2().substitute(&sub);
    let sigma = Poly::int(sig.sigma());
    let (radial, r_times_angular) = match model {
        // r' = c x' + sigma s y',  r angle' = c y' - s x'
        PolarModel::Sphere | PolarModel::HyperbolicX => {
            (&cp * &g1 + &(&sigma * &sp) * &g2, &cp * &g2 - &sp * &g1)
        }
        // rho' = c y' - s x',  rho angle' = c x' - s y'
        PolarModel::HyperbolicY => (&cp * &g2 - &sp * &g1, &cp * &g1 - &sp * &g2),
    };
    let mut order = f.param_names();
    order.extend([c.clone(), s.clone(), r.clone()]);
    let radial = QuotientPoly::new(radial.ordered_as(&order), sig, &c, &s);
    let angular = QuotientPoly::new(r_times_angular.ordered_as(&order), sig, &c, &s)
        .div_exact(&rp)?;
    let order_min = [f.f1(), f.f2()]
        .iter()
        .filter_map(|p| p.min_degree_in_vars(&[f.x(), f.y()]))
        .min();
    Ok(PolarField {
        model,
        c,
        s,
        radial: r,
        params: f.params().to_vec(),
        angular_comp: reorder(angular, &order),
        radial_comp: reorder(radial, &order),
        desingularized: false,
        divided: 0,
        order: order_min,
    })
}

fn reorder(q: QuotientPoly, order: &[String]) -> QuotientPoly {
    QuotientPoly::new(
        q.base().ordered_as(order),
        q.signature(),
        q.c_var(),
        q.s_var(),
    )
}

/// Divides both components by `r^(m-1)`, where `m` is the lowest total
/// degree of the original field. The zero field is returned unchanged.
pub fn desingularize_polar(pf: &PolarField) -> Result<PolarField> {
    if pf.desingularized {
        return Err(DesingError::Precondition(
            "polar field is already desingularized".into(),
        ));
    }
    let Some(m) = pf.order else {
        let mut out = pf.clone();
        out.desingularized = true;
        return Ok(out);
    };
    let power = m.saturating_sub(1);
    let d = Poly::var(&pf.radial).pow(power);
    let mut out = pf.clone();
    out.angular_comp = pf.angular_comp.div_exact(&d)?;
    out.radial_comp = pf.radial_comp.div_exact(&d)?;
    out.divided = power;
    out.desingularized = true;
    Ok(out)
}

fn check_finite(angle: f64, v: [f64; 2]) -> Result<[f64; 2]> {
    if v.iter().all(|x| x.is_finite()) {
        Ok(v)
    } else {
        Err(DesingError::SingularAngle(angle))
    }
}

/// `(theta, r) -> (r1, y1) = (r cos(theta), tan(theta))`.
pub fn bridge_alpha1(theta: f64, r: f64) -> Result<[f64; 2]> {
    let (s, c) = theta.sin_cos();
    if c.abs() < 1e-14 {
        return Err(DesingError::SingularAngle(theta));
    }
    check_finite(theta, [r * c, s / c])
}

/// `(phi, rho) -> (r1, y1) = (rho cosh(phi), tanh(phi))`, defined everywhere.
pub fn bridge_beta1(phi: f64, rho: f64) -> Result<[f64; 2]> {
    check_finite(phi, [rho * phi.cosh(), phi.tanh()])
}

/// `(phi, rho) -> (r2, x2) = (rho sinh(phi), 1 / tanh(phi))`, undefined at `phi = 0`.
pub fn bridge_beta2(phi: f64, rho: f64) -> Result<[f64; 2]> {
    let t = phi.tanh();
    if t == 0.0 {
        return Err(DesingError::SingularAngle(phi));
    }
    check_finite(phi, [rho * phi.sinh(), 1.0 / t])
}

/// Jacobian of [`bridge_beta1`], rows `(r1, y1)`, columns `(d/dphi, d/drho)`.
pub fn bridge_beta1_jacobian(phi: f64, rho: f64) -> [[f64; 2]; 2] {
    let sech = 1.0 / phi.cosh();
    [[rho * phi.sinh(), phi.cosh()], [sech * sech, 0.0]]
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::textfront::{parse_field, parse_poly};

    fn reference_system() -> VectorField {
        parse_field("param a > 0; var x y; dx/dt = a*x^2 - 2*x*y; dy/dt = y^2 - a*x*y;").unwrap()
    }

    fn q(src: &str, sig: Signature) -> QuotientPoly {
        QuotientPoly::new(parse_poly(src).unwrap(), sig, "c", "s")
    }

    #[test]
    fn spherical_form() {
        let pf = polar_pushforward(&reference_system(), PolarModel::Sphere).unwrap();
        let sig = Signature::Sphere;
        assert_eq!(pf.angular(), &q("r*(3*c*s^2 - 2*a*c^2*s)", sig));
        assert_eq!(pf.radial(), &q("r^2*(a*c - 2*s - 2*a*c*s^2 + 3*s^3)", sig));
        let d = desingularize_polar(&pf).unwrap();
        assert_eq!(d.divided_power(), 1);
        assert_eq!(d.angular(), &q("3*c*s^2 - 2*a*c^2*s", sig));
        assert_eq!(d.radial(), &q("r*(a*c - 2*s - 2*a*c*s^2 + 3*s^3)", sig));
        assert!(desingularize_polar(&d).is_err());
    }

    #[test]
    fn hyperbolic_x_form() {
        let pf = polar_pushforward(&reference_system(), PolarModel::HyperbolicX).unwrap();
        let sig = Signature::Hyperboloid;
        assert_eq!(pf.radial_var(), "rho");
        assert_eq!(pf.angular(), &q("rho*(3*c*s^2 - 2*a*c^2*s)", sig));
        assert_eq!(pf.radial(), &q("rho^2*(a*c - 2*s - 3*s^3 + 2*a*c*s^2)", sig));
        assert_ne!(pf.radial(), &q("rho^2*(a*c - 2*s - 3*s^3 - 2*a*c*s^2)", sig));
    }

    #[test]
    fn hyperbolic_y_is_the_swapped_x_model() {
        let f = reference_system();
        let hy = polar_pushforward(&f, PolarModel::HyperbolicY).unwrap();
        let hx = polar_pushforward(&f.swapped(), PolarModel::HyperbolicX).unwrap();
        assert_eq!(hy.angular(), hx.angular());
        assert_eq!(hy.radial(), hx.radial());
    }

    #[test]
    fn determinant_is_the_radius() {
        for m in PolarModel::ALL {
            let d = polar_determinant(m, "c", "s", "r");
            let expect = if m == PolarModel::HyperbolicY { "-r" } else { "r" };
            assert_eq!(d, q(expect, m.signature()), "{m}");
        }
    }

    #[test]
    fn zero_field_is_left_alone() {
        let f = parse_field("var x y; dx/dt = 0; dy/dt = 0;").unwrap();
        let pf = polar_pushforward(&f, PolarModel::Sphere).unwrap();
        let d = desingularize_polar(&pf).unwrap();
        assert!(d.angular().is_zero() && d.radial().is_zero());
    }

    #[test]
    fn bridges() {
        assert_eq!(bridge_alpha1(0.0, 2.0).unwrap(), [2.0, 0.0]);
        let [r1, y1] = bridge_alpha1(std::f64::consts::FRAC_PI_4, 1.0).unwrap();
        assert!((r1 - 0.5f64.sqrt()).abs() < 1e-15 && (y1 - 1.0).abs() < 1e-15);
        for t in [std::f64::consts::FRAC_PI_2, 1.5 * std::f64::consts::PI] {
            assert_eq!(bridge_alpha1(t, 1.0), Err(DesingError::SingularAngle(t)));
        }
        assert_eq!(bridge_beta1(0.0, 3.0).unwrap(), [3.0, 0.0]);
        let phi = (2.0f64 / 3.0).atanh();
        let [_, y1] = bridge_beta1(phi, 0.5).unwrap();
        assert!((y1 - 2.0 / 3.0).abs() < 1e-15);
        assert_eq!(bridge_beta2(0.0, 1.0), Err(DesingError::SingularAngle(0.0)));
        let [r2, x2] = bridge_beta2(1.0, 2.0).unwrap();
        assert!((r2 - 2.0 * 1f64.sinh()).abs() < 1e-15 && (x2 - 1.0 / 1f64.tanh()).abs() < 1e-15);
    }
}
