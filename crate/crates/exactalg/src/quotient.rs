use std::collections::BTreeMap;
use std::fmt;

use crate::poly::Poly;
use crate::rat::Rat;
use crate::AlgebraError;

/// Which quadric the pair `(c, s)` lives on.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Signature {
    /// `c^2 + s^2 = 1`, with `c = cos(theta)`, `s = sin(theta)`.
    Sphere,
    /// `c^2 - s^2 = 1`, with `c = cosh(phi)`, `s = sinh(phi)`.
    Hyperboloid,
}

impl Signature {
    pub fn sigma(self) -> i64 {
        match self {
            Signature::Sphere => 1,
            Signature::Hyperboloid => -1,
        }
    }

    /// `c^2` expressed through `s`: `1 - sigma*s^2`.
    fn c_squared(self, s: &str) -> Poly {
        Poly::int(1) - Poly::int(self.sigma()) * Poly::var(s).pow(2)
    }

    /// `(cos, sin)` or `(cosh, sinh)` of an angle.
    pub fn trig(self, angle: f64) -> (f64, f64) {
        match self {
            Signature::Sphere => (angle.cos(), angle.sin()),
            Signature::Hyperboloid => (angle.cosh(), angle.sinh()),
        }
    }
}

/// Element of `Q[c, s, ...] / (c^2 + sigma*s^2 - 1)`.
///
/// The normal form has degree at most one in `c`; every constructor other
/// than [`QuotientPoly::unreduced`] returns a reduced element, so `==` is
/// equality in the quotient ring.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct QuotientPoly {
    base: Poly,
    signature: Signature,
    c: String,
    s: String,
}

impl QuotientPoly {
    pub fn new(base: Poly, signature: Signature, c: &str, s: &str) -> Self {
        QuotientPoly::unreduced(base, signature, c, s).reduce()
    }

    /// Wraps `base` without reducing it.
    pub fn unreduced(base: Poly, signature: Signature, c: &str, s: &str) -> Self {
        QuotientPoly {
            base,
            signature,
            c: c.to_string(),
            s: s.to_string(),
        }
    }

    pub fn base(&self) -> &Poly {
        &self.base
    }

    pub fn signature(&self) -> Signature {
        self.signature
    }

    pub fn c_var(&self) -> &str {
        &self.c
    }

    pub fn s_var(&self) -> &str {
        &self.s
    }

    pub fn is_zero(&self) -> bool {
        self.base.is_zero()
    }

    pub fn is_reduced(&self) -> bool {
        self.base.degree_in(&self.c) <= 1
    }

    /// Rewrites `c^2 -> 1 - sigma*s^2` until every term has `c`-degree at most one.
    pub fn reduce(&self) -> QuotientPoly {
        if self.is_reduced() {
            return self.clone();
        }
        let c2 = self.signature.c_squared(&self.s);
        let c = Poly::var(&self.c);
        let mut powers: Vec<Poly> = vec![Poly::int(1)];
        let mut out = Poly::zero();
        for (k, coeff) in self.base.coefficients_in(&self.c).into_iter().enumerate() {
            if coeff.is_zero() {
                continue;
            }
            let half = k / 2;
            while powers.len() <= half {
                let next = powers.last().unwrap() * &c2;
                powers.push(next);
            }
            let mut term = &coeff * &powers[half];
            if k % 2 == 1 {
                term = &term * &c;
            }
            out = &out + &term;
        }
        let order = self.base.vars().to_vec();
        QuotientPoly {
            base: out.ordered_as(&order),
            signature: self.signature,
            c: self.c.clone(),
            s: self.s.clone(),
        }
    }

    fn same_ring(&self, other: &QuotientPoly) {
        assert!(
            self.signature == other.signature && self.c == other.c && self.s == other.s,
            "quotient ring mismatch"
        );
    }

    fn wrap(&self, base: Poly) -> QuotientPoly {
        QuotientPoly::new(base, self.signature, &self.c, &self.s)
    }

    pub fn add(&self, other: &QuotientPoly) -> QuotientPoly {
        self.same_ring(other);
        self.wrap(&self.base + &other.base)
    }

    pub fn sub(&self, other: &QuotientPoly) -> QuotientPoly {
        self.same_ring(other);
        self.wrap(&self.base - &other.base)
    }

    pub fn mul(&self, other: &QuotientPoly) -> QuotientPoly {
        self.same_ring(other);
        self.wrap(&self.base * &other.base)
    }

    pub fn mul_poly(&self, p: &Poly) -> QuotientPoly {
        self.wrap(&self.base * p)
    }

    pub fn neg(&self) -> QuotientPoly {
        self.wrap(-&self.base)
    }

    /// Exact division by a polynomial free of `c` and `s` (typically `r^k`).
    ///
    /// Such divisors are not zero divisors modulo the relation, and the
    /// normal form is a free module over `Q[s, ...]` with basis `{1, c}`, so
    /// dividing the normal form termwise is exact whenever possible at all.
    pub fn div_exact(&self, divisor: &Poly) -> Result<QuotientPoly, AlgebraError> {
        let used = divisor.used_vars();
        assert!(
            !used.contains(&self.c) && !used.contains(&self.s),
            "divisor must not involve the circle variables"
        );
        let q = self.base.div_exact(divisor)?;
        Ok(self.wrap(q))
    }

    /// Partial derivative with respect to a variable other than `c`, `s`.
    pub fn derivative(&self, var: &str) -> QuotientPoly {
        self.wrap(self.base.derivative(var))
    }

    /// Derivative along the angle: `dc/dangle = -sigma*s`, `ds/dangle = c`.
    pub fn angle_derivative(&self) -> QuotientPoly {
        let dc = self.base.derivative(&self.c);
        let ds = self.base.derivative(&self.s);
        let s = Poly::var(&self.s);
        let c = Poly::var(&self.c);
        let sigma = Poly::int(self.signature.sigma());
        self.wrap(&(-(&sigma * &s)) * &dc + &c * &ds)
    }

    /// Binds non-circle variables (parameters) to rationals.
    pub fn partial_eval(&self, values: &BTreeMap<String, Rat>) -> QuotientPoly {
        self.wrap(self.base.partial_eval(values))
    }

    /// Splits the normal form as `A0(s, ...) + c*A1(s, ...)`.
    pub fn split_c(&self) -> (Poly, Poly) {
        let mut parts = self.base.coefficients_in(&self.c);
        parts.resize(2, Poly::zero());
        let a1 = parts.pop().unwrap();
        let a0 = parts.pop().unwrap();
        (a0, a1)
    }

    /// Numeric value at `angle` (through cos/sin or cosh/sinh) and the
    /// remaining variables.
    pub fn eval_at_angle(
        &self,
        angle: f64,
        values: &BTreeMap<String, f64>,
    ) -> Result<f64, AlgebraError> {
        let (c, s) = self.signature.trig(angle);
        let mut vals = values.clone();
        vals.insert(self.c.clone(), c);
        vals.insert(self.s.clone(), s);
        self.base.eval_f64(&vals)
    }

    /// Terms with `c`-degree above one (zero for reduced elements).
    pub fn unreduced_terms(&self) -> usize {
        let c = self.c.as_str();
        self.base
            .exponents_of(&[c])
            .into_iter()
            .filter(|e| e[0] > 1)
            .count()
    }

    /// Renders with `c`, `s` spelled as the transcendental functions of `angle`.
    pub fn render(&self, angle: &str) -> String {
        let (cn, sn) = match self.signature {
            Signature::Sphere => (format!("cos({angle})"), format!("sin({angle})")),
            Signature::Hyperboloid => (format!("cosh({angle})"), format!("sinh({angle})")),
        };
        let mut vars: Vec<String> = self.base.vars().to_vec();
        for v in vars.iter_mut() {
            if *v == self.c {
                *v = cn.clone();
            } else if *v == self.s {
                *v = sn.clone();
            }
        }
        let terms = self
            .base
            .terms()
            .map(|(m, c)| (c.clone(), m.exponents().to_vec()))
            .collect::<Vec<_>>();
        let names: Vec<&str> = vars.iter().map(|s| s.as_str()).collect();
        Poly::from_terms(&names, terms).to_string()
    }
}

impl fmt::Display for QuotientPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.base)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c() -> Poly {
        Poly::var("c")
    }
    fn s() -> Poly {
        Poly::var("s")
    }

    #[test]
    fn sphere_rewrites_c_cubed() {
        let q = QuotientPoly::new(c().pow(3), Signature::Sphere, "c", "s");
        assert_eq!(*q.base(), c() - &c() * &s().pow(2));
    }

    #[test]
    fn hyperboloid_rewrites_with_opposite_sign() {
        let a = Poly::var("a");
        let q = QuotientPoly::new(&a * &c().pow(3), Signature::Hyperboloid, "c", "s");
        assert_eq!(*q.base(), &a * &c() + &a * &c() * &s().pow(2));
    }

    #[test]
    fn reduced_input_is_fixed() {
        let p = &c() * &s() + s().pow(5) - Poly::int(3);
        let q = QuotientPoly::unreduced(p.clone(), Signature::Sphere, "c", "s");
        assert!(q.is_reduced());
        assert_eq!(q.reduce(), q);
        assert_eq!(*q.reduce().base(), p);
    }

    #[test]
    fn relation_reduces_to_zero() {
        let rel = c().pow(2) + s().pow(2) - Poly::int(1);
        assert!(QuotientPoly::new(rel, Signature::Sphere, "c", "s").is_zero());
        let rel = c().pow(2) - s().pow(2) - Poly::int(1);
        assert!(QuotientPoly::new(rel, Signature::Hyperboloid, "c", "s").is_zero());
    }

    #[test]
    fn angle_derivative_matches_trig_identities() {
        // d/dtheta (c*s) = c^2 - s^2 = 1 - 2 s^2 on the circle
        let q = QuotientPoly::new(&c() * &s(), Signature::Sphere, "c", "s");
        assert_eq!(*q.angle_derivative().base(), Poly::int(1) - Poly::int(2) * s().pow(2));
        // d/dphi (c*s) = s^2 + c^2 = 1 + 2 s^2 on the hyperbola
        let q = QuotientPoly::new(&c() * &s(), Signature::Hyperboloid, "c", "s");
        assert_eq!(*q.angle_derivative().base(), Poly::int(1) + Poly::int(2) * s().pow(2));
    }

    #[test]
    fn render_uses_function_names() {
        let q = QuotientPoly::new(&c() * &s(), Signature::Hyperboloid, "c", "s");
        assert_eq!(q.render("phi"), "cosh(phi)*sinh(phi)");
    }
}
