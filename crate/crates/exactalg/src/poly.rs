use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_traits::{One, Signed, Zero};

use crate::rat::{is_one, rat_to_f64, Rat};
use crate::univariate::UniPoly;
use crate::AlgebraError;

/// Exponent vector, ordered graded-lexicographically: total degree first,
/// then lexicographic with the first variable most significant.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Monomial(Vec<u32>);

impl Monomial {
    pub fn new(exps: Vec<u32>) -> Self {
        Monomial(exps)
    }

    pub fn one(nvars: usize) -> Self {
        Monomial(vec![0; nvars])
    }

    pub fn exponents(&self) -> &[u32] {
        &self.0
    }

    pub fn degree(&self) -> u32 {
        self.0.iter().sum()
    }

    fn mul(&self, other: &Monomial) -> Monomial {
        Monomial(self.0.iter().zip(&other.0).map(|(a, b)| a + b).collect())
    }

    fn div(&self, other: &Monomial) -> Option<Monomial> {
        self.0
            .iter()
            .zip(&other.0)
            .map(|(a, b)| a.checked_sub(*b))
            .collect::<Option<Vec<_>>>()
            .map(Monomial)
    }
}

impl Ord for Monomial {
    fn cmp(&self, other: &Self) -> Ordering {
        self.degree()
            .cmp(&other.degree())
            .then_with(|| self.0.cmp(&other.0))
    }
}

impl PartialOrd for Monomial {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Sparse multivariate polynomial with rational coefficients.
///
/// The variable list is ordered and determines both the term order and the
/// printed form. Arithmetic between polynomials over different variable
/// lists works over the union (left operand's order first). Equality is
/// mathematical: unused variables do not matter.
#[derive(Clone, Debug)]
pub struct Poly {
    vars: Vec<String>,
    terms: BTreeMap<Monomial, Rat>,
}

impl Poly {
    pub fn zero() -> Self {
        Poly {
            vars: Vec::new(),
            terms: BTreeMap::new(),
        }
    }

    pub fn constant(c: Rat) -> Self {
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert(Monomial::one(0), c);
        }
        Poly {
            vars: Vec::new(),
            terms,
        }
    }

    pub fn int(c: i64) -> Self {
        Poly::constant(Rat::from_integer(c.into()))
    }

    pub fn var(name: &str) -> Self {
        let mut terms = BTreeMap::new();
        terms.insert(Monomial(vec![1]), Rat::one());
        Poly {
            vars: vec![name.to_string()],
            terms,
        }
    }

    /// Builds a polynomial from `(coefficient, exponents)` pairs over `vars`.
    pub fn from_terms<I>(vars: &[&str], terms: I) -> Self
    where
        I: IntoIterator<Item = (Rat, Vec<u32>)>,
    {
        let mut p = Poly {
            vars: vars.iter().map(|v| v.to_string()).collect(),
            terms: BTreeMap::new(),
        };
        for (c, e) in terms {
            assert_eq!(e.len(), vars.len(), "exponent vector length mismatch");
            p.add_term(Monomial(e), c);
        }
        p
    }

    pub fn vars(&self) -> &[String] {
        &self.vars
    }

    /// Variables that occur with a positive exponent in some term.
    pub fn used_vars(&self) -> Vec<String> {
        self.vars
            .iter()
            .enumerate()
            .filter(|(i, _)| self.terms.keys().any(|m| m.0[*i] > 0))
            .map(|(_, v)| v.clone())
            .collect()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_constant(&self) -> bool {
        self.terms.keys().all(|m| m.degree() == 0)
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    /// Terms in descending graded-lex order.
    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &Rat)> {
        self.terms.iter().rev()
    }

    pub fn leading_term(&self) -> Option<(&Monomial, &Rat)> {
        self.terms.iter().next_back()
    }

    pub fn constant_term(&self) -> Rat {
        self.terms
            .get(&Monomial::one(self.vars.len()))
            .cloned()
            .unwrap_or_else(Rat::zero)
    }

    fn var_index(&self, name: &str) -> Option<usize> {
        self.vars.iter().position(|v| v == name)
    }

    fn add_term(&mut self, m: Monomial, c: Rat) {
        if c.is_zero() {
            return;
        }
        match self.terms.entry(m) {
            std::collections::btree_map::Entry::Vacant(e) => {
                e.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut e) => {
                *e.get_mut() += c;
                if e.get().is_zero() {
                    e.remove();
                }
            }
        }
    }

    /// Re-expresses the polynomial over `order`, which must contain every
    /// used variable. Unused variables are dropped.
    pub fn with_vars<S: AsRef<str>>(&self, order: &[S]) -> Result<Poly, AlgebraError> {
        let order: Vec<String> = order.iter().map(|s| s.as_ref().to_string()).collect();
        let mut map = Vec::with_capacity(self.vars.len());
        for (i, v) in self.vars.iter().enumerate() {
            match order.iter().position(|o| o == v) {
                Some(j) => map.push(Some(j)),
                None => {
                    if self.terms.keys().any(|m| m.0[i] > 0) {
                        return Err(AlgebraError::VariableDropped(v.clone()));
                    }
                    map.push(None);
                }
            }
        }
        let mut out = Poly {
            vars: order,
            terms: BTreeMap::new(),
        };
        for (m, c) in &self.terms {
            let mut e = vec![0; out.vars.len()];
            for (i, &x) in m.0.iter().enumerate() {
                if let Some(j) = map[i] {
                    e[j] = x;
                }
            }
            out.terms.insert(Monomial(e), c.clone());
        }
        Ok(out)
    }

    /// Like [`Poly::with_vars`] but appends any used variable missing from
    /// `preferred` (in the current order) instead of failing.
    pub fn ordered_as<S: AsRef<str>>(&self, preferred: &[S]) -> Poly {
        let mut order: Vec<String> = preferred.iter().map(|s| s.as_ref().to_string()).collect();
        for v in self.used_vars() {
            if !order.contains(&v) {
                order.push(v);
            }
        }
        self.with_vars(&order).expect("order covers all used variables")
    }

    fn union_vars(&self, other: &Poly) -> Vec<String> {
        let mut vars = self.vars.clone();
        for v in &other.vars {
            if !vars.contains(v) {
                vars.push(v.clone());
            }
        }
        vars
    }

    fn aligned(&self, vars: &[String]) -> Poly {
        if self.vars == vars {
            self.clone()
        } else {
            self.with_vars(vars).expect("aligned to a superset")
        }
    }

    pub fn scale(&self, c: &Rat) -> Poly {
        if c.is_zero() {
            return Poly {
                vars: self.vars.clone(),
                terms: BTreeMap::new(),
            };
        }
        Poly {
            vars: self.vars.clone(),
            terms: self.terms.iter().map(|(m, x)| (m.clone(), x * c)).collect(),
        }
    }

    pub fn pow(&self, n: u32) -> Poly {
        let mut result = Poly::int(1).aligned(&self.vars);
        let mut base = self.clone();
        let mut n = n;
        while n > 0 {
            if n & 1 == 1 {
                result = &result * &base;
            }
            n >>= 1;
            if n > 0 {
                base = &base * &base;
            }
        }
        result
    }

    /// Formal partial derivative.
    pub fn derivative(&self, var: &str) -> Poly {
        let mut out = Poly {
            vars: self.vars.clone(),
            terms: BTreeMap::new(),
        };
        let Some(i) = self.var_index(var) else {
            return out;
        };
        for (m, c) in &self.terms {
            let e = m.0[i];
            if e == 0 {
                continue;
            }
            let mut m2 = m.0.clone();
            m2[i] -= 1;
            out.add_term(Monomial(m2), c * Rat::from_integer(e.into()));
        }
        out
    }

    pub fn degree_in(&self, var: &str) -> u32 {
        match self.var_index(var) {
            Some(i) => self.terms.keys().map(|m| m.0[i]).max().unwrap_or(0),
            None => 0,
        }
    }

    /// Smallest exponent of `var` over all terms (0 for the zero polynomial).
    pub fn min_degree_in(&self, var: &str) -> u32 {
        match self.var_index(var) {
            Some(i) => self.terms.keys().map(|m| m.0[i]).min().unwrap_or(0),
            None => 0,
        }
    }

    /// Minimal total degree in the given variables over all terms.
    pub fn min_degree_in_vars(&self, vars: &[&str]) -> Option<u32> {
        let idx: Vec<usize> = vars.iter().filter_map(|v| self.var_index(v)).collect();
        self.terms
            .keys()
            .map(|m| idx.iter().map(|&i| m.0[i]).sum())
            .min()
    }

    /// Exponents of `vars` in each term (missing variables count as 0).
    pub fn exponents_of(&self, vars: &[&str]) -> Vec<Vec<u32>> {
        let idx: Vec<Option<usize>> = vars.iter().map(|v| self.var_index(v)).collect();
        self.terms
            .keys()
            .rev()
            .map(|m| idx.iter().map(|i| i.map_or(0, |i| m.0[i])).collect())
            .collect()
    }

    /// Coefficients of `var^0, var^1, ...` as polynomials in the remaining variables.
    pub fn coefficients_in(&self, var: &str) -> Vec<Poly> {
        let Some(i) = self.var_index(var) else {
            return vec![self.clone()];
        };
        let deg = self.degree_in(var) as usize;
        let mut out = vec![
            Poly {
                vars: self.vars.clone(),
                terms: BTreeMap::new(),
            };
            deg + 1
        ];
        for (m, c) in &self.terms {
            let mut e = m.0.clone();
            let k = e[i] as usize;
            e[i] = 0;
            out[k].add_term(Monomial(e), c.clone());
        }
        out
    }

    /// Composition: replaces each bound variable by its polynomial.
    pub fn substitute(&self, bindings: &BTreeMap<String, Poly>) -> Poly {
        let mut vars: Vec<String> = self
            .vars
            .iter()
            .filter(|v| !bindings.contains_key(*v))
            .cloned()
            .collect();
        for p in bindings.values() {
            for v in &p.vars {
                if !vars.contains(v) {
                    vars.push(v.clone());
                }
            }
        }
        let bound: Vec<Option<Poly>> = self
            .vars
            .iter()
            .map(|v| bindings.get(v).map(|p| p.aligned(&vars)))
            .collect();
        let free_pos: Vec<Option<usize>> = self
            .vars
            .iter()
            .map(|v| {
                if bindings.contains_key(v) {
                    None
                } else {
                    vars.iter().position(|w| w == v)
                }
            })
            .collect();
        let mut power_cache: Vec<Vec<Poly>> = vec![Vec::new(); self.vars.len()];
        let mut out = Poly {
            vars: vars.clone(),
            terms: BTreeMap::new(),
        };
        for (m, c) in &self.terms {
            let mut e = vec![0; vars.len()];
            let mut factor = Poly::constant(c.clone()).aligned(&vars);
            for (i, &k) in m.0.iter().enumerate() {
                if k == 0 {
                    continue;
                }
                match (&bound[i], free_pos[i]) {
                    (Some(b), _) => {
                        let cache = &mut power_cache[i];
                        if cache.is_empty() {
                            cache.push(Poly::int(1).aligned(&vars));
                        }
                        while cache.len() <= k as usize {
                            let next = cache.last().unwrap() * b;
                            cache.push(next);
                        }
                        factor = &factor * &cache[k as usize];
                    }
                    (None, Some(j)) => e[j] += k,
                    (None, None) => unreachable!(),
                }
            }
            let mono = Monomial(e);
            for (fm, fc) in factor.terms {
                out.add_term(fm.mul(&mono), fc);
            }
        }
        out
    }

    /// Binds some variables to rational values.
    pub fn partial_eval(&self, values: &BTreeMap<String, Rat>) -> Poly {
        let bindings: BTreeMap<String, Poly> = values
            .iter()
            .filter(|(k, _)| self.vars.contains(k))
            .map(|(k, v)| (k.clone(), Poly::constant(v.clone())))
            .collect();
        self.substitute(&bindings)
    }

    pub fn eval_rat(&self, values: &BTreeMap<String, Rat>) -> Result<Rat, AlgebraError> {
        let p = self.partial_eval(values);
        if let Some(v) = p.used_vars().into_iter().next() {
            return Err(AlgebraError::UnboundVariable(v));
        }
        Ok(p.constant_term())
    }

    /// Exact division; fails with `NotDivisible` unless `divisor` divides `self`.
    pub fn div_exact(&self, divisor: &Poly) -> Result<Poly, AlgebraError> {
        if divisor.is_zero() {
            return Err(AlgebraError::DivisionByZero);
        }
        let vars = self.union_vars(divisor);
        let mut rem = self.aligned(&vars);
        let d = divisor.aligned(&vars);
        let (dlm, dlc) = d.leading_term().map(|(m, c)| (m.clone(), c.clone())).unwrap();
        let mut quot = Poly {
            vars: vars.clone(),
            terms: BTreeMap::new(),
        };
        while let Some((lm, lc)) = rem.leading_term().map(|(m, c)| (m.clone(), c.clone())) {
            let Some(qm) = lm.div(&dlm) else {
                return Err(AlgebraError::NotDivisible {
                    divisor: divisor.to_string(),
                });
            };
            let qc = lc / &dlc;
            for (m, c) in &d.terms {
                rem.add_term(m.mul(&qm), -(c * &qc));
            }
            quot.add_term(qm, qc);
        }
        Ok(quot)
    }

    /// Views the polynomial as univariate in `var`.
    pub fn to_univariate(&self, var: &str) -> Result<UniPoly, AlgebraError> {
        if let Some(other) = self.used_vars().into_iter().find(|v| v != var) {
            return Err(AlgebraError::NotUnivariate {
                expected: var.to_string(),
                found: other,
            });
        }
        let coeffs = self
            .coefficients_in(var)
            .into_iter()
            .map(|c| c.constant_term())
            .collect();
        Ok(UniPoly::new(coeffs))
    }

    pub fn from_univariate(u: &UniPoly, var: &str) -> Poly {
        Poly::from_terms(
            &[var],
            u.coeffs()
                .iter()
                .enumerate()
                .map(|(i, c)| (c.clone(), vec![i as u32])),
        )
    }

    /// Floating-point evaluator with variables bound by position in `order`.
    pub fn compile<S: AsRef<str>>(&self, order: &[S]) -> Result<NumPoly, AlgebraError> {
        let mut idx = Vec::with_capacity(self.vars.len());
        for (i, v) in self.vars.iter().enumerate() {
            let pos = order.iter().position(|o| o.as_ref() == v);
            if pos.is_none() && self.terms.keys().any(|m| m.0[i] > 0) {
                return Err(AlgebraError::UnboundVariable(v.clone()));
            }
            idx.push(pos);
        }
        let terms = self
            .terms
            .iter()
            .map(|(m, c)| {
                let powers = m
                    .0
                    .iter()
                    .enumerate()
                    .filter(|(_, &e)| e > 0)
                    .map(|(i, &e)| (idx[i].unwrap(), e as i32))
                    .collect();
                (rat_to_f64(c), powers)
            })
            .collect();
        Ok(NumPoly { terms })
    }

    pub fn eval_f64(&self, values: &BTreeMap<String, f64>) -> Result<f64, AlgebraError> {
        let names: Vec<&String> = values.keys().collect();
        let xs: Vec<f64> = values.values().copied().collect();
        Ok(self.compile(&names)?.eval(&xs))
    }
}

/// Compiled floating-point form of a [`Poly`].
#[derive(Clone, Debug)]
pub struct NumPoly {
    terms: Vec<(f64, Vec<(usize, i32)>)>,
}

impl NumPoly {
    pub fn eval(&self, x: &[f64]) -> f64 {
        self.terms
            .iter()
            .map(|(c, pw)| pw.iter().fold(*c, |acc, &(i, e)| acc * x[i].powi(e)))
            .sum()
    }
}

impl PartialEq for Poly {
    fn eq(&self, other: &Self) -> bool {
        if self.vars == other.vars {
            return self.terms == other.terms;
        }
        let vars = self.union_vars(other);
        self.aligned(&vars).terms == other.aligned(&vars).terms
    }
}

impl Eq for Poly {}

impl From<Rat> for Poly {
    fn from(c: Rat) -> Self {
        Poly::constant(c)
    }
}

impl<'a> Add<&'a Poly> for &'a Poly {
    type Output = Poly;
    fn add(self, rhs: &Poly) -> Poly {
        let vars = self.union_vars(rhs);
        let mut out = self.aligned(&vars);
        for (m, c) in rhs.aligned(&vars).terms {
            out.add_term(m, c);
        }
        out
    }
}

impl<'a> Sub<&'a Poly> for &'a Poly {
    type Output = Poly;
    fn sub(self, rhs: &Poly) -> Poly {
        self + &(-rhs)
    }
}

impl Neg for &Poly {
    type Output = Poly;
    fn neg(self) -> Poly {
        Poly {
            vars: self.vars.clone(),
            terms: self.terms.iter().map(|(m, c)| (m.clone(), -c)).collect(),
        }
    }
}

impl<'a> Mul<&'a Poly> for &'a Poly {
    type Output = Poly;
    fn mul(self, rhs: &Poly) -> Poly {
        let vars = self.union_vars(rhs);
        let a = self.aligned(&vars);
        let b = rhs.aligned(&vars);
        let mut out = Poly {
            vars,
            terms: BTreeMap::new(),
        };
        for (ma, ca) in &a.terms {
            for (mb, cb) in &b.terms {
                out.add_term(ma.mul(mb), ca * cb);
            }
        }
        out
    }
}

macro_rules! owned_ops {
    ($($tr:ident $method:ident),*) => {$(
        impl $tr<Poly> for Poly {
            type Output = Poly;
            fn $method(self, rhs: Poly) -> Poly {
                (&self).$method(&rhs)
            }
        }
        impl<'a> $tr<&'a Poly> for Poly {
            type Output = Poly;
            fn $method(self, rhs: &Poly) -> Poly {
                (&self).$method(rhs)
            }
        }
        impl<'a> $tr<Poly> for &'a Poly {
            type Output = Poly;
            fn $method(self, rhs: Poly) -> Poly {
                self.$method(&rhs)
            }
        }
    )*};
}

owned_ops!(Add add, Sub sub, Mul mul);

impl Neg for Poly {
    type Output = Poly;
    fn neg(self) -> Poly {
        -&self
    }
}

/// Canonical rendering: terms in descending graded-lex order, signs folded
/// into the separators, e.g. `a*x^2 - 2*x*y`.
impl fmt::Display for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (n, (m, c)) in self.terms().enumerate() {
            let neg = c.is_negative();
            let abs = c.abs();
            match (n, neg) {
                (0, true) => write!(f, "-")?,
                (0, false) => {}
                (_, true) => write!(f, " - ")?,
                (_, false) => write!(f, " + ")?,
            }
            let mut factors = Vec::new();
            for (v, &e) in self.vars.iter().zip(&m.0) {
                match e {
                    0 => {}
                    1 => factors.push(v.clone()),
                    _ => factors.push(format!("{v}^{e}")),
                }
            }
            if factors.is_empty() {
                write!(f, "{abs}")?;
            } else if is_one(&abs) {
                write!(f, "{}", factors.join("*"))?;
            } else {
                write!(f, "{abs}*{}", factors.join("*"))?;
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rat::rat;

    fn x() -> Poly {
        Poly::var("x")
    }
    fn y() -> Poly {
        Poly::var("y")
    }
    fn a() -> Poly {
        Poly::var("a")
    }

    fn f1() -> Poly {
        (&a() * &x().pow(2) - Poly::int(2) * &x() * &y()).ordered_as(&["a", "x", "y"])
    }

    #[test]
    fn difference_of_squares() {
        let p = (&x() + &y()) * (&x() - &y());
        assert_eq!(p, x().pow(2) - y().pow(2));
        assert_eq!(p.to_string(), "x^2 - y^2");
    }

    #[test]
    fn annihilator_and_cancellation() {
        assert!((&f1() * &Poly::zero()).is_zero());
        let two_xy = Poly::int(2) * x() * y();
        assert_eq!(&f1() + &two_xy, &a() * &x().pow(2));
    }

    #[test]
    fn canonical_rendering_of_example_field() {
        assert_eq!(f1().to_string(), "a*x^2 - 2*x*y");
        let f2 = (y().pow(2) - a() * x() * y()).ordered_as(&["a", "x", "y"]);
        assert_eq!(f2.to_string(), "-a*x*y + y^2");
        let c = Poly::constant(rat(-2, 3)) * a();
        assert_eq!(c.to_string(), "-2/3*a");
        assert_eq!(Poly::zero().to_string(), "0");
    }

    #[test]
    fn substitution_into_polar_form() {
        // f1(r c, r s) = r^2 (a c^2 - 2 c s)
        let (r, c, s) = (Poly::var("r"), Poly::var("c"), Poly::var("s"));
        let mut b = BTreeMap::new();
        b.insert("x".to_string(), &r * &c);
        b.insert("y".to_string(), &r * &s);
        let got = f1().substitute(&b);
        let want = r.pow(2) * (a() * c.pow(2) - Poly::int(2) * &c * &s);
        assert_eq!(got, want);
    }

    #[test]
    fn identity_substitution() {
        let mut b = BTreeMap::new();
        b.insert("x".to_string(), x());
        b.insert("y".to_string(), y());
        assert_eq!(f1().substitute(&b), f1());
    }

    #[test]
    fn substitution_into_second_chart() {
        // f2(r2 x2, r2) = r2^2 (1 - a x2)
        let f2 = y().pow(2) - a() * x() * y();
        let (r2, x2) = (Poly::var("r2"), Poly::var("x2"));
        let mut b = BTreeMap::new();
        b.insert("x".to_string(), &r2 * &x2);
        b.insert("y".to_string(), r2.clone());
        let want = r2.pow(2) * (Poly::int(1) - a() * x2);
        assert_eq!(f2.substitute(&b), want);
    }

    #[test]
    fn exact_division() {
        let r = Poly::var("r");
        let y1 = Poly::var("y1");
        let num = r.pow(2) * (a() - Poly::int(2) * &y1);
        assert_eq!(num.div_exact(&r).unwrap(), &r * &(a() - Poly::int(2) * y1));

        let p = x().pow(2) - y().pow(2);
        assert_eq!(p.div_exact(&(x() - y())).unwrap(), x() + y());

        let q = x().pow(2) + y();
        assert!(matches!(
            q.div_exact(&x()),
            Err(AlgebraError::NotDivisible { .. })
        ));
        assert_eq!(q.div_exact(&Poly::zero()), Err(AlgebraError::DivisionByZero));
    }

    #[test]
    fn derivative_and_degrees() {
        let p = f1();
        assert_eq!(p.derivative("x"), Poly::int(2) * a() * x() - Poly::int(2) * y());
        assert_eq!(p.degree_in("x"), 2);
        assert_eq!(p.min_degree_in("x"), 1);
        assert_eq!(p.min_degree_in_vars(&["x", "y"]), Some(2));
        assert!(p.derivative("z").is_zero());
    }

    #[test]
    fn with_vars_rejects_dropping_used_variables() {
        assert!(matches!(
            f1().with_vars(&["x", "y"]),
            Err(AlgebraError::VariableDropped(v)) if v == "a"
        ));
        let p = (&x() + &y() - &y()).with_vars(&["x"]).unwrap();
        assert_eq!(p.vars(), &["x".to_string()]);
    }

    #[test]
    fn evaluation_paths_agree() {
        let mut vals = BTreeMap::new();
        vals.insert("a".to_string(), rat(1, 2));
        vals.insert("x".to_string(), rat(3, 1));
        vals.insert("y".to_string(), rat(-1, 1));
        // a x^2 - 2 x y = 9/2 + 6
        assert_eq!(f1().eval_rat(&vals).unwrap(), rat(21, 2));
        let fv: BTreeMap<String, f64> = vals.iter().map(|(k, v)| (k.clone(), rat_to_f64(v))).collect();
        assert!((f1().eval_f64(&fv).unwrap() - 10.5).abs() < 1e-15);
        vals.remove("a");
        assert_eq!(
            f1().eval_rat(&vals),
            Err(AlgebraError::UnboundVariable("a".into()))
        );
    }

    #[test]
    fn coefficients_in_variable() {
        let cs = f1().coefficients_in("x");
        assert_eq!(cs.len(), 3);
        assert!(cs[0].is_zero());
        assert_eq!(cs[1], Poly::int(-2) * y());
        assert_eq!(cs[2], a());
    }
}
