use std::collections::BTreeMap;

use exactalg::{Poly, Rat};
use num_traits::Signed;
use serde::{Deserialize, Serialize};

use crate::error::{DesingError, Result};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Param {
    pub name: String,
    /// Declared `> 0`.
    pub positive: bool,
}

/// Planar polynomial vector field `(x', y') = (f1, f2)`.
///
/// Parameters are ordinary polynomial variables; their sign constraints are
/// only consulted when binding numeric values.
#[derive(Clone, Debug, PartialEq)]
pub struct VectorField {
    x: String,
    y: String,
    params: Vec<Param>,
    f1: Poly,
    f2: Poly,
}

impl VectorField {
    pub fn new(x: &str, y: &str, params: Vec<Param>, f1: Poly, f2: Poly) -> Self {
        let mut order: Vec<String> = params.iter().map(|p| p.name.clone()).collect();
        order.push(x.to_string());
        order.push(y.to_string());
        VectorField {
            x: x.to_string(),
            y: y.to_string(),
            f1: f1.ordered_as(&order),
            f2: f2.ordered_as(&order),
            params,
        }
    }

    pub fn x(&self) -> &str {
        &self.x
    }

    pub fn y(&self) -> &str {
        &self.y
    }

    pub fn params(&self) -> &[Param] {
        &self.params
    }

    pub fn param_names(&self) -> Vec<String> {
        self.params.iter().map(|p| p.name.clone()).collect()
    }

    pub fn f1(&self) -> &Poly {
        &self.f1
    }

    pub fn f2(&self) -> &Poly {
        &self.f2
    }

    pub fn components(&self) -> [&Poly; 2] {
        [&self.f1, &self.f2]
    }

    pub fn is_zero(&self) -> bool {
        self.f1.is_zero() && self.f2.is_zero()
    }

    /// Identifiers already taken by this field (state variables and parameters).
    pub fn taken_names(&self) -> Vec<String> {
        let mut v = self.param_names();
        v.push(self.x.clone());
        v.push(self.y.clone());
        v
    }

    /// The same field with `x` and `y` exchanged, as `(f2, f1)(y, x)`.
    pub fn swapped(&self) -> VectorField {
        VectorField::new(&self.y, &self.x, self.params.clone(), self.f2.clone(), self.f1.clone())
    }

    /// Checks `values` against the declared parameters.
    pub fn bind(&self, values: &BTreeMap<String, Rat>) -> Result<Bindings> {
        for name in values.keys() {
            if !self.params.iter().any(|p| &p.name == name) {
                return Err(DesingError::UnknownParameter(name.clone()));
            }
        }
        for p in &self.params {
            let Some(v) = values.get(&p.name) else {
                return Err(DesingError::UnboundParameter(p.name.clone()));
            };
            if p.positive && !v.is_positive() {
                return Err(DesingError::ParameterSign {
                    name: p.name.clone(),
                    value: v.to_string(),
                });
            }
        }
        Ok(Bindings(values.clone()))
    }
}

/// Parameter values that passed [`VectorField::bind`].
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Bindings(BTreeMap<String, Rat>);

impl Bindings {
    /// Bindings without sign validation, for fields built directly in code.
    pub fn unchecked(values: BTreeMap<String, Rat>) -> Self {
        Bindings(values)
    }

    pub fn values(&self) -> &BTreeMap<String, Rat> {
        &self.0
    }

    pub fn as_f64(&self) -> BTreeMap<String, f64> {
        self.0
            .iter()
            .map(|(k, v)| (k.clone(), exactalg::rat_to_f64(v)))
            .collect()
    }

    /// Substitutes the bound values and fails if any variable outside
    /// `free` is left over.
    pub fn apply(&self, p: &Poly, free: &[&str]) -> Result<Poly> {
        let q = p.partial_eval(&self.0);
        if let Some(v) = q.used_vars().into_iter().find(|v| !free.contains(&v.as_str())) {
            return Err(DesingError::UnboundParameter(v));
        }
        Ok(q)
    }
}

/// `base`, or `base` with enough trailing underscores to avoid `taken`.
pub(crate) fn fresh_name(base: &str, taken: &[String]) -> String {
    let mut name = base.to_string();
    while taken.iter().any(|t| t == &name) {
        name.push('_');
    }
    name
}

#[cfg(test)]
mod tests {
    use super::*;
    use exactalg::rat;

    fn field() -> VectorField {
        let (a, x, y) = (Poly::var("a"), Poly::var("x"), Poly::var("y"));
        VectorField::new(
            "x",
            "y",
            vec![Param {
                name: "a".into(),
                positive: true,
            }],
            &a * &x.pow(2) - Poly::int(2) * &x * &y,
            y.pow(2) - a * x * y,
        )
    }

    #[test]
    fn binding_validation() {
        let f = field();
        let mut v = BTreeMap::new();
        assert_eq!(f.bind(&v), Err(DesingError::UnboundParameter("a".into())));
        v.insert("a".to_string(), rat(-1, 2));
        assert!(matches!(f.bind(&v), Err(DesingError::ParameterSign { .. })));
        v.insert("a".to_string(), rat(1, 2));
        assert!(f.bind(&v).is_ok());
        v.insert("b".to_string(), rat(1, 1));
        assert_eq!(f.bind(&v), Err(DesingError::UnknownParameter("b".into())));
    }

    #[test]
    fn fresh_names_avoid_collisions() {
        let taken = vec!["r".to_string(), "r_".to_string()];
        assert_eq!(fresh_name("r", &taken), "r__");
        assert_eq!(fresh_name("s", &taken), "s");
    }
}
