//! Quasi-homogeneous weights.
//!
//! `f` is quasi-homogeneous of type `(alpha, beta)` with index `k` when
//! `f(r^alpha x, r^beta y) = (r^(alpha+k) f1(x, y), r^(beta+k) f2(x, y))`.
//! Every monomial `x^m y^n` of `f1` then satisfies
//! `alpha*(m-1) + beta*n - k = 0`, and every monomial of `f2` satisfies
//! `alpha*m + beta*(n-1) - k = 0`. Weights are the positive integer points of
//! the kernel of that linear system.

use std::collections::BTreeMap;
use std::fmt;

use exactalg::{Poly, Rat};
use num_integer::Integer;
use num_traits::{Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{DesingError, Result};
use crate::field::{fresh_name, VectorField};

/// Bound on each component in the search over an ambiguous kernel.
pub const SEARCH_BOUND: u32 = 64;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Weights {
    pub alpha: u32,
    pub beta: u32,
    pub k: u32,
}

impl Weights {
    pub fn new(alpha: u32, beta: u32, k: u32) -> Self {
        assert!(alpha > 0 && beta > 0, "weights must be positive");
        Weights { alpha, beta, k }
    }

    pub fn triple(&self) -> [u32; 3] {
        [self.alpha, self.beta, self.k]
    }

    pub fn is_homogeneous(&self) -> bool {
        self.alpha == self.beta
    }
}

impl fmt::Display for Weights {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(alpha, beta, k) = ({}, {}, {})", self.alpha, self.beta, self.k)
    }
}

/// Rows `(coef_alpha, coef_beta, coef_k)` of the homogeneous linear system.
fn constraint_rows(f: &VectorField) -> Vec<[i64; 3]> {
    let mut rows = Vec::new();
    let vars = [f.x(), f.y()];
    for (comp, poly) in f.components().into_iter().enumerate() {
        for e in poly.exponents_of(&vars) {
            let (m, n) = (e[0] as i64, e[1] as i64);
            let row = if comp == 0 {
                [m - 1, n, -1]
            } else {
                [m, n - 1, -1]
            };
            if !rows.contains(&row) {
                rows.push(row);
            }
        }
    }
    rows
}

/// Basis of the rational kernel of `rows`, each scaled to a primitive
/// integer vector.
fn kernel(rows: &[[i64; 3]]) -> Vec<[i64; 3]> {
    let mut m: Vec<Vec<Rat>> = rows
        .iter()
        .map(|r| r.iter().map(|&v| Rat::from_integer(v.into())).collect())
        .collect();
    let mut pivots = Vec::new();
    let mut row = 0;
    for col in 0..3 {
        let Some(p) = (row..m.len()).find(|&i| !m[i][col].is_zero()) else {
            continue;
        };
        m.swap(row, p);
        let lead = m[row][col].clone();
        for v in m[row].iter_mut() {
            *v /= &lead;
        }
        for i in 0..m.len() {
            if i != row && !m[i][col].is_zero() {
                let factor = m[i][col].clone();
                let pivot = m[row].clone();
                for (x, p) in m[i].iter_mut().zip(&pivot) {
                    *x -= &factor * p;
                }
            }
        }
        pivots.push(col);
        row += 1;
    }
    let free: Vec<usize> = (0..3).filter(|c| !pivots.contains(c)).collect();
    free.iter()
        .map(|&fc| {
            let mut v = vec![Rat::zero(); 3];
            v[fc] = Rat::from_integer(1.into());
            for (r, &pc) in pivots.iter().enumerate() {
                v[pc] = -m[r][fc].clone();
            }
            primitive(&v)
        })
        .collect()
}

fn primitive(v: &[Rat]) -> [i64; 3] {
    let den = v
        .iter()
        .fold(num_bigint::BigInt::from(1), |acc, x| acc.lcm(x.denom()));
    let ints: Vec<num_bigint::BigInt> = v
        .iter()
        .map(|x| (x * Rat::from_integer(den.clone())).to_integer())
        .collect();
    let g = ints
        .iter()
        .fold(num_bigint::BigInt::zero(), |acc, x| acc.gcd(x));
    let mut out = [0i64; 3];
    for (o, x) in out.iter_mut().zip(&ints) {
        *o = (x / &g).to_i64().expect("small kernel entries");
    }
    // orient so that the first nonzero entry is positive
    if out.iter().find(|x| **x != 0).is_some_and(|x| x.is_negative()) {
        for o in out.iter_mut() {
            *o = -*o;
        }
    }
    out
}

fn satisfies(rows: &[[i64; 3]], w: [i64; 3]) -> bool {
    rows.iter()
        .all(|r| r[0] * w[0] + r[1] * w[1] + r[2] * w[2] == 0)
}

/// Primitive positive weights `(alpha, beta, k)` for `f`.
///
/// Errors with `NotQuasiHomogeneous` when no positive solution exists and
/// with `AmbiguousWeights` when the kernel has dimension two or more; the
/// latter carries the kernel generators and the smallest positive solution
/// with components up to [`SEARCH_BOUND`] (minimal `alpha + beta`, then
/// `alpha`, then `k`).
pub fn infer_weights(f: &VectorField) -> Result<Weights> {
    let rows = constraint_rows(f);
    let gens = kernel(&rows);
    match gens.len() {
        0 => Err(DesingError::NotQuasiHomogeneous),
        1 => {
            let mut g = gens[0];
            if g[0] < 0 || (g[0] == 0 && g[1] < 0) {
                g = [-g[0], -g[1], -g[2]];
            }
            if g[0] > 0 && g[1] > 0 && g[2] >= 0 {
                Ok(Weights::new(g[0] as u32, g[1] as u32, g[2] as u32))
            } else {
                Err(DesingError::NotQuasiHomogeneous)
            }
        }
        _ => {
            let preferred = search_smallest(&rows);
            match preferred {
                None => Err(DesingError::NotQuasiHomogeneous),
                Some(p) => Err(DesingError::AmbiguousWeights {
                    generators: gens,
                    preferred: Some(p),
                }),
            }
        }
    }
}

fn search_smallest(rows: &[[i64; 3]]) -> Option<[u32; 3]> {
    let b = SEARCH_BOUND as i64;
    for sum in 2..=2 * b {
        for alpha in 1..sum {
            let beta = sum - alpha;
            if alpha > b || beta > b {
                continue;
            }
            for k in 0..=b {
                if satisfies(rows, [alpha, beta, k]) {
                    return Some([alpha as u32, beta as u32, k as u32]);
                }
            }
        }
    }
    None
}

/// Like [`infer_weights`], but resolves an ambiguous kernel to its
/// preferred solution instead of failing.
pub fn infer_weights_or_preferred(f: &VectorField) -> Result<Weights> {
    match infer_weights(f) {
        Err(DesingError::AmbiguousWeights {
            preferred: Some(p), ..
        }) => Ok(Weights::new(p[0], p[1], p[2])),
        other => other,
    }
}

/// Symbolic check of `f(r^alpha x, r^beta y) = (r^(alpha+k) f1, r^(beta+k) f2)`.
pub fn verify_weights(f: &VectorField, w: &Weights) -> bool {
    let r_name = fresh_name("r", &f.taken_names());
    let r = Poly::var(&r_name);
    let x = Poly::var(f.x());
    let y = Poly::var(f.y());
    let mut b = BTreeMap::new();
    b.insert(f.x().to_string(), &r.pow(w.alpha) * &x);
    b.insert(f.y().to_string(), &r.pow(w.beta) * &y);
    let lhs1 = f.f1().substitute(&b);
    let lhs2 = f.f2().substitute(&b);
    lhs1 == &r.pow(w.alpha + w.k) * f.f1() && lhs2 == &r.pow(w.beta + w.k) * f.f2()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::textfront::parse_field;

    fn field(src: &str) -> VectorField {
        parse_field(src).unwrap()
    }

    const REFERENCE: &str = "param a > 0; var x y; dx/dt = a*x^2 - 2*x*y; dy/dt = y^2 - a*x*y;";

    #[test]
    fn example_system_has_unit_weights() {
        let f = field(REFERENCE);
        let w = infer_weights(&f).unwrap();
        assert_eq!(w.triple(), [1, 1, 1]);
        assert!(verify_weights(&f, &w));
        assert!(!verify_weights(&f, &Weights::new(2, 1, 1)));
        assert_eq!(w.to_string(), "(alpha, beta, k) = (1, 1, 1)");
    }

    #[test]
    fn anisotropic_weights() {
        // x^2: alpha = k; y^3: 2 beta = k  ->  (2, 1, 2)
        let f = field("var x y; dx/dt = x^2; dy/dt = y^3;");
        assert_eq!(infer_weights(&f).unwrap().triple(), [2, 1, 2]);
    }

    #[test]
    fn incompatible_exponents() {
        let f = field("var x y; dx/dt = x^2 + y; dy/dt = y^2;");
        assert_eq!(infer_weights(&f), Err(DesingError::NotQuasiHomogeneous));
        // brute force over a box agrees: nothing positive solves it
        let rows = constraint_rows(&f);
        for a in 1..=10 {
            for b in 1..=10 {
                for k in 0..=10 {
                    assert!(!satisfies(&rows, [a, b, k]));
                }
            }
        }
        let f = field("var x y; dx/dt = x^2 + x*y; dy/dt = y^2 + x*y;");
        assert_eq!(infer_weights(&f).unwrap().triple(), [1, 1, 1]);
    }

    #[test]
    fn linear_field_has_index_zero() {
        let f = field("var x y; dx/dt = x; dy/dt = -y;");
        assert_eq!(infer_weights(&f), Err(DesingError::AmbiguousWeights {
            generators: vec![[1, 0, 0], [0, 1, 0]],
            preferred: Some([1, 1, 0]),
        }));
        assert_eq!(infer_weights_or_preferred(&f).unwrap().triple(), [1, 1, 0]);
    }

    #[test]
    fn zero_component_imposes_nothing() {
        let f = field("var x y; dx/dt = x^2; dy/dt = 0;");
        // alpha = k, beta free
        assert!(matches!(infer_weights(&f), Err(DesingError::AmbiguousWeights { .. })));
        assert!(verify_weights(&f, &Weights::new(3, 7, 3)));
        assert_eq!(infer_weights_or_preferred(&f).unwrap().triple(), [1, 1, 1]);
    }

    #[test]
    fn zero_field_is_ambiguous_in_every_direction() {
        let f = field("var x y; dx/dt = 0; dy/dt = 0;");
        match infer_weights(&f) {
            Err(DesingError::AmbiguousWeights { generators, preferred }) => {
                assert_eq!(generators.len(), 3);
                assert_eq!(preferred, Some([1, 1, 0]));
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn negative_index_rejected() {
        // x' = 1: alpha*(0-1) - k = 0 forces k = -alpha
        let f = field("var x y; dx/dt = 1; dy/dt = y;");
        assert_eq!(infer_weights(&f), Err(DesingError::NotQuasiHomogeneous));
    }

    #[test]
    fn scaled_weights_also_verify() {
        let f = field(REFERENCE);
        for t in 1..5 {
            assert!(verify_weights(&f, &Weights::new(t, t, t)));
        }
    }
}
