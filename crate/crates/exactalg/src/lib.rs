//! Exact algebra for planar blow-up computations.
//!
//! Everything here is exact: coefficients are arbitrary-precision rationals,
//! polynomials are kept in a canonical graded-lex form, and trigonometric or
//! hyperbolic functions only appear through the quotient ring
//! `Q[c, s, ...] / (c^2 + sigma*s^2 - 1)`.

mod poly;
mod quotient;
mod rat;
mod univariate;

pub use poly::{Monomial, NumPoly, Poly};
pub use quotient::{QuotientPoly, Signature};
pub use rat::{parse_rational, rat, rat_to_f64, Rat};
pub use univariate::{RealRoot, UniPoly};

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum AlgebraError {
    #[error("polynomial is not divisible by {divisor}")]
    NotDivisible { divisor: String },
    #[error("division by the zero polynomial")]
    DivisionByZero,
    #[error("variable `{0}` has no binding")]
    UnboundVariable(String),
    #[error("polynomial uses variable `{0}` outside the requested variable list")]
    VariableDropped(String),
    #[error("expected a univariate polynomial in `{expected}`, found variable `{found}`")]
    NotUnivariate { expected: String, found: String },
    #[error("invalid rational literal `{0}`")]
    BadRational(String),
}
