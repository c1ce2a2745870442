//! Geometric desingularization (blow-up) of non-hyperbolic equilibria of
//! planar polynomial vector fields.
//!
//! The pipeline: parse a field ([`textfront`]), find its quasi-homogeneous
//! weights ([`quasihom`]), blow up the origin in directional charts
//! ([`charts`]) or in polar form on the circle or a hyperbola ([`polar`]),
//! then locate and classify the equilibria on the exceptional divisor
//! ([`equilibria`]). [`dynamo`] integrates the resulting fields numerically
//! and [`verify`] bundles the randomized self-checks.

pub mod charts;
pub mod dynamo;
pub mod equilibria;
pub mod error;
pub mod field;
pub mod polar;
pub mod quasihom;
pub mod reference;
pub mod report;
pub mod textfront;
pub mod verify;

pub use error::{DesingError, Result};
pub use field::{Bindings, Param, VectorField};
