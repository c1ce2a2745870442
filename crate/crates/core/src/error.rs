use exactalg::AlgebraError;
use thiserror::Error;

use crate::charts::ChartId;
use crate::textfront::ParseError;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum DesingError {
    #[error(transparent)]
    Parse(#[from] ParseError),
    #[error(transparent)]
    Algebra(#[from] AlgebraError),
    #[error("field is not quasi-homogeneous for any positive weights")]
    NotQuasiHomogeneous,
    #[error("weights are not unique; generators of the solution space: {generators:?}")]
    AmbiguousWeights {
        generators: Vec<[i64; 3]>,
        /// Smallest positive solution (minimal alpha + beta, then alpha, then k), if any.
        preferred: Option<[u32; 3]>,
    },
    #[error("weights (alpha, beta, k) = {0:?} do not satisfy the quasi-homogeneity condition")]
    InvalidWeights([u32; 3]),
    #[error("parameter `{0}` has no binding")]
    UnboundParameter(String),
    #[error("parameter `{name}` must be positive, got {value}")]
    ParameterSign { name: String, value: String },
    #[error("`{0}` is not a parameter of this field")]
    UnknownParameter(String),
    #[error("point lies outside the domain of chart {chart}: {reason}")]
    OutOfDomain { chart: ChartId, reason: String },
    #[error("charts {from} and {to} do not overlap")]
    NoOverlap { from: ChartId, to: ChartId },
    #[error("transition {from} -> {to} is not a Laurent monomial map for weights {weights:?}")]
    NonMonomialTransition {
        from: ChartId,
        to: ChartId,
        weights: [u32; 3],
    },
    #[error("coordinate change is singular at angle {0}")]
    SingularAngle(f64),
    #[error("vector field is not finite at the initial point {0:?}")]
    NonFiniteField([f64; 2]),
    #[error("precondition violated: {0}")]
    Precondition(String),
}

pub type Result<T> = std::result::Result<T, DesingError>;
