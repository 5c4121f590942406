//! Star-shaped distributions on `R^p ∖ {0}` under the scaling group `R^×`.
//!
//! Each point splits as `x = ε h z` with `h = ρ(x)` for a gauge `ρ`,
//! `ε = ±1` from a sign rule and `z` on the half cross section
//! `{ρ = 1, ε = +1}`. Under `c(ε) f(ρ(x)) dx` the three parts are independent.

mod gauge;
mod model;

use thiserror::Error;

use crate::quadrature::QuadratureError;

pub use gauge::{search_bounds, Gauge, GaugeFn, GaugeKind, BOUND_GRID_POINTS, CUSTOM_BOUND_MARGIN};
pub use model::{
    NormalizingConstant, Radial, RadialFn, SignRule, StarDecomposition, StarSample,
    StarShapedModel, MIN_ACCEPTANCE,
};

#[derive(Debug, Error, PartialEq)]
pub enum StarError {
    #[error("dimension must be positive, got {0}")]
    Dimension(usize),
    #[error("expected a point in R^{expected}, got {found} coordinates")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("the origin has no decomposition")]
    Origin,
    #[error("non-finite coordinate")]
    NonFinite,
    #[error("gauge value {0} is not a positive finite number")]
    GaugeValue(f64),
    #[error("invalid gauge: {0}")]
    InvalidGauge(String),
    #[error("invalid radial density: {0}")]
    InvalidRadial(String),
    #[error("skew constant {0} outside [0, 2]")]
    SkewOutOfRange(f64),
    #[error("radius must be positive, got {0}")]
    NonPositiveRadius(f64),
    #[error("gauge is not differentiable here: {0}")]
    NotDifferentiable(String),
    #[error("point is not on the cross section")]
    NotOnCrossSection,
    #[error("rejection acceptance rate {0:.3e} below the 1e-4 floor")]
    LowAcceptance(f64),
    #[error(transparent)]
    Quadrature(#[from] QuadratureError),
}
