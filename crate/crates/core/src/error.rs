use thiserror::Error;

/// Errors raised by geometric construction and evaluation.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum GeometryError {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("contract violation: {0}")]
    Contract(String),

    #[error("non-finite value in {0}")]
    NonFinite(&'static str),

    #[error("curve is not regular at t = {t} (speed {speed:e})")]
    NonRegular { t: f64, speed: f64 },

    #[error("Frenet frame degenerates at s = {s}: curvature k_{index} vanishes and no frame override is set")]
    FrenetDegenerate { index: usize, s: f64 },

    #[error("radius profile violates regularity at v1 = {v1}: rho' = {rho_prime} (need 1 - rho'^2 >= {margin:e})")]
    Regularity { v1: f64, rho_prime: f64, margin: f64 },

    #[error("radius profile is not positive at v1 = {v1}: rho = {rho}")]
    NonPositiveRadius { v1: f64, rho: f64 },

    #[error("parameter {axis} = {value} lies outside [{lo}, {hi}]")]
    OutOfDomain { axis: usize, value: f64, lo: f64, hi: f64 },

    #[error("coordinate singularity: {0}")]
    CoordinateSingularity(String),

    #[error("closed form for {quantity} disagrees with its independent route by {deviation:e}")]
    ClosedFormMismatch { quantity: &'static str, deviation: f64 },

    #[error("tangent space is rank deficient (Gram determinant {gram_det:e})")]
    RankDeficient { gram_det: f64 },

    #[error("lattice too small: {nodes} nodes on axis {axis}, need at least 5")]
    Resolution { axis: usize, nodes: usize },

    #[error("{theorem}: analytic route says {analytic}, numeric route says {numeric}")]
    Inconsistent { theorem: &'static str, analytic: String, numeric: String },

    #[error("integration failed: {0}")]
    Integration(String),

    #[error("invalid input: {0}")]
    Invalid(String),
}

impl GeometryError {
    /// True for failures that come from evaluating geometry at a bad point
    /// (as opposed to a malformed request).
    pub fn is_numeric_domain(&self) -> bool {
        !matches!(
            self,
            GeometryError::DimensionMismatch { .. }
                | GeometryError::Contract(_)
                | GeometryError::Invalid(_)
        )
    }
}

pub type Result<T> = std::result::Result<T, GeometryError>;
