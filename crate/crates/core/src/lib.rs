//! Canal and tubular hypersurfaces in Euclidean n-space.
//!
//! A canal hypersurface is the envelope of a one-parameter family of
//! hyperspheres whose centers run along a curve `alpha` with radius
//! `rho(v1)`. This crate builds such hypersurfaces from a center curve and a
//! radius profile, evaluates their curvature in closed form in E^4, and
//! checks those closed forms against a black-box numeric oracle that only
//! sees the immersion as a point evaluator.

pub mod canal;
pub mod classify;
pub mod curvature4;
pub mod curve;
pub mod error;
pub mod grid;
pub mod jet;
pub mod linalg;
pub mod oracle;
pub mod polytrig;
pub mod quad;

pub use error::{GeometryError, Result};
