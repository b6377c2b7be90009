//! Black-box numeric differential geometry of hypersurfaces.
//!
//! Everything here works from an [`Immersion`], a map from `n - 1`
//! parameters into E^n, and never looks at how the immersion was built.
//! From first and second partials it forms the unit normal (generalized cross
//! product of the tangent vectors), the fundamental forms
//! `g_ij = <X_i, X_j>`, `h_ij = <X_ij, N>`, the shape operator `S = g^{-1} h`,
//! `K = det h / det g` and `H = tr(S) / (n - 1)`.
//!
//! Partials come from central differences by default. Immersions that can
//! propagate derivatives analytically expose them through
//! [`Immersion::exact_jet`] (exact-Taylor mode).

use serde::Serialize;

use crate::error::{GeometryError, Result};
use crate::linalg::{cross_n, MatK, VecN};

/// First and second partial derivatives of an immersion at a point.
#[derive(Debug, Clone)]
pub struct ParamJet {
    pub first: Vec<VecN>,
    /// Symmetric: `second[i][j] == second[j][i]`.
    pub second: Vec<Vec<VecN>>,
}

/// A parametrized hypersurface `(v_1, .., v_{n-1}) -> E^n`.
pub trait Immersion: Sync {
    fn ambient_dim(&self) -> usize;

    fn param_dim(&self) -> usize {
        self.ambient_dim() - 1
    }

    fn point(&self, params: &[f64]) -> Result<VecN>;

    /// Analytic partials, when the immersion can supply them.
    fn exact_jet(&self, _params: &[f64]) -> Option<Result<ParamJet>> {
        None
    }
}

/// Parameter axis of a probe domain. Periodic axes have no boundary.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Axis {
    pub lo: f64,
    pub hi: f64,
    pub periodic: bool,
}

impl Axis {
    pub fn bounded(lo: f64, hi: f64) -> Self {
        Axis { lo, hi, periodic: false }
    }

    pub fn periodic(lo: f64, hi: f64) -> Self {
        Axis { lo, hi, periodic: true }
    }

    pub fn span(&self) -> f64 {
        self.hi - self.lo
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum ProbeMode {
    CentralDifference,
    ExactTaylor,
}

/// Default finite-difference step as a fraction of each axis span.
pub const DEFAULT_STEP_FRACTION: f64 = 1e-4;

/// Gram determinant of the tangent vectors below which the tangent space is
/// considered degenerate.
pub const MIN_GRAM_DET: f64 = 1e-12;

pub struct ImmersionProbe<'a> {
    immersion: &'a dyn Immersion,
    axes: Vec<Axis>,
    steps: Vec<f64>,
    mode: ProbeMode,
}

impl<'a> ImmersionProbe<'a> {
    pub fn new(immersion: &'a dyn Immersion, axes: Vec<Axis>) -> Result<Self> {
        if axes.len() != immersion.param_dim() {
            return Err(GeometryError::DimensionMismatch {
                expected: immersion.param_dim(),
                found: axes.len(),
            });
        }
        let steps = axes.iter().map(|a| DEFAULT_STEP_FRACTION * a.span()).collect();
        Ok(ImmersionProbe { immersion, axes, steps, mode: ProbeMode::CentralDifference })
    }

    pub fn with_steps(mut self, steps: Vec<f64>) -> Result<Self> {
        if steps.len() != self.axes.len() {
            return Err(GeometryError::DimensionMismatch { expected: self.axes.len(), found: steps.len() });
        }
        if steps.iter().any(|h| !(*h > 0.0) || !h.is_finite()) {
            return Err(GeometryError::Invalid("finite-difference steps must be positive".into()));
        }
        self.steps = steps;
        Ok(self)
    }

    /// Sets every step to `fraction` of its axis span.
    pub fn with_step_fraction(self, fraction: f64) -> Result<Self> {
        let steps = self.axes.iter().map(|a| fraction * a.span()).collect();
        self.with_steps(steps)
    }

    pub fn with_mode(mut self, mode: ProbeMode) -> Self {
        self.mode = mode;
        self
    }

    pub fn mode(&self) -> ProbeMode {
        self.mode
    }

    pub fn steps(&self) -> &[f64] {
        &self.steps
    }

    pub fn axes(&self) -> &[Axis] {
        &self.axes
    }

    pub fn ambient_dim(&self) -> usize {
        self.immersion.ambient_dim()
    }

    fn check_interior(&self, at: &[f64]) -> Result<()> {
        if at.len() != self.axes.len() {
            return Err(GeometryError::DimensionMismatch { expected: self.axes.len(), found: at.len() });
        }
        for (i, ((axis, h), x)) in self.axes.iter().zip(&self.steps).zip(at).enumerate() {
            if axis.periodic {
                continue;
            }
            let margin = 2.0 * h;
            if !(*x >= axis.lo + margin && *x <= axis.hi - margin) {
                return Err(GeometryError::OutOfDomain {
                    axis: i,
                    value: *x,
                    lo: axis.lo + margin,
                    hi: axis.hi - margin,
                });
            }
        }
        Ok(())
    }
}

/// First and second partials at `at`, by central differences or from the
/// immersion's exact jet depending on the probe mode.
///
/// Stencils: `(f(+h) - f(-h)) / 2h`, `(f(+h) - 2 f + f(-h)) / h^2` and the
/// four-point mixed stencil, which is symmetric in `(i, j)` by construction.
pub fn fd_jet(probe: &ImmersionProbe<'_>, at: &[f64]) -> Result<ParamJet> {
    probe.check_interior(at)?;
    if probe.mode == ProbeMode::ExactTaylor {
        return probe.immersion.exact_jet(at).unwrap_or_else(|| {
            Err(GeometryError::Contract("immersion has no exact derivatives".into()))
        });
    }
    let m = at.len();
    let eval = |offsets: &[(usize, f64)]| -> Result<VecN> {
        let mut p = at.to_vec();
        for (i, d) in offsets {
            p[*i] += d;
        }
        probe.immersion.point(&p)
    };
    let center = eval(&[])?;
    let mut first = Vec::with_capacity(m);
    let mut plus = Vec::with_capacity(m);
    let mut minus = Vec::with_capacity(m);
    for (i, &h) in probe.steps.iter().enumerate() {
        let fp = eval(&[(i, h)])?;
        let fm = eval(&[(i, -h)])?;
        first.push((&fp - &fm) * (0.5 / h));
        plus.push(fp);
        minus.push(fm);
    }
    let mut second = vec![vec![VecN::zeros(center.dim()); m]; m];
    for i in 0..m {
        let h = probe.steps[i];
        let mut d2 = &plus[i] - &(&center * 2.0);
        d2 += &minus[i];
        second[i][i] = d2 * (1.0 / (h * h));
        for j in i + 1..m {
            let k = probe.steps[j];
            let pp = eval(&[(i, h), (j, k)])?;
            let pm = eval(&[(i, h), (j, -k)])?;
            let mp = eval(&[(i, -h), (j, k)])?;
            let mm = eval(&[(i, -h), (j, -k)])?;
            let mixed = ((&pp - &pm) - (&mp - &mm)) * (1.0 / (4.0 * h * k));
            second[j][i] = mixed.clone();
            second[i][j] = mixed;
        }
    }
    Ok(ParamJet { first, second })
}

/// Curvature data of a hypersurface point computed from first principles.
#[derive(Debug, Clone, Serialize)]
pub struct OracleForms {
    pub normal: VecN,
    pub g: MatK,
    pub det_g: f64,
    pub h: MatK,
    pub det_h: f64,
    pub shape: MatK,
    pub gaussian: f64,
    pub mean: f64,
}

impl OracleForms {
    /// Flips the orientation if needed so that `normal` points to the same
    /// side as `reference`. `h`, `S` and `H` change sign with `N`; `K` with
    /// `(-1)^(n-1)`.
    pub fn aligned_to(mut self, reference: &VecN) -> Self {
        if self.normal.inner(reference) < 0.0 {
            let k = self.g.dim();
            self.normal = &self.normal * -1.0;
            self.h = MatK::from_fn(k, |i, j| -self.h[(i, j)]);
            self.shape = MatK::from_fn(k, |i, j| -self.shape[(i, j)]);
            self.mean = -self.mean;
            if k % 2 == 1 {
                self.det_h = -self.det_h;
                self.gaussian = -self.gaussian;
            }
        }
        self
    }
}

/// Normal, fundamental forms, shape operator, K and H at `at`.
pub fn oracle_forms(probe: &ImmersionProbe<'_>, at: &[f64]) -> Result<OracleForms> {
    let jet = fd_jet(probe, at)?;
    forms_from_jet(&jet)
}

/// The same computation from given partials.
pub fn forms_from_jet(jet: &ParamJet) -> Result<OracleForms> {
    let m = jet.first.len();
    let g = MatK::from_fn(m, |i, j| jet.first[i].inner(&jet.first[j]));
    let det_g = g.det();
    if !(det_g > MIN_GRAM_DET) {
        return Err(GeometryError::RankDeficient { gram_det: det_g });
    }
    let cross = cross_n(&jet.first)?;
    let normal = &cross * (1.0 / cross.norm());
    let h = MatK::from_fn(m, |i, j| jet.second[i][j].inner(&normal));
    let det_h = h.det();
    let shape = g.inverse()?.matmul(&h);
    let gaussian = det_h / det_g;
    let mean = shape.trace() / m as f64;
    if !(gaussian.is_finite() && mean.is_finite()) {
        return Err(GeometryError::NonFinite("oracle curvature"));
    }
    Ok(OracleForms { normal, g, det_g, h, det_h, shape, gaussian, mean })
}
