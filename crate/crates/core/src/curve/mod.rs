//! Center curves, arc-length reparametrization and the Frenet apparatus.

mod arclength;
mod frenet;

use std::f64::consts::PI;
use std::fmt;
use std::sync::Arc;

use crate::error::{GeometryError, Result};
use crate::linalg::{MatK, VecN, MAX_DIM};
use crate::polytrig::PolyTrig;

pub use arclength::reparametrize_arclength;
pub use frenet::{
    curvature_derivatives, frame_jets, frenet_apparatus, FrameSource, FrenetData,
    FRENET_DEGENERACY_THRESHOLD,
};
pub(crate) use frenet::frame_at;

/// Position and derivative oracle for a curve in E^n.
pub trait CurveEvaluator: Send + Sync + fmt::Debug {
    fn dim(&self) -> usize;

    /// `[alpha(t), alpha'(t), .., alpha^(order)(t)]`
    fn derivatives(&self, t: f64, order: usize) -> Vec<VecN>;
}

/// A regular curve in E^n together with its parameter domain.
#[derive(Clone)]
pub struct CenterCurve {
    evaluator: Arc<dyn CurveEvaluator>,
    domain: (f64, f64),
    unit_speed: bool,
    frame_override: Option<Vec<VecN>>,
}

impl fmt::Debug for CenterCurve {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("CenterCurve")
            .field("evaluator", &self.evaluator)
            .field("domain", &self.domain)
            .field("unit_speed", &self.unit_speed)
            .field("frame_override", &self.frame_override.is_some())
            .finish()
    }
}

impl CenterCurve {
    pub fn from_evaluator(
        evaluator: Arc<dyn CurveEvaluator>,
        domain: (f64, f64),
        unit_speed: bool,
    ) -> Result<Self> {
        let n = evaluator.dim();
        if !(2..=MAX_DIM).contains(&n) {
            return Err(GeometryError::Invalid(format!(
                "ambient dimension {n} outside 2..={MAX_DIM}"
            )));
        }
        if !(domain.0.is_finite() && domain.1.is_finite() && domain.0 < domain.1) {
            return Err(GeometryError::Invalid(format!("bad curve domain {domain:?}")));
        }
        Ok(CenterCurve { evaluator, domain, unit_speed, frame_override: None })
    }

    /// Straight line `origin + s * direction` (direction normalized), unit
    /// speed. Its frame override is the direction completed to a positively
    /// oriented orthonormal basis with the standard basis vectors.
    pub fn line(origin: VecN, direction: VecN, domain: (f64, f64)) -> Result<Self> {
        if origin.dim() != direction.dim() {
            return Err(GeometryError::DimensionMismatch {
                expected: origin.dim(),
                found: direction.dim(),
            });
        }
        let len = direction.norm();
        if !(len > 1e-12) || !len.is_finite() {
            return Err(GeometryError::Invalid("line direction must be non-zero".into()));
        }
        let direction = direction.normalized();
        let frame = complete_basis(&direction)?;
        let eval = Arc::new(Line { origin, direction });
        CenterCurve::from_evaluator(eval, domain, true)?.with_frame_override(frame)
    }

    /// The x1-axis `(s, 0, .., 0)` in E^dim with the standard frame.
    pub fn axis(dim: usize, domain: (f64, f64)) -> Result<Self> {
        CenterCurve::line(VecN::zeros(dim), VecN::basis(dim, 0), domain)
    }

    /// Unit-speed circle of the given radius in the x1x2-plane, centered at
    /// the origin: `(R cos(s/R), R sin(s/R), 0, ..)`. The standard basis is
    /// attached as frame override so that the Frenet frame can be completed
    /// past F_2 in dimensions above 3.
    pub fn circle(dim: usize, radius: f64, domain: (f64, f64)) -> Result<Self> {
        if !(radius > 0.0) || !radius.is_finite() {
            return Err(GeometryError::Invalid(format!("circle radius must be positive, got {radius}")));
        }
        let eval = Arc::new(Circle { dim, radius, arclength: true });
        let frame = (0..dim).map(|i| VecN::basis(dim, i)).collect();
        CenterCurve::from_evaluator(eval, domain, true)?.with_frame_override(frame)
    }

    /// `(R cos t, R sin t, 0, ..)` in its native (speed R) parametrization.
    pub fn circle_native(dim: usize, radius: f64, domain: (f64, f64)) -> Result<Self> {
        if !(radius > 0.0) {
            return Err(GeometryError::Invalid(format!("circle radius must be positive, got {radius}")));
        }
        let eval = Arc::new(Circle { dim, radius, arclength: false });
        let frame = (0..dim).map(|i| VecN::basis(dim, i)).collect();
        CenterCurve::from_evaluator(eval, domain, false)?.with_frame_override(frame)
    }

    /// Unit-speed curve `(a cos t, a sin t, b cos(ct), b sin(ct))` in E^4,
    /// with `t = s / sqrt(a^2 + b^2 c^2)`. Its Frenet curvatures are constant.
    pub fn quad_helix(a: f64, b: f64, c: f64, domain: (f64, f64)) -> Result<Self> {
        let speed = (a * a + b * b * c * c).sqrt();
        if !(speed > 0.0) || !speed.is_finite() {
            return Err(GeometryError::Invalid("quad_helix needs a non-zero speed".into()));
        }
        let eval = Arc::new(QuadHelix { a, b, c, speed });
        CenterCurve::from_evaluator(eval, domain, true)
    }

    /// Curve whose coordinates are polynomial/trigonometric tables in `t`.
    /// Not unit speed in general; see [`reparametrize_arclength`].
    pub fn poly_trig(coords: Vec<PolyTrig>, domain: (f64, f64)) -> Result<Self> {
        if coords.iter().any(|c| !c.is_finite()) {
            return Err(GeometryError::Invalid("non-finite curve coefficient".into()));
        }
        let eval = Arc::new(PolyTrigCurve { coords });
        CenterCurve::from_evaluator(eval, domain, false)
    }

    /// Attaches a constant orthonormal frame used when the Frenet frame
    /// degenerates. If `k_1` vanishes the whole override is returned as the
    /// frame (its first vector must be the unit tangent); if a later
    /// curvature vanishes the override vectors complete the partial frame.
    pub fn with_frame_override(mut self, frame: Vec<VecN>) -> Result<Self> {
        let n = self.dim();
        if frame.len() != n {
            return Err(GeometryError::DimensionMismatch { expected: n, found: frame.len() });
        }
        for (i, fi) in frame.iter().enumerate() {
            if fi.dim() != n {
                return Err(GeometryError::DimensionMismatch { expected: n, found: fi.dim() });
            }
            for (j, fj) in frame.iter().enumerate() {
                let want = if i == j { 1.0 } else { 0.0 };
                if (fi.inner(fj) - want).abs() > 1e-12 {
                    return Err(GeometryError::Invalid(format!(
                        "frame override is not orthonormal: <F{}, F{}> = {}",
                        i + 1,
                        j + 1,
                        fi.inner(fj)
                    )));
                }
            }
        }
        self.frame_override = Some(frame);
        Ok(self)
    }

    pub fn without_frame_override(mut self) -> Self {
        self.frame_override = None;
        self
    }

    /// Applies the rigid motion `x -> R x + b` (R orthogonal).
    pub fn transformed(&self, rotation: &MatK, translation: &VecN) -> Result<Self> {
        let n = self.dim();
        if rotation.dim() != n || translation.dim() != n {
            return Err(GeometryError::DimensionMismatch { expected: n, found: rotation.dim() });
        }
        let rrt = rotation.matmul(&rotation.transpose());
        if rrt.max_abs_diff(&MatK::identity(n)) > 1e-12 {
            return Err(GeometryError::Invalid("rigid motion matrix is not orthogonal".into()));
        }
        let eval = Arc::new(Rigid {
            inner: self.evaluator.clone(),
            rotation: rotation.clone(),
            translation: translation.clone(),
        });
        let mut out = CenterCurve::from_evaluator(eval, self.domain, self.unit_speed)?;
        if let Some(frame) = &self.frame_override {
            out = out.with_frame_override(frame.iter().map(|f| apply(rotation, f)).collect())?;
        }
        Ok(out)
    }

    pub fn dim(&self) -> usize {
        self.evaluator.dim()
    }

    pub fn domain(&self) -> (f64, f64) {
        self.domain
    }

    pub fn is_unit_speed(&self) -> bool {
        self.unit_speed
    }

    pub fn frame_override(&self) -> Option<&[VecN]> {
        self.frame_override.as_deref()
    }

    pub fn evaluator(&self) -> &Arc<dyn CurveEvaluator> {
        &self.evaluator
    }

    pub fn position(&self, t: f64) -> VecN {
        self.evaluator.derivatives(t, 0).swap_remove(0)
    }

    pub fn derivatives(&self, t: f64, order: usize) -> Vec<VecN> {
        self.evaluator.derivatives(t, order)
    }

    pub fn speed(&self, t: f64) -> f64 {
        self.evaluator.derivatives(t, 1)[1].norm()
    }

    /// Errors unless `t` lies in the domain (with a relative slack of 1e-12).
    pub fn check_in_domain(&self, t: f64) -> Result<()> {
        let (lo, hi) = self.domain;
        let slack = 1e-12 * (hi - lo).abs().max(1.0);
        if !(t >= lo - slack && t <= hi + slack) {
            return Err(GeometryError::OutOfDomain { axis: 0, value: t, lo, hi });
        }
        Ok(())
    }
}

fn apply(m: &MatK, v: &VecN) -> VecN {
    let n = v.dim();
    VecN::new((0..n).map(|i| (0..n).map(|j| m[(i, j)] * v[j]).sum()).collect())
}

/// Completes a unit vector to a positively oriented orthonormal basis whose
/// first element is `first`, using the standard basis as candidates.
fn complete_basis(first: &VecN) -> Result<Vec<VecN>> {
    let n = first.dim();
    let mut frame = vec![first.clone()];
    for i in 0..n {
        if frame.len() == n {
            break;
        }
        let mut w = VecN::basis(n, i);
        for f in &frame {
            w = w.axpy(-w.inner(f), f);
        }
        if w.norm() > 1e-6 {
            frame.push(w.normalized());
        }
    }
    let det = MatK::from_rows(&frame.iter().map(|f| f.as_slice().to_vec()).collect::<Vec<_>>())?.det();
    if det < 0.0 {
        let last = frame.last_mut().unwrap();
        *last = &*last * -1.0;
    }
    Ok(frame)
}

#[derive(Debug)]
struct Line {
    origin: VecN,
    direction: VecN,
}

impl CurveEvaluator for Line {
    fn dim(&self) -> usize {
        self.origin.dim()
    }

    fn derivatives(&self, t: f64, order: usize) -> Vec<VecN> {
        let mut out = vec![self.origin.axpy(t, &self.direction)];
        if order >= 1 {
            out.push(self.direction.clone());
        }
        for _ in 2..=order {
            out.push(VecN::zeros(self.dim()));
        }
        out
    }
}

#[derive(Debug)]
struct Circle {
    dim: usize,
    radius: f64,
    arclength: bool,
}

impl CurveEvaluator for Circle {
    fn dim(&self) -> usize {
        self.dim
    }

    fn derivatives(&self, t: f64, order: usize) -> Vec<VecN> {
        let w = if self.arclength { 1.0 / self.radius } else { 1.0 };
        let (s, c) = (w * t).sin_cos();
        (0..=order)
            .map(|k| {
                let amp = self.radius * w.powi(k as i32);
                let (x, y) = match k % 4 {
                    0 => (c, s),
                    1 => (-s, c),
                    2 => (-c, -s),
                    _ => (s, -c),
                };
                let mut v = VecN::zeros(self.dim);
                v[0] = amp * x;
                v[1] = amp * y;
                v
            })
            .collect()
    }
}

#[derive(Debug)]
struct QuadHelix {
    a: f64,
    b: f64,
    c: f64,
    speed: f64,
}

impl CurveEvaluator for QuadHelix {
    fn dim(&self) -> usize {
        4
    }

    fn derivatives(&self, s: f64, order: usize) -> Vec<VecN> {
        let t = s / self.speed;
        let (s1, c1) = t.sin_cos();
        let (s2, c2) = (self.c * t).sin_cos();
        (0..=order)
            .map(|k| {
                let chain = self.speed.powi(-(k as i32));
                let rot = |cs: f64, sn: f64| match k % 4 {
                    0 => (cs, sn),
                    1 => (-sn, cs),
                    2 => (-cs, -sn),
                    _ => (sn, -cs),
                };
                let (x1, y1) = rot(c1, s1);
                let (x2, y2) = rot(c2, s2);
                let a = self.a * chain;
                let b = self.b * self.c.powi(k as i32) * chain;
                VecN::from([a * x1, a * y1, b * x2, b * y2])
            })
            .collect()
    }
}

#[derive(Debug)]
struct PolyTrigCurve {
    coords: Vec<PolyTrig>,
}

impl CurveEvaluator for PolyTrigCurve {
    fn dim(&self) -> usize {
        self.coords.len()
    }

    fn derivatives(&self, t: f64, order: usize) -> Vec<VecN> {
        (0..=order)
            .map(|k| VecN::new(self.coords.iter().map(|c| c.derivative(t, k)).collect()))
            .collect()
    }
}

#[derive(Debug)]
struct Rigid {
    inner: Arc<dyn CurveEvaluator>,
    rotation: MatK,
    translation: VecN,
}

impl CurveEvaluator for Rigid {
    fn dim(&self) -> usize {
        self.inner.dim()
    }

    fn derivatives(&self, t: f64, order: usize) -> Vec<VecN> {
        let mut out: Vec<VecN> =
            self.inner.derivatives(t, order).iter().map(|d| apply(&self.rotation, d)).collect();
        out[0] += &self.translation;
        out
    }
}

/// Full-turn domain `[0, 2 pi R]` of a unit-speed circle.
pub fn circle_period(radius: f64) -> f64 {
    2.0 * PI * radius
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn builtin_unit_speed() {
        let curves = [
            CenterCurve::axis(4, (0.0, 1.0)).unwrap(),
            CenterCurve::circle(4, 2.0, (0.0, 10.0)).unwrap(),
            CenterCurve::quad_helix(1.0, 0.7, 1.6, (0.0, 10.0)).unwrap(),
            CenterCurve::line(VecN::from([1.0, 2.0, 3.0]), VecN::from([1.0, 1.0, 0.0]), (0.0, 1.0))
                .unwrap(),
        ];
        for c in &curves {
            for i in 0..20 {
                let t = 0.37 * i as f64;
                assert!((c.speed(t) - 1.0).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn helix_derivatives_match_finite_differences() {
        let c = CenterCurve::quad_helix(1.0, 0.7, 1.6, (0.0, 10.0)).unwrap();
        let h = 1e-5;
        for s in [0.1, 1.3, 4.0] {
            let d = c.derivatives(s, 4);
            let dp = c.derivatives(s + h, 4);
            let dm = c.derivatives(s - h, 4);
            for k in 0..4 {
                let fd = (&dp[k] - &dm[k]) * (0.5 / h);
                assert!((&fd - &d[k + 1]).max_abs() < 1e-8, "k={k}");
            }
        }
    }

    #[test]
    fn override_must_be_orthonormal() {
        let c = CenterCurve::axis(4, (0.0, 1.0)).unwrap();
        let bad = vec![VecN::basis(4, 0), VecN::basis(4, 0), VecN::basis(4, 2), VecN::basis(4, 3)];
        assert!(c.clone().with_frame_override(bad).is_err());
        assert!(c.with_frame_override(vec![VecN::basis(4, 0)]).is_err());
    }

    #[test]
    fn completed_line_frame_is_positive() {
        let d = VecN::from([0.0, 1.0, 1.0, 0.0]).normalized();
        let f = complete_basis(&d).unwrap();
        let m = MatK::from_rows(&f.iter().map(|v| v.as_slice().to_vec()).collect::<Vec<_>>()).unwrap();
        assert!((m.det() - 1.0).abs() < 1e-12);
        assert!(m.matmul(&m.transpose()).max_abs_diff(&MatK::identity(4)) < 1e-12);
    }

    #[test]
    fn rigid_motion_moves_positions() {
        let c = CenterCurve::circle(4, 2.0, (0.0, 10.0)).unwrap();
        let rot = MatK::from_rows(&[
            vec![0.0, -1.0, 0.0, 0.0],
            vec![1.0, 0.0, 0.0, 0.0],
            vec![0.0, 0.0, 1.0, 0.0],
            vec![0.0, 0.0, 0.0, 1.0],
        ])
        .unwrap();
        let shift = VecN::from([1.0, 2.0, 3.0, 4.0]);
        let m = c.transformed(&rot, &shift).unwrap();
        let p = m.position(0.0);
        assert!((&p - &VecN::from([1.0, 4.0, 3.0, 4.0])).max_abs() < 1e-15);
        assert!(c.transformed(&MatK::diag(&[2.0, 1.0, 1.0, 1.0]), &shift).is_err());
    }
}
