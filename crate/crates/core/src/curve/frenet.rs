use serde::Serialize;

use super::CenterCurve;
use crate::error::{GeometryError, Result};
use crate::jet::{jet_dot, jet_scale, jet_sub, Jet, JetVec};
use crate::linalg::{cross_n, VecN};

/// Gram-Schmidt residual norm below which a Frenet curvature counts as zero.
pub const FRENET_DEGENERACY_THRESHOLD: f64 = 1e-10;

/// Residual norm an override vector must keep after projection to be used
/// for completing a partial frame.
const COMPLETION_MIN_RESIDUAL: f64 = 1e-6;

/// How the frame at a point was obtained.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum FrameSource {
    /// Gram-Schmidt on the derivatives, last vector by the generalized cross product.
    GramSchmidt,
    /// Gram-Schmidt up to `F_{from}`, then completed with the override vectors.
    Completed { from: usize },
    /// `k_1 = 0`: the constant override frame, all curvatures zero.
    Override,
}

/// Frenet frame `F_1 .. F_n` and curvatures `k_1 .. k_{n-1}` at arc length `s`.
#[derive(Debug, Clone, Serialize)]
pub struct FrenetData {
    pub s: f64,
    pub frame: Vec<VecN>,
    pub curvatures: Vec<f64>,
    /// `k_i'`, filled in by [`FrenetData::with_curvature_derivatives`].
    pub curvature_derivs: Option<Vec<f64>>,
    pub source: FrameSource,
}

impl FrenetData {
    pub fn dim(&self) -> usize {
        self.frame.len()
    }

    /// Curvature `k_i` (1-based), zero past the end.
    pub fn k(&self, i: usize) -> f64 {
        self.curvatures.get(i - 1).copied().unwrap_or(0.0)
    }

    pub fn with_curvature_derivatives(mut self, curve: &CenterCurve) -> Result<Self> {
        self.curvature_derivs = Some(curvature_derivatives(curve, self.s)?);
        Ok(self)
    }

    /// Ambient vector with Frenet coordinates `coords`.
    pub fn to_ambient(&self, coords: &[f64]) -> VecN {
        let mut out = VecN::zeros(self.dim());
        for (c, f) in coords.iter().zip(&self.frame) {
            out = out.axpy(*c, f);
        }
        out
    }
}

pub(crate) fn fd_step(s: f64) -> f64 {
    1e-5_f64.max(1e-5 * s.abs())
}

/// Sign making `[F_1 .. F_{n-1}, sign * cross_n(F_1 .. F_{n-1})]` positively oriented.
fn orientation_sign(n: usize) -> f64 {
    if (n - 1) % 2 == 0 {
        1.0
    } else {
        -1.0
    }
}

/// Frame at `s` without curvatures.
pub(crate) fn frame_at(c: &CenterCurve, s: f64) -> Result<(Vec<VecN>, FrameSource)> {
    let n = c.dim();
    let derivs = c.derivatives(s, n - 1);
    let mut frame: Vec<VecN> = Vec::with_capacity(n);
    let mut source = FrameSource::GramSchmidt;
    for (j, d) in derivs.iter().enumerate().take(n).skip(1) {
        let mut w = d.clone();
        for f in &frame {
            w = w.axpy(-w.inner(f), f);
        }
        let norm = w.norm();
        if norm <= FRENET_DEGENERACY_THRESHOLD * d.norm().max(1.0) {
            let Some(over) = c.frame_override() else {
                return Err(GeometryError::FrenetDegenerate { index: j - 1, s });
            };
            if j == 1 {
                return Err(GeometryError::NonRegular { t: s, speed: norm });
            }
            if j == 2 {
                let tangent = &frame[0];
                if (&over[0] - tangent).max_abs() > 1e-9 {
                    return Err(GeometryError::Contract(format!(
                        "k_1 vanishes at s = {s} but the frame override's first vector is not the unit tangent"
                    )));
                }
                return Ok((over.to_vec(), FrameSource::Override));
            }
            source = FrameSource::Completed { from: j - 1 };
            for o in over {
                if frame.len() == n - 1 {
                    break;
                }
                let mut w = o.clone();
                for f in &frame {
                    w = w.axpy(-w.inner(f), f);
                }
                if w.norm() > COMPLETION_MIN_RESIDUAL {
                    frame.push(w.normalized());
                }
            }
            break;
        }
        frame.push(w * (1.0 / norm));
    }
    if frame.len() != n - 1 {
        return Err(GeometryError::Contract(format!(
            "could not complete the frame at s = {s} from the override"
        )));
    }
    let last = cross_n(&frame)? * orientation_sign(n);
    let last_norm = last.norm();
    frame.push(last * (1.0 / last_norm));
    Ok((frame, source))
}

/// Frenet apparatus of a unit-speed curve at arc length `s`.
///
/// The frame comes from Gram-Schmidt on `alpha', .., alpha^(n-1)` with the
/// last vector fixed by the generalized cross product so that
/// `det[F_1 .. F_n] = +1` (hence `k_{n-1}` carries a sign). Curvatures are
/// `k_i = <F_i'(s), F_{i+1}(s)>` with `F_i'` by central differences of step
/// `max(1e-5, 1e-5 |s|)`; truncation error is `O(h^2)`.
pub fn frenet_apparatus(c: &CenterCurve, s: f64) -> Result<FrenetData> {
    if !c.is_unit_speed() {
        return Err(GeometryError::Contract(
            "Frenet apparatus needs a unit-speed curve; reparametrize by arc length first".into(),
        ));
    }
    c.check_in_domain(s)?;
    let n = c.dim();
    let (frame, source) = frame_at(c, s)?;
    if source == FrameSource::Override {
        return Ok(FrenetData {
            s,
            frame,
            curvatures: vec![0.0; n - 1],
            curvature_derivs: None,
            source,
        });
    }
    let h = fd_step(s);
    let (plus, _) = frame_at(c, s + h)?;
    let (minus, _) = frame_at(c, s - h)?;
    let curvatures = (0..n - 1)
        .map(|i| {
            let d = (&plus[i] - &minus[i]) * (0.5 / h);
            d.inner(&frame[i + 1])
        })
        .collect();
    Ok(FrenetData { s, frame, curvatures, curvature_derivs: None, source })
}

/// `k_i'(s)` by central differences of the curvatures.
pub fn curvature_derivatives(c: &CenterCurve, s: f64) -> Result<Vec<f64>> {
    let h = fd_step(s);
    let plus = frenet_apparatus_unchecked(c, s + h)?;
    let minus = frenet_apparatus_unchecked(c, s - h)?;
    Ok(plus.curvatures.iter().zip(&minus.curvatures).map(|(p, m)| (p - m) / (2.0 * h)).collect())
}

fn frenet_apparatus_unchecked(c: &CenterCurve, s: f64) -> Result<FrenetData> {
    let (lo, hi) = c.domain();
    let clamped = s.clamp(lo, hi);
    if clamped == s {
        frenet_apparatus(c, s)
    } else {
        // stencil point just outside the domain: same formulas, no domain check
        let relaxed = CenterCurve { domain: (lo.min(s), hi.max(s)), ..c.clone() };
        frenet_apparatus(&relaxed, s)
    }
}

/// Frame vectors as Taylor jets of the given order in arc length around `s`;
/// `frame_jets(..)[i]` is `F_{i+1}`, its k-th derivative is `F_{i+1}^(k)(s)`.
pub fn frame_jets(c: &CenterCurve, s: f64, order: usize) -> Result<Vec<JetVec>> {
    if !c.is_unit_speed() {
        return Err(GeometryError::Contract("frame jets need a unit-speed curve".into()));
    }
    let n = c.dim();
    let (point_frame, source) = frame_at(c, s)?;
    if source == FrameSource::Override {
        return Ok(point_frame
            .iter()
            .map(|f| f.iter().map(|x| Jet::constant(*x, order)).collect())
            .collect());
    }
    let derivs = c.derivatives(s, n - 1 + order);
    let constant = |v: &VecN| -> JetVec { v.iter().map(|x| Jet::constant(*x, order)).collect() };
    let project_out = |w: &mut JetVec, frame: &[JetVec]| {
        for f in frame {
            let p = jet_dot(w, f);
            *w = jet_sub(w, &jet_scale(f, &p));
        }
    };
    let normalize = |w: &JetVec| -> JetVec {
        let inv = jet_dot(w, w).sqrt().recip();
        jet_scale(w, &inv)
    };
    let mut frame: Vec<JetVec> = Vec::with_capacity(n);
    let limit = match source {
        FrameSource::Completed { from } => from + 1,
        _ => n,
    };
    for j in 1..limit {
        let mut w: JetVec = (0..n)
            .map(|i| {
                Jet::from_derivatives(&(j..=j + order).map(|k| derivs[k][i]).collect::<Vec<_>>())
            })
            .collect();
        project_out(&mut w, &frame);
        frame.push(normalize(&w));
    }
    // the remaining directions are fixed by continuity: project the point
    // frame's own vectors, which keeps the orientation
    for target in point_frame.iter().skip(frame.len()) {
        let mut w = constant(target);
        project_out(&mut w, &frame);
        frame.push(normalize(&w));
    }
    Ok(frame)
}
