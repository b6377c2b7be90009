//! Closed-form curvature of canal hypersurfaces in E^4.
//!
//! Everything is expressed through the Frenet curvatures `k_1, k_2, k_3` of
//! the center curve, the radius sample `(rho, rho', rho'')` and the angles
//! `v2, v3`. With `W = 1 - rho'^2` the recurring scalar is
//!
//! ```text
//! Q = rho (k_1 sqrt(W) cos v2 cos v3 + rho'') - 1 + rho'^2
//! ```
//!
//! whose zeros are focal points of the parametrization; `cos v3 = 0` is a
//! coordinate pole. Both are reported as errors rather than evaluated.

use serde::Serialize;

use crate::canal::{canal_point, CanalPatch, RadiusSample, EPS_REG};
use crate::curve::FrenetData;
use crate::error::{GeometryError, Result};
use crate::linalg::{eig_shape3, MatK, VecN};

/// `|Q|` at or below which curvatures are not evaluated.
pub const FOCAL_EPS: f64 = 1e-10;
/// `|cos v3|` at or below which the shape operator is not evaluated.
pub const POLE_EPS: f64 = 1e-6;
/// Agreement required between the two shape-operator routes.
pub const SHAPE_AGREEMENT: f64 = 1e-8;
/// Agreement required between direct and factored determinants.
pub const DET_AGREEMENT: f64 = 1e-9;

/// Pointwise quantities shared by all closed forms.
#[derive(Debug, Clone, Copy)]
struct Terms {
    k1: f64,
    k2: f64,
    k3: f64,
    rho: f64,
    rp: f64,
    rpp: f64,
    /// `1 - rho'^2`
    w2: f64,
    /// `sqrt(1 - rho'^2)`
    w: f64,
    s2: f64,
    c2: f64,
    s3: f64,
    c3: f64,
    q: f64,
}

impl Terms {
    fn new(frenet: &FrenetData, r: &RadiusSample, v2: f64, v3: f64) -> Result<Self> {
        if frenet.dim() != 4 {
            return Err(GeometryError::DimensionMismatch { expected: 4, found: frenet.dim() });
        }
        r.check(frenet.s, EPS_REG)?;
        if !(v2.is_finite() && v3.is_finite()) {
            return Err(GeometryError::NonFinite("angles"));
        }
        let (k1, k2, k3) = (frenet.k(1), frenet.k(2), frenet.k(3));
        let (rho, rp, rpp) = (r.rho, r.d1, r.d2);
        let w2 = 1.0 - rp * rp;
        let w = w2.sqrt();
        let (s2, c2) = v2.sin_cos();
        let (s3, c3) = v3.sin_cos();
        let q = rho * (k1 * w * c2 * c3 + rpp) - 1.0 + rp * rp;
        Ok(Terms { k1, k2, k3, rho, rp, rpp, w2, w, s2, c2, s3, c3, q })
    }

    fn check_focal(&self) -> Result<()> {
        if !(self.q.abs() > FOCAL_EPS) {
            return Err(GeometryError::CoordinateSingularity(format!("focal point: Q = {:e}", self.q)));
        }
        Ok(())
    }

    fn check_pole(&self) -> Result<()> {
        if !(self.c3.abs() > POLE_EPS) {
            return Err(GeometryError::CoordinateSingularity(format!("v3 pole: cos v3 = {:e}", self.c3)));
        }
        Ok(())
    }

    /// `(1 - rho'^2)(k_1 sqrt(1 - rho'^2) cos v2 cos v3 + rho'')`
    fn linear_part(&self) -> f64 {
        self.w2 * (self.k1 * self.w * self.c2 * self.c3 + self.rpp)
    }

    /// `k_1^2 (1 - rho'^2) cos^2 v2 cos^2 v3 + 2 k_1 rho'' sqrt(1 - rho'^2) cos v2 cos v3 + rho''^2`
    fn quadratic_part(&self) -> f64 {
        let c = self.c2 * self.c3;
        self.k1 * self.k1 * self.w2 * c * c + 2.0 * self.k1 * self.rpp * self.w * c + self.rpp * self.rpp
    }
}

/// `N = -rho' F_1 + sqrt(1 - rho'^2)(cos v2 cos v3 F_2 + sin v2 cos v3 F_3 + sin v3 F_4)`.
/// Points away from the center curve.
pub fn unit_normal(frenet: &FrenetData, r: &RadiusSample, v2: f64, v3: f64) -> Result<VecN> {
    let t = Terms::new(frenet, r, v2, v3)?;
    Ok(frenet.to_ambient(&[-t.rp, t.w * t.c2 * t.c3, t.w * t.s2 * t.c3, t.w * t.s3]))
}

/// First fundamental form. `det_g` is the factored value
/// `rho^4 (1 - rho'^2) Q^2 cos^2 v3`; `det_g_direct` the 3x3 determinant.
#[derive(Debug, Clone, Serialize)]
pub struct FirstForm {
    pub g: MatK,
    pub det_g: f64,
    pub det_g_direct: f64,
    pub q: f64,
    /// `|Q| <= 1e-10` or `|cos v3| <= 1e-6`.
    pub near_singular: bool,
}

fn check_det(quantity: &'static str, factored: f64, m: &MatK, direct: f64) -> Result<()> {
    // rounding scale of the cofactor expansion
    let scale = (m[(0, 0)] * m[(1, 1)] * m[(2, 2)]).abs()
        + (m[(0, 1)] * m[(0, 1)] * m[(2, 2)]).abs()
        + (m[(0, 2)] * m[(0, 2)] * m[(1, 1)]).abs()
        + (2.0 * m[(0, 1)] * m[(1, 2)] * m[(0, 2)]).abs()
        + (m[(1, 2)] * m[(1, 2)] * m[(0, 0)]).abs();
    let dev = (factored - direct).abs();
    if dev > DET_AGREEMENT * factored.abs() + 1e-13 * scale {
        return Err(GeometryError::ClosedFormMismatch { quantity, deviation: dev });
    }
    Ok(())
}

pub fn first_form(frenet: &FrenetData, r: &RadiusSample, v2: f64, v3: f64) -> Result<FirstForm> {
    let t = Terms::new(frenet, r, v2, v3)?;
    let Terms { k1, k2, k3, rho, rp, rpp, w2, w, s2, c2, s3, c3, q } = t;
    let bend = rp * (rp * rp + rho * rpp - 1.0);
    let a = k2 * rho * w2 * s2 * c3 + k1 * rho * rp * w + bend * c2 * c3;
    let b = -k2 * rho * w2 * c2 * c3 + k3 * rho * w2 * s3 + bend * s2 * c3;
    let d = bend * s3 - k3 * rho * w2 * s2 * c3;
    let g11 = (w2 * q * q + a * a + b * b + d * d) / w2;
    let g12 = rho * rho * (k1 * rp * w * s2 + k2 * w2 * c3 - k3 * w2 * c2 * s3) * c3;
    let g13 = rho * rho * (k1 * rp * w * c2 * s3 + k3 * w2 * s2);
    let g22 = rho * rho * w2 * c3 * c3;
    let g33 = rho * rho * w2;
    let g = MatK::from_rows(&[vec![g11, g12, g13], vec![g12, g22, 0.0], vec![g13, 0.0, g33]])?;
    let det_g = rho.powi(4) * w2 * q * q * c3 * c3;
    let det_g_direct = g.det();
    check_det("det g", det_g, &g, det_g_direct)?;
    let near_singular = q.abs() <= FOCAL_EPS || c3.abs() <= POLE_EPS;
    Ok(FirstForm { g, det_g, det_g_direct, q, near_singular })
}

/// Second fundamental form with respect to [`unit_normal`]; `det_h` is the
/// factored value, `det_h_direct` the 3x3 determinant.
#[derive(Debug, Clone, Serialize)]
pub struct SecondForm {
    pub h: MatK,
    pub det_h: f64,
    pub det_h_direct: f64,
}

pub fn second_form(frenet: &FrenetData, r: &RadiusSample, v2: f64, v3: f64) -> Result<SecondForm> {
    let t = Terms::new(frenet, r, v2, v3)?;
    let Terms { k1, k2, k3, rho, rp, rpp, w2, w, s2, c2, s3, c3, .. } = t;
    let bracket = (k2 * k2 * c3 * c3 - k2 * k3 * c2 * (2.0 * v3).sin() + k3 * k3 * (c3 * c3 * s2 * s2 + s3 * s3))
        * w2
        * w2
        + k1 * k1 * w2 * (w2 * c2 * c2 * c3 * c3 + rp * rp)
        + rpp * rpp
        + 2.0 * k1 * w * (k2 * rp * w2 * s2 + rpp * c2) * c3;
    let h11 = rho / (rp * rp - 1.0) * bracket + k1 * w * c2 * c3 + rpp;
    let h12 = rho * (-k1 * rp * w * s2 + w2 * (k3 * c2 * s3 - k2 * c3)) * c3;
    let h13 = rho * (-k1 * rp * w * c2 * s3 - k3 * w2 * s2);
    let h22 = -rho * w2 * c3 * c3;
    let h33 = -rho * w2;
    let h = MatK::from_rows(&[vec![h11, h12, h13], vec![h12, h22, 0.0], vec![h13, 0.0, h33]])?;
    let det_h = rho * rho * w2 * (t.linear_part() - rho * t.quadratic_part()) * c3 * c3;
    let det_h_direct = h.det();
    check_det("det h", det_h, &h, det_h_direct)?;
    Ok(SecondForm { h, det_h, det_h_direct })
}

/// Closed-form shape operator entries.
fn shape_closed(t: &Terms) -> MatK {
    let Terms { k1, k2, k3, rho, rp, rpp, w2, w, s2, c2, s3, c3, q } = *t;
    let s11 = (t.linear_part() - rho * t.quadratic_part()) / (q * q);
    let s21 = (k1 * rp * w * s2 / c3 + k2 * w2 - k3 * w2 * c2 * (s3 / c3)) / (rho * q);
    let s31 = (q * k3 * w2 * s2 + k1 * rp * c2 * s3 * (-w2.powf(1.5) + rho * (k1 * w2 * c2 * c3 + w * rpp)))
        / (rho * q * q);
    let s22 = -1.0 / rho;
    MatK::from_rows(&[vec![s11, 0.0, 0.0], vec![s21, s22, 0.0], vec![s31, 0.0, s22]]).expect("3x3")
}

/// Shape operator from the closed entries, checked against `g^{-1} h`.
pub fn shape_operator(frenet: &FrenetData, r: &RadiusSample, v2: f64, v3: f64) -> Result<MatK> {
    Ok(forms_bundle(frenet, r, v2, v3)?.shape)
}

/// Normal, both fundamental forms and the shape operator at one point.
#[derive(Debug, Clone, Serialize)]
pub struct FormsBundle {
    pub normal: VecN,
    pub g: MatK,
    pub det_g: f64,
    pub h: MatK,
    pub det_h: f64,
    pub shape: MatK,
    pub q: f64,
}

pub fn forms_bundle(frenet: &FrenetData, r: &RadiusSample, v2: f64, v3: f64) -> Result<FormsBundle> {
    let t = Terms::new(frenet, r, v2, v3)?;
    t.check_pole()?;
    t.check_focal()?;
    let first = first_form(frenet, r, v2, v3)?;
    let second = second_form(frenet, r, v2, v3)?;
    let closed = shape_closed(&t);
    let generic = first.g.inverse()?.matmul(&second.h);
    let dev = closed.max_abs_diff(&generic);
    if !(dev <= SHAPE_AGREEMENT * closed.max_abs().max(1.0)) {
        return Err(GeometryError::ClosedFormMismatch { quantity: "shape operator", deviation: dev });
    }
    Ok(FormsBundle {
        normal: unit_normal(frenet, r, v2, v3)?,
        g: first.g,
        det_g: first.det_g,
        h: second.h,
        det_h: second.det_h,
        shape: closed,
        q: t.q,
    })
}

/// Gaussian curvature `K = det h / det g` in closed form.
pub fn gaussian_curvature(frenet: &FrenetData, r: &RadiusSample, v2: f64, v3: f64) -> Result<f64> {
    let t = Terms::new(frenet, r, v2, v3)?;
    t.check_focal()?;
    let Terms { k1, rho, rp, rpp, w2, w, c2, c3, .. } = t;
    let c = c2 * c3;
    let num = w2 * (k1 * w * c + rpp) - rho * (k1 * k1 * w2 * c * c + rpp * rpp + 2.0 * k1 * rpp * w * c);
    let den = rho * rho * (rho * (k1 * w * c + rpp) - 1.0 + rp * rp).powi(2);
    Ok(num / den)
}

/// Mean curvature `H = tr S / 3` in closed form.
pub fn mean_curvature(frenet: &FrenetData, r: &RadiusSample, v2: f64, v3: f64) -> Result<f64> {
    let t = Terms::new(frenet, r, v2, v3)?;
    t.check_focal()?;
    let Terms { k1, rho, rp, rpp, w2, w, c2, c3, .. } = t;
    let c = c2 * c3;
    let num = -3.0 * rho * rho * (k1 * k1 * w2 * c * c + 2.0 * k1 * rpp * w * c + rpp * rpp) - 2.0 * w2 * w2
        + 5.0 * rho * w2 * (k1 * w * c + rpp);
    let den = 3.0 * rho * (rho * (k1 * w * c + rpp) - 1.0 + rp * rp).powi(2);
    Ok(num / den)
}

/// `(-1/rho, -1/rho, K rho^2)`, checked against the eigenvalues of `shape`.
pub fn principal_curvatures(shape: &MatK, gaussian: f64, rho: f64) -> Result<[f64; 3]> {
    let closed = [-1.0 / rho, -1.0 / rho, gaussian * rho * rho];
    let mut sorted = closed;
    sorted.sort_by(f64::total_cmp);
    let eig = eig_shape3(shape)?;
    for (a, b) in sorted.iter().zip(&eig) {
        let dev = (a - b).abs();
        if dev > SHAPE_AGREEMENT * a.abs().max(1.0) {
            return Err(GeometryError::ClosedFormMismatch { quantity: "principal curvatures", deviation: dev });
        }
    }
    Ok(closed)
}

/// `K` and `H` of a tube of radius `lambda`.
pub fn tubular_curvatures(k1: f64, lambda: f64, v2: f64, v3: f64) -> Result<(f64, f64)> {
    if !(lambda > 0.0) {
        return Err(GeometryError::NonPositiveRadius { v1: f64::NAN, rho: lambda });
    }
    let c = v2.cos() * v3.cos();
    let focal = 1.0 - k1 * lambda * c;
    if !(focal.abs() > FOCAL_EPS) {
        return Err(GeometryError::CoordinateSingularity(format!(
            "focal point of the tube: 1 - k1 lambda cos v2 cos v3 = {focal:e}"
        )));
    }
    let k = k1 * c / (lambda * lambda * (1.0 - k1 * lambda * c));
    let h = (2.0 - 3.0 * k1 * lambda * c) / (3.0 * lambda * (-1.0 + k1 * lambda * c));
    Ok((k, h))
}

/// `|3 H rho - K rho^3 + 2|`
pub fn identity_residual(gaussian: f64, mean: f64, rho: f64) -> f64 {
    (3.0 * mean * rho - gaussian * rho.powi(3) + 2.0).abs()
}

/// Curvature summary at a parameter point.
#[derive(Debug, Clone, Serialize)]
pub struct CurvatureReport {
    pub location: [f64; 3],
    pub rho: f64,
    pub gaussian: f64,
    pub mean: f64,
    pub principal: [f64; 3],
    pub identity_residual: f64,
}

/// Closed-form curvature of an E^4 patch at `(v1, v2, v3)`.
pub fn curvature_report(patch: &CanalPatch, params: &[f64]) -> Result<CurvatureReport> {
    let (frenet, r) = point_data(patch, params)?;
    let (v2, v3) = (params[1], params[2]);
    let bundle = forms_bundle(&frenet, &r, v2, v3)?;
    let gaussian = gaussian_curvature(&frenet, &r, v2, v3)?;
    let mean = mean_curvature(&frenet, &r, v2, v3)?;
    let principal = principal_curvatures(&bundle.shape, gaussian, r.rho)?;
    Ok(CurvatureReport {
        location: [params[0], v2, v3],
        rho: r.rho,
        gaussian,
        mean,
        principal,
        identity_residual: identity_residual(gaussian, mean, r.rho),
    })
}

/// Frenet data and radius sample at `params[0]` of an E^4 patch.
pub fn point_data(patch: &CanalPatch, params: &[f64]) -> Result<(FrenetData, RadiusSample)> {
    if patch.dim() != 4 || params.len() != 3 {
        return Err(GeometryError::DimensionMismatch { expected: 4, found: patch.dim().max(params.len() + 1) });
    }
    // validates the parameters the same way point evaluation does
    canal_point(patch, params)?;
    Ok((patch.frenet(params[0])?, patch.radius(params[0])?))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::canal::{canal_partials_closed, RadiusProfile};
    use crate::curve::CenterCurve;
    use crate::polytrig::{PolyTrig, TrigTerm};
    use std::f64::consts::PI;

    fn line_frenet(curvatures: [f64; 3]) -> FrenetData {
        FrenetData {
            s: 0.0,
            frame: (0..4).map(|i| VecN::basis(4, i)).collect(),
            curvatures: curvatures.to_vec(),
            curvature_derivs: None,
            source: crate::curve::FrameSource::GramSchmidt,
        }
    }

    fn close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol * a.abs().max(b.abs()).max(1.0)
    }

    #[test]
    fn normal_examples() {
        let f = line_frenet([0.0; 3]);
        let n = unit_normal(&f, &RadiusSample::constant(1.0), 0.0, 0.0).unwrap();
        assert_eq!(n, VecN::basis(4, 1));
        let r = RadiusSample { rho: 2.0, d1: 0.6, d2: 0.0, d3: 0.0 };
        let n = unit_normal(&f, &r, 0.0, 0.0).unwrap();
        assert!((&n - &VecN::from([-0.6, 0.8, 0.0, 0.0])).max_abs() < 1e-15);
        let f = line_frenet([0.3, -0.2, 0.7]);
        let r = RadiusSample { rho: 1.3, d1: -0.4, d2: 0.2, d3: 0.0 };
        let n = unit_normal(&f, &r, 1.1, -0.3).unwrap();
        assert!((n.norm() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn straight_tube_forms() {
        let lambda = 0.7;
        let v3 = 0.4_f64;
        let f = line_frenet([0.0; 3]);
        let r = RadiusSample::constant(lambda);
        let first = first_form(&f, &r, 1.0, v3).unwrap();
        let c3 = v3.cos();
        let want = MatK::diag(&[1.0, lambda * lambda * c3 * c3, lambda * lambda]);
        assert!(first.g.max_abs_diff(&want) < 1e-15);
        assert!((first.det_g - lambda.powi(4) * c3 * c3).abs() < 1e-15);
        assert_eq!(first.q, -1.0);
        let second = second_form(&f, &r, 1.0, v3).unwrap();
        let want = MatK::diag(&[0.0, -lambda * c3 * c3, -lambda]);
        assert!(second.h.max_abs_diff(&want) < 1e-15);
        let s = shape_operator(&f, &r, 1.0, v3).unwrap();
        assert!(s.max_abs_diff(&MatK::diag(&[0.0, -1.0 / lambda, -1.0 / lambda])) < 1e-14);
        let k = gaussian_curvature(&f, &r, 1.0, v3).unwrap();
        let h = mean_curvature(&f, &r, 1.0, v3).unwrap();
        assert_eq!(k, 0.0);
        assert!((h + 2.0 / (3.0 * lambda)).abs() < 1e-15);
        let p = principal_curvatures(&s, k, lambda).unwrap();
        assert_eq!(p, [-1.0 / lambda, -1.0 / lambda, 0.0]);
        let p = principal_curvatures(&MatK::diag(&[0.0, -2.0, -2.0]), 0.0, 0.5).unwrap();
        assert_eq!(p, [-2.0, -2.0, 0.0]);
    }

    #[test]
    fn revolution_formulas() {
        // k_1 = 0 reduces K and H to their revolution forms
        let f = line_frenet([0.0, 0.4, -0.3]);
        let r = RadiusSample { rho: 1.2, d1: 0.3, d2: -0.25, d3: 0.1 };
        let (rho, rp, rpp) = (r.rho, r.d1, r.d2);
        for (v2, v3) in [(0.1, 0.2), (2.0, -1.0), (4.0, 1.3)] {
            let k = gaussian_curvature(&f, &r, v2, v3).unwrap();
            let h = mean_curvature(&f, &r, v2, v3).unwrap();
            let den = -1.0 + rp * rp + rho * rpp;
            // substituting k_1 = 0 into the general formula; positive on a neck
            assert!(close(k, -rpp / (rho * rho * den), 1e-14));
            assert!(close(h, (2.0 - 2.0 * rp * rp - 3.0 * rho * rpp) / (3.0 * rho * den), 1e-14));
        }
        let cone = RadiusSample { rho: 1.2, d1: 0.5, d2: 0.0, d3: 0.0 };
        assert_eq!(gaussian_curvature(&f, &cone, 0.3, 0.3).unwrap(), 0.0);
    }

    #[test]
    fn circle_tube_hand_values() {
        let f = line_frenet([0.5, 0.0, 0.0]);
        let r = RadiusSample::constant(0.5);
        let first = first_form(&f, &r, 0.0, 0.0).unwrap();
        assert!((first.q - (0.5 * 0.5 - 1.0)).abs() < 1e-15);
        let k = gaussian_curvature(&f, &r, 0.0, 0.0).unwrap();
        let h = mean_curvature(&f, &r, 0.0, 0.0).unwrap();
        assert!((k - 8.0 / 3.0).abs() < 1e-14);
        assert!((h + 10.0 / 9.0).abs() < 1e-14);
        let (kt, ht) = tubular_curvatures(0.5, 0.5, 0.0, 0.0).unwrap();
        assert!((kt - 8.0 / 3.0).abs() < 1e-14 && (ht + 10.0 / 9.0).abs() < 1e-14);
        assert!(identity_residual(kt, ht, 0.5) < 1e-14);
        assert!((-3.0 * 0.5 * ht + 0.125 * kt - 2.0).abs() < 1e-14);
    }

    #[test]
    fn tubular_special_cases() {
        let (k, h) = tubular_curvatures(0.0, 0.8, 1.0, 2.0).unwrap();
        assert_eq!(k, 0.0);
        assert!((h + 2.0 / 2.4).abs() < 1e-15);
        let (k, h) = tubular_curvatures(0.3, 0.8, 1.0, PI / 2.0).unwrap();
        assert!(k.abs() < 1e-15 && (h + 2.0 / 2.4).abs() < 1e-15);
        assert!(matches!(tubular_curvatures(2.0, 0.5, 0.0, 0.0), Err(GeometryError::CoordinateSingularity(_))));
        assert!(identity_residual(0.0, -2.0 / 3.0, 1.0) < 1e-15);
        assert!(identity_residual(8.0 / 3.0, -10.0 / 9.0, 0.5) < 1e-15);
    }

    #[test]
    fn singularities_are_reported() {
        let f = line_frenet([0.0; 3]);
        let r = RadiusSample::constant(1.0);
        assert!(matches!(shape_operator(&f, &r, 0.0, PI / 2.0), Err(GeometryError::CoordinateSingularity(_))));
        let first = first_form(&f, &r, 0.0, PI / 2.0).unwrap();
        assert!(first.near_singular);
        // focal: Q = rho k1 - 1 = 0
        let f = line_frenet([1.0, 0.0, 0.0]);
        assert!(matches!(gaussian_curvature(&f, &r, 0.0, 0.0), Err(GeometryError::CoordinateSingularity(_))));
        let bad = RadiusSample { rho: 1.0, d1: 1.0, d2: 0.0, d3: 0.0 };
        assert!(matches!(unit_normal(&f, &bad, 0.0, 0.0), Err(GeometryError::Regularity { .. })));
    }

    #[test]
    fn general_point_consistency() {
        let helix = CenterCurve::quad_helix(1.0, 0.7, 1.6, (0.0, 10.0)).unwrap();
        let wavy = RadiusProfile::poly_trig(PolyTrig {
            poly: vec![0.4],
            trig: vec![TrigTerm { freq: 1.0, cos: 0.0, sin: 0.05 }],
        });
        let p = CanalPatch::full(helix, wavy, (0.5, 9.5)).unwrap();
        for q in [[1.0, 0.3, 0.2], [4.4, 2.0, -0.9], [8.0, 5.0, 1.2]] {
            let (f, r) = point_data(&p, &q).unwrap();
            let b = forms_bundle(&f, &r, q[1], q[2]).unwrap();
            let k = gaussian_curvature(&f, &r, q[1], q[2]).unwrap();
            let h = mean_curvature(&f, &r, q[1], q[2]).unwrap();
            assert!(close(b.shape.det(), k, 1e-10));
            assert!(close(b.shape.trace(), 3.0 * h, 1e-10));
            assert!(close(b.det_h / b.det_g, k, 1e-9));
            assert!(close(b.h[(1, 1)] / b.g[(1, 1)], -1.0 / r.rho, 1e-14));
            assert!(close(b.h[(2, 2)] / b.g[(2, 2)], -1.0 / r.rho, 1e-14));
            assert!(identity_residual(k, h, r.rho) < 1e-9);
            let partials = canal_partials_closed(&p, &q).unwrap();
            for c in &partials {
                assert!(b.normal.inner(c).abs() < 1e-9);
            }
            // the closed partials give the closed g
            for i in 0..3 {
                for j in 0..3 {
                    assert!(close(partials[i].inner(&partials[j]), b.g[(i, j)], 1e-12));
                }
            }
            let rep = curvature_report(&p, &q).unwrap();
            assert!((rep.principal[0] + 1.0 / r.rho).abs() < 1e-12);
        }
    }
}
