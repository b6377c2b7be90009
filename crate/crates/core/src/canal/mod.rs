//! Canal hypersurfaces `X = alpha(v1) + sum_i a_i F_i(v1)`.
//!
//! The offset coefficients are `a_1 = -rho rho'` and
//! `a_i = rho sqrt(1 - rho'^2) L_i(v2, .., v_{n-1})` for `i >= 2`, where `L`
//! is the point of the unit sphere S^{n-2} given by the angle ladder
//!
//! ```text
//! L_2 = cos v2 cos v3 .. cos v_{n-1}
//! L_i = sin v_{n+1-i} cos v_{n+2-i} .. cos v_{n-1}     (3 <= i <= n-1)
//! L_n = sin v_{n-1}
//! ```
//!
//! so every point lies on the sphere of radius `rho(v1)` about `alpha(v1)`
//! and `X - alpha` is normal to the hypersurface.

mod profile;

use std::f64::consts::PI;

use serde::Serialize;

use crate::curve::{frame_at, frame_jets, frenet_apparatus, CenterCurve, FrenetData};
use crate::error::{GeometryError, Result};
use crate::jet::{jet_vec_derivative, Jet};
use crate::linalg::VecN;
use crate::oracle::{Axis, Immersion, ParamJet};

pub use profile::{RadiusProfile, RadiusSample, TabulatedProfile, EPS_REG};

/// Number of `v1` samples used to validate a patch.
pub const VALIDATION_SAMPLES: usize = 257;

/// Factor of a ladder term: `cos` or `sin` of angle `v_{index+2}`.
#[derive(Debug, Clone, Copy)]
struct Factor {
    angle: usize,
    sine: bool,
}

impl Factor {
    /// `order`-th derivative of the factor.
    fn eval(&self, x: f64, order: usize) -> f64 {
        let (s, c) = x.sin_cos();
        let phase = if self.sine { order + 3 } else { order };
        match phase % 4 {
            0 => c,
            1 => -s,
            2 => -c,
            _ => s,
        }
    }
}

/// Factors of `L_2 .. L_n` for ambient dimension `n >= 3`. Angle `v_k` has
/// index `k - 2`.
fn ladder_factors(n: usize) -> Vec<Vec<Factor>> {
    let cos_from = |first: usize| -> Vec<Factor> {
        (first..n).map(|k| Factor { angle: k - 2, sine: false }).collect()
    };
    let mut out = vec![cos_from(2)];
    for i in 3..n {
        let mut f = vec![Factor { angle: n + 1 - i - 2, sine: true }];
        f.extend(cos_from(n + 2 - i));
        out.push(f);
    }
    out.push(vec![Factor { angle: n - 3, sine: true }]);
    out
}

/// Mixed partial of the ladder `L_2 .. L_n`; `orders[j]` is the derivative
/// order in angle `j`.
fn ladder_partial(angles: &[f64], orders: &[usize]) -> Vec<f64> {
    let n = angles.len() + 2;
    ladder_factors(n)
        .iter()
        .map(|factors| {
            let mut used = vec![false; angles.len()];
            let mut v = 1.0;
            for f in factors {
                used[f.angle] = true;
                v *= f.eval(angles[f.angle], orders[f.angle]);
            }
            // a derivative in an angle the term does not contain kills it
            if orders.iter().zip(&used).any(|(o, u)| *o > 0 && !u) {
                0.0
            } else {
                v
            }
        })
        .collect()
}

/// Unit vector `(L_2, .., L_n)` of the angle ladder.
pub fn angle_ladder(angles: &[f64]) -> Vec<f64> {
    ladder_partial(angles, &vec![0; angles.len()])
}

fn check_coefficient_input(rho: f64, rho_prime: f64, angles: &[f64], n: usize) -> Result<()> {
    if n < 3 {
        return Err(GeometryError::Invalid(format!("canal hypersurfaces need n >= 3, got {n}")));
    }
    if angles.len() != n - 2 {
        return Err(GeometryError::DimensionMismatch { expected: n - 2, found: angles.len() });
    }
    RadiusSample { rho, d1: rho_prime, d2: 0.0, d3: 0.0 }.check(f64::NAN, EPS_REG)
}

/// Offset coefficients `a_1 .. a_n` for radius `rho`, slope `rho'` and the
/// angles `v2 .. v_{n-1}`. They satisfy `sum a_i^2 = rho^2`.
pub fn offset_coefficients(rho: f64, rho_prime: f64, angles: &[f64], n: usize) -> Result<Vec<f64>> {
    check_coefficient_input(rho, rho_prime, angles, n)?;
    let r = rho * (1.0 - rho_prime * rho_prime).sqrt();
    let mut out = vec![-rho * rho_prime];
    out.extend(angle_ladder(angles).into_iter().map(|l| r * l));
    Ok(out)
}

/// A canal hypersurface patch over a parameter box.
#[derive(Debug, Clone)]
pub struct CanalPatch {
    curve: CenterCurve,
    profile: RadiusProfile,
    domain: Vec<(f64, f64)>,
}

impl CanalPatch {
    /// Validates the curve, profile and domain. The profile must be positive
    /// and regular and the Frenet frame must exist at `VALIDATION_SAMPLES`
    /// uniform `v1` values.
    pub fn new(curve: CenterCurve, profile: RadiusProfile, domain: Vec<(f64, f64)>) -> Result<Self> {
        let n = curve.dim();
        if n < 3 {
            return Err(GeometryError::Invalid(format!("canal hypersurfaces need n >= 3, got {n}")));
        }
        if !curve.is_unit_speed() {
            return Err(GeometryError::Contract(
                "canal patches need a unit-speed center curve; reparametrize by arc length first".into(),
            ));
        }
        if domain.len() != n - 1 {
            return Err(GeometryError::DimensionMismatch { expected: n - 1, found: domain.len() });
        }
        for (i, (lo, hi)) in domain.iter().enumerate() {
            if !(lo.is_finite() && hi.is_finite() && lo < hi) {
                return Err(GeometryError::Invalid(format!("bad domain for v{}: [{lo}, {hi}]", i + 1)));
            }
        }
        let (lo, hi) = domain[0];
        curve.check_in_domain(lo)?;
        curve.check_in_domain(hi)?;
        if let Some((plo, phi)) = profile.domain() {
            if lo < plo - 1e-12 * (phi - plo) || hi > phi + 1e-12 * (phi - plo) {
                return Err(GeometryError::OutOfDomain { axis: 0, value: if lo < plo { lo } else { hi }, lo: plo, hi: phi });
            }
        }
        for j in 0..VALIDATION_SAMPLES {
            let v1 = lo + (hi - lo) * j as f64 / (VALIDATION_SAMPLES - 1) as f64;
            profile.at(v1)?;
            frame_at(&curve, v1)?;
        }
        Ok(CanalPatch { curve, profile, domain })
    }

    /// Patch with the full angle ranges `[0, 2 pi)` for `v2 .. v_{n-1}`.
    pub fn full(curve: CenterCurve, profile: RadiusProfile, v1: (f64, f64)) -> Result<Self> {
        let n = curve.dim();
        let mut domain = vec![v1];
        domain.extend(std::iter::repeat((0.0, 2.0 * PI)).take(n.saturating_sub(2)));
        CanalPatch::new(curve, profile, domain)
    }

    pub fn dim(&self) -> usize {
        self.curve.dim()
    }

    pub fn curve(&self) -> &CenterCurve {
        &self.curve
    }

    pub fn profile(&self) -> &RadiusProfile {
        &self.profile
    }

    pub fn domain(&self) -> &[(f64, f64)] {
        &self.domain
    }

    /// Oracle axes: `v1` bounded, the angles periodic.
    pub fn axes(&self) -> Vec<Axis> {
        self.domain
            .iter()
            .enumerate()
            .map(|(i, (lo, hi))| if i == 0 { Axis::bounded(*lo, *hi) } else { Axis::periodic(*lo, *hi) })
            .collect()
    }

    /// Frenet apparatus of the center curve at `v1`.
    pub fn frenet(&self, v1: f64) -> Result<FrenetData> {
        frenet_apparatus(&self.curve, v1)
    }

    /// Checked radius sample at `v1`.
    pub fn radius(&self, v1: f64) -> Result<RadiusSample> {
        self.profile.at(v1)
    }

    fn check_params(&self, params: &[f64]) -> Result<()> {
        if params.len() != self.dim() - 1 {
            return Err(GeometryError::DimensionMismatch { expected: self.dim() - 1, found: params.len() });
        }
        if params.iter().any(|x| !x.is_finite()) {
            return Err(GeometryError::NonFinite("canal parameters"));
        }
        self.curve.check_in_domain(params[0])
    }
}

/// `X(v1, .., v_{n-1}) = alpha(v1) + sum a_i F_i(v1)`.
pub fn canal_point(patch: &CanalPatch, params: &[f64]) -> Result<VecN> {
    patch.check_params(params)?;
    let v1 = params[0];
    let r = patch.profile.at(v1)?;
    let a = offset_coefficients(r.rho, r.d1, &params[1..], patch.dim())?;
    let (frame, _) = frame_at(&patch.curve, v1)?;
    let mut x = patch.curve.position(v1);
    for (ai, fi) in a.iter().zip(&frame) {
        x = x.axpy(*ai, fi);
    }
    Ok(x)
}

/// Point of a tube of constant radius `lambda`:
/// `alpha(v1) + lambda (L_2 F_2 + .. + L_n F_n)`.
pub fn tubular_point(patch: &CanalPatch, params: &[f64]) -> Result<VecN> {
    let Some(lambda) = patch.profile.constant_radius() else {
        return Err(GeometryError::Contract("tubular_point needs a constant radius profile".into()));
    };
    patch.check_params(params)?;
    RadiusSample::constant(lambda).check(params[0], EPS_REG)?;
    let v1 = params[0];
    let (frame, _) = frame_at(&patch.curve, v1)?;
    let mut x = patch.curve.position(v1);
    for (l, fi) in angle_ladder(&params[1..]).iter().zip(&frame[1..]) {
        x = x.axpy(lambda * l, fi);
    }
    Ok(x)
}

/// First partials `C_{v1}, C_{v2}, C_{v3}` of the E^4 canal in Frenet
/// coordinates, from the curvatures `k_1, k_2, k_3`.
pub fn canal_partials_frenet(k: [f64; 3], r: &RadiusSample, v2: f64, v3: f64) -> Result<[[f64; 4]; 3]> {
    r.check(f64::NAN, EPS_REG)?;
    let (rho, rp, rpp) = (r.rho, r.d1, r.d2);
    let [k1, k2, k3] = k;
    let w = (1.0 - rp * rp).sqrt();
    let (s2, c2) = v2.sin_cos();
    let (s3, c3) = v3.sin_cos();
    let shear = rp * w - rho * rp * rpp / w;
    let c_v1 = [
        1.0 - rp * rp - k1 * rho * w * c2 * c3 - rho * rpp,
        -k1 * rho * rp - k2 * rho * w * s2 * c3 + shear * c2 * c3,
        rho * w * (k2 * c2 * c3 - k3 * s3) + shear * s2 * c3,
        k3 * rho * w * s2 * c3 + shear * s3,
    ];
    let c_v2 = [0.0, -rho * w * s2 * c3, rho * w * c2 * c3, 0.0];
    let c_v3 = [0.0, -rho * w * c2 * s3, -rho * w * s2 * s3, rho * w * c3];
    Ok([c_v1, c_v2, c_v3])
}

/// Closed-form first partials of an E^4 canal patch in ambient coordinates.
pub fn canal_partials_closed(patch: &CanalPatch, params: &[f64]) -> Result<[VecN; 3]> {
    if patch.dim() != 4 {
        return Err(GeometryError::Contract(format!(
            "closed-form partials are for n = 4, patch has n = {}",
            patch.dim()
        )));
    }
    patch.check_params(params)?;
    let f = patch.frenet(params[0])?;
    let r = patch.profile.at(params[0])?;
    let k = [f.k(1), f.k(2), f.k(3)];
    let [a, b, c] = canal_partials_frenet(k, &r, params[1], params[2])?;
    Ok([f.to_ambient(&a), f.to_ambient(&b), f.to_ambient(&c)])
}

/// First and second partials of `X` propagated exactly: Taylor jets of the
/// frame and center curve in `v1`, analytic derivatives of the ladder.
pub fn canal_exact_jet(patch: &CanalPatch, params: &[f64]) -> Result<ParamJet> {
    patch.check_params(params)?;
    let n = patch.dim();
    let m = n - 1;
    let v1 = params[0];
    let angles = &params[1..];
    let r = patch.profile.at(v1)?;
    let rho = Jet::from_derivatives(&[r.rho, r.d1, r.d2]);
    let rho_p = Jet::from_derivatives(&[r.d1, r.d2, r.d3]);
    let a1 = (&rho * &rho_p).scale(-1.0);
    let one = Jet::constant(1.0, 2);
    let radial = &rho * &(&one - &(&rho_p * &rho_p)).sqrt();
    let frame = frame_jets(&patch.curve, v1, 2)?;
    let fd = |i: usize, k: usize| VecN::new(jet_vec_derivative(&frame[i], k));
    let alpha = patch.curve.derivatives(v1, 2);

    // ladder[j][l] = d^(e_j + e_l) L, j, l angle indices; ladder0 = L
    let zero = vec![0; angles.len()];
    let ladder0 = angle_ladder(angles);
    let d_ladder = |orders: Vec<usize>| ladder_partial(angles, &orders);
    let first_ladder: Vec<Vec<f64>> = (0..angles.len())
        .map(|j| {
            let mut o = zero.clone();
            o[j] = 1;
            d_ladder(o)
        })
        .collect();

    // sum over i >= 2 of c_i * F_{i}^{(k)}
    let combine = |coeffs: &[f64], k: usize| -> VecN {
        let mut out = VecN::zeros(n);
        for (c, i) in coeffs.iter().zip(1..n) {
            out = out.axpy(*c, &fd(i, k));
        }
        out
    };

    let mut first = Vec::with_capacity(m);
    let mut second = vec![vec![VecN::zeros(n); m]; m];

    // v1 derivatives
    let a1d: Vec<f64> = (0..=2).map(|k| a1.derivative_at(k)).collect();
    let rd: Vec<f64> = (0..=2).map(|k| radial.derivative_at(k)).collect();
    let mut x1 = alpha[1].clone();
    x1 = x1.axpy(a1d[1], &fd(0, 0)).axpy(a1d[0], &fd(0, 1));
    let l_scaled = |s: f64| -> Vec<f64> { ladder0.iter().map(|l| s * l).collect() };
    x1 += &combine(&l_scaled(rd[1]), 0);
    x1 += &combine(&l_scaled(rd[0]), 1);
    first.push(x1);

    let mut x11 = alpha[2].clone();
    x11 = x11.axpy(a1d[2], &fd(0, 0)).axpy(2.0 * a1d[1], &fd(0, 1)).axpy(a1d[0], &fd(0, 2));
    x11 += &combine(&l_scaled(rd[2]), 0);
    x11 += &combine(&l_scaled(2.0 * rd[1]), 1);
    x11 += &combine(&l_scaled(rd[0]), 2);
    second[0][0] = x11;

    for j in 0..angles.len() {
        let dl = &first_ladder[j];
        let scaled = |s: f64| -> Vec<f64> { dl.iter().map(|l| s * l).collect() };
        first.push(combine(&scaled(rd[0]), 0));
        let mixed = &combine(&scaled(rd[1]), 0) + &combine(&scaled(rd[0]), 1);
        second[0][j + 1] = mixed.clone();
        second[j + 1][0] = mixed;
        for l in j..angles.len() {
            let mut o = zero.clone();
            o[j] += 1;
            o[l] += 1;
            let dd: Vec<f64> = d_ladder(o).iter().map(|x| rd[0] * x).collect();
            let v = combine(&dd, 0);
            second[l + 1][j + 1] = v.clone();
            second[j + 1][l + 1] = v;
        }
    }
    Ok(ParamJet { first, second })
}

impl Immersion for CanalPatch {
    fn ambient_dim(&self) -> usize {
        self.dim()
    }

    fn point(&self, params: &[f64]) -> Result<VecN> {
        canal_point(self, params)
    }

    fn exact_jet(&self, params: &[f64]) -> Option<Result<ParamJet>> {
        Some(canal_exact_jet(self, params))
    }
}

/// Per-point construction residuals: sphere membership
/// `| |X - alpha|^2 - rho^2 |`, coefficient normalization
/// `| sum a_i^2 - rho^2 |`, and the `a_1 = -rho rho'` identity.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct ConstructionResiduals {
    pub sphere: f64,
    pub normalization: f64,
    pub a1: f64,
}

pub fn construction_residuals(patch: &CanalPatch, params: &[f64]) -> Result<ConstructionResiduals> {
    let x = canal_point(patch, params)?;
    let r = patch.profile.at(params[0])?;
    let a = offset_coefficients(r.rho, r.d1, &params[1..], patch.dim())?;
    let center = patch.curve.position(params[0]);
    let rho2 = r.rho * r.rho;
    Ok(ConstructionResiduals {
        sphere: ((&x - &center).norm_squared() - rho2).abs(),
        normalization: (a.iter().map(|x| x * x).sum::<f64>() - rho2).abs(),
        a1: (a[0] + r.rho * r.d1).abs(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oracle::{fd_jet, ImmersionProbe, ProbeMode};
    use crate::polytrig::{PolyTrig, TrigTerm};
    use std::f64::consts::FRAC_PI_2;

    fn wavy() -> RadiusProfile {
        RadiusProfile::poly_trig(PolyTrig {
            poly: vec![1.0],
            trig: vec![TrigTerm { freq: 1.0, cos: 0.0, sin: 0.1 }],
        })
    }

    #[test]
    fn coefficient_examples() {
        let a = offset_coefficients(1.0, 0.0, &[0.0, 0.0], 4).unwrap();
        assert_eq!(a, vec![-0.0, 1.0, 0.0, 0.0]);
        let a = offset_coefficients(2.0, 0.6, &[0.0, FRAC_PI_2], 4).unwrap();
        assert!((a[0] + 1.2).abs() < 1e-15);
        assert!(a[1].abs() < 1e-15 && a[2].abs() < 1e-15);
        assert!((a[3] - 1.6).abs() < 1e-15);
        assert!((a.iter().map(|x| x * x).sum::<f64>() - 4.0).abs() < 1e-12);
        assert!(matches!(offset_coefficients(1.0, 1.0, &[0.0, 0.0], 4), Err(GeometryError::Regularity { .. })));
        assert!(offset_coefficients(1.0, 0.0, &[0.0], 4).is_err());
    }

    #[test]
    fn ladder_low_dimensions() {
        let (v2, v3) = (0.4, -1.1);
        let l = angle_ladder(&[v2]);
        assert_eq!(l, vec![v2.cos(), v2.sin()]);
        let l = angle_ladder(&[v2, v3]);
        let want = [v2.cos() * v3.cos(), v2.sin() * v3.cos(), v3.sin()];
        for i in 0..3 {
            assert!((l[i] - want[i]).abs() < 1e-15);
        }
        for angles in [vec![0.3, 1.2, -0.7], vec![0.1, 0.2, 0.3, 0.4, 0.5]] {
            let l = angle_ladder(&angles);
            assert_eq!(l.len(), angles.len() + 1);
            assert!((l.iter().map(|x| x * x).sum::<f64>() - 1.0).abs() < 1e-14);
        }
    }

    #[test]
    fn line_center_points() {
        let p = CanalPatch::full(CenterCurve::axis(4, (0.0, 3.0)).unwrap(), RadiusProfile::constant(1.0), (0.0, 3.0))
            .unwrap();
        let x = canal_point(&p, &[1.5, 0.0, 0.0]).unwrap();
        assert!((&x - &VecN::from([1.5, 1.0, 0.0, 0.0])).max_abs() < 1e-15);
        let x = canal_point(&p, &[1.5, 0.0, FRAC_PI_2]).unwrap();
        assert!((&x - &VecN::from([1.5, 0.0, 0.0, 1.0])).max_abs() < 1e-15);
        let [_, c2, c3] = canal_partials_closed(&p, &[1.0, 0.7, 0.0]).unwrap();
        let (s2, co2) = 0.7f64.sin_cos();
        assert!((&c2 - &VecN::from([0.0, -s2, co2, 0.0])).max_abs() < 1e-15);
        assert!((&c3 - &VecN::from([0.0, 0.0, 0.0, 1.0])).max_abs() < 1e-15);
    }

    #[test]
    fn circle_tube_points() {
        let c = CenterCurve::circle(4, 2.0, (0.0, 4.0 * PI)).unwrap();
        let p = CanalPatch::full(c.clone(), RadiusProfile::constant(0.5), (0.0, 4.0 * PI)).unwrap();
        let f = p.frenet(0.0).unwrap();
        let x = tubular_point(&p, &[0.0, 0.0, 0.0]).unwrap();
        let want = c.position(0.0).axpy(0.5, &f.frame[1]);
        assert!((&x - &want).max_abs() < 1e-15);
        for i in 0..5 {
            for j in 0..5 {
                for k in 0..5 {
                    let q = [i as f64 * 2.5, j as f64 * 1.2, k as f64 * 1.3 - 2.0];
                    let x = canal_point(&p, &q).unwrap();
                    let t = tubular_point(&p, &q).unwrap();
                    assert!((&x - &t).max_abs() < 1e-12);
                    assert!(((&x - &c.position(q[0])).norm() - 0.5).abs() < 1e-12);
                }
            }
        }
        let wavy_patch = CanalPatch::full(c, wavy(), (0.0, 4.0)).unwrap();
        assert!(matches!(tubular_point(&wavy_patch, &[1.0, 0.0, 0.0]), Err(GeometryError::Contract(_))));
    }

    #[test]
    fn n3_canal_is_the_classical_surface() {
        let c = CenterCurve::circle(3, 2.0, (0.0, 10.0)).unwrap().without_frame_override();
        let p = CanalPatch::full(c.clone(), wavy(), (0.0, 10.0)).unwrap();
        let (v1, v2) = (1.3_f64, 0.8_f64);
        let f = p.frenet(v1).unwrap();
        let r = p.radius(v1).unwrap();
        let w = r.regularity().sqrt();
        let want = c
            .position(v1)
            .axpy(-r.rho * r.d1, &f.frame[0])
            .axpy(r.rho * w * v2.cos(), &f.frame[1])
            .axpy(r.rho * w * v2.sin(), &f.frame[2]);
        assert!((&canal_point(&p, &[v1, v2]).unwrap() - &want).max_abs() < 1e-14);
    }

    #[test]
    fn closed_partials_match_finite_differences() {
        let helix = CenterCurve::quad_helix(1.0, 0.7, 1.6, (0.0, 10.0)).unwrap();
        let p = CanalPatch::full(helix, wavy(), (0.5, 9.5)).unwrap();
        let probe = ImmersionProbe::new(&p, p.axes()).unwrap();
        for q in [[1.0, 0.3, 0.2], [4.4, 2.0, -0.9], [8.0, 5.0, 1.2]] {
            let closed = canal_partials_closed(&p, &q).unwrap();
            let fd = fd_jet(&probe, &q).unwrap();
            for i in 0..3 {
                let scale = closed[i].norm().max(1.0);
                assert!((&closed[i] - &fd.first[i]).max_abs() < 1e-6 * scale, "partial {i} at {q:?}");
            }
            // X - alpha is normal
            let off = &canal_point(&p, &q).unwrap() - &p.curve().position(q[0]);
            for v in &fd.first {
                assert!(off.inner(v).abs() < 1e-6);
            }
        }
    }

    #[test]
    fn exact_jet_matches_finite_differences() {
        let helix = CenterCurve::quad_helix(1.0, 0.7, 1.6, (0.0, 10.0)).unwrap();
        let p = CanalPatch::full(helix, wavy(), (0.5, 9.5)).unwrap();
        let probe = ImmersionProbe::new(&p, p.axes()).unwrap();
        let exact = ImmersionProbe::new(&p, p.axes()).unwrap().with_mode(ProbeMode::ExactTaylor);
        for q in [[1.0, 0.3, 0.2], [6.1, 4.0, -1.0]] {
            let a = fd_jet(&probe, &q).unwrap();
            let b = fd_jet(&exact, &q).unwrap();
            for i in 0..3 {
                assert!((&a.first[i] - &b.first[i]).max_abs() < 1e-7);
                for j in 0..3 {
                    assert!((&a.second[i][j] - &b.second[i][j]).max_abs() < 1e-5, "({i},{j})");
                }
            }
        }
    }

    #[test]
    fn construction_residuals_are_tiny() {
        let helix = CenterCurve::quad_helix(1.0, 1.0, 2.0, (0.0, 10.0)).unwrap();
        let p = CanalPatch::full(helix, RadiusProfile::linear(0.05, 0.3), (0.0, 10.0)).unwrap();
        let r = construction_residuals(&p, &[3.0, 1.0, 2.0]).unwrap();
        assert!(r.sphere < 1e-12 && r.normalization < 1e-12 && r.a1 == 0.0);
    }

    #[test]
    fn patch_validation() {
        let axis = CenterCurve::axis(4, (0.0, 3.0)).unwrap();
        assert!(matches!(
            CanalPatch::full(axis.clone(), RadiusProfile::linear(-1.0, 2.0), (0.0, 3.0)),
            Err(GeometryError::Regularity { .. })
        ));
        assert!(matches!(
            CanalPatch::full(axis.clone(), RadiusProfile::linear(-0.5, 1.0), (0.0, 3.0)),
            Err(GeometryError::NonPositiveRadius { .. })
        ));
        assert!(CanalPatch::full(axis.clone(), RadiusProfile::constant(1.0), (0.0, 4.0)).is_err());
        let native = CenterCurve::circle_native(4, 2.0, (0.0, 6.0)).unwrap();
        assert!(matches!(
            CanalPatch::full(native, RadiusProfile::constant(1.0), (0.0, 6.0)),
            Err(GeometryError::Contract(_))
        ));
        let bare = CenterCurve::circle(4, 2.0, (0.0, 6.0)).unwrap().without_frame_override();
        assert!(matches!(
            CanalPatch::full(bare, RadiusProfile::constant(1.0), (0.0, 6.0)),
            Err(GeometryError::FrenetDegenerate { .. })
        ));
    }
}
