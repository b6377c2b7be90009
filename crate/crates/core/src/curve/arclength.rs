use std::sync::Arc;

use super::{CenterCurve, CurveEvaluator};
use crate::error::{GeometryError, Result};
use crate::jet::{jet_dot, Jet};
use crate::linalg::VecN;
use crate::quad::adaptive_simpson;

const MIN_SPEED: f64 = 1e-8;
const SEGMENT_TOL: f64 = 1e-14;

/// Reparametrizes `c` by arc length.
///
/// The arc-length function is tabulated at `samples + 1` uniform knots by
/// adaptive Simpson quadrature and inverted with a monotone cubic Hermite
/// interpolant (slopes `dt/ds = 1/|alpha'|`), refined by two Newton steps
/// against the exact arc-length integral. Derivatives of the new curve are
/// obtained by propagating Taylor jets through `d/ds = (1/|alpha'|) d/dt`,
/// so they are exact to rounding at every order.
pub fn reparametrize_arclength(c: &CenterCurve, samples: usize) -> Result<CenterCurve> {
    if samples < 2 {
        return Err(GeometryError::Invalid(format!("need at least 2 arc-length samples, got {samples}")));
    }
    let base = c.evaluator().clone();
    let (t0, t1) = c.domain();
    let speed = |t: f64| -> Result<f64> {
        let v = base.derivatives(t, 1)[1].norm();
        if !(v > MIN_SPEED) {
            return Err(GeometryError::NonRegular { t, speed: v });
        }
        Ok(v)
    };
    let knots_t: Vec<f64> =
        (0..=samples).map(|j| t0 + (t1 - t0) * j as f64 / samples as f64).collect();
    let mut knots_s = Vec::with_capacity(knots_t.len());
    let mut slopes = Vec::with_capacity(knots_t.len());
    let mut acc = 0.0;
    for (j, &t) in knots_t.iter().enumerate() {
        if j > 0 {
            acc += adaptive_simpson(&speed, knots_t[j - 1], t, SEGMENT_TOL)?;
        }
        knots_s.push(acc);
        slopes.push(1.0 / speed(t)?);
    }
    limit_slopes(&knots_s, &knots_t, &mut slopes);
    let eval = Arc::new(ArcLengthCurve { base, knots_s, knots_t, slopes });
    let length = acc;
    let mut out = CenterCurve::from_evaluator(eval, (0.0, length), true)?;
    if let Some(frame) = c.frame_override() {
        out = out.with_frame_override(frame.to_vec())?;
    }
    Ok(out)
}

/// Fritsch-Carlson limiter: keeps each Hermite segment monotone.
fn limit_slopes(xs: &[f64], ys: &[f64], slopes: &mut [f64]) {
    for j in 0..xs.len() - 1 {
        let secant = (ys[j + 1] - ys[j]) / (xs[j + 1] - xs[j]);
        let a = slopes[j] / secant;
        let b = slopes[j + 1] / secant;
        let r = a * a + b * b;
        if r > 9.0 {
            let tau = 3.0 / r.sqrt();
            slopes[j] = tau * a * secant;
            slopes[j + 1] = tau * b * secant;
        }
    }
}

#[derive(Debug)]
struct ArcLengthCurve {
    base: Arc<dyn CurveEvaluator>,
    knots_s: Vec<f64>,
    knots_t: Vec<f64>,
    slopes: Vec<f64>,
}

impl ArcLengthCurve {
    fn segment(&self, s: f64) -> usize {
        let last = self.knots_s.len() - 2;
        match self.knots_s.binary_search_by(|x| x.total_cmp(&s)) {
            Ok(j) => j.min(last),
            Err(j) => j.saturating_sub(1).min(last),
        }
    }

    fn base_speed(&self, t: f64) -> f64 {
        self.base.derivatives(t, 1)[1].norm()
    }

    /// Original parameter `t` whose arc length from the domain start is `s`.
    fn param_of(&self, s: f64) -> f64 {
        let j = self.segment(s);
        let (s0, s1) = (self.knots_s[j], self.knots_s[j + 1]);
        let (y0, y1) = (self.knots_t[j], self.knots_t[j + 1]);
        let h = s1 - s0;
        let u = (s - s0) / h;
        let (u2, u3) = (u * u, u * u * u);
        let mut t = (2.0 * u3 - 3.0 * u2 + 1.0) * y0
            + (u3 - 2.0 * u2 + u) * h * self.slopes[j]
            + (-2.0 * u3 + 3.0 * u2) * y1
            + (u3 - u2) * h * self.slopes[j + 1];
        for _ in 0..2 {
            let speed = |x: f64| -> std::result::Result<f64, std::convert::Infallible> {
                Ok(self.base_speed(x))
            };
            let Ok(partial) = adaptive_simpson(&speed, y0, t, SEGMENT_TOL);
            let v = self.base_speed(t);
            t -= (s0 + partial - s) / v;
        }
        t
    }
}

impl CurveEvaluator for ArcLengthCurve {
    fn dim(&self) -> usize {
        self.base.dim()
    }

    fn derivatives(&self, s: f64, order: usize) -> Vec<VecN> {
        let t = self.param_of(s);
        let m = order.max(1);
        let base = self.base.derivatives(t, m);
        let n = self.dim();
        let comps: Vec<Jet> = (0..n)
            .map(|i| Jet::from_derivatives(&base.iter().map(|d| d[i]).collect::<Vec<_>>()))
            .collect();
        let mut out = vec![base[0].clone()];
        if order == 0 {
            return out;
        }
        let velocity: Vec<Jet> = comps.iter().map(Jet::differentiate).collect();
        let speed = jet_dot(&velocity, &velocity).sqrt();
        let inv_speed = speed.recip();
        // cur holds d^k beta / ds^k as jets in t
        let mut cur: Vec<Jet> = velocity.iter().map(|x| x * &inv_speed).collect();
        out.push(VecN::new(cur.iter().map(Jet::value).collect()));
        for _ in 2..=order {
            cur = cur.iter().map(|x| &x.differentiate() * &inv_speed).collect();
            out.push(VecN::new(cur.iter().map(Jet::value).collect()));
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::polytrig::{PolyTrig, TrigTerm};
    use std::f64::consts::PI;

    fn trig(freq: f64, cos: f64, sin: f64) -> PolyTrig {
        PolyTrig { poly: vec![], trig: vec![TrigTerm { freq, cos, sin }] }
    }

    #[test]
    fn line_with_speed_two() {
        let coords = vec![
            PolyTrig { poly: vec![0.0, 2.0], trig: vec![] },
            PolyTrig::default(),
            PolyTrig::default(),
            PolyTrig::default(),
        ];
        let c = CenterCurve::poly_trig(coords, (0.0, 1.5)).unwrap();
        let r = reparametrize_arclength(&c, 64).unwrap();
        assert!((r.domain().1 - 3.0).abs() < 1e-13);
        for s in [0.0, 0.4, 1.7, 3.0] {
            let d = r.derivatives(s, 3);
            assert!((&d[0] - &VecN::from([s, 0.0, 0.0, 0.0])).max_abs() < 1e-12);
            assert!((&d[1] - &VecN::from([1.0, 0.0, 0.0, 0.0])).max_abs() < 1e-14);
            assert!(d[2].max_abs() < 1e-14 && d[3].max_abs() < 1e-14);
        }
    }

    #[test]
    fn circle_length_and_unit_speed() {
        let r_circ = 1.7;
        let c = CenterCurve::circle_native(4, r_circ, (0.0, 2.0 * PI)).unwrap();
        let r = reparametrize_arclength(&c, 256).unwrap();
        assert!((r.domain().1 - 2.0 * PI * r_circ).abs() < 1e-8);
        for i in 0..50 {
            let s = r.domain().1 * i as f64 / 49.0;
            let d = r.derivatives(s, 2);
            assert!((d[1].norm() - 1.0).abs() < 1e-12);
            // position on the circle at polar angle s / R
            let want = VecN::from([r_circ * (s / r_circ).cos(), r_circ * (s / r_circ).sin(), 0.0, 0.0]);
            assert!((&d[0] - &want).max_abs() < 1e-10);
            assert!((d[2].norm() - 1.0 / r_circ).abs() < 1e-10);
        }
    }

    #[test]
    fn rejects_stationary_point() {
        // (t^2, 0, 0, 0) has zero speed at t = 0
        let coords = vec![
            PolyTrig { poly: vec![0.0, 0.0, 1.0], trig: vec![] },
            PolyTrig::default(),
            PolyTrig::default(),
            PolyTrig::default(),
        ];
        let c = CenterCurve::poly_trig(coords, (-1.0, 1.0)).unwrap();
        let err = reparametrize_arclength(&c, 64).unwrap_err();
        match err {
            GeometryError::NonRegular { t, .. } => assert!(t.abs() < 1e-6),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn double_helix_speed_sqrt_two() {
        let c = CenterCurve::poly_trig(
            vec![trig(1.0, 1.0, 0.0), trig(1.0, 0.0, 1.0), trig(1.0, 1.0, 0.0), trig(1.0, 0.0, 1.0)],
            (0.0, 2.0 * PI),
        )
        .unwrap();
        assert!((c.speed(0.3) - 2f64.sqrt()).abs() < 1e-15);
        let r = reparametrize_arclength(&c, 128).unwrap();
        assert!((r.domain().1 - 2.0 * PI * 2f64.sqrt()).abs() < 1e-9);
        let mut x = 0.123_f64;
        for _ in 0..100 {
            x = (x * 7.31 + 0.577).fract();
            let s = x * r.domain().1;
            assert!((r.speed(s) - 1.0).abs() < 1e-9);
        }
    }

    #[test]
    fn reparametrization_is_idempotent() {
        let c = CenterCurve::poly_trig(
            vec![
                PolyTrig { poly: vec![0.0, 1.0, 0.3], trig: vec![] },
                trig(1.0, 1.0, 0.0),
                trig(2.0, 0.0, 0.5),
                PolyTrig { poly: vec![0.0, 0.0, 0.0, 0.1], trig: vec![] },
            ],
            (0.0, 2.0),
        )
        .unwrap();
        let once = reparametrize_arclength(&c, 200).unwrap();
        let twice = reparametrize_arclength(&once, 200).unwrap();
        assert!((once.domain().1 - twice.domain().1).abs() < 1e-8);
        for i in 0..=20 {
            let s = once.domain().1 * i as f64 / 20.0;
            let a = once.derivatives(s, 3);
            let b = twice.derivatives(s, 3);
            for k in 0..=3 {
                assert!((&a[k] - &b[k]).max_abs() < 1e-8, "s={s} k={k}");
            }
        }
    }

    #[test]
    fn chain_rule_matches_finite_differences() {
        let c = CenterCurve::poly_trig(
            vec![
                PolyTrig { poly: vec![0.0, 1.0, 0.3], trig: vec![] },
                trig(1.0, 1.0, 0.0),
                trig(2.0, 0.0, 0.5),
                PolyTrig { poly: vec![0.0, 0.0, 0.0, 0.1], trig: vec![] },
            ],
            (0.0, 2.0),
        )
        .unwrap();
        let r = reparametrize_arclength(&c, 200).unwrap();
        let h = 1e-4;
        for s in [0.3, 1.1, 2.0] {
            let d = r.derivatives(s, 5);
            let p = r.derivatives(s + h, 5);
            let m = r.derivatives(s - h, 5);
            for k in 0..5 {
                let fd = (&p[k] - &m[k]) * (0.5 / h);
                let scale = d[k + 1].max_abs().max(1.0);
                assert!((&fd - &d[k + 1]).max_abs() < 1e-6 * scale, "s={s} k={k}");
            }
        }
    }
}
