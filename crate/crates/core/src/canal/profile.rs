use std::sync::Arc;

use serde::Serialize;

use crate::error::{GeometryError, Result};
use crate::polytrig::PolyTrig;

/// Default regularity margin: profiles must keep `1 - rho'^2 >= EPS_REG`.
pub const EPS_REG: f64 = 1e-6;

/// `rho(v1)` and its first three derivatives.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RadiusSample {
    pub rho: f64,
    pub d1: f64,
    pub d2: f64,
    pub d3: f64,
}

impl RadiusSample {
    pub fn constant(rho: f64) -> Self {
        RadiusSample { rho, d1: 0.0, d2: 0.0, d3: 0.0 }
    }

    /// `1 - rho'^2`
    pub fn regularity(&self) -> f64 {
        1.0 - self.d1 * self.d1
    }

    /// Errors unless `rho > 0` and `1 - rho'^2 >= margin`.
    pub fn check(&self, v1: f64, margin: f64) -> Result<()> {
        if !(self.rho.is_finite() && self.d1.is_finite() && self.d2.is_finite() && self.d3.is_finite()) {
            return Err(GeometryError::NonFinite("radius profile"));
        }
        if !(self.rho > 0.0) {
            return Err(GeometryError::NonPositiveRadius { v1, rho: self.rho });
        }
        if !(self.regularity() >= margin) {
            return Err(GeometryError::Regularity { v1, rho_prime: self.d1, margin });
        }
        Ok(())
    }
}

/// Radius function tabulated as `(v1, rho, rho', rho'')` nodes, evaluated by
/// piecewise quintic Hermite interpolation (C^2 across nodes).
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TabulatedProfile {
    pub v1: Vec<f64>,
    pub rho: Vec<f64>,
    pub d1: Vec<f64>,
    pub d2: Vec<f64>,
}

impl TabulatedProfile {
    pub fn new(v1: Vec<f64>, rho: Vec<f64>, d1: Vec<f64>, d2: Vec<f64>) -> Result<Self> {
        let m = v1.len();
        if m < 2 || rho.len() != m || d1.len() != m || d2.len() != m {
            return Err(GeometryError::Invalid("radius table needs at least 2 nodes of equal length".into()));
        }
        if v1.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(GeometryError::Invalid("radius table nodes must be strictly increasing".into()));
        }
        if [&v1, &rho, &d1, &d2].iter().any(|c| c.iter().any(|x| !x.is_finite())) {
            return Err(GeometryError::NonFinite("radius table"));
        }
        Ok(TabulatedProfile { v1, rho, d1, d2 })
    }

    pub fn domain(&self) -> (f64, f64) {
        (self.v1[0], self.v1[self.v1.len() - 1])
    }

    fn eval(&self, x: f64) -> Result<RadiusSample> {
        let (lo, hi) = self.domain();
        let slack = 1e-12 * (hi - lo);
        if !(x >= lo - slack && x <= hi + slack) {
            return Err(GeometryError::OutOfDomain { axis: 0, value: x, lo, hi });
        }
        let last = self.v1.len() - 2;
        let j = match self.v1.binary_search_by(|t| t.total_cmp(&x)) {
            Ok(j) => j.min(last),
            Err(j) => j.saturating_sub(1).min(last),
        };
        let h = self.v1[j + 1] - self.v1[j];
        let u = (x - self.v1[j]) / h;
        // monomial coefficients in u of the quintic matching value, slope
        // and curvature at both ends
        let c0 = self.rho[j];
        let c1 = h * self.d1[j];
        let c2 = 0.5 * h * h * self.d2[j];
        let a = self.rho[j + 1] - (c0 + c1 + c2);
        let b = h * self.d1[j + 1] - (c1 + 2.0 * c2);
        let c = h * h * self.d2[j + 1] - 2.0 * c2;
        let c3 = 10.0 * a - 4.0 * b + 0.5 * c;
        let c4 = -15.0 * a + 7.0 * b - c;
        let c5 = 6.0 * a - 3.0 * b + 0.5 * c;
        let p = [c0, c1, c2, c3, c4, c5];
        let horner = |k: usize| -> f64 {
            // k-th derivative in u
            let mut acc = 0.0;
            for i in (k..6).rev() {
                let falling: f64 = (0..k).map(|m| (i - m) as f64).product();
                acc = acc * u + falling * p[i];
            }
            acc
        };
        Ok(RadiusSample {
            rho: horner(0),
            d1: horner(1) / h,
            d2: horner(2) / (h * h),
            d3: horner(3) / (h * h * h),
        })
    }
}

/// Radius function `rho(v1)` of a canal hypersurface.
#[derive(Debug, Clone, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum RadiusProfile {
    Constant { lambda: f64 },
    /// `slope * v1 + intercept`
    Linear { slope: f64, intercept: f64 },
    /// Catenoid profiles and other tabulated radii.
    Table { table: Arc<TabulatedProfile> },
    PolyTrig { coeffs: PolyTrig },
}

impl RadiusProfile {
    pub fn constant(lambda: f64) -> Self {
        RadiusProfile::Constant { lambda }
    }

    pub fn linear(slope: f64, intercept: f64) -> Self {
        RadiusProfile::Linear { slope, intercept }
    }

    pub fn table(table: TabulatedProfile) -> Self {
        RadiusProfile::Table { table: Arc::new(table) }
    }

    pub fn poly_trig(coeffs: PolyTrig) -> Self {
        RadiusProfile::PolyTrig { coeffs }
    }

    pub fn kind_name(&self) -> &'static str {
        match self {
            RadiusProfile::Constant { .. } => "constant",
            RadiusProfile::Linear { .. } => "linear",
            RadiusProfile::Table { .. } => "table",
            RadiusProfile::PolyTrig { .. } => "poly_trig",
        }
    }

    /// `Some(lambda)` for constant profiles.
    pub fn constant_radius(&self) -> Option<f64> {
        match self {
            RadiusProfile::Constant { lambda } => Some(*lambda),
            _ => None,
        }
    }

    /// Domain on which the profile is defined, if limited.
    pub fn domain(&self) -> Option<(f64, f64)> {
        match self {
            RadiusProfile::Table { table } => Some(table.domain()),
            _ => None,
        }
    }

    /// Raw evaluation; no positivity or regularity check.
    pub fn eval(&self, v1: f64) -> Result<RadiusSample> {
        Ok(match self {
            RadiusProfile::Constant { lambda } => RadiusSample::constant(*lambda),
            RadiusProfile::Linear { slope, intercept } => {
                RadiusSample { rho: slope * v1 + intercept, d1: *slope, d2: 0.0, d3: 0.0 }
            }
            RadiusProfile::Table { table } => table.eval(v1)?,
            RadiusProfile::PolyTrig { coeffs } => {
                let d = coeffs.derivatives(v1, 3);
                RadiusSample { rho: d[0], d1: d[1], d2: d[2], d3: d[3] }
            }
        })
    }

    /// Evaluation with the positivity and regularity checks.
    pub fn at(&self, v1: f64) -> Result<RadiusSample> {
        let r = self.eval(v1)?;
        r.check(v1, EPS_REG)?;
        Ok(r)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::polytrig::TrigTerm;

    #[test]
    fn closed_profiles() {
        let p = RadiusProfile::linear(0.5, 1.0);
        let r = p.at(2.0).unwrap();
        assert_eq!((r.rho, r.d1, r.d2), (2.0, 0.5, 0.0));
        assert_eq!(RadiusProfile::constant(0.5).constant_radius(), Some(0.5));
        let s = RadiusProfile::poly_trig(PolyTrig {
            poly: vec![1.0],
            trig: vec![TrigTerm { freq: 1.0, cos: 0.0, sin: 0.1 }],
        });
        let r = s.at(0.3).unwrap();
        assert!((r.rho - (1.0 + 0.1 * 0.3f64.sin())).abs() < 1e-15);
        assert!((r.d3 + 0.1 * 0.3f64.cos()).abs() < 1e-15);
    }

    #[test]
    fn regularity_is_enforced() {
        assert!(matches!(RadiusProfile::linear(1.0, 1.0).at(0.0), Err(GeometryError::Regularity { .. })));
        assert!(matches!(RadiusProfile::linear(1.2, 1.0).at(0.0), Err(GeometryError::Regularity { .. })));
        assert!(RadiusProfile::linear(1.0 - 1e-6, 1.0).at(0.0).is_ok());
        assert!(matches!(
            RadiusProfile::linear(0.5, -1.0).at(1.0),
            Err(GeometryError::NonPositiveRadius { .. })
        ));
        assert!(RadiusProfile::constant(-1.0).at(0.0).is_err());
    }

    #[test]
    fn quintic_table_reproduces_quintics() {
        let f = |x: f64| 1.0 + 0.3 * x - 0.2 * x * x + 0.05 * x.powi(3) + 0.01 * x.powi(4) - 0.002 * x.powi(5);
        let f1 = |x: f64| 0.3 - 0.4 * x + 0.15 * x * x + 0.04 * x.powi(3) - 0.01 * x.powi(4);
        let f2 = |x: f64| -0.4 + 0.3 * x + 0.12 * x * x - 0.04 * x.powi(3);
        let f3 = |x: f64| 0.3 + 0.24 * x - 0.12 * x * x;
        let xs: Vec<f64> = (0..=7).map(|i| i as f64 * 0.3).collect();
        let t = TabulatedProfile::new(
            xs.clone(),
            xs.iter().map(|x| f(*x)).collect(),
            xs.iter().map(|x| f1(*x)).collect(),
            xs.iter().map(|x| f2(*x)).collect(),
        )
        .unwrap();
        let p = RadiusProfile::table(t);
        for i in 0..=40 {
            let x = 2.1 * i as f64 / 40.0;
            let r = p.eval(x).unwrap();
            assert!((r.rho - f(x)).abs() < 1e-13);
            assert!((r.d1 - f1(x)).abs() < 1e-12);
            assert!((r.d2 - f2(x)).abs() < 1e-11);
            assert!((r.d3 - f3(x)).abs() < 1e-9);
        }
        assert!(matches!(p.eval(2.2), Err(GeometryError::OutOfDomain { .. })));
    }

    #[test]
    fn table_rejects_bad_nodes() {
        assert!(TabulatedProfile::new(vec![0.0, 0.0], vec![1.0; 2], vec![0.0; 2], vec![0.0; 2]).is_err());
        assert!(TabulatedProfile::new(vec![0.0], vec![1.0], vec![0.0], vec![0.0]).is_err());
    }
}
