//! Run configuration, read from JSON.

use std::f64::consts::TAU;
use std::path::Path;

use canal_core::canal::{CanalPatch, RadiusProfile};
use canal_core::classify::{solve_catenoid, Branch};
use canal_core::curve::{reparametrize_arclength, CenterCurve};
use canal_core::grid::{Lattice, DEFAULT_V1_MARGIN};
use canal_core::linalg::{MatK, VecN};
use canal_core::oracle::DEFAULT_STEP_FRACTION;
use canal_core::polytrig::{PolyTrig, TrigTerm};
use canal_core::GeometryError;
use serde::{Deserialize, Serialize};

use crate::CliError;

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub patch: PatchSpec,
    #[serde(default)]
    pub grid: GridSpec,
    /// Random admissible points per check.
    #[serde(default = "default_samples")]
    pub samples: usize,
    #[serde(default)]
    pub seed: u64,
    /// Oracle step as a fraction of each axis span.
    #[serde(default = "default_fd_step")]
    pub fd_step: f64,
    /// Also run the oracle on propagated Taylor jets.
    #[serde(default)]
    pub exact_taylor: bool,
    #[serde(default)]
    pub tolerances: ToleranceSpec,
    #[serde(default)]
    pub weingarten: WeingartenSpec,
    /// Test fixture: corrupts the closed forms before comparison.
    #[serde(default)]
    pub fault: FaultSpec,
    #[serde(default)]
    pub outputs: Vec<OutputSpec>,
}

fn default_samples() -> usize {
    200
}

fn default_fd_step() -> f64 {
    DEFAULT_STEP_FRACTION
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PatchSpec {
    pub curve: CurveSpec,
    pub radius: RadiusSpec,
    #[serde(default = "default_n")]
    pub n: usize,
    pub domain: DomainSpec,
}

fn default_n() -> usize {
    4
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DomainSpec {
    pub v1: [f64; 2],
    #[serde(default = "full_turn")]
    pub v2: [f64; 2],
    #[serde(default = "full_turn")]
    pub v3: [f64; 2],
}

fn full_turn() -> [f64; 2] {
    [0.0, TAU]
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CurveKind {
    Line,
    Circle,
    QuadHelix,
    PolyTrig,
}

/// Center curve. Which parameters apply depends on `kind`:
/// line `origin`, `direction`; circle `radius`; quad_helix `a`, `b`, `c`;
/// poly_trig `coords`, `arclength_samples`.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CurveSpec {
    pub kind: CurveKind,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub origin: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub direction: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub radius: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub a: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub b: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub c: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub coords: Option<Vec<PolyTrig>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub arclength_samples: Option<usize>,
    /// Curve parameter interval; defaults to the `v1` domain.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub domain: Option<[f64; 2]>,
    /// Rows of a constant orthonormal frame.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub frame_override: Option<Vec<Vec<f64>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rigid_motion: Option<RigidMotion>,
}

const DEFAULT_ARCLENGTH_SAMPLES: usize = 256;

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RigidMotion {
    pub rotation: Vec<Vec<f64>>,
    pub translation: Vec<f64>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum RadiusSpec {
    Constant {
        lambda: f64,
    },
    Linear {
        slope: f64,
        intercept: f64,
    },
    PolyTrig {
        #[serde(default)]
        poly: Vec<f64>,
        #[serde(default)]
        trig: Vec<TrigTerm>,
    },
    Catenoid {
        a: f64,
        #[serde(default)]
        rho0: Option<f64>,
        #[serde(default = "default_branch")]
        branch: Branch,
        #[serde(default = "default_catenoid_step")]
        step: f64,
    },
}

fn default_branch() -> Branch {
    Branch::Plus
}

fn default_catenoid_step() -> f64 {
    1e-3
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridSpec {
    /// Nodes per parameter axis; 20 per axis when omitted.
    #[serde(default)]
    pub counts: Vec<usize>,
    /// Distance kept from the `v1` ends, as a fraction of the `v1` span.
    #[serde(default = "default_margin")]
    pub v1_margin: f64,
}

fn default_margin() -> f64 {
    DEFAULT_V1_MARGIN
}

impl Default for GridSpec {
    fn default() -> Self {
        GridSpec { counts: Vec::new(), v1_margin: default_margin() }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ToleranceSpec {
    /// Multiplies every check tolerance.
    #[serde(default = "one")]
    pub scale: f64,
}

impl Default for ToleranceSpec {
    fn default() -> Self {
        ToleranceSpec { scale: 1.0 }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WeingartenSpec {
    #[serde(default = "default_centers")]
    pub centers: usize,
    #[serde(default = "default_spacing")]
    pub spacing: f64,
}

fn default_centers() -> usize {
    16
}

fn default_spacing() -> f64 {
    canal_core::classify::WEINGARTEN_SPACING
}

impl Default for WeingartenSpec {
    fn default() -> Self {
        WeingartenSpec { centers: default_centers(), spacing: default_spacing() }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FaultSpec {
    /// Factor applied to the closed-form mean curvature.
    #[serde(default = "one")]
    pub mean_scale: f64,
}

impl Default for FaultSpec {
    fn default() -> Self {
        FaultSpec { mean_scale: 1.0 }
    }
}

fn one() -> f64 {
    1.0
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Json,
    Obj,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputSpec {
    pub format: Format,
    pub path: String,
}

impl RunConfig {
    pub fn from_json(text: &str) -> Result<Self, CliError> {
        let mut cfg: RunConfig = serde_json::from_str(text).map_err(|e| CliError::Config(e.to_string()))?;
        if cfg.grid.counts.is_empty() {
            cfg.grid.counts = vec![20; cfg.patch.n.saturating_sub(1)];
        }
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))?;
        RunConfig::from_json(&text)
    }

    pub fn validate(&self) -> Result<(), CliError> {
        let bad = |m: String| Err(CliError::Config(m));
        let n = self.patch.n;
        if !(3..=4).contains(&n) {
            return bad(format!("n must be 3 or 4, got {n}"));
        }
        if self.grid.counts.len() != n - 1 {
            return bad(format!("grid needs {} counts for n = {n}, got {}", n - 1, self.grid.counts.len()));
        }
        if self.grid.counts.iter().any(|&c| c == 0) {
            return bad("grid counts must be positive".into());
        }
        if !(self.grid.v1_margin >= 0.0 && self.grid.v1_margin < 0.5) {
            return bad(format!("v1_margin must lie in [0, 0.5), got {}", self.grid.v1_margin));
        }
        if !(self.fd_step > 0.0 && self.fd_step < 0.1) {
            return bad(format!("fd_step must lie in (0, 0.1), got {}", self.fd_step));
        }
        if !(self.tolerances.scale > 0.0 && self.tolerances.scale.is_finite()) {
            return bad(format!("tolerance scale must be positive, got {}", self.tolerances.scale));
        }
        if !self.fault.mean_scale.is_finite() {
            return bad("fault.mean_scale must be finite".into());
        }
        if !(self.weingarten.spacing > 0.0) {
            return bad("weingarten.spacing must be positive".into());
        }
        let d = &self.patch.domain;
        for (name, r) in [("v1", d.v1), ("v2", d.v2), ("v3", d.v3)] {
            if !(r[0].is_finite() && r[1].is_finite() && r[0] < r[1]) {
                return bad(format!("domain {name} = {r:?} is not an interval"));
            }
        }
        Ok(())
    }

    /// Distance kept from the `v1` ends: the configured margin, and at
    /// least three oracle steps.
    pub fn v1_margin(&self) -> f64 {
        let span = self.patch.domain.v1[1] - self.patch.domain.v1[0];
        (self.grid.v1_margin * span).max(3.0 * self.fd_step * span)
    }

    pub fn build_patch(&self) -> Result<CanalPatch, CliError> {
        self.patch.build()
    }

    /// Sampling lattice of the patch with the configured counts.
    pub fn lattice(&self, patch: &CanalPatch) -> Result<Lattice, CliError> {
        Ok(Lattice::for_patch(patch, &self.grid.counts, self.v1_margin())?)
    }
}

impl PatchSpec {
    pub fn build(&self) -> Result<CanalPatch, CliError> {
        let n = self.n;
        let v1 = (self.domain.v1[0], self.domain.v1[1]);
        let curve = self.curve.build(n, v1)?;
        let profile = self.radius.build(v1)?;
        let mut domain = vec![v1, (self.domain.v2[0], self.domain.v2[1])];
        if n == 4 {
            domain.push((self.domain.v3[0], self.domain.v3[1]));
        }
        Ok(CanalPatch::new(curve, profile, domain)?)
    }
}

fn vec_of(v: &[f64], n: usize, what: &str) -> Result<VecN, CliError> {
    if v.len() != n {
        return Err(CliError::Config(format!("{what} needs {n} components, got {}", v.len())));
    }
    Ok(VecN::new(v.to_vec()))
}

fn square(rows: &[Vec<f64>], n: usize, what: &str) -> Result<(), CliError> {
    if rows.len() != n || rows.iter().any(|r| r.len() != n) {
        return Err(CliError::Config(format!("{what} must be {n}x{n}")));
    }
    Ok(())
}

impl CurveSpec {
    fn check_fields(&self) -> Result<(), CliError> {
        let present = [
            ("origin", self.origin.is_some()),
            ("direction", self.direction.is_some()),
            ("radius", self.radius.is_some()),
            ("a", self.a.is_some()),
            ("b", self.b.is_some()),
            ("c", self.c.is_some()),
            ("coords", self.coords.is_some()),
            ("arclength_samples", self.arclength_samples.is_some()),
        ];
        let allowed: &[&str] = match self.kind {
            CurveKind::Line => &["origin", "direction"],
            CurveKind::Circle => &["radius"],
            CurveKind::QuadHelix => &["a", "b", "c"],
            CurveKind::PolyTrig => &["coords", "arclength_samples"],
        };
        for (name, set) in present {
            if set && !allowed.contains(&name) {
                return Err(CliError::Config(format!("curve field `{name}` does not apply to {:?}", self.kind)));
            }
        }
        Ok(())
    }

    pub fn build(&self, n: usize, v1: (f64, f64)) -> Result<CenterCurve, CliError> {
        self.check_fields()?;
        let need = |v: Option<f64>, name: &str| v.ok_or_else(|| CliError::Config(format!("curve needs `{name}`")));
        let domain = self.domain.map(|d| (d[0], d[1])).unwrap_or(v1);
        let mut curve = match self.kind {
            CurveKind::Line => {
                let origin = match &self.origin {
                    Some(o) => vec_of(o, n, "line origin")?,
                    None => VecN::zeros(n),
                };
                let direction = match &self.direction {
                    Some(d) => vec_of(d, n, "line direction")?,
                    None => VecN::basis(n, 0),
                };
                CenterCurve::line(origin, direction, domain)?
            }
            CurveKind::Circle => CenterCurve::circle(n, need(self.radius, "radius")?, domain)?,
            CurveKind::QuadHelix => {
                if n != 4 {
                    return Err(CliError::Config("quad_helix lives in E^4".into()));
                }
                CenterCurve::quad_helix(need(self.a, "a")?, need(self.b, "b")?, need(self.c, "c")?, domain)?
            }
            CurveKind::PolyTrig => {
                let coords = self.coords.clone().ok_or_else(|| CliError::Config("curve needs `coords`".into()))?;
                if coords.len() != n {
                    return Err(CliError::Config(format!("poly_trig needs {n} coordinates, got {}", coords.len())));
                }
                let raw = CenterCurve::poly_trig(coords, domain)?;
                reparametrize_arclength(&raw, self.arclength_samples.unwrap_or(DEFAULT_ARCLENGTH_SAMPLES))?
            }
        };
        if let Some(rows) = &self.frame_override {
            square(rows, n, "frame_override")?;
            curve = curve
                .without_frame_override()
                .with_frame_override(rows.iter().map(|r| VecN::new(r.clone())).collect())?;
        }
        if let Some(m) = &self.rigid_motion {
            square(&m.rotation, n, "rigid_motion.rotation")?;
            let rot = MatK::from_rows(&m.rotation)?;
            curve = curve.transformed(&rot, &vec_of(&m.translation, n, "rigid_motion.translation")?)?;
        }
        Ok(curve)
    }
}

impl RadiusSpec {
    pub fn build(&self, v1: (f64, f64)) -> Result<RadiusProfile, CliError> {
        Ok(match self {
            RadiusSpec::Constant { lambda } => RadiusProfile::constant(*lambda),
            RadiusSpec::Linear { slope, intercept } => RadiusProfile::linear(*slope, *intercept),
            RadiusSpec::PolyTrig { poly, trig } => {
                let p = PolyTrig { poly: poly.clone(), trig: trig.clone() };
                if !p.is_finite() {
                    return Err(CliError::Config("non-finite radius coefficient".into()));
                }
                RadiusProfile::poly_trig(p)
            }
            RadiusSpec::Catenoid { a, rho0, branch, step } => {
                let profile = solve_catenoid(*a, rho0.unwrap_or(*a), v1, *step, *branch)?;
                profile.radius_profile()
            }
        })
    }

    pub fn is_constant(&self) -> bool {
        matches!(self, RadiusSpec::Constant { .. })
    }
}

impl From<GeometryError> for CliError {
    fn from(e: GeometryError) -> Self {
        CliError::Geometry(e)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const TUBE: &str = r#"{
        "patch": {
            "curve": {"kind": "line"},
            "radius": {"kind": "constant", "lambda": 1.0},
            "domain": {"v1": [0, 2]}
        }
    }"#;

    #[test]
    fn defaults() {
        let cfg = RunConfig::from_json(TUBE).unwrap();
        assert_eq!(cfg.patch.n, 4);
        assert_eq!(cfg.samples, 200);
        assert_eq!(cfg.grid.counts, vec![20, 20, 20]);
        assert_eq!(cfg.tolerances.scale, 1.0);
        let p = cfg.build_patch().unwrap();
        assert_eq!(p.domain()[2], (0.0, TAU));
    }

    #[test]
    fn unknown_fields_are_rejected() {
        let text = TUBE.replacen("\"patch\"", "\"bogus\": 1, \"patch\"", 1);
        assert!(matches!(RunConfig::from_json(&text), Err(CliError::Config(_))));
        let text = TUBE.replace("\"lambda\": 1.0", "\"lambda\": 1.0, \"extra\": 2");
        assert!(matches!(RunConfig::from_json(&text), Err(CliError::Config(_))));
    }

    #[test]
    fn grid_must_match_dimension() {
        let text = TUBE.replacen("\"patch\"", "\"grid\": {\"counts\": [4, 4]}, \"patch\"", 1);
        assert!(matches!(RunConfig::from_json(&text), Err(CliError::Config(_))));
    }

    #[test]
    fn builds_every_kind() {
        let specs = [
            r#"{"kind": "circle", "radius": 2.0}"#,
            r#"{"kind": "quad_helix", "a": 1.0, "b": 0.7, "c": 1.6}"#,
            r#"{"kind": "poly_trig", "coords": [{"trig": [{"freq": 1, "cos": 2}]}, {"trig": [{"freq": 1, "sin": 2}]}, {"poly": [0, 0.5]}, {}]}"#,
            r#"{"kind": "line", "rigid_motion": {"rotation": [[0,-1,0,0],[1,0,0,0],[0,0,1,0],[0,0,0,1]], "translation": [1,2,3,4]}}"#,
        ];
        for c in specs {
            let text = format!(
                r#"{{"patch": {{"curve": {c}, "radius": {{"kind": "poly_trig", "poly": [0.4], "trig": [{{"freq": 1, "sin": 0.02}}]}}, "domain": {{"v1": [0, 3]}}}}}}"#
            );
            let cfg = RunConfig::from_json(&text).unwrap();
            cfg.build_patch().unwrap();
        }
        let cat = r#"{"patch": {"curve": {"kind": "line"}, "radius": {"kind": "catenoid", "a": 1.0}, "domain": {"v1": [0, 2]}}}"#;
        let p = RunConfig::from_json(cat).unwrap().build_patch().unwrap();
        assert_eq!(p.radius(0.0).unwrap().rho, 1.0);
    }
}
