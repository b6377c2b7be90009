//! The five subcommands, as functions from a configuration to file content.

use canal_core::canal::{canal_point, CanalPatch};
use canal_core::classify::{classify, closed_kh_at, solve_catenoid, Branch, ClassificationVerdict, ImplicitCheck};
use canal_core::curvature4::curvature_report;
use canal_core::grid::{admissible_nodes, par_map, random_admissible, Lattice};
use canal_core::Result as GeoResult;
use serde::Serialize;

use crate::config::{Format, RunConfig};
use crate::output::{csv, json, obj};
use crate::verify::{run_verify, VerifyReport, SCHEMA};
use crate::CliError;

/// Command-line values that take precedence over the configuration.
#[derive(Debug, Clone, Default)]
pub struct Overrides {
    pub grid: Option<Vec<usize>>,
    pub seed: Option<u64>,
    pub fd_step: Option<f64>,
    pub tolerance_scale: Option<f64>,
}

impl Overrides {
    pub fn apply(&self, cfg: &mut RunConfig) -> Result<(), CliError> {
        if let Some(g) = &self.grid {
            cfg.grid.counts = g.clone();
        }
        if let Some(s) = self.seed {
            cfg.seed = s;
        }
        if let Some(h) = self.fd_step {
            cfg.fd_step = h;
        }
        if let Some(t) = self.tolerance_scale {
            cfg.tolerances.scale = t;
        }
        cfg.validate()
    }
}

/// Parses `N1xN2xN3`.
pub fn parse_grid(s: &str) -> Result<Vec<usize>, String> {
    s.split(['x', 'X'])
        .map(|p| p.trim().parse::<usize>().map_err(|e| format!("bad grid `{s}`: {e}")))
        .collect()
}

fn try_map<T: Sync, U: Send>(items: &[T], f: impl Fn(&T) -> GeoResult<U> + Sync + Send) -> GeoResult<Vec<U>> {
    par_map(items, f).into_iter().collect()
}

fn sample_lattice(cfg: &RunConfig, patch: &CanalPatch, slice_v3: Option<f64>, wrap: bool) -> Result<Lattice, CliError> {
    let span = cfg.patch.domain.v1[1] - cfg.patch.domain.v1[0];
    let mut lattice = Lattice::for_patch(patch, &cfg.grid.counts, cfg.grid.v1_margin * span)?;
    if wrap {
        // closed in v1 as well: cell centers over the whole period
        let (lo, hi) = patch.domain()[0];
        let m = cfg.grid.counts[0];
        lattice.axes[0] = (0..m).map(|j| lo + (hi - lo) * (j as f64 + 0.5) / m as f64).collect();
    }
    if let Some(v3) = slice_v3 {
        if patch.dim() != 4 {
            return Err(CliError::Config("--slice-v3 needs n = 4".into()));
        }
        lattice.axes[2] = vec![v3];
    }
    Ok(lattice)
}

#[derive(Serialize)]
struct SamplePoint {
    params: Vec<f64>,
    point: Vec<f64>,
}

#[derive(Serialize)]
struct SampleFile {
    schema: u32,
    n: usize,
    points: Vec<SamplePoint>,
}

/// Point cloud of the patch over the configured grid.
pub fn cmd_sample(cfg: &RunConfig, format: Format, slice_v3: Option<f64>, wrap: bool) -> Result<String, CliError> {
    let patch = cfg.build_patch()?;
    let n = patch.dim();
    let lattice = sample_lattice(cfg, &patch, slice_v3, wrap)?;
    let params = lattice.points();
    let points = try_map(&params, |p| canal_point(&patch, p))?;
    match format {
        Format::Csv => {
            let names = ["v1", "v2", "v3"];
            let coords: Vec<String> = (1..=n).map(|i| format!("x{i}")).collect();
            let header: Vec<&str> = names[..n - 1].iter().copied().chain(coords.iter().map(String::as_str)).collect();
            let rows = params.iter().zip(&points).map(|(p, x)| p.iter().chain(x.iter()).copied().collect());
            Ok(csv(&header, rows))
        }
        Format::Json => json(&SampleFile {
            schema: SCHEMA,
            n,
            points: params
                .into_iter()
                .zip(points)
                .map(|(params, x)| SamplePoint { params, point: x.into_vec() })
                .collect(),
        }),
        Format::Obj => {
            if n != 3 {
                return Err(CliError::Config("OBJ export needs n = 3; use CSV with --slice-v3 for n = 4".into()));
            }
            let counts = lattice.counts();
            let verts: Vec<[f64; 3]> = points.iter().map(|x| [x[0], x[1], x[2]]).collect();
            Ok(obj(&verts, counts[0], counts[1], wrap))
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct Extremes {
    pub min: f64,
    pub max: f64,
}

impl Extremes {
    fn of(values: impl Iterator<Item = f64>) -> Self {
        values.fold(Extremes { min: f64::INFINITY, max: f64::NEG_INFINITY }, |e, v| Extremes {
            min: e.min.min(v),
            max: e.max.max(v),
        })
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct CurvatureSummary {
    pub schema: u32,
    pub points: usize,
    pub gaussian: Extremes,
    pub mean: Extremes,
    pub max_identity_residual: f64,
}

#[derive(Serialize)]
struct CurvatureFile {
    #[serde(flatten)]
    summary: CurvatureSummary,
    rows: Vec<[f64; 9]>,
}

/// Closed-form curvature over the admissible grid nodes. Returns the file
/// content and the summary.
pub fn cmd_curvature(cfg: &RunConfig, format: Format) -> Result<(String, CurvatureSummary), CliError> {
    let patch = cfg.build_patch()?;
    if patch.dim() != 4 {
        return Err(CliError::Config("curvature reports need n = 4".into()));
    }
    let nodes = admissible_nodes(&patch, &cfg.lattice(&patch)?, cfg.v1_margin())?;
    let reports = try_map(&nodes, |p| curvature_report(&patch, p))?;
    let rows: Vec<[f64; 9]> = reports
        .iter()
        .map(|r| {
            let [v1, v2, v3] = r.location;
            let [k1, k2, k3] = r.principal;
            [v1, v2, v3, r.gaussian, r.mean, k1, k2, k3, r.identity_residual]
        })
        .collect();
    let summary = CurvatureSummary {
        schema: SCHEMA,
        points: rows.len(),
        gaussian: Extremes::of(reports.iter().map(|r| r.gaussian)),
        mean: Extremes::of(reports.iter().map(|r| r.mean)),
        max_identity_residual: reports.iter().fold(0.0, |m, r| m.max(r.identity_residual)),
    };
    let content = match format {
        Format::Csv => csv(
            &["v1", "v2", "v3", "K", "H", "kappa1", "kappa2", "kappa3", "identity_residual"],
            rows.iter().map(|r| r.to_vec()),
        ),
        Format::Json => json(&CurvatureFile { summary: summary.clone(), rows })?,
        Format::Obj => return Err(CliError::Config("curvature reports are CSV or JSON".into())),
    };
    Ok((content, summary))
}

pub fn cmd_verify(cfg: &RunConfig) -> Result<(String, VerifyReport), CliError> {
    let report = run_verify(cfg)?;
    Ok((json(&report)?, report))
}

/// Flat, minimal and Weingarten verdicts over the admissible grid nodes.
pub fn cmd_classify(cfg: &RunConfig) -> Result<(String, ClassificationVerdict), CliError> {
    let patch = cfg.build_patch()?;
    if patch.dim() != 4 {
        return Err(CliError::Config("classification needs n = 4".into()));
    }
    let margin = cfg.v1_margin();
    let nodes = admissible_nodes(&patch, &cfg.lattice(&patch)?, margin)?;
    let centers = random_admissible(&patch, cfg.weingarten.centers, cfg.seed.wrapping_add(1), margin)?;
    let verdict = classify(&patch, &nodes, &centers)?;
    Ok((json(&verdict)?, verdict))
}

#[derive(Debug, Clone)]
pub struct CatenoidArgs {
    pub a: f64,
    pub rho0: Option<f64>,
    pub span: (f64, f64),
    pub step: f64,
    pub branch: Branch,
    /// Nodes per axis of the `|H|` check on the revolution hypersurface.
    pub check_grid: Option<Vec<usize>>,
}

#[derive(Debug, Clone, Serialize)]
pub struct HCheck {
    pub points: usize,
    pub max_abs_mean: f64,
    pub tolerance: f64,
    pub pass: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct CatenoidSummary {
    pub schema: u32,
    pub a: f64,
    pub b: f64,
    pub branch: Branch,
    pub nodes: usize,
    pub max_ode_residual: f64,
    pub ode_tolerance: f64,
    pub max_invariant_drift: f64,
    pub max_implicit_deviation: f64,
    pub implicit_tolerance: f64,
    pub checkpoints: Vec<ImplicitCheck>,
    pub h_check: Option<HCheck>,
    pub pass: bool,
}

/// Tolerance on the ODE residual at the table nodes.
pub const CATENOID_ODE_TOL: f64 = 1e-8;

/// Catenoid radius table `v1, rho, rho', rho''` and its summary.
pub fn cmd_catenoid(args: &CatenoidArgs, format: Format) -> Result<(String, CatenoidSummary), CliError> {
    let cat = solve_catenoid(args.a, args.rho0.unwrap_or(args.a), args.span, args.step, args.branch)?;
    let h_check = match &args.check_grid {
        Some(counts) => {
            let patch = cat.revolution_patch()?;
            let span = args.span.1 - args.span.0;
            let nodes = admissible_nodes(&patch, &Lattice::for_patch(&patch, counts, 0.01 * span)?, 0.0)?;
            let kh = closed_kh_at(&patch, &nodes)?;
            let max_abs_mean = kh.iter().fold(0.0_f64, |m, (_, h)| m.max(h.abs()));
            let tolerance = canal_core::classify::MINIMAL_H;
            Some(HCheck { points: nodes.len(), max_abs_mean, tolerance, pass: max_abs_mean <= tolerance })
        }
        None => None,
    };
    let t = &cat.table;
    let max_implicit_deviation = cat.max_implicit_deviation();
    let pass = cat.max_ode_residual <= CATENOID_ODE_TOL
        && max_implicit_deviation <= canal_core::classify::IMPLICIT_TOL
        && h_check.as_ref().map_or(true, |h| h.pass);
    let summary = CatenoidSummary {
        schema: SCHEMA,
        a: cat.a,
        b: cat.b,
        branch: cat.branch,
        nodes: t.v1.len(),
        max_ode_residual: cat.max_ode_residual,
        ode_tolerance: CATENOID_ODE_TOL,
        max_invariant_drift: cat.max_invariant_drift,
        max_implicit_deviation,
        implicit_tolerance: canal_core::classify::IMPLICIT_TOL,
        checkpoints: cat.checkpoints.clone(),
        h_check,
        pass,
    };
    let content = match format {
        Format::Csv => csv(
            &["v1", "rho", "rho_p", "rho_pp"],
            (0..t.v1.len()).map(|j| vec![t.v1[j], t.rho[j], t.d1[j], t.d2[j]]),
        ),
        Format::Json => {
            #[derive(Serialize)]
            struct File<'a> {
                #[serde(flatten)]
                summary: &'a CatenoidSummary,
                table: &'a canal_core::canal::TabulatedProfile,
            }
            json(&File { summary: &summary, table: t })?
        }
        Format::Obj => return Err(CliError::Config("catenoid tables are CSV or JSON".into())),
    };
    Ok((content, summary))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cfg(text: &str) -> RunConfig {
        RunConfig::from_json(text).unwrap()
    }

    const LINE_TUBE: &str = r#"{"patch": {"curve": {"kind": "line"}, "radius": {"kind": "constant", "lambda": 1.0}, "domain": {"v1": [0, 2]}}, "grid": {"counts": [4, 4, 4]}}"#;

    #[test]
    fn grid_flag() {
        assert_eq!(parse_grid("4x5x6").unwrap(), vec![4, 5, 6]);
        assert!(parse_grid("4x").is_err());
    }

    #[test]
    fn line_tube_sample() {
        let out = cmd_sample(&cfg(LINE_TUBE), Format::Csv, None, false).unwrap();
        let lines: Vec<&str> = out.lines().collect();
        assert_eq!(lines[0], "v1,v2,v3,x1,x2,x3,x4");
        assert_eq!(lines.len(), 65);
        for l in &lines[1..] {
            let x: Vec<f64> = l.split(',').map(|c| c.parse().unwrap()).collect();
            let d = (x[4] * x[4] + x[5] * x[5] + x[6] * x[6]).sqrt();
            assert!((d - 1.0).abs() < 1e-12);
        }
        let sliced = cmd_sample(&cfg(LINE_TUBE), Format::Csv, Some(0.3), false).unwrap();
        assert_eq!(sliced.lines().count(), 17);
        assert!(cmd_sample(&cfg(LINE_TUBE), Format::Obj, None, false).is_err());
    }

    #[test]
    fn torus_obj() {
        let text = r#"{"patch": {"n": 3, "curve": {"kind": "circle", "radius": 2.0}, "radius": {"kind": "constant", "lambda": 0.5}, "domain": {"v1": [0, 12.566370614359172]}}, "grid": {"counts": [12, 8]}}"#;
        let out = cmd_sample(&cfg(text), Format::Obj, None, true).unwrap();
        let nv = out.lines().filter(|l| l.starts_with("v ")).count();
        let nf = out.lines().filter(|l| l.starts_with("f ")).count();
        assert_eq!(nv, 96);
        let mut edges = std::collections::BTreeSet::new();
        for l in out.lines().filter(|l| l.starts_with("f ")) {
            let ids: Vec<usize> = l[2..].split(' ').map(|x| x.parse().unwrap()).collect();
            for k in 0..3 {
                let (a, b) = (ids[k], ids[(k + 1) % 3]);
                edges.insert((a.min(b), a.max(b)));
            }
        }
        assert_eq!(nv as i64 - edges.len() as i64 + nf as i64, 0);
    }

    #[test]
    fn curvature_rows() {
        let (out, summary) = cmd_curvature(&cfg(LINE_TUBE), Format::Csv).unwrap();
        assert_eq!(summary.points, 64);
        assert!((summary.mean.max + 2.0 / 3.0).abs() < 1e-12);
        assert_eq!(out.lines().count(), 65);
    }

    #[test]
    fn catenoid_command() {
        let args = CatenoidArgs { a: 1.0, rho0: None, span: (0.0, 2.0), step: 1e-3, branch: Branch::Plus, check_grid: Some(vec![6, 6, 6]) };
        let (out, s) = cmd_catenoid(&args, Format::Csv).unwrap();
        assert!(s.pass);
        assert_eq!(out.lines().count(), 2002);
    }
}
