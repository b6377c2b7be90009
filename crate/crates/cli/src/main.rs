use std::path::{Path, PathBuf};
use std::process::ExitCode;

use canal_cli::commands::{
    cmd_catenoid, cmd_classify, cmd_curvature, cmd_sample, cmd_verify, parse_grid, CatenoidArgs, Overrides,
};
use canal_cli::config::{Format, OutputSpec, RunConfig};
use canal_cli::output::write_atomic;
use canal_cli::{CliError, EXIT_CHECK_FAILED, EXIT_PASS};
use canal_core::classify::Branch;
use clap::{Args, Parser, Subcommand, ValueEnum};

/// Canal and tubular hypersurfaces in E^4: sampling, closed-form curvature,
/// verification against a numeric oracle, classification.
#[derive(Parser)]
#[command(name = "canal", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Point cloud of the patch (CSV, JSON, or OBJ for n = 3).
    Sample {
        #[command(flatten)]
        common: Common,
        /// Fix v3 and sample a 2-surface (n = 4).
        #[arg(long)]
        slice_v3: Option<f64>,
        /// Close the OBJ mesh in both directions.
        #[arg(long)]
        wrap: bool,
    },
    /// Closed-form K, H and principal curvatures over the grid.
    Curvature {
        #[command(flatten)]
        common: Common,
    },
    /// Run the check battery; exit 1 if a required check fails.
    Verify {
        #[command(flatten)]
        common: Common,
    },
    /// Flat, minimal and Weingarten verdicts.
    Classify {
        #[command(flatten)]
        common: Common,
    },
    /// Tabulate a generalized catenoid radius.
    Catenoid {
        #[arg(long)]
        a: f64,
        /// Radius at the start of the span (defaults to the throat radius a).
        #[arg(long)]
        rho0: Option<f64>,
        /// Start and end of the v1 span, e.g. `0,2`.
        #[arg(long, value_parser = parse_span, default_value = "0,2")]
        span: (f64, f64),
        #[arg(long, default_value_t = 1e-3)]
        step: f64,
        #[arg(long, value_enum, default_value_t = BranchArg::Plus)]
        branch: BranchArg,
        /// Also check |H| on the revolution hypersurface over this grid.
        #[arg(long, value_parser = parse_counts)]
        check_grid: Option<Counts>,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, value_enum, default_value_t = Format::Csv)]
        format: Format,
    },
}

/// Node counts per axis, e.g. `20x20x20`.
#[derive(Clone)]
struct Counts(Vec<usize>);

fn parse_counts(s: &str) -> Result<Counts, String> {
    parse_grid(s).map(Counts)
}

fn parse_span(s: &str) -> Result<(f64, f64), String> {
    let parts: Vec<&str> = s.split(',').collect();
    match parts.as_slice() {
        [a, b] => {
            let f = |x: &str| x.trim().parse::<f64>().map_err(|e| format!("bad span `{s}`: {e}"));
            Ok((f(a)?, f(b)?))
        }
        _ => Err(format!("span needs two values `start,end`, got `{s}`")),
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum BranchArg {
    Plus,
    Minus,
}

#[derive(Args)]
struct Common {
    #[arg(long)]
    config: PathBuf,
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum)]
    format: Option<Format>,
    /// Node counts, e.g. `20x20x20`.
    #[arg(long, value_parser = parse_counts)]
    grid: Option<Counts>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    fd_step: Option<f64>,
    #[arg(long)]
    tolerance_scale: Option<f64>,
}

impl Common {
    fn load(&self) -> Result<RunConfig, CliError> {
        let mut cfg = RunConfig::load(&self.config)?;
        Overrides { grid: self.grid.clone().map(|c| c.0), seed: self.seed, fd_step: self.fd_step, tolerance_scale: self.tolerance_scale }
            .apply(&mut cfg)?;
        Ok(cfg)
    }

    /// Where to write: `--out`, else the configured outputs, else stdout.
    fn targets(&self, cfg: &RunConfig, default: Format) -> Vec<(Format, Option<PathBuf>)> {
        let format = self.format.unwrap_or(default);
        match &self.out {
            Some(p) => vec![(format, Some(p.clone()))],
            None if !cfg.outputs.is_empty() => {
                cfg.outputs.iter().map(|OutputSpec { format, path }| (*format, Some(PathBuf::from(path)))).collect()
            }
            None => vec![(format, None)],
        }
    }
}

fn emit(content: &str, path: Option<&Path>) -> Result<(), CliError> {
    match path {
        Some(p) => write_atomic(p, content),
        None => {
            print!("{content}");
            Ok(())
        }
    }
}

/// Renders every target first and writes only when all succeeded.
fn emit_all(
    targets: Vec<(Format, Option<PathBuf>)>,
    render: impl Fn(Format) -> Result<String, CliError>,
) -> Result<(), CliError> {
    let rendered = targets.into_iter().map(|(f, p)| Ok((render(f)?, p))).collect::<Result<Vec<_>, CliError>>()?;
    for (content, path) in &rendered {
        emit(content, path.as_deref())?;
    }
    Ok(())
}

fn run(cli: Cli) -> Result<i32, CliError> {
    match cli.command {
        Command::Sample { common, slice_v3, wrap } => {
            let cfg = common.load()?;
            emit_all(common.targets(&cfg, Format::Csv), |f| cmd_sample(&cfg, f, slice_v3, wrap))?;
            Ok(EXIT_PASS)
        }
        Command::Curvature { common } => {
            let cfg = common.load()?;
            emit_all(common.targets(&cfg, Format::Csv), |f| cmd_curvature(&cfg, f).map(|r| r.0))?;
            Ok(EXIT_PASS)
        }
        Command::Verify { common } => {
            let cfg = common.load()?;
            let (content, report) = cmd_verify(&cfg)?;
            for (_, path) in common.targets(&cfg, Format::Json) {
                emit(&content, path.as_deref())?;
            }
            for c in report.checks.iter().filter(|c| !c.pass) {
                let tag = if c.informational { "informational" } else { "FAIL" };
                eprintln!("{tag}: {} max residual {:e} > {:e}", c.check, c.max_residual, c.tolerance);
            }
            Ok(if report.pass { EXIT_PASS } else { EXIT_CHECK_FAILED })
        }
        Command::Classify { common } => {
            let cfg = common.load()?;
            let (content, _) = cmd_classify(&cfg)?;
            for (_, path) in common.targets(&cfg, Format::Json) {
                emit(&content, path.as_deref())?;
            }
            Ok(EXIT_PASS)
        }
        Command::Catenoid { a, rho0, span, step, branch, check_grid, out, format } => {
            let branch = match branch {
                BranchArg::Plus => Branch::Plus,
                BranchArg::Minus => Branch::Minus,
            };
            let args = CatenoidArgs { a, rho0, span, step, branch, check_grid: check_grid.map(|c| c.0) };
            let (content, summary) = cmd_catenoid(&args, format)?;
            emit(&content, out.as_deref())?;
            if out.is_some() {
                print!("{}", canal_cli::output::json(&summary)?);
            }
            Ok(if summary.pass { EXIT_PASS } else { EXIT_CHECK_FAILED })
        }
    }
}

fn configure_threads() -> Result<(), CliError> {
    if let Ok(v) = std::env::var("CANAL_THREADS") {
        let n: usize = v
            .parse()
            .ok()
            .filter(|n| *n > 0)
            .ok_or_else(|| CliError::Config(format!("CANAL_THREADS must be a positive integer, got `{v}`")))?;
        rayon::ThreadPoolBuilder::new().num_threads(n).build_global().map_err(|e| CliError::Config(e.to_string()))?;
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) if e.use_stderr() => {
            let _ = e.print();
            return ExitCode::from(2);
        }
        Err(e) => {
            let _ = e.print();
            return ExitCode::SUCCESS;
        }
    };
    match configure_threads().and_then(|_| run(cli)) {
        Ok(code) => ExitCode::from(code as u8),
        Err(e) => {
            eprintln!("{}", e.report());
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
