//! Batch front end: parse function and measure files, dispatch to the
//! toolkit operations, and emit CSV/JSON artifacts.
//!
//! Exit codes: 0 on success, 2 on validation errors (unparsable input,
//! bad parameters), 3 on numerical failures (divergence, truncation,
//! indeterminate limits) with a machine-readable reason on stderr.

use anyhow::{anyhow, Context};
use asplund::analytic::AnalyticConvexSpec;
use asplund::recession::{DirectionGrid, RecessionMethod};
use asplund::riesz::{AuditCase, DecomposeConfig, FunctionalOracle, RepresentedFunctional};
use asplund::variation::{VariationConfig, VariationReport, VerifyConfig};
use asplund::{
    ConvexGridFunction, Error as CoreError, GridSpec, LogConcaveFn, MinkowskiTolerances,
    PointMeasure, Polytope, SphereMeasure,
};
use clap::{Args, Parser, Subcommand};
use serde::{Deserialize, Serialize};
use std::fs;
use std::path::{Path, PathBuf};

#[derive(Parser)]
#[command(
    name = "asplund",
    about = "Numerical convex analysis for log-concave functions",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone)]
struct GridArgs {
    /// box corners per axis, as `lo hi` (applied to every axis)
    #[arg(long, num_args = 2, allow_negative_numbers = true)]
    box_: Option<Vec<f64>>,
    /// grid points per axis
    #[arg(long)]
    points: Option<usize>,
    /// ambient dimension (defaults to the input's dimension)
    #[arg(long)]
    dim: Option<usize>,
}

impl GridArgs {
    fn to_grid(&self, default_dim: usize) -> anyhow::Result<Option<GridSpec>> {
        match (&self.box_, self.points) {
            (Some(b), Some(p)) => {
                let dim = self.dim.unwrap_or(default_dim);
                Ok(Some(GridSpec::new(vec![b[0]; dim], vec![b[1]; dim], p)?))
            }
            (None, None) => Ok(None),
            _ => Err(anyhow!("--box and --points must be given together")),
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Discrete Legendre transform of a convex function onto a dual grid
    Legendre {
        /// function or spec JSON
        #[arg(long)]
        phi: PathBuf,
        #[command(flatten)]
        grid: GridArgs,
        /// output CSV path (stdout when omitted)
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Asplund sum (sup-convolution) of two log-concave functions
    Asplund {
        #[arg(long)]
        f: PathBuf,
        #[arg(long)]
        g: PathBuf,
        /// CSV of the resulting −log f on its window
        #[arg(long)]
        out_phi: Option<PathBuf>,
        /// CSV of the resulting support function
        #[arg(long)]
        out_h: Option<PathBuf>,
        /// CSV of the resulting density e^{−φ}
        #[arg(long)]
        out_density: Option<PathBuf>,
    },
    /// Recession function of an analytic convex function
    Recession {
        #[arg(long)]
        phi: PathBuf,
        /// number of directions on the circle (dimension 2)
        #[arg(long, default_value_t = 64)]
        dirs: usize,
        /// use the dyadic numeric estimator instead of the closed forms
        #[arg(long)]
        numeric: bool,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Pasch–Hausdorff envelope at slope k (closed form when available)
    PaschHausdorff {
        #[arg(long)]
        phi: PathBuf,
        #[arg(long)]
        k: f64,
        /// JSON output of the envelope spec (stdout when omitted)
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Moment measure (∇ψ)♯(g dx) of a log-concave function
    MomentMeasure {
        #[arg(long)]
        g: PathBuf,
        #[command(flatten)]
        grid: GridArgs,
        /// output CSV (default) or JSON by extension
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Surface measure on the exact polytope path
    SurfaceMeasure {
        #[arg(long)]
        g: PathBuf,
        /// quadrature panels per facet
        #[arg(long, default_value_t = 8)]
        panels: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// First variation δ(g, f) of the integral
    FirstVariation {
        #[arg(long)]
        g: PathBuf,
        #[arg(long)]
        f: PathBuf,
        #[arg(long, default_value_t = 0.1)]
        t0: f64,
        #[arg(long, default_value_t = 6)]
        levels: usize,
        /// Richardson agreement that counts as convergence
        #[arg(long, default_value_t = 5e-3)]
        rel_tol: f64,
        /// absolute quotient floor of the divergence verdict
        #[arg(long, default_value_t = 100.0)]
        divergence_floor: f64,
        #[arg(long)]
        dim: Option<usize>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// First variation versus its (μ, ν) representation
    VerifyRepresentation {
        #[arg(long)]
        g: PathBuf,
        #[arg(long)]
        f: PathBuf,
        #[arg(long, default_value_t = 0.1)]
        t0: f64,
        #[arg(long, default_value_t = 6)]
        levels: usize,
        #[arg(long, default_value_t = 8)]
        panels: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Check the moment-measure conditions of a point measure
    MinkowskiCheck {
        #[arg(long)]
        measure: PathBuf,
        /// relative centering tolerance
        #[arg(long, default_value_t = 1e-2)]
        centered_rel: f64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Recover the spherical part ν of a represented or δ(g,·) functional
    Decompose {
        /// harness configuration JSON
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Audit the linearity/monotonicity axioms of a functional
    Audit {
        /// harness configuration JSON
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

/// On-disk description of a log-concave function: exactly one of `neg_log`
/// (symbolic φ), `neg_log_grid` (φ on a grid), or `support` (symbolic h_f,
/// with its rendering grid).
#[derive(Serialize, Deserialize)]
struct FunctionFile {
    #[serde(skip_serializing_if = "Option::is_none")]
    neg_log: Option<AnalyticConvexSpec>,
    #[serde(skip_serializing_if = "Option::is_none")]
    neg_log_grid: Option<ConvexGridFunction>,
    #[serde(skip_serializing_if = "Option::is_none")]
    support: Option<AnalyticConvexSpec>,
    #[serde(skip_serializing_if = "Option::is_none")]
    dual_grid: Option<GridFile>,
    #[serde(skip_serializing_if = "Option::is_none")]
    window: Option<GridFile>,
}

#[derive(Serialize, Deserialize, Clone)]
struct GridFile {
    lower: Vec<f64>,
    upper: Vec<f64>,
    points_per_axis: usize,
}

impl GridFile {
    fn to_grid(&self) -> Result<GridSpec, CoreError> {
        GridSpec::new(self.lower.clone(), self.upper.clone(), self.points_per_axis)
    }
}

fn read_json<T: serde::de::DeserializeOwned>(path: &Path) -> anyhow::Result<T> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    serde_json::from_str(&text).with_context(|| format!("parsing {}", path.display()))
}

fn load_spec(path: &Path) -> anyhow::Result<AnalyticConvexSpec> {
    // accept either a bare spec ({"kind": ...}) or a function file
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    if let Ok(spec) = serde_json::from_str::<AnalyticConvexSpec>(&text) {
        spec.validate()?;
        return Ok(spec);
    }
    let file: FunctionFile =
        serde_json::from_str(&text).with_context(|| format!("parsing {}", path.display()))?;
    file.neg_log
        .ok_or_else(|| anyhow!("{} does not carry a symbolic neg_log", path.display()))
}

fn load_function(path: &Path) -> anyhow::Result<LogConcaveFn> {
    let file: FunctionFile = read_json(path)?;
    let window = file.window.as_ref().map(|g| g.to_grid()).transpose()?;
    if let Some(spec) = file.neg_log {
        let dim = spec.dim().unwrap_or(2);
        let window = window.unwrap_or(GridSpec::symmetric(dim, 8.0, 257)?);
        return Ok(LogConcaveFn::from_phi_spec(spec, window)?);
    }
    if let Some(grid_fn) = file.neg_log_grid {
        // re-run the invariant checks that serde bypasses
        let validated = ConvexGridFunction::new(grid_fn.grid().clone(), grid_fn.values().to_vec())?;
        return Ok(LogConcaveFn::from_phi_grid(validated));
    }
    if let Some(h) = file.support {
        let dual = file
            .dual_grid
            .as_ref()
            .ok_or_else(|| anyhow!("support-side functions need a dual_grid"))?
            .to_grid()?;
        let dim = dual.dim();
        let window = window.unwrap_or(GridSpec::symmetric(dim, 8.0, 257)?);
        return Ok(LogConcaveFn::from_support_spec(h, dual, window)?);
    }
    Err(anyhow!(
        "{} carries none of neg_log / neg_log_grid / support",
        path.display()
    ))
}

fn write_out(out: &Option<PathBuf>, bytes: &[u8]) -> anyhow::Result<()> {
    match out {
        Some(path) => {
            fs::write(path, bytes).with_context(|| format!("writing {}", path.display()))?
        }
        None => {
            use std::io::Write;
            std::io::stdout().write_all(bytes)?;
        }
    }
    Ok(())
}

fn render_report_table(report: &VariationReport) -> String {
    let mut s = String::new();
    s.push_str(&format!("{:>14} {:>18} {:>18}\n", "t", "I(t)", "quotient"));
    for ((t, i_t), q) in report
        .t_values
        .iter()
        .zip(&report.integral_values)
        .zip(&report.quotients)
    {
        s.push_str(&format!("{t:>14.8} {i_t:>18.10} {q:>18.10}\n"));
    }
    s.push_str(&format!(
        "delta={:?} mu_term={} nu_term={} total={} gap={:?}\n",
        report.delta,
        report.mu_term,
        report.nu_term,
        report.representation_total,
        report.relative_gap
    ));
    s
}

#[derive(Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
enum OracleFile {
    Represented { mu: PathBuf, nu: Option<PathBuf> },
    FirstVariation { g: PathBuf },
    Integral,
}

fn load_oracle(file: &OracleFile) -> anyhow::Result<FunctionalOracle> {
    Ok(match file {
        OracleFile::Represented { mu, nu } => {
            let mu: PointMeasure = read_json(mu)?;
            let nu: SphereMeasure = match nu {
                Some(path) => read_json(path)?,
                None => SphereMeasure::empty(mu.dim()),
            };
            FunctionalOracle::Represented(RepresentedFunctional::new(mu, nu)?)
        }
        OracleFile::FirstVariation { g } => {
            let g = load_function(g)?;
            let dual = g.default_dual_grid()?;
            let window = g.window().clone();
            FunctionalOracle::FirstVariation {
                g,
                config: VariationConfig::new(dual, window),
            }
        }
        OracleFile::Integral => FunctionalOracle::Integral,
    })
}

#[derive(Deserialize)]
struct DecomposeFile {
    oracle: OracleFile,
    #[serde(default)]
    directions: Option<usize>,
    #[serde(default)]
    r_sequence: Option<Vec<f64>>,
    /// additional probe bodies, reported with their ∫ h_K dν estimates
    #[serde(default)]
    bodies: Vec<Polytope>,
}

#[derive(Deserialize)]
struct AuditFile {
    oracle: OracleFile,
    cases: Vec<AuditCaseFile>,
}

#[derive(Deserialize)]
struct AuditCaseFile {
    f: PathBuf,
    g: PathBuf,
    alpha: f64,
    beta: f64,
}

fn run(cli: Cli) -> anyhow::Result<()> {
    match cli.command {
        Command::Legendre { phi, grid, out } => {
            let spec = load_spec(&phi)?;
            let dim = grid.dim.or(spec.dim()).unwrap_or(1);
            let primal = GridSpec::symmetric(dim, 8.0, 257)?;
            let sampled = spec.sample_to_grid(&primal)?;
            let dual = grid
                .to_grid(dim)?
                .map_or_else(|| asplund::auto_dual_grid(&sampled, 257), Ok)?;
            let star = asplund::legendre_transform(&sampled, &dual)?;
            let mut bytes = Vec::new();
            star.write_csv(&mut bytes)?;
            write_out(&out, &bytes)?;
        }
        Command::Asplund {
            f,
            g,
            out_phi,
            out_h,
            out_density,
        } => {
            let f = load_function(&f)?;
            let g = load_function(&g)?;
            let sum = asplund::asplund_sum(&f, &g, &asplund::AsplundParams::default())?;
            if let Some(path) = out_h {
                let h = sum.support_function(&sum.default_dual_grid()?)?;
                let mut bytes = Vec::new();
                h.write_csv(&mut bytes)?;
                write_out(&Some(path), &bytes)?;
            }
            if let Some(path) = out_density {
                let mut bytes = Vec::new();
                sum.write_density_csv(&mut bytes)?;
                write_out(&Some(path), &bytes)?;
            }
            let phi = sum.phi_grid()?;
            let mut bytes = Vec::new();
            phi.write_csv(&mut bytes)?;
            write_out(&out_phi, &bytes)?;
        }
        Command::Recession {
            phi,
            dirs,
            numeric,
            out,
        } => {
            let spec = load_spec(&phi)?;
            let grid = match spec.dim().unwrap_or(2) {
                1 => DirectionGrid::pair(),
                _ => DirectionGrid::circle(dirs),
            };
            let method = if numeric {
                RecessionMethod::Numeric { base_point: None }
            } else {
                RecessionMethod::Structural
            };
            let rec = asplund::recession_function(&spec, &grid, &method)?;
            let mut bytes = Vec::new();
            rec.write_csv(&mut bytes)?;
            write_out(&out, &bytes)?;
        }
        Command::PaschHausdorff { phi, k, out } => {
            let spec = load_spec(&phi)?;
            let env = asplund::pasch_hausdorff(&spec, k)?;
            let mut text = serde_json::to_string_pretty(&env)?;
            text.push('\n');
            write_out(&out, text.as_bytes())?;
        }
        Command::MomentMeasure { g, grid, out } => {
            let g = load_function(&g)?;
            let grid = grid.to_grid(g.dim())?.unwrap_or_else(|| g.window().clone());
            let mu = asplund::moment_measure(&g, &grid)?;
            emit_measure_point(&mu, &out)?;
        }
        Command::SurfaceMeasure { g, panels, out } => {
            let g = load_function(&g)?;
            let nu = asplund::surface_measure(&g, panels)?;
            emit_measure_sphere(&nu, &out)?;
        }
        Command::FirstVariation {
            g,
            f,
            t0,
            levels,
            rel_tol,
            divergence_floor,
            dim,
            out,
        } => {
            let g = load_function(&g)?;
            let f = load_function(&f)?;
            if let Some(d) = dim {
                if d != g.dim() {
                    return Err(anyhow!("--dim {d} does not match the input dimension {}", g.dim()));
                }
            }
            let mut config = VariationConfig::new(g.default_dual_grid()?, g.window().clone());
            config.t0 = t0;
            config.levels = levels;
            config.rel_tol = rel_tol;
            config.divergence_floor = divergence_floor;
            let est = asplund::first_variation(&g, &f, &config)?;
            let mut text = serde_json::to_string_pretty(&est)?;
            text.push('\n');
            write_out(&out, text.as_bytes())?;
        }
        Command::VerifyRepresentation {
            g,
            f,
            t0,
            levels,
            panels,
            out,
        } => {
            let g = load_function(&g)?;
            let f = load_function(&f)?;
            let mut variation = VariationConfig::new(g.default_dual_grid()?, g.window().clone());
            variation.t0 = t0;
            variation.levels = levels;
            let config = VerifyConfig {
                variation,
                measure_grid: g.window().clone(),
                edge_quadrature: panels,
            };
            let report = asplund::verify_representation(&g, &f, &config)?;
            print!("{}", render_report_table(&report));
            let mut text = serde_json::to_string_pretty(&report)?;
            text.push('\n');
            write_out(&out, text.as_bytes())?;
        }
        Command::MinkowskiCheck {
            measure,
            centered_rel,
            out,
        } => {
            let mu: PointMeasure = read_json(&measure)?;
            let tol = MinkowskiTolerances {
                centered_rel,
                ..MinkowskiTolerances::default()
            };
            let report = asplund::minkowski_check(&mu, &tol);
            let mut text = serde_json::to_string_pretty(&report)?;
            text.push('\n');
            write_out(&out, text.as_bytes())?;
        }
        Command::Decompose { config, out } => {
            let file: DecomposeFile = read_json(&config)?;
            let oracle = load_oracle(&file.oracle)?;
            let mut cfg = DecomposeConfig::default();
            if let Some(d) = file.directions {
                cfg.directions = d;
            }
            if let Some(rs) = file.r_sequence {
                cfg.r_sequence = rs;
            }
            cfg.extra_bodies = file.bodies;
            let report = asplund::decompose_functional(&oracle, &cfg)?;
            let mut text = serde_json::to_string_pretty(&report)?;
            text.push('\n');
            write_out(&out, text.as_bytes())?;
        }
        Command::Audit { config, out } => {
            let file: AuditFile = read_json(&config)?;
            let oracle = load_oracle(&file.oracle)?;
            let mut cases = Vec::with_capacity(file.cases.len());
            for case in &file.cases {
                cases.push(AuditCase {
                    f: load_function(&case.f)?,
                    g: load_function(&case.g)?,
                    alpha: case.alpha,
                    beta: case.beta,
                });
            }
            let report = asplund::axiom_audit(&oracle, &cases)?;
            let mut text = serde_json::to_string_pretty(&report)?;
            text.push('\n');
            write_out(&out, text.as_bytes())?;
        }
    }
    Ok(())
}

fn emit_measure_point(mu: &PointMeasure, out: &Option<PathBuf>) -> anyhow::Result<()> {
    let json = out
        .as_ref()
        .map(|p| p.extension().is_some_and(|e| e == "json"))
        .unwrap_or(false);
    let bytes = if json {
        let mut t = serde_json::to_string_pretty(mu)?;
        t.push('\n');
        t.into_bytes()
    } else {
        let mut b = Vec::new();
        mu.write_csv(&mut b)?;
        b
    };
    write_out(out, &bytes)
}

fn emit_measure_sphere(nu: &SphereMeasure, out: &Option<PathBuf>) -> anyhow::Result<()> {
    let json = out
        .as_ref()
        .map(|p| p.extension().is_some_and(|e| e == "json"))
        .unwrap_or(false);
    let bytes = if json {
        let mut t = serde_json::to_string_pretty(nu)?;
        t.push('\n');
        t.into_bytes()
    } else {
        let mut b = Vec::new();
        nu.write_csv(&mut b)?;
        b
    };
    write_out(out, &bytes)
}

/// 2 for validation failures, 3 for numerical failures.
fn exit_code_for(err: &anyhow::Error) -> i32 {
    match err.downcast_ref::<CoreError>() {
        Some(
            CoreError::Truncation(_)
            | CoreError::IndeterminateVariation
            | CoreError::CompactSupport(_)
            | CoreError::OracleFailure(_)
            | CoreError::AtomOutsideGrid { .. },
        ) => 3,
        _ => 2,
    }
}

fn main() {
    if let Ok(threads) = std::env::var("ASPLUND_THREADS") {
        if let Ok(n) = threads.parse::<usize>() {
            let _ = rayon::ThreadPoolBuilder::new()
                .num_threads(n)
                .build_global();
        }
    }
    let cli = Cli::parse();
    if let Err(err) = run(cli) {
        let code = exit_code_for(&err);
        let reason = serde_json::json!({
            "error": format!("{err:#}"),
            "class": if code == 3 { "numerical" } else { "validation" },
        });
        eprintln!("{reason}");
        std::process::exit(code);
    }
}
