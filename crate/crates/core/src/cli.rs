//! Command-line front end.
//!
//! Exit codes: 0 success, 1 runtime or domain error, 2 classifier
//! contradiction, 64 usage error.

use std::io::Write;
use std::path::{Path, PathBuf};

use clap::error::ErrorKind;
use clap::{Args, Parser, Subcommand};
use serde::Serialize;

use crate::families::{preset, FamilySpec, PRESET_NAMES};
use crate::geometry::gauss_curvature_separable;
use crate::sampler::{marching_cubes, obj_string, report_string, sample_n, GridSpec};
use crate::surface::{Box3, ExprTriple, SeparableSurface};
use crate::verify::{
    classify, run_theorem_suite, ConstancyReport, Label, StructureEvidence, Suite, Tolerances,
};

pub const EXIT_OK: i32 = 0;
pub const EXIT_RUNTIME: i32 = 1;
pub const EXIT_CONTRADICTION: i32 = 2;
pub const EXIT_USAGE: i32 = 64;

#[derive(Debug, Parser)]
#[command(
    name = "sepsurf",
    version,
    about = "Separable surfaces f(x) + g(y) + h(z) = 0 with constant Gaussian curvature"
)]
pub struct CliConfig {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Build a family instance, mesh it, and write OBJ and curvature report.
    Family(FamilyArgs),
    /// Sample points on a surface and report Gaussian curvature statistics.
    Curvature(SurfaceArgs),
    /// Classify a surface into its constant-curvature family.
    Classify(SurfaceArgs),
    /// Run the numerical check suites.
    Verify(VerifyArgs),
}

#[derive(Debug, Args)]
pub struct FamilyArgs {
    /// Family spec as inline JSON or a path to a JSON file.
    #[arg(long, conflicts_with = "preset")]
    pub spec: Option<String>,
    /// Named preset (paper-fig1-left, paper-fig1-middle, paper-fig1-right,
    /// unit-sphere, catenoid).
    #[arg(long)]
    pub preset: Option<String>,
    /// Write the triangle mesh as OBJ to this path ("-" for stdout).
    #[arg(long)]
    pub mesh: Option<String>,
    /// Write the per-vertex curvature report as JSON to this path ("-" for stdout).
    #[arg(long)]
    pub report: Option<String>,
    /// Grid cells per axis.
    #[arg(long, default_value_t = 48)]
    pub res: usize,
    /// Sampling box "x0,x1,y0,y1,z0,z1"; defaults to the family's admissible box.
    #[arg(long = "box", allow_hyphen_values = true)]
    pub bounds: Option<String>,
    /// Seed recorded in the grid description.
    #[arg(long, default_value_t = 42)]
    pub seed: u64,
}

#[derive(Debug, Args)]
pub struct SurfaceArgs {
    /// f(x) in the expression grammar.
    #[arg(long, allow_hyphen_values = true, requires_all = ["g", "h"], conflicts_with_all = ["spec", "preset"])]
    pub f: Option<String>,
    /// g(y) in the expression grammar.
    #[arg(long, allow_hyphen_values = true, requires_all = ["f", "h"])]
    pub g: Option<String>,
    /// h(z) in the expression grammar.
    #[arg(long, allow_hyphen_values = true, requires_all = ["f", "g"])]
    pub h: Option<String>,
    /// Family spec as inline JSON or a path to a JSON file.
    #[arg(long, conflicts_with = "preset")]
    pub spec: Option<String>,
    /// Named preset.
    #[arg(long)]
    pub preset: Option<String>,
    /// Sampling box "x0,x1,y0,y1,z0,z1".
    #[arg(long = "box", allow_hyphen_values = true)]
    pub bounds: Option<String>,
    /// Number of sample points.
    #[arg(long, default_value_t = 1024)]
    pub n: usize,
    #[arg(long, default_value_t = 42)]
    pub seed: u64,
    /// Report path ("-" or absent for stdout).
    #[arg(long)]
    pub report: Option<String>,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    /// all, geometry, families or classifier.
    #[arg(long, default_value = "all")]
    pub suite: Suite,
    #[arg(long, default_value_t = 42)]
    pub seed: u64,
    /// Report path ("-" or absent for stdout).
    #[arg(long)]
    pub report: Option<String>,
}

/// A command failure with its exit code.
#[derive(Debug)]
pub struct Failure {
    pub code: i32,
    pub message: String,
}

impl Failure {
    fn usage(message: impl Into<String>) -> Failure {
        Failure {
            code: EXIT_USAGE,
            message: message.into(),
        }
    }

    fn runtime(message: impl Into<String>) -> Failure {
        Failure {
            code: EXIT_RUNTIME,
            message: message.into(),
        }
    }
}

/// Parse `args` (including the program name) and run; returns the exit code.
pub fn run(args: &[String]) -> i32 {
    let cfg = match CliConfig::try_parse_from(args) {
        Ok(cfg) => cfg,
        Err(e) => {
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => EXIT_OK,
                _ => EXIT_USAGE,
            };
            let _ = e.print();
            return code;
        }
    };
    match execute(&cfg) {
        Ok(code) => code,
        Err(f) => {
            eprintln!("error: {}", f.message);
            f.code
        }
    }
}

pub fn execute(cfg: &CliConfig) -> Result<i32, Failure> {
    match &cfg.command {
        Command::Family(a) => cmd_family(a),
        Command::Curvature(a) => cmd_curvature(a),
        Command::Classify(a) => cmd_classify(a),
        Command::Verify(a) => cmd_verify(a),
    }
}

fn write_output(dest: Option<&str>, text: &str) -> Result<(), Failure> {
    match dest {
        None | Some("-") => {
            let mut out = std::io::stdout().lock();
            out.write_all(text.as_bytes())
                .and_then(|_| out.flush())
                .map_err(|e| Failure::runtime(format!("writing stdout: {e}")))
        }
        Some(path) => std::fs::write(Path::new(path), text)
            .map_err(|e| Failure::runtime(format!("writing {path}: {e}"))),
    }
}

fn to_json<T: Serialize>(value: &T) -> String {
    serde_json::to_string_pretty(value).expect("reports serialize") + "\n"
}

fn load_spec(src: &str) -> Result<FamilySpec, Failure> {
    let text = if src.trim_start().starts_with('{') {
        src.to_string()
    } else {
        std::fs::read_to_string(PathBuf::from(src))
            .map_err(|e| Failure::runtime(format!("reading spec {src}: {e}")))?
    };
    serde_json::from_str(&text).map_err(|e| Failure::runtime(format!("invalid spec: {e}")))
}

fn load_preset(name: &str) -> Result<FamilySpec, Failure> {
    preset(name).ok_or_else(|| {
        Failure::usage(format!(
            "unknown preset `{name}` (expected one of: {})",
            PRESET_NAMES.join(", ")
        ))
    })
}

fn parse_box(src: Option<&str>) -> Result<Option<Box3>, Failure> {
    src.map(|s| Box3::parse(s).map_err(Failure::usage))
        .transpose()
}

/// The surface named by the flags, how to describe it, and its default box.
#[derive(Debug, Clone, Serialize)]
#[serde(untagged)]
pub enum SurfaceDesc {
    Spec(Box<FamilySpec>),
    Exprs(ExprTriple),
}

fn resolve_spec(
    spec: Option<&str>,
    preset_name: Option<&str>,
) -> Result<Option<FamilySpec>, Failure> {
    match (spec, preset_name) {
        (Some(s), None) => load_spec(s).map(Some),
        (None, Some(p)) => load_preset(p).map(Some),
        (None, None) => Ok(None),
        (Some(_), Some(_)) => Err(Failure::usage("--spec and --preset are exclusive")),
    }
}

fn resolve_surface(a: &SurfaceArgs) -> Result<(SeparableSurface, SurfaceDesc, Box3), Failure> {
    let bounds = parse_box(a.bounds.as_deref())?;
    if let Some(spec) = resolve_spec(a.spec.as_deref(), a.preset.as_deref())? {
        let surface = spec.build().map_err(|e| Failure::runtime(e.to_string()))?;
        let b = bounds.unwrap_or_else(|| spec.admissible_box());
        return Ok((surface, SurfaceDesc::Spec(Box::new(spec)), b));
    }
    match (&a.f, &a.g, &a.h) {
        (Some(f), Some(g), Some(h)) => {
            let surface = SeparableSurface::from_exprs(f, g, h)
                .map_err(|e| Failure::runtime(format!("expression error: {e}")))?;
            let b = bounds.unwrap_or_else(|| Box3::cube(-1.0, 1.0));
            let desc = SurfaceDesc::Exprs(ExprTriple {
                f: f.clone(),
                g: g.clone(),
                h: h.clone(),
            });
            Ok((surface, desc, b))
        }
        _ => Err(Failure::usage(
            "give a surface with --f/--g/--h, --spec or --preset",
        )),
    }
}

pub fn cmd_family(a: &FamilyArgs) -> Result<i32, Failure> {
    let spec = resolve_spec(a.spec.as_deref(), a.preset.as_deref())?
        .ok_or_else(|| Failure::usage("family needs --spec or --preset"))?;
    if a.res < 2 {
        return Err(Failure::usage("--res must be at least 2"));
    }
    let surface = spec.build().map_err(|e| Failure::runtime(e.to_string()))?;
    let bounds = parse_box(a.bounds.as_deref())?.unwrap_or_else(|| spec.admissible_box());
    let grid = GridSpec::new(bounds, a.res, a.seed);
    let mesh = marching_cubes(&surface, &grid);
    if let Some(path) = a.mesh.as_deref() {
        write_output(Some(path), &obj_string(&mesh))?;
    }
    if let Some(path) = a.report.as_deref() {
        write_output(Some(path), &report_string(&mesh))?;
    }
    if a.mesh.is_none() && a.report.is_none() {
        #[derive(Serialize)]
        struct Summary<'a> {
            surface: &'a FamilySpec,
            vertices: usize,
            triangles: usize,
            skipped_cells: usize,
            grid: &'a GridSpec,
        }
        write_output(
            None,
            &to_json(&Summary {
                surface: &spec,
                vertices: mesh.vertices.len(),
                triangles: mesh.triangles.len(),
                skipped_cells: mesh.skipped_cells,
                grid: &grid,
            }),
        )?;
    }
    Ok(EXIT_OK)
}

#[derive(Debug, Serialize)]
pub struct CurvatureReport {
    pub surface: SurfaceDesc,
    #[serde(rename = "box")]
    pub bounds: Box3,
    pub seed: u64,
    pub n_requested: usize,
    pub n_samples: usize,
    pub n_singular: usize,
    #[serde(rename = "K_mean")]
    pub k_mean: Option<f64>,
    #[serde(rename = "K_min")]
    pub k_min: Option<f64>,
    #[serde(rename = "K_max")]
    pub k_max: Option<f64>,
    #[serde(rename = "K_max_dev")]
    pub k_max_dev: Option<f64>,
}

pub fn cmd_curvature(a: &SurfaceArgs) -> Result<i32, Failure> {
    let (surface, desc, bounds) = resolve_surface(a)?;
    let points = sample_n(&surface, bounds, a.n, a.seed);
    let ks: Vec<f64> = points
        .iter()
        .filter_map(|p| gauss_curvature_separable(&surface, p).ok())
        .collect();
    let (mean, min, max, dev) = if ks.is_empty() {
        (None, None, None, None)
    } else {
        let mean = ks.iter().sum::<f64>() / ks.len() as f64;
        let min = ks.iter().cloned().fold(f64::INFINITY, f64::min);
        let max = ks.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        let dev = ks.iter().map(|k| (k - mean).abs()).fold(0.0, f64::max);
        (Some(mean), Some(min), Some(max), Some(dev))
    };
    let report = CurvatureReport {
        surface: desc,
        bounds,
        seed: a.seed,
        n_requested: a.n,
        n_samples: points.len(),
        n_singular: points.len() - ks.len(),
        k_mean: mean,
        k_min: min,
        k_max: max,
        k_max_dev: dev,
    };
    write_output(a.report.as_deref(), &to_json(&report))?;
    Ok(EXIT_OK)
}

#[derive(Debug, Serialize)]
pub struct ClassifyReport {
    pub surface: SurfaceDesc,
    pub constancy: ConstancyReport,
    pub evidence: StructureEvidence,
    pub label: Label,
    pub params: std::collections::BTreeMap<String, f64>,
    pub tolerances: Tolerances,
}

pub fn cmd_classify(a: &SurfaceArgs) -> Result<i32, Failure> {
    let (surface, desc, bounds) = resolve_surface(a)?;
    let points = sample_n(&surface, bounds, a.n, a.seed);
    let tols = Tolerances::for_surface(&surface);
    let result = classify(&surface, &points, &tols).map_err(|e| Failure::runtime(e.to_string()))?;
    let label = result.label;
    let report = ClassifyReport {
        surface: desc,
        constancy: result.constancy,
        evidence: result.evidence,
        label,
        params: result.params,
        tolerances: tols,
    };
    write_output(a.report.as_deref(), &to_json(&report))?;
    Ok(if label.is_contradiction() {
        EXIT_CONTRADICTION
    } else {
        EXIT_OK
    })
}

pub fn cmd_verify(a: &VerifyArgs) -> Result<i32, Failure> {
    let report = run_theorem_suite(a.suite, a.seed);
    write_output(a.report.as_deref(), &report.to_json())?;
    Ok(if report.passed { EXIT_OK } else { EXIT_RUNTIME })
}
