use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

/// Truncated Laplacian toolkit: closed-form eigenpairs, domain comparisons,
/// numerical eigenvalues and boundary regularity checks.
#[derive(Parser, Debug)]
#[command(name = "trunclap", version, about, long_about = None)]
pub struct Cli {
    /// Seed for every sampled quantity.
    #[arg(long, global = true, default_value_t = 42)]
    pub seed: u64,

    /// Worker threads (falls back to TRUNCLAP_THREADS, then the rayon default).
    #[arg(long, global = true, env = "TRUNCLAP_THREADS")]
    pub threads: Option<usize>,

    /// Report destination; stdout when omitted.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,

    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    pub format: Format,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Format {
    Json,
    Csv,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Exact principal eigenpair on a cube, rectangle or ball, with a residual audit.
    EigenClosed(EigenClosedArgs),
    /// Principal eigenvalue of P+_1 from the wide-stencil scheme.
    EigenNumeric(EigenNumericArgs),
    /// Rectangle of equal measure against the cube.
    Fk(FkArgs),
    /// Ball of equal measure against the cube.
    Fk2(Fk2Args),
    /// Translated intersection of two rectangles against the sum of their eigenvalues.
    Lieb(LiebArgs),
    /// Certificate that the product candidate fails for 2 <= k <= n-1.
    Counterexample(CounterexampleArgs),
    /// Barrier supersolution and Hölder bound on a cube cover.
    Holder(HolderArgs),
    /// Concavity and boundary quotients of the logarithmic supersolution.
    Remark(RemarkArgs),
    /// Solve P+_1(D^2u) = f for constant f across resolutions and report the boundary layer.
    Explore(ExploreArgs),
}

/// Parses `1.5`, `pi`, `2pi`, `2*pi`, `pi/128`, `3*pi/2`.
pub fn parse_expr(s: &str) -> Result<f64, String> {
    let t = s.trim().to_ascii_lowercase();
    let (num, den) = match t.split_once('/') {
        Some((a, b)) => (a.trim(), Some(b.trim())),
        None => (t.as_str(), None),
    };
    let factor = |x: &str| -> Result<f64, String> {
        let x = x.trim();
        if let Some(rest) = x.strip_suffix("pi") {
            let rest = rest.trim().trim_end_matches('*').trim();
            let k = if rest.is_empty() {
                1.0
            } else if rest == "-" {
                -1.0
            } else {
                rest.parse::<f64>()
                    .map_err(|e| format!("bad number '{rest}': {e}"))?
            };
            Ok(k * std::f64::consts::PI)
        } else {
            x.parse::<f64>()
                .map_err(|e| format!("bad number '{x}': {e}"))
        }
    };
    let mut v = factor(num)?;
    if let Some(d) = den {
        let d = factor(d)?;
        if d == 0.0 {
            return Err("division by zero".into());
        }
        v /= d;
    }
    if !v.is_finite() {
        return Err(format!("'{s}' is not finite"));
    }
    Ok(v)
}

pub fn parse_positive(s: &str) -> Result<f64, String> {
    let v = parse_expr(s)?;
    if v > 0.0 {
        Ok(v)
    } else {
        Err(format!("'{s}' must be positive"))
    }
}

/// Comma-separated list of expressions.
pub fn parse_list(s: &str) -> Result<Vec<f64>, String> {
    s.split(',').map(parse_expr).collect()
}

pub fn parse_positive_list(s: &str) -> Result<Vec<f64>, String> {
    let v = parse_list(s)?;
    if v.iter().all(|x| *x > 0.0) {
        Ok(v)
    } else {
        Err(format!("'{s}' must contain positive values"))
    }
}

/// `x,y;x,y;...`
pub fn parse_vertices(s: &str) -> Result<Vec<[f64; 2]>, String> {
    s.split(';')
        .map(|p| {
            let c = parse_list(p)?;
            match c.as_slice() {
                [x, y] => Ok([*x, *y]),
                _ => Err(format!("vertex '{p}' needs two coordinates")),
            }
        })
        .collect()
}

#[derive(Args, Debug, Clone, Serialize)]
#[group(required = true, multiple = false)]
pub struct ShapeChoice {
    /// Cube of side `--side`.
    #[arg(long)]
    pub cube: bool,
    /// Rectangle with these anisotropy entries (half widths side/(2 alpha_i)).
    #[arg(long, value_parser = parse_positive_list)]
    pub rect: Option<std::vec::Vec<f64>>,
    /// Ball of radius `--rho`.
    #[arg(long)]
    pub ball: bool,
}

#[derive(Args, Debug, Clone, Serialize)]
pub struct EigenClosedArgs {
    #[command(flatten)]
    pub shape: ShapeChoice,
    /// Dimension (cube and ball).
    #[arg(short = 'n', long, default_value_t = 2)]
    pub dim: usize,
    /// Side length of the reference cube.
    #[arg(long, default_value = "pi", value_parser = parse_positive)]
    pub side: f64,
    #[arg(long, default_value = "pi/2", value_parser = parse_positive)]
    pub rho: f64,
    /// Order of the truncated operator (ball only; boxes use k = 1).
    #[arg(short = 'k', long, default_value_t = 1)]
    pub order: usize,
    /// Interior points in the residual audit.
    #[arg(long, default_value_t = 1000)]
    pub samples: usize,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum MethodArg {
    Howard,
    Jacobi,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum SnapshotFormat {
    Binary,
    Csv,
}

#[derive(Args, Debug, Clone, Serialize)]
#[group(required = true, multiple = false)]
pub struct DomainChoice {
    #[arg(long)]
    pub cube: bool,
    #[arg(long, value_parser = parse_positive_list)]
    pub rect: Option<std::vec::Vec<f64>>,
    #[arg(long)]
    pub ball: bool,
    /// Convex polygon `x,y;x,y;...`.
    #[arg(long, value_parser = parse_vertices)]
    pub polygon: Option<std::vec::Vec<[f64; 2]>>,
}

#[derive(Args, Debug, Clone, Serialize)]
pub struct GridArgs {
    #[command(flatten)]
    pub domain: DomainChoice,
    /// Dimension for `--cube` and `--ball` (2 or 3).
    #[arg(short = 'n', long, default_value_t = 2)]
    pub dim: usize,
    #[arg(long, default_value = "pi", value_parser = parse_positive)]
    pub side: f64,
    #[arg(long, default_value = "pi/2", value_parser = parse_positive)]
    pub rho: f64,
    /// Grid spacing.
    #[arg(long = "spacing", alias = "h", default_value = "pi/64", value_parser = parse_positive)]
    pub spacing: f64,
    /// Stencil order r (default 4 in 2D, 3 in 3D).
    #[arg(short = 'r', long)]
    pub order: Option<u32>,
    #[arg(long, value_enum, default_value_t = MethodArg::Howard)]
    pub method: MethodArg,
    /// Fraction of the local stability limit (damped Jacobi).
    #[arg(long, default_value_t = 0.9)]
    pub damping: f64,
    /// Solver tolerance.
    #[arg(long, default_value_t = 1e-12)]
    pub solver_tol: f64,
    #[arg(long, default_value_t = 200)]
    pub solver_max_iter: usize,
}

#[derive(Args, Debug, Clone, Serialize)]
pub struct EigenNumericArgs {
    #[command(flatten)]
    pub grid: GridArgs,
    /// Relative change of successive estimates that stops the iteration.
    #[arg(long, default_value_t = 1e-10)]
    pub tol: f64,
    #[arg(long, default_value_t = 300)]
    pub max_iter: usize,
    /// Refinement sweep over these spacings instead of `--spacing`.
    #[arg(long, value_parser = parse_positive_list)]
    pub refine: Option<std::vec::Vec<f64>>,
    /// Write the eigenfield of the (finest) run here.
    #[arg(long)]
    pub snapshot: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = SnapshotFormat::Binary)]
    pub snapshot_format: SnapshotFormat,
    /// Fail with exit code 2 when the relative error to the exact value exceeds this.
    #[arg(long)]
    pub max_rel_error: Option<f64>,
}

#[derive(Args, Debug, Clone, Serialize)]
pub struct FkArgs {
    #[arg(long, value_parser = parse_positive_list)]
    pub alpha: std::vec::Vec<f64>,
    #[arg(long, default_value = "pi", value_parser = parse_positive)]
    pub side: f64,
    /// Rescale alpha to unit product first.
    #[arg(long)]
    pub normalize: bool,
}

#[derive(Args, Debug, Clone, Serialize)]
pub struct Fk2Args {
    /// Dimensions to compare (default 2..=10).
    #[arg(short = 'n', long, value_delimiter = ',')]
    pub dims: Vec<usize>,
    #[arg(long, default_value = "pi", value_parser = parse_positive)]
    pub side: f64,
}

#[derive(Args, Debug, Clone, Serialize)]
pub struct LiebArgs {
    /// Two entries `a1 <= a2` in the plane, or `N >= 3` ascending entries.
    #[arg(long, value_parser = parse_positive_list)]
    pub alpha: std::vec::Vec<f64>,
    #[arg(long, default_value = "pi", value_parser = parse_positive)]
    pub side: f64,
}

#[derive(Args, Debug, Clone, Serialize)]
pub struct CounterexampleArgs {
    #[arg(short = 'n', long)]
    pub dim: usize,
    #[arg(short = 'k', long)]
    pub order: usize,
    #[arg(short = 'a', long, default_value = "1", value_parser = parse_positive)]
    pub a: f64,
    #[arg(short = 'b', long, default_value = "2", value_parser = parse_positive)]
    pub b: f64,
    #[arg(long, default_value = "pi", value_parser = parse_positive)]
    pub side: f64,
    /// Random frames compared against P+_k at the certificate point.
    #[arg(long, default_value_t = 10_000)]
    pub frames: usize,
}

#[derive(Args, Debug, Clone, Serialize)]
#[group(multiple = false)]
pub struct CoverChoice {
    /// Cover of this convex polygon `x,y;x,y;...`.
    #[arg(long, value_parser = parse_vertices)]
    pub polygon: Option<std::vec::Vec<[f64; 2]>>,
    /// Regular polygon `sides,radius`.
    #[arg(long, value_parser = parse_list)]
    pub regular: Option<std::vec::Vec<f64>>,
    /// Circumscribed polygon of a disc `radius,faces`.
    #[arg(long, value_parser = parse_list)]
    pub disc: Option<std::vec::Vec<f64>>,
}

#[derive(Args, Debug, Clone, Serialize)]
pub struct HolderArgs {
    /// Unit cube cover in this dimension when no polygon is given.
    #[arg(short = 'n', long, default_value_t = 2)]
    pub dim: usize,
    #[command(flatten)]
    pub cover: CoverChoice,
    #[arg(long, default_value_t = 1.0)]
    pub alpha: f64,
    #[arg(long, default_value_t = 1.0)]
    pub beta: f64,
    #[arg(long, default_value_t = 1000)]
    pub samples: usize,
    #[arg(long, default_value_t = 10_000)]
    pub pairs: usize,
    /// Window for the boundary exponent fit of the cube eigenfunction.
    #[arg(long, default_value_t = 1e-2)]
    pub window: f64,
}

#[derive(Args, Debug, Clone, Serialize)]
pub struct RemarkArgs {
    #[arg(short = 'n', long, default_value_t = 2)]
    pub dim: usize,
    /// Defaults to 2n.
    #[arg(long)]
    pub sigma: Option<f64>,
    #[arg(long, default_value_t = 1000)]
    pub samples: usize,
    #[arg(long, default_value_t = 1000)]
    pub directions: usize,
}

#[derive(Args, Debug, Clone, Serialize)]
pub struct ExploreArgs {
    #[command(flatten)]
    pub grid: GridArgs,
    /// Constant right-hand side.
    #[arg(long = "f", default_value = "-1", value_parser = parse_expr, allow_hyphen_values = true)]
    pub f_value: f64,
    /// Spacings to compare.
    #[arg(long, default_value = "pi/16,pi/32,pi/64", value_parser = parse_positive_list)]
    pub refine: std::vec::Vec<f64>,
}
