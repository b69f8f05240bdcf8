use std::fs::File;
use std::io::BufWriter;

use serde::Serialize;
use serde_json::{json, Value};
use trunclap::closed_form::{product_candidate, radial_convexity_check};
use trunclap::comparisons::{
    fk2_check, fk_check, lieb_reversal_2d, lieb_reversal_nd, normalize_measure,
};
use trunclap::matrix_core::{frame_sum, Frame};
use trunclap::pde_solver::{
    eigen_inverse_power, DirectionSet, DirichletSolver, EigenConfig, SolveMethod, SolverConfig,
};
use trunclap::regularity::{holder_exponent_fit_field, sample_pairs};
use trunclap::sampling::{halton_box, rng};
use trunclap::{
    ball_eigenpair, barrier, cube_eigenpair, holder_exponent_fit, pk_plus, product_counterexample,
    rect_eigenpair, remark_counterexample, residual, BoxSpec, ConvexDomain, ConvexPolygon,
    CubeCover, Error, Grid, ScalarField, WideStencil,
};

use crate::args::*;
use crate::output::Report;

pub type CmdResult = Result<Report, Error>;

fn usage(msg: impl Into<String>) -> Error {
    Error::Parameter(msg.into())
}

pub fn eigen_closed(args: &EigenClosedArgs) -> CmdResult {
    let r = args.side / 2.0;
    let (kind, pair, points, tolerance) = if args.shape.cube {
        let pair = cube_eigenpair(args.dim, r)?;
        let pts = halton_box(&vec![r; args.dim], args.samples);
        ("cube", pair, pts, 1e-10)
    } else if let Some(alpha) = &args.shape.rect {
        let spec = BoxSpec::new(r, alpha.clone())?;
        let pts = halton_box(&spec.half_extents(), args.samples);
        ("rect", rect_eigenpair(&spec)?, pts, 1e-10)
    } else {
        let pair = ball_eigenpair(args.dim, args.order, args.rho)?;
        let pts: Vec<Vec<f64>> = halton_box(
            &vec![args.rho; args.dim],
            4 * args.samples.max(1) * (1 << args.dim.min(10)),
        )
        .into_iter()
        .filter(|x| x.iter().map(|c| c * c).sum::<f64>().sqrt() < args.rho * (1.0 - 1e-9))
        .take(args.samples)
        .collect();
        ("ball", pair, pts, 1e-8)
    };
    let order = if args.shape.ball { args.order } else { 1 };
    let mut worst: f64 = 0.0;
    for x in &points {
        worst = worst.max(residual(&pair, x, order)?.abs());
    }
    let convexity = if args.shape.ball {
        Some(radial_convexity_check(&pair, args.samples.max(10))?)
    } else {
        None
    };
    let result = json!({
        "domain": kind,
        "dim": pair.dim(),
        "order": order,
        "mu": pair.mu,
        "exponents": pair.exponents,
        "kappa": pair.kappa,
        "audit_samples": points.len(),
        "max_abs_residual": worst,
        "audit_tolerance": tolerance,
        "radial_convexity_min_gap": convexity.as_ref().map(|c| c.min_gap),
    });
    Ok(Report::new("eigen-closed", args, &result).check(
        worst <= tolerance,
        format!("residual audit {worst:e} exceeds {tolerance:e}"),
    ))
}

struct Resolved {
    domain: ConvexDomain,
    exact: Option<f64>,
    order: u32,
}

fn resolve_domain(g: &GridArgs) -> Result<Resolved, Error> {
    let r = g.side / 2.0;
    let (domain, exact) = if g.domain.cube {
        (
            ConvexDomain::cuboid(vec![r; g.dim])?,
            Some(cube_eigenpair(g.dim, r)?.mu),
        )
    } else if let Some(alpha) = &g.domain.rect {
        let spec = BoxSpec::new(r, alpha.clone())?;
        (
            ConvexDomain::cuboid(spec.half_extents())?,
            Some(rect_eigenpair(&spec)?.mu),
        )
    } else if g.domain.ball {
        (
            ConvexDomain::ball(g.dim, g.rho)?,
            Some(ball_eigenpair(g.dim, 1, g.rho)?.mu),
        )
    } else if let Some(v) = &g.domain.polygon {
        (ConvexDomain::Polygon(ConvexPolygon::new(v.clone())?), None)
    } else {
        return Err(usage("choose a domain"));
    };
    let dim = domain.dim();
    if !(2..=3).contains(&dim) {
        return Err(usage("the grid solver supports dimensions 2 and 3"));
    }
    let order = g.order.unwrap_or(if dim == 2 { 4 } else { 3 });
    Ok(Resolved {
        domain,
        exact,
        order,
    })
}

fn solver_config(g: &GridArgs) -> SolverConfig {
    SolverConfig {
        method: match g.method {
            MethodArg::Howard => SolveMethod::Howard,
            MethodArg::Jacobi => SolveMethod::DampedJacobi,
        },
        damping: g.damping,
        tolerance: g.solver_tol,
        max_iterations: g.solver_max_iter,
    }
}

#[derive(Serialize)]
struct ResolvedEcho<'a, T: Serialize> {
    #[serde(flatten)]
    args: &'a T,
    resolved_order: u32,
}

pub fn eigen_numeric(args: &EigenNumericArgs) -> CmdResult {
    let res = resolve_domain(&args.grid)?;
    let cfg = EigenConfig {
        solver: solver_config(&args.grid),
        tolerance: args.tol,
        max_iterations: args.max_iter,
        window: 5,
    };
    let spacings = args
        .refine
        .clone()
        .unwrap_or_else(|| vec![args.grid.spacing]);
    let dirs = DirectionSet::new(res.domain.dim(), res.order)?;
    let mut rows = Vec::new();
    let mut finest: Option<(f64, trunclap::EigenEstimate)> = None;
    for &h in &spacings {
        let grid = Grid::new(res.domain.clone(), h)?;
        let op = WideStencil::new(grid, dirs.clone())?;
        let est = eigen_inverse_power(&op, cfg)?;
        let rel = res.exact.map(|e| (est.mu_h - e).abs() / e);
        rows.push(json!({
            "h": h,
            "nodes": op.len(),
            "mu_h": est.mu_h,
            "rel_error": rel,
            "iterations": est.iterations,
            "factorizations": est.factorizations,
        }));
        if finest.as_ref().is_none_or(|(fh, _)| h < *fh) {
            finest = Some((h, est));
        }
    }
    let (h, est) = finest.expect("at least one spacing");
    if let Some(path) = &args.snapshot {
        let file = BufWriter::new(
            File::create(path).map_err(|e| usage(format!("{}: {e}", path.display())))?,
        );
        let written = match args.snapshot_format {
            SnapshotFormat::Binary => est.eigenfield.write_binary(file),
            SnapshotFormat::Csv => est.eigenfield.write_csv(file),
        };
        written.map_err(|e| usage(format!("{}: {e}", path.display())))?;
    }
    let rel = res.exact.map(|e| (est.mu_h - e).abs() / e);
    let result = json!({
        "dim": res.domain.dim(),
        "order": res.order,
        "h": h,
        "mu_h": est.mu_h,
        "mu_exact": res.exact,
        "rel_error": rel,
        "iterations": est.iterations,
        "mu_history": est.mu_history,
        "residual_history": est.residual_history,
    });
    let echo = ResolvedEcho {
        args,
        resolved_order: res.order,
    };
    let mut report = Report::new("eigen-numeric", &echo, &result);
    if args.refine.is_some() {
        report = report.with_table(rows);
    }
    Ok(match (args.max_rel_error, rel) {
        (Some(limit), Some(err)) => report.check(
            err <= limit,
            format!("relative error {err:e} exceeds {limit:e}"),
        ),
        (Some(_), None) => {
            return Err(usage(
                "--max-rel-error needs a domain with a known eigenvalue",
            ))
        }
        _ => report,
    })
}

pub fn fk(args: &FkArgs) -> CmdResult {
    let alpha = if args.normalize {
        normalize_measure(&args.alpha)
    } else {
        args.alpha.clone()
    };
    let rep = fk_check(&alpha, args.side / 2.0)?;
    let ok = rep.holds;
    Ok(Report::new("fk", args, &rep)
        .check(ok, "rectangle eigenvalue does not stay below the cube's"))
}

pub fn fk2(args: &Fk2Args) -> CmdResult {
    let dims = if args.dims.is_empty() {
        (2..=10).collect()
    } else {
        args.dims.clone()
    };
    let reps = dims
        .iter()
        .map(|&n| fk2_check(n, args.side / 2.0))
        .collect::<Result<Vec<_>, _>>()?;
    let ok = reps.iter().all(|r| r.holds);
    let rows: Vec<Value> = reps
        .iter()
        .map(|r| serde_json::to_value(r).expect("serialise"))
        .collect();
    Ok(Report::new("fk2", args, &json!({ "all_hold": ok }))
        .with_table(rows)
        .check(ok, "ball eigenvalue does not exceed the cube's"))
}

pub fn lieb(args: &LiebArgs) -> CmdResult {
    let r = args.side / 2.0;
    let rep = match args.alpha.as_slice() {
        [a1, a2] => lieb_reversal_2d(*a1, *a2, r)?,
        a if a.len() >= 3 => lieb_reversal_nd(a, r)?,
        _ => return Err(usage("--alpha needs at least two entries")),
    };
    let ok = rep.reversed;
    Ok(Report::new("lieb", args, &rep)
        .check(ok, "the intersection does not reverse the inequality"))
}

pub fn counterexample(args: &CounterexampleArgs, seed: u64) -> CmdResult {
    let r = args.side / 2.0;
    let cert = product_counterexample(args.dim, args.order, r, args.a, args.b)?;
    let pair = product_candidate(args.dim, args.order, r)?;
    let hess = pair.hessian(&cert.point)?;
    let top = pk_plus(&hess, args.order)?;
    let mut rg = rng(seed);
    let mut best = f64::NEG_INFINITY;
    for _ in 0..args.frames {
        let f = Frame::random(&mut rg, args.dim, args.order);
        best = best.max(frame_sum(&hess, &f)?);
    }
    let frames_ok = best <= top + 1e-10 * (1.0 + hess.max_abs());
    let mut result = serde_json::to_value(&cert).expect("serialise");
    if let Value::Object(m) = &mut result {
        m.insert("pk_plus".into(), top.into());
        m.insert(
            "max_random_frame_sum".into(),
            if best.is_finite() {
                best.into()
            } else {
                Value::Null
            },
        );
        m.insert("random_frames".into(), args.frames.into());
    }
    let ok = cert.holds && frames_ok;
    Ok(Report::new("counterexample", args, &result).check(
        ok,
        format!(
            "certificate holds={} frames below P+_k={}",
            cert.holds, frames_ok
        ),
    ))
}

fn build_cover(args: &HolderArgs) -> Result<CubeCover, Error> {
    let c = &args.cover;
    if let Some(v) = &c.polygon {
        CubeCover::from_polygon(&ConvexPolygon::new(v.clone())?)
    } else if let Some(p) = &c.regular {
        match p.as_slice() {
            [sides, radius] if *sides >= 3.0 && sides.fract() == 0.0 => {
                CubeCover::from_polygon(&ConvexPolygon::regular(*sides as usize, *radius)?)
            }
            _ => Err(usage(
                "--regular expects sides,radius with integer sides >= 3",
            )),
        }
    } else if let Some(p) = &c.disc {
        match p.as_slice() {
            [radius, faces] if faces.fract() == 0.0 && *faces >= 3.0 => {
                CubeCover::from_disc(*radius, *faces as usize)
            }
            _ => Err(usage("--disc expects radius,faces with integer faces >= 3")),
        }
    } else {
        CubeCover::unit(args.dim)
    }
}

pub fn holder(args: &HolderArgs, seed: u64) -> CmdResult {
    let cover = build_cover(args)?;
    let field = barrier(&cover, args.alpha, args.beta)?;
    let points = cover.sample_interior(&mut rng(seed), args.samples);
    let sup = field.supersolution_check(&points)?;
    let pairs = sample_pairs(&cover, args.pairs, seed.wrapping_add(1));
    let bound = field.holder_bound_check(&pairs);
    let n = cover.dim();
    let pair = cube_eigenpair(n, std::f64::consts::FRAC_PI_2)?;
    let mut base = vec![0.0; n];
    base[0] = std::f64::consts::FRAC_PI_2;
    let mut inward = vec![0.0; n];
    inward[0] = -1.0;
    let fit = holder_exponent_fit(|x| pair.value(x), &base, &inward, 1e-6, args.window, 20)?;
    let ok = sup.holds && bound.holds;
    let result = json!({
        "cubes": cover.len(),
        "cover": cover,
        "supersolution": sup,
        "holder_bound": bound,
        "eigenfunction_exponent": fit.exponent,
        "expected_exponent": 1.0 / n as f64,
    });
    Ok(Report::new("holder", args, &result).check(
        ok,
        format!(
            "supersolution holds={} Hölder bound holds={}",
            sup.holds, bound.holds
        ),
    ))
}

pub fn remark(args: &RemarkArgs, seed: u64) -> CmdResult {
    let sigma = args.sigma.unwrap_or(2.0 * args.dim as f64);
    let rep = remark_counterexample(args.dim, sigma, args.samples, args.directions, seed)?;
    let growth = rep.quotients.iter().all(|q| q.increasing);
    let ok = rep.concave && growth;
    let rows: Vec<Value> = rep
        .quotients
        .iter()
        .flat_map(|q| {
            q.distances
                .iter()
                .zip(&q.quotients)
                .map(move |(d, v)| json!({"gamma": q.gamma, "distance": d, "quotient": v}))
        })
        .collect();
    let echo = json!({"dim": args.dim, "sigma": sigma, "samples": args.samples, "directions": args.directions});
    Ok(Report::new("remark", &echo, &rep).with_table(rows).check(
        ok,
        format!("concave={} quotients increasing={}", rep.concave, growth),
    ))
}

pub fn explore(args: &ExploreArgs) -> CmdResult {
    let res = resolve_domain(&args.grid)?;
    let dirs = DirectionSet::new(res.domain.dim(), res.order)?;
    let cfg = solver_config(&args.grid);
    let mut rows = Vec::new();
    let mut sups = Vec::new();
    for &h in &args.refine {
        let grid = Grid::new(res.domain.clone(), h)?;
        let op = WideStencil::new(grid.clone(), dirs.clone())?;
        let f = vec![args.f_value; op.len()];
        let sol = DirichletSolver::new(&op, cfg)?.solve(&f)?;
        let u = &sol.field;
        let centre = grid
            .nearest_node(&vec![0.0; grid.dim()])
            .map(|i| u.values()[i]);
        // Boundary behaviour along the first axis for boxes.
        let exponent = match &res.domain {
            ConvexDomain::Box { half } => {
                let mut base = vec![0.0; half.len()];
                base[0] = half[0];
                holder_exponent_fit_field(&grid, &magnitude(u), &base, 0, -1.0, 10.0 * h)
                    .ok()
                    .map(|f| f.exponent)
            }
            _ => None,
        };
        sups.push(u.sup_norm());
        rows.push(json!({
            "h": h,
            "nodes": op.len(),
            "sup_abs_u": u.sup_norm(),
            "center_value": centre,
            "boundary_exponent": exponent,
            "iterations": sol.iterations,
            "final_residual": sol.residual_history.last(),
        }));
    }
    let growth: Vec<f64> = sups.windows(2).map(|w| w[1] / w[0]).collect();
    let result = json!({
        "dim": res.domain.dim(),
        "order": res.order,
        "f": args.f_value,
        "sup_growth_ratios": growth,
    });
    Ok(Report::new("explore", args, &result).with_table(rows))
}

fn magnitude(u: &ScalarField) -> ScalarField {
    let mut v = u.clone();
    v.values_mut().iter_mut().for_each(|x| *x = x.abs());
    v
}
