use std::f64::consts::{FRAC_PI_2, PI};

use rand::Rng;
use trunclap::pde_solver::{solve_dirichlet, DirectionSet, SolverConfig};
use trunclap::regularity::{
    condition_samples, holder_exponent_fit_field, remark_counterexample, sample_pairs,
    LogSupersolution,
};
use trunclap::sampling::rng;
use trunclap::{
    barrier, closed_form::unit_cube_eigenpair, cube_eigenpair, holder_condition_check,
    holder_exponent_fit, ConvexDomain, ConvexPolygon, CubeCover, Grid, ScalarField, WideStencil,
};

fn hexagon_cover() -> (ConvexPolygon, CubeCover) {
    let hex = ConvexPolygon::regular(6, 1.5).unwrap();
    let cover = CubeCover::from_polygon(&hex).unwrap();
    (hex, cover)
}

fn edge_points(poly: &ConvexPolygon, per_edge: usize) -> Vec<Vec<f64>> {
    let v = poly.vertices();
    let mut out = Vec::new();
    for i in 0..v.len() {
        let (a, b) = (v[i], v[(i + 1) % v.len()]);
        for k in 0..per_edge {
            let t = (k as f64 + 0.5) / per_edge as f64;
            out.push(vec![a[0] + t * (b[0] - a[0]), a[1] + t * (b[1] - a[1])]);
        }
    }
    out
}

#[test]
fn polygon_covers_contain_and_touch() {
    let mut r = rng(2);
    for (sides, radius) in [(3usize, 1.7), (5, 1.6), (6, 1.5), (9, 1.5)] {
        let poly = ConvexPolygon::regular(sides, radius).unwrap();
        let cover = CubeCover::from_polygon(&poly).unwrap();
        assert_eq!(cover.len(), sides);
        let dom = ConvexDomain::Polygon(poly.clone());
        // Containment: polygon interior lies in every cube.
        let (lo, hi) = dom.bounding_box();
        for _ in 0..2000 {
            let x = vec![r.random_range(lo[0]..hi[0]), r.random_range(lo[1]..hi[1])];
            assert_eq!(dom.contains(&x), cover.contains(&x), "{x:?}");
        }
        // Tightness: each boundary point lies on the boundary of some cube.
        for p in edge_points(&poly, 7) {
            let touch = cover
                .cubes()
                .iter()
                .map(|c| c.boundary_distance(&p).abs())
                .fold(f64::INFINITY, f64::min);
            assert!(touch < 1e-12);
        }
    }
}

#[test]
fn barrier_is_a_supersolution_for_random_parameters() {
    let (_, cover) = hexagon_cover();
    let mut r = rng(17);
    let pts = cover.sample_interior(&mut r, 1000);
    for _ in 0..5 {
        let alpha = r.random_range(0.1..5.0);
        let beta = r.random_range(0.05..=1.0);
        let rep = barrier(&cover, alpha, beta)
            .unwrap()
            .supersolution_check(&pts)
            .unwrap();
        assert!(rep.holds, "alpha={alpha} beta={beta}: {rep:?}");
    }
}

#[test]
fn barrier_holder_quotient_is_bounded() {
    let (_, cover) = hexagon_cover();
    let pairs = sample_pairs(&cover, 3000, 4);
    for (alpha, beta) in [(1.0, 1.0), (0.3, 0.5), (2.0, 0.1)] {
        let rep = barrier(&cover, alpha, beta)
            .unwrap()
            .holder_bound_check(&pairs);
        assert!(rep.holds, "{rep:?}");
        assert!(rep.max_quotient > 0.0);
    }
}

#[test]
fn barrier_vanishes_on_the_boundary() {
    let (hex, cover) = hexagon_cover();
    let b = barrier(&cover, 1.3, 0.7).unwrap();
    for p in edge_points(&hex, 11) {
        // Boundary points carry rounding of order 1e-16; the Hölder bound
        // turns that into the admissible value.
        let slack = b.holder_bound() * (4.0 * f64::EPSILON).powf(b.holder_exponent());
        assert!(b.value(&p) <= slack, "{p:?}: {}", b.value(&p));
    }
    assert!(b.value(&[0.0, 0.0]) > 0.0);
}

#[test]
fn condition_check_examples() {
    let (_, cover) = hexagon_cover();
    let pts = condition_samples(&cover, 500, 9);
    let (alpha, beta) = (0.8, 0.6);
    assert!(
        holder_condition_check(|_| 0.0, &cover, alpha, beta, &pts)
            .unwrap()
            .holds
    );
    let field = barrier(&cover, alpha, beta).unwrap();
    let exact = |x: &[f64]| -alpha * field.inf_eigenfunction(x).powf(beta);
    assert!(
        holder_condition_check(exact, &cover, alpha, beta, &pts)
            .unwrap()
            .holds
    );
    let rep = holder_condition_check(|_| -1.0, &cover, alpha, beta, &pts).unwrap();
    assert!(!rep.holds);
    assert!(cover.boundary_distance(&rep.argmin) < 1e-3);
}

#[test]
fn numerical_solution_stays_below_the_barrier() {
    let (hex, cover) = hexagon_cover();
    let (alpha, beta) = (1.0, 0.5);
    let b = barrier(&cover, alpha, beta).unwrap();
    let grid = Grid::new(ConvexDomain::Polygon(hex), 0.04).unwrap();
    let op = WideStencil::new(grid.clone(), DirectionSet::new(2, 3).unwrap()).unwrap();
    let f = ScalarField::sample(&grid, |x| {
        -alpha * b.inf_eigenfunction(x).powf(beta) * (0.5 + 0.5 * (3.0 * x[0]).cos().abs())
    });
    let u = solve_dirichlet(&op, &f, SolverConfig::default())
        .unwrap()
        .field;
    let ubar = ScalarField::sample(&grid, |x| b.value(x));
    let worst = u
        .values()
        .iter()
        .zip(ubar.values())
        .fold(f64::NEG_INFINITY, |m, (a, c)| m.max(a - c));
    assert!(worst <= 1e-2 * ubar.sup_norm(), "{worst}");
}

#[test]
fn cube_eigenfunction_exponent_along_a_face_normal() {
    for n in [2usize, 3, 4] {
        let pair = unit_cube_eigenpair(n).unwrap();
        let mut base = vec![0.0; n];
        base[0] = -FRAC_PI_2;
        let mut inward = vec![0.0; n];
        inward[0] = 1.0;
        let fit = holder_exponent_fit(|x| pair.value(x), &base, &inward, 1e-6, 1e-2, 20).unwrap();
        let expected = 1.0 / n as f64;
        assert!(
            (fit.exponent - expected).abs() < 1e-3 * expected,
            "{n}: {}",
            fit.exponent
        );
    }
}

#[test]
fn affine_ramp_has_exponent_one() {
    let fit =
        holder_exponent_fit(|x| x[1] + 1.0, &[0.3, -1.0], &[0.0, 2.0], 1e-4, 0.5, 12).unwrap();
    assert!((fit.exponent - 1.0).abs() < 1e-6);
    assert!(holder_exponent_fit(|x| x[0], &[0.0], &[1.0], 1e-4, 0.5, 4).is_err());
}

#[test]
fn exponent_fit_on_sampled_grid_field() {
    let pair = cube_eigenpair(2, FRAC_PI_2).unwrap();
    let grid = Grid::new(
        ConvexDomain::cuboid(vec![FRAC_PI_2; 2]).unwrap(),
        PI / 256.0,
    )
    .unwrap();
    let u = ScalarField::sample(&grid, |x| pair.value(x));
    let fit = holder_exponent_fit_field(&grid, &u, &[FRAC_PI_2, 0.0], 0, -1.0, 0.1).unwrap();
    assert!((fit.exponent - 0.5).abs() < 0.025, "{}", fit.exponent);
    assert!(
        holder_exponent_fit_field(&grid, &u, &[FRAC_PI_2, 0.0], 0, -1.0, 4.0 * grid.h()).is_err()
    );
}

#[test]
fn log_supersolution_is_concave_for_large_sigma() {
    for n in 1..=3 {
        let rep = remark_counterexample(n, 2.0 * n as f64, 1000, 1000, 5).unwrap();
        assert!(rep.concave && rep.max_form <= 1e-8, "{rep:?}");
        assert!(rep.max_eigenvalue <= 1e-12);
        assert!((rep.value_at_origin - 0.5 / n as f64).abs() < 1e-15);
        for q in &rep.quotients {
            assert!(q.increasing, "{q:?}");
        }
    }
}

#[test]
fn log_supersolution_loses_concavity_below_the_sharp_sigma() {
    // Per coordinate 2 sin^2 + log cos peaks at 3/2 - ln 2 (cos = 1/2).
    for n in 1..=3 {
        let sharp = n as f64 * (1.5 - 2f64.ln());
        let rep = remark_counterexample(n, 0.8 * sharp, 1000, 1000, 5).unwrap();
        assert!(!rep.concave, "{rep:?}");
        let rep = remark_counterexample(n, 1.01 * sharp, 1000, 1000, 5).unwrap();
        assert!(rep.max_eigenvalue < 0.0, "{rep:?}");
    }
}

#[test]
fn log_supersolution_hessian_matches_finite_differences() {
    let u = LogSupersolution::new(3, 4.0).unwrap();
    let x = [0.4, -1.1, 0.9];
    let h = u.hessian(&x).unwrap();
    let e = 1e-4;
    for i in 0..3 {
        for j in 0..3 {
            let shift = |si: f64, sj: f64| {
                let mut y = x;
                y[i] += si * e;
                y[j] += sj * e;
                u.value(&y)
            };
            let fd = (shift(1.0, 1.0) - shift(1.0, -1.0) - shift(-1.0, 1.0) + shift(-1.0, -1.0))
                / (4.0 * e * e);
            assert!(
                (fd - h.get(i, j)).abs() < 1e-6,
                "{i}{j}: {fd} vs {}",
                h.get(i, j)
            );
        }
    }
}
