use std::f64::consts::PI;

use rand::Rng;
use statrs::function::gamma::gamma;
use trunclap::comparisons::{
    fk_check, intersection_inf_search, lieb_reversal_2d, normalize_measure, unit_ball_volume,
};
use trunclap::sampling::rng;
use trunclap::{rect_eigenpair, BoxSpec};

#[test]
fn random_rectangles_never_beat_the_cube() {
    let mut r = rng(42);
    for i in 0..10_000 {
        let n = 2 + i % 5;
        let raw: Vec<f64> = (0..n).map(|_| r.random_range(0.2..5.0)).collect();
        let alpha = normalize_measure(&raw);
        let rep = fk_check(&alpha, 1.0).unwrap();
        assert!(rep.holds && !rep.is_equality, "{rep:?}");
        assert!(rep.mu_rect < rep.mu_cube);
        // AM-GM on 1/alpha_i^2 with prod alpha_i = 1, computed without the report.
        let s: f64 = alpha.iter().map(|a| 1.0 / (a * a)).sum();
        assert!(s >= n as f64 * (1.0 - 1e-12));
        assert!(rep.harmonic_mean <= rep.geometric_mean * (1.0 + 1e-12));
    }
    let rep = fk_check(&[1.0; 4], 1.0).unwrap();
    assert!(rep.holds && rep.is_equality);
}

#[test]
fn ball_volume_recursion_matches_gamma() {
    for n in 1..=20 {
        let nf = n as f64;
        let expected = PI.powf(nf / 2.0) / gamma(nf / 2.0 + 1.0);
        let got = unit_ball_volume(n).unwrap();
        assert!(
            (got - expected).abs() <= 1e-10 * expected,
            "n={n}: {got} vs {expected}"
        );
    }
}

#[test]
fn planar_reversal_agrees_with_explicit_rectangles() {
    let mut r = rng(7);
    for _ in 0..1000 {
        let a1 = r.random_range(0.2..3.0);
        let a2 = a1 * r.random_range(1.0..4.0);
        let radius = r.random_range(0.5..2.0);
        let rep = lieb_reversal_2d(a1, a2, radius).unwrap();
        let a = rect_eigenpair(&BoxSpec::new(radius, vec![a1, a2]).unwrap()).unwrap();
        let b = rect_eigenpair(&BoxSpec::new(radius, vec![a2, a1]).unwrap()).unwrap();
        let inter = rect_eigenpair(&BoxSpec::new(radius, vec![a2, a2]).unwrap()).unwrap();
        assert!((rep.mu_a - a.mu).abs() <= 1e-12 * a.mu);
        assert!((rep.mu_b - b.mu).abs() <= 1e-12 * b.mu);
        assert!((rep.mu_intersection_inf - inter.mu).abs() <= 1e-12 * inter.mu);
        let reversed = inter.mu > a.mu + b.mu;
        if (a2 * a2 - 3.0 * a1 * a1).abs() > 1e-9 {
            assert_eq!(rep.reversed, reversed);
        }
    }
}

#[test]
fn translation_search_cross_checks_the_centred_intersection() {
    let radius = 1.0;
    let (a1, a2) = (1.0, 2.0);
    let half_a = [radius / a1, radius / a2];
    let half_b = [radius / a2, radius / a1];
    let searched = intersection_inf_search(&half_a, &half_b, 201).unwrap();
    let rep = lieb_reversal_2d(a1, a2, radius).unwrap();
    assert!((searched - rep.mu_intersection_inf).abs() <= 1e-12 * searched);
}

#[test]
fn ball_to_cube_ratios() {
    use trunclap::comparisons::fk2_check;
    for n in 2..=10 {
        let nf = n as f64;
        let omega = PI.powf(nf / 2.0) / gamma(nf / 2.0 + 1.0);
        let rep = fk2_check(n, 0.8).unwrap();
        let expected = nf * omega.powf(2.0 / nf) / 4.0;
        assert!((rep.ratio - expected).abs() <= 1e-12 * expected);
        assert!((rep.mu_ball / rep.mu_cube - expected).abs() <= 1e-12 * expected);
        assert!((rep.ball_measure - rep.cube_measure).abs() <= 1e-12 * rep.cube_measure);
        assert!(rep.holds);
    }
    assert!((fk2_check(2, 1.0).unwrap().ratio - PI / 2.0).abs() < 1e-15);
    // 3 (4 pi / 3)^{2/3} / 4
    assert!((fk2_check(3, 1.0).unwrap().ratio - 1.948_888_544_860_376).abs() < 1e-12);
}
