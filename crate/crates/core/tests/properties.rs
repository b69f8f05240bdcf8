use proptest::prelude::*;
use trunclap::matrix_core::{
    eigen, frame_sum, random_symmetric, special_matrix, special_spectrum, Frame,
};
use trunclap::sampling::rng;
use trunclap::{cube_eigenpair, residual};
use trunclap::{pk_minus, pk_plus, product_counterexample, rect_eigenpair, spectrum, BoxSpec};

fn dims() -> impl Strategy<Value = (usize, usize)> {
    (1usize..=9).prop_flat_map(|n| (Just(n), 1..=n))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(300))]

    #[test]
    fn frame_sums_lie_between_truncated_sums((n, k) in dims(), seed in any::<u64>()) {
        let mut r = rng(seed);
        let m = random_symmetric(&mut r, n);
        let lo = pk_minus(&m, k).unwrap();
        let hi = pk_plus(&m, k).unwrap();
        let tol = 1e-10 * (1.0 + m.max_abs() * n as f64);
        for _ in 0..20 {
            let f = Frame::random(&mut r, n, k);
            let s = frame_sum(&m, &f).unwrap();
            prop_assert!(lo - tol <= s && s <= hi + tol, "{lo} <= {s} <= {hi}");
        }
        // Eigenvector frames attain both ends.
        let e = eigen(&m);
        let low = Frame::new(e.vectors[..k].to_vec()).unwrap();
        let high = Frame::new(e.vectors[n - k..].to_vec()).unwrap();
        prop_assert!((frame_sum(&m, &low).unwrap() - lo).abs() <= tol);
        prop_assert!((frame_sum(&m, &high).unwrap() - hi).abs() <= tol);
    }

    #[test]
    fn truncated_sums_are_lipschitz((n, k) in dims(), seed in any::<u64>()) {
        let mut r = rng(seed);
        let x = random_symmetric(&mut r, n);
        let y = random_symmetric(&mut r, n);
        let d = spectrum(&x.sub(&y)).norm();
        let gap = (pk_plus(&x, k).unwrap() - pk_plus(&y, k).unwrap()).abs();
        prop_assert!(gap <= k as f64 * d + 1e-10 * (1.0 + d));
        let gap = (pk_minus(&x, k).unwrap() - pk_minus(&y, k).unwrap()).abs();
        prop_assert!(gap <= k as f64 * d + 1e-10 * (1.0 + d));
    }

    #[test]
    fn differences_are_sandwiched((n, k) in dims(), seed in any::<u64>()) {
        let mut r = rng(seed);
        let x = random_symmetric(&mut r, n);
        let y = random_symmetric(&mut r, n);
        let diff = pk_plus(&x, k).unwrap() - pk_plus(&y, k).unwrap();
        let xy = x.sub(&y);
        let tol = 1e-10 * (1.0 + x.max_abs() + y.max_abs()) * n as f64;
        prop_assert!(pk_minus(&xy, k).unwrap() <= diff + tol);
        prop_assert!(diff <= pk_plus(&xy, k).unwrap() + tol);
    }

    #[test]
    fn sums_are_positively_homogeneous((n, k) in dims(), seed in any::<u64>(), c in 0.01f64..100.0) {
        let mut r = rng(seed);
        let m = random_symmetric(&mut r, n);
        let a = pk_plus(&m.scaled(c), k).unwrap();
        let b = c * pk_plus(&m, k).unwrap();
        prop_assert!((a - b).abs() <= 1e-10 * (1.0 + b.abs()));
        // P-_k(X) = -P+_k(-X).
        let neg = pk_minus(&m, k).unwrap() + pk_plus(&m.scaled(-1.0), k).unwrap();
        prop_assert!(neg.abs() <= 1e-10 * (1.0 + m.max_abs() * n as f64));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn special_spectrum_matches_jacobi(n in 2usize..=16, a in -10.0f64..10.0, b in -10.0f64..10.0) {
        let closed = special_spectrum(a, b, n).unwrap();
        let numeric = spectrum(&special_matrix(a, b, n).unwrap());
        for (x, y) in closed.values().iter().zip(numeric.values()) {
            prop_assert!((x - y).abs() <= 1e-12 * (1.0 + a.abs() + n as f64 * b.abs()), "{x} vs {y}");
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn unit_anisotropy_rectangle_is_the_cube(n in 2usize..=6, r in 0.1f64..10.0) {
        let rect = rect_eigenpair(&BoxSpec::new(r, vec![1.0; n]).unwrap()).unwrap();
        let cube = cube_eigenpair(n, r).unwrap();
        prop_assert_eq!(rect.mu, cube.mu);
        prop_assert_eq!(rect.exponents, cube.exponents);
    }

    #[test]
    fn rectangle_residual_vanishes(
        alpha in prop::collection::vec(0.3f64..3.0, 2..=4),
        r in 0.5f64..3.0,
        seed in any::<u64>(),
    ) {
        let spec = BoxSpec::new(r, alpha.clone()).unwrap();
        let pair = rect_eigenpair(&spec).unwrap();
        let half = spec.half_extents();
        let mut rg = rng(seed);
        for _ in 0..20 {
            let x: Vec<f64> = half.iter().map(|h| rand::Rng::random_range(&mut rg, -0.999 * h..0.999 * h)).collect();
            let res = residual(&pair, &x, 1).unwrap();
            prop_assert!(res.abs() <= 1e-10, "{res}");
        }
    }

    #[test]
    fn certificate_bound_is_met(
        (n, k) in (3usize..=6).prop_flat_map(|n| (Just(n), 2..n)),
        a in 0.1f64..3.0,
        extra in 0.05f64..3.0,
        r in 0.5f64..3.0,
    ) {
        let cert = product_counterexample(n, k, r, a, a + extra).unwrap();
        prop_assert!(cert.pk_residual >= cert.residual_lower_bound - 1e-10);
        prop_assert!(cert.frame_residual <= cert.pk_residual + 1e-10);
    }
}
