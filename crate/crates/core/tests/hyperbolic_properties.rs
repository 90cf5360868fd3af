use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use torsionlab_core::hyperbolic::{
    displacement, distance, loxodromic_displacement_closed_form, point_at_axis_distance, random_axis,
    random_point_near, CONVEXITY_THRESHOLD, ISOMETRY_TOLERANCE,
};
use torsionlab_core::{HyperbolicPoint, LorentzIsometry};

fn random_isometry(d: usize, rng: &mut ChaCha8Rng) -> LorentzIsometry {
    if rng.gen_bool(0.5) {
        let (rep, att) = random_axis(d, rng);
        LorentzIsometry::loxodromic(rng.gen_range(0.05..1.5), &rep, &att).unwrap()
    } else {
        let (fix, _) = random_axis(d, rng);
        let v: Vec<f64> = (0..d - 1).map(|_| rng.gen_range(-1.0..1.0)).collect();
        LorentzIsometry::parabolic(&fix, &v).unwrap()
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn compositions_stay_lorentz(d in 2usize..5, seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut g = LorentzIsometry::identity(d);
        for _ in 0..rng.gen_range(1..30) {
            g = g.compose(&random_isometry(d, &mut rng));
            let size = g.rows().iter().flatten().fold(0.0f64, |m, x| m.max(x.abs()));
            prop_assert!(g.scaled_lorentz_residual() < ISOMETRY_TOLERANCE, "{}", g.scaled_lorentz_residual());
            if size <= 1e3 {
                prop_assert!(g.lorentz_residual() < ISOMETRY_TOLERANCE, "{} at size {}", g.lorentz_residual(), size);
            }
            prop_assert!(g.entry(0, 0) >= 1.0);
        }
        let size = g.rows().iter().flatten().fold(0.0f64, |m, x| m.max(x.abs()));
        if size <= 1e3 {
            let x = random_point_near(&HyperbolicPoint::origin(d), 1.0, &mut rng);
            let back = g.inverse().apply(&g.apply(&x));
            prop_assert!(distance(&x, &back) < 1e-6);
        }
    }

    #[test]
    fn triangle_inequality(d in 2usize..5, seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let o = HyperbolicPoint::origin(d);
        for _ in 0..16 {
            let x = random_point_near(&o, 4.0, &mut rng);
            let y = random_point_near(&o, 4.0, &mut rng);
            let z = random_point_near(&o, 4.0, &mut rng);
            prop_assert!(distance(&x, &z) <= distance(&x, &y) + distance(&y, &z) + 1e-9);
            prop_assert!((distance(&x, &y) - distance(&y, &x)).abs() < 1e-12);
        }
    }

    #[test]
    fn isometries_preserve_distance(d in 2usize..5, seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let g = random_isometry(d, &mut rng);
        let o = HyperbolicPoint::origin(d);
        let x = random_point_near(&o, 2.0, &mut rng);
        let y = random_point_near(&o, 2.0, &mut rng);
        let before = distance(&x, &y);
        prop_assert!((distance(&g.apply(&x), &g.apply(&y)) - before).abs() < 1e-8 * (1.0 + before));
    }

    #[test]
    fn geodesic_parameter_is_distance(d in 2usize..5, t in 0.0f64..5.0, seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let x = random_point_near(&HyperbolicPoint::origin(d), 1.0, &mut rng);
        let basis = x.tangent_basis();
        let mut dir: Vec<f64> = (0..d).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let n = dir.iter().map(|v| v * v).sum::<f64>().sqrt().max(1e-9);
        dir.iter_mut().for_each(|v| *v /= n);
        let y = x.exp_in_basis(&basis, &dir, t);
        prop_assert!((distance(&x, &y) - t).abs() < 1e-9 * (1.0 + t));
    }

    #[test]
    fn displacement_matches_tube_formula(d in 2usize..5, l in 0.05f64..2.0, r in 0.0f64..2.5, seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let (rep, att) = random_axis(d, &mut rng);
        let g = LorentzIsometry::loxodromic(l, &rep, &att).unwrap();
        let x = point_at_axis_distance(&g, r, rng.gen_range(-1.0..1.0), &mut rng);
        let expected = loxodromic_displacement_closed_form(l, r);
        prop_assert!((displacement(&g, &x) - expected).abs() < 1e-9 * (1.0 + expected));
        for k in 1..4i64 {
            let gk = g.pow(k);
            let on_axis = loxodromic_displacement_closed_form(k as f64 * l, r);
            prop_assert!((displacement(&gk, &x) - on_axis).abs() < 1e-8 * (1.0 + on_axis));
        }
    }

    #[test]
    fn displacement_convex_along_geodesics(d in 2usize..5, seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let g = random_isometry(d, &mut rng);
        let x = random_point_near(&HyperbolicPoint::origin(d), 2.0, &mut rng);
        let basis = x.tangent_basis();
        let mut dir: Vec<f64> = (0..d).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let n = dir.iter().map(|v| v * v).sum::<f64>().sqrt().max(1e-9);
        dir.iter_mut().for_each(|v| *v /= n);
        let h = 0.05;
        let f = |t: f64| displacement(&g, &x.exp_in_basis(&basis, &dir, t));
        for i in -20..20 {
            let t = i as f64 * h;
            let second = f(t - h) - 2.0 * f(t) + f(t + h);
            prop_assert!(second >= CONVEXITY_THRESHOLD, "{second} at t={t}");
        }
    }
}

#[test]
fn identity_displaces_nothing() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let id = LorentzIsometry::identity(3);
    for _ in 0..100 {
        let x = random_point_near(&HyperbolicPoint::origin(3), 5.0, &mut rng);
        assert_eq!(displacement(&id, &x), 0.0);
    }
}
