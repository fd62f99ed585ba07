use approx::assert_relative_eq;
use fraclps_core::grid::{lp_norm, relative_l2_distance, samples, BanachSpec, GridSpec};
use fraclps_core::semigroup::*;
use fraclps_core::Field64;
use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn line(n: usize) -> GridSpec<f64> {
    GridSpec::line(n).unwrap()
}

fn random_fields(count: usize, seed: u64) -> Vec<Field64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|_| samples::band_limited(line(1024), BanachSpec::Scalar, 16, true, &mut rng).unwrap())
        .collect()
}

#[test]
fn constants_are_fixed() {
    let g = line(32);
    let c = samples::constant(g, BanachSpec::Scalar, Complex64::new(2.5, -1.0));
    for f in [heat_apply(&c, 0.7).unwrap(), poisson_apply(&c, 3.0).unwrap()] {
        assert!(relative_l2_distance(&f, &c).unwrap() < 1e-14);
    }
    assert!(poisson_derivative_integer(&c, 1.0, 2).unwrap().values().iter().all(|z| z.norm() < 1e-14));
}

#[test]
fn single_mode_closed_forms() {
    let g = line(16);
    let f = samples::plane_wave(g, [1, 0]).unwrap();
    let heat = heat_apply(&f, 1.0).unwrap();
    let pois = poisson_apply(&f, 2.0).unwrap();
    let der = poisson_derivative_integer(&f, 1.0, 1).unwrap();
    for p in 0..16 {
        let z = f.values()[p];
        assert!((heat.values()[p] - z * (-1.0f64).exp()).norm() < 1e-14);
        assert!((pois.values()[p] - z * (-2.0f64).exp()).norm() < 1e-14);
        assert!((der.values()[p] + z * (-1.0f64).exp()).norm() < 1e-14);
    }
}

#[test]
fn semigroup_laws() {
    for f in random_fields(3, 7) {
        let a = heat_apply(&heat_apply(&f, 0.3).unwrap(), 0.5).unwrap();
        let b = heat_apply(&f, 0.8).unwrap();
        assert!(relative_l2_distance(&a, &b).unwrap() < 1e-12);
        let a = poisson_apply(&poisson_apply(&f, 0.3).unwrap(), 1.1).unwrap();
        let b = poisson_apply(&f, 1.4).unwrap();
        assert!(relative_l2_distance(&a, &b).unwrap() < 1e-12);
    }
}

#[test]
fn derivative_matches_central_difference() {
    let h = 1e-4;
    for f in random_fields(3, 11) {
        let t = 0.5;
        let fd = poisson_apply(&f, t + h)
            .unwrap()
            .combine(Complex64::new(0.5 / h, 0.0), &poisson_apply(&f, t - h).unwrap(), Complex64::new(-0.5 / h, 0.0))
            .unwrap();
        let d = poisson_derivative_integer(&f, t, 1).unwrap();
        assert!(relative_l2_distance(&fd, &d).unwrap() < 1e-6);
    }
}

#[test]
fn subordination_matches_multiplier() {
    let quad = SubordinationQuad::new(256).unwrap();
    for f in random_fields(20, 3) {
        for t in [0.1, 1.0, 10.0] {
            let a = subordinate_poisson(&f, t, &quad).unwrap();
            let b = poisson_apply(&f, t).unwrap();
            let err = relative_l2_distance(&a, &b).unwrap();
            assert!(err <= 1e-8, "t={t}: {err}");
        }
    }
}

#[test]
fn subordination_examples() {
    let quad = SubordinationQuad::new(256).unwrap();
    let g = line(16);
    let c = samples::constant(g, BanachSpec::Scalar, Complex64::new(1.0, 0.0));
    let out = subordinate_poisson(&c, 0.4, &quad).unwrap();
    assert!(relative_l2_distance(&out, &c).unwrap() <= 1e-9);
    let f = samples::plane_wave(g, [1, 0]).unwrap();
    let out = subordinate_poisson(&f, 1.0, &quad).unwrap();
    let want = f.scale(Complex64::new((-1.0f64).exp(), 0.0));
    assert!(relative_l2_distance(&out, &want).unwrap() <= 1e-8);
    let z = Field64::zeros(g, BanachSpec::Scalar);
    assert!(subordinate_poisson(&z, 1.0, &quad).unwrap().is_zero());
}

#[test]
fn coarse_subordination_reports_budget() {
    let quad = SubordinationQuad::with_tolerance(256, 1e-15).unwrap();
    let f = random_fields(1, 5).pop().unwrap();
    assert!(matches!(subordinate_poisson(&f, 10.0, &quad), Err(fraclps_core::Error::AccuracyBudget { .. })));
}

#[test]
fn poisson_is_contractive() {
    for f in random_fields(5, 13) {
        for t in [1e-3, 0.1, 1.0, 10.0] {
            let out = poisson_apply(&f, t).unwrap();
            for p in [1.0, 2.0, 4.0, f64::INFINITY] {
                let a = lp_norm(&out, p).unwrap();
                let b = lp_norm(&f, p).unwrap();
                assert!(a <= b * (1.0 + 1e-12), "t={t} p={p}: {a} > {b}");
            }
        }
    }
}

#[test]
fn derivative_decay_constants_stable() {
    // sup_t t^m ‖∂^m 𝒫_t f‖_p / ‖f‖_p on the default sweep and its refinement
    let f = random_fields(1, 17).pop().unwrap();
    for m in 1..=3u32 {
        for p in [1.0, 2.0, 4.0, f64::INFINITY] {
            let sweep = |count: usize| {
                (0..count)
                    .map(|i| {
                        let t = 10f64.powf(-3.0 + 6.0 * i as f64 / (count - 1) as f64);
                        let d = poisson_derivative_integer(&f, t, m).unwrap();
                        t.powi(m as i32) * lp_norm(&d, p).unwrap() / lp_norm(&f, p).unwrap()
                    })
                    .fold(0.0, f64::max)
            };
            let (a, b) = (sweep(61), sweep(121));
            assert!(a.is_finite() && b.is_finite());
            assert_relative_eq!(a, b, max_relative = 0.05);
        }
    }
}
