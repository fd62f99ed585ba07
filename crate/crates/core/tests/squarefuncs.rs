use fraclps_core::fracderiv::FracOrder;
use fraclps_core::grid::{samples, BanachSpec, Field, GridSpec};
use fraclps_core::special::{beta, gamma};
use fraclps_core::squarefuncs::*;
use fraclps_core::Field64;
use num_complex::Complex64;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::f64::consts::{PI, TAU};

fn line(n: usize) -> GridSpec<f64> {
    GridSpec::line(n).unwrap()
}

fn ord(a: f64) -> FracOrder<f64> {
    FracOrder::new(a).unwrap()
}

fn random_fields(n: usize, count: usize, kmax: i64, seed: u64) -> Vec<Field64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|_| samples::band_limited(line(n), BanachSpec::Scalar, kmax, true, &mut rng).unwrap())
        .collect()
}

/// Random trigonometric polynomial, sampled on any resolution.
fn trig_poly(seed: u64, kmax: i64) -> Vec<(i64, Complex64)> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (-kmax..=kmax)
        .map(|k| (k, Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))))
        .collect()
}

fn sample_poly(n: usize, poly: &[(i64, Complex64)]) -> Field64 {
    Field::from_fn(line(n), BanachSpec::Scalar, |x, _| {
        poly.iter().map(|&(k, c)| c * fraclps_core::cis(k as f64 * x[0])).sum()
    })
    .unwrap()
}

fn grid_for(f: &Field64, a: f64, q: f64) -> TimeGrid<f64> {
    default_time_grid(f, ord(a), q).unwrap()
}

#[test]
fn single_mode_closed_form() {
    for &k in &[1, 3] {
        let f = samples::plane_wave(line(128), [k, 0]).unwrap();
        for &a in &[0.5, 1.0, 1.3, 2.7] {
            for &q in &[2.0, 3.0] {
                let r = g_function(&f, ord(a), q, &grid_for(&f, a, q)).unwrap();
                let want = gamma(q * a).powf(1.0 / q) / q.powf(a);
                for v in &r.values {
                    assert!((v - want).abs() <= 1e-6 * want, "k={k} a={a} q={q}: {v} vs {want}");
                }
                assert!(!r.truncation_flag, "{}", r.tail_estimate);
            }
        }
    }
    let f = samples::plane_wave(line(1024), [1, 0]).unwrap();
    let r = g_function(&f, ord(1.0), 2.0, &grid_for(&f, 1.0, 2.0)).unwrap();
    assert!(r.values.iter().all(|v| (v - 0.5).abs() <= 1e-6));
}

#[test]
fn vanishing_exactly_on_constants() {
    let g = line(64);
    let tg = TimeGrid::for_band(1.0, 32.0, 2.0, 1.0).unwrap();
    for f in [Field::zeros(g, BanachSpec::Scalar), samples::constant(g, BanachSpec::Scalar, Complex64::new(2.0, 1.0))] {
        for r in all_square_functions(&f, ord(1.0), 2.0, 2.0, &tg).unwrap() {
            assert!(r.values.iter().all(|&v| v <= 1e-10), "{}", r.kind.name());
        }
    }
    let f = &random_fields(64, 1, 4, 1)[0];
    for r in all_square_functions(f, ord(1.0), 2.0, 2.0, &tg).unwrap() {
        assert!(r.values.iter().all(|&v| v > 1e-10));
    }
}

#[test]
fn area_single_mode_is_scaled_g() {
    let f = samples::plane_wave(line(256), [2, 0]).unwrap();
    for &(a, q) in &[(1.0, 2.0), (0.5, 3.0)] {
        let tg = grid_for(&f, a, q);
        let g = g_function(&f, ord(a), q, &tg).unwrap();
        let s = area_function(&f, ord(a), q, &tg).unwrap();
        for (sv, gv) in s.values.iter().zip(&g.values) {
            assert!((sv.powf(q) / gv.powf(q) - 2.0).abs() < 1e-10);
        }
        assert!(s.slice_exceeds_period);
        assert!((check_g_le_s(&f, ord(a), q, &tg).unwrap() - 2f64.powf(-1.0 / q)).abs() < 1e-10);
    }
}

#[test]
fn area_single_mode_square_grid() {
    let g = GridSpec::square(32).unwrap();
    let f = samples::plane_wave(g, [1, 2]).unwrap();
    let tg = grid_for(&f, 1.0, 2.0);
    let gv = g_function(&f, ord(1.0), 2.0, &tg).unwrap();
    let s = area_function(&f, ord(1.0), 2.0, &tg).unwrap();
    for (sv, g) in s.values.iter().zip(&gv.values) {
        assert!((sv * sv / (g * g) - PI).abs() < 1e-9);
    }
    let want = gamma(2.0f64).sqrt() / 2.0;
    assert!(gv.values.iter().all(|v| (v - want).abs() < 1e-6));
}

#[test]
fn translation_equivariance() {
    let f = &random_fields(128, 1, 6, 2)[0];
    let tg = grid_for(f, 0.7, 2.0);
    let shifted = f.shift([5, 0]);
    for (a, b) in all_square_functions(f, ord(0.7), 2.0, 3.0, &tg)
        .unwrap()
        .iter()
        .zip(all_square_functions(&shifted, ord(0.7), 2.0, 3.0, &tg).unwrap().iter())
    {
        for i in 0..128 {
            let j = (i + 128 - 5) % 128;
            assert!((b.values[i] - a.values[j]).abs() <= 1e-10 * a.max(), "{}", a.kind.name());
        }
    }
}

#[test]
fn scaling_by_constants() {
    let f = &random_fields(128, 1, 6, 3)[0];
    let tg = grid_for(f, 1.3, 3.0);
    let base = all_square_functions(f, ord(1.3), 3.0, 2.0, &tg).unwrap();
    for c in [Complex64::new(0.6, 0.8), Complex64::new(-3.0, 4.0)] {
        let scaled = all_square_functions(&f.scale(c), ord(1.3), 3.0, 2.0, &tg).unwrap();
        for (a, b) in base.iter().zip(&scaled) {
            for (x, y) in a.values.iter().zip(&b.values) {
                assert!((y - c.norm() * x).abs() <= 1e-12 * c.norm() * a.max());
            }
        }
    }
}

#[test]
fn gstar_decreases_in_lambda() {
    let f = &random_fields(128, 1, 6, 4)[0];
    let tg = grid_for(f, 1.0, 2.0);
    let vals: Vec<_> = [2.0, 4.0, 8.0].iter().map(|&l| gstar_function(f, ord(1.0), 2.0, l, &tg).unwrap().values).collect();
    for w in vals.windows(2) {
        for (a, b) in w[0].iter().zip(&w[1]) {
            assert!(b <= a);
        }
    }
    assert!(gstar_function(f, ord(1.0), 2.0, 1.0, &tg).is_err());
}

#[test]
fn beta_gamma_comparison() {
    let f = samples::plane_wave(line(64), [1, 0]).unwrap();
    let tg = TimeGrid::for_band(1.0, 1.0, 2.0, 1.0).unwrap();
    let rep = check_beta_gamma_comparison(&f, 1.0, 2.0, 2.0, &tg).unwrap();
    assert!(rep.passed());
    assert!((rep.max_ratio - 2.0 / 6f64.sqrt()).abs() < 1e-6);
    assert!((rep.constant - 1.0).abs() < 1e-14);
    let z = Field::zeros(line(64), BanachSpec::Scalar);
    assert!(check_beta_gamma_comparison(&z, 1.0, 2.0, 2.0, &tg).unwrap().passed());
    for f in random_fields(256, 3, 10, 5) {
        for &(b, g) in &[(0.5, 1.5), (1.0, 2.0), (1.3, 2.7)] {
            for &q in &[2.0, 3.0] {
                let tg = TimeGrid::for_band(1.0, 10.0 * 2f64.sqrt(), q, b).unwrap();
                let rep = check_beta_gamma_comparison(&f, b, g, q, &tg).unwrap();
                assert!(rep.passed(), "({b},{g}) q={q}: {:?}", &rep.violations[..rep.violations.len().min(3)]);
                assert!(rep.max_ratio <= rep.constant * (1.0 + rep.slack));
            }
        }
    }
}

#[test]
fn g_over_s_stable_under_refinement() {
    for seed in 0..5 {
        let poly = trig_poly(100 + seed, 8);
        let coarse = sample_poly(256, &poly);
        let fine = sample_poly(512, &poly);
        let tg = grid_for(&coarse, 1.0, 2.0);
        let a = check_g_le_s(&coarse, ord(1.0), 2.0, &tg).unwrap();
        let b = check_g_le_s(&fine, ord(1.0), 2.0, &tg.refined()).unwrap();
        assert!(a.is_finite() && a > 0.0);
        assert!((b / a - 1.0).abs() <= 0.1, "{a} vs {b}");
    }
}

#[test]
fn lq_identity() {
    let f = samples::plane_wave(line(1024), [1, 0]).unwrap();
    for &(a, q) in &[(1.0, 2.0), (0.5, 3.0)] {
        let rep = check_lq_identity(&f, ord(a), q, &grid_for(&f, a, q)).unwrap();
        assert!(rep.residual <= 1e-6, "{rep:?}");
        let closed = 2.0 * gamma(q * a) / q.powf(q * a) * TAU;
        assert!((rep.g_side / closed - 1.0).abs() < 1e-6);
    }
    for f in random_fields(1024, 10, 16, 6) {
        let rep = check_lq_identity(&f, ord(1.0), 2.0, &grid_for(&f, 1.0, 2.0)).unwrap();
        assert!(rep.residual <= 1e-4, "{rep:?}");
    }
    let z = Field::zeros(line(64), BanachSpec::Scalar);
    let rep = check_lq_identity(&z, ord(1.0), 2.0, &TimeGrid::new(0.01, 10.0, 16).unwrap()).unwrap();
    assert_eq!((rep.area_side, rep.g_side, rep.residual), (0.0, 0.0, 0.0));
}

#[test]
fn area_gstar_chain() {
    for f in random_fields(1024, 3, 16, 7) {
        for &lambda in &[2.0, 4.0] {
            for &q in &[2.0, 3.0] {
                let rep = check_area_le_gstar(&f, ord(1.0), q, lambda, &grid_for(&f, 1.0, q)).unwrap();
                assert!(rep.passed(), "lambda={lambda}: {:?}", rep.violations.first());
                assert!((rep.constant - 2f64.powf(lambda / q)).abs() < 1e-14);
            }
        }
    }
}

#[test]
fn gstar_lp_comparison_stable() {
    let poly = trig_poly(9, 6);
    let coarse = sample_poly(256, &poly);
    let fine = sample_poly(512, &poly);
    let tg = grid_for(&coarse, 1.0, 2.0);
    for &p in &[2.0, 4.0] {
        let a = check_gstar_vs_g(&coarse, ord(1.0), 2.0, 3.0, p, &tg).unwrap();
        let b = check_gstar_vs_g(&fine, ord(1.0), 2.0, 3.0, p, &tg.refined()).unwrap();
        assert!(a.is_finite() && (b / a - 1.0).abs() <= 0.1);
    }
    assert!(check_gstar_vs_g(&coarse, ord(1.0), 2.0, 3.0, 1.5, &tg).is_err());
}

#[test]
fn polarization_identity() {
    let f = samples::plane_wave(line(256), [3, 0]).unwrap();
    for &a in &[0.5, 0.8, 1.0, 2.3] {
        let rep = check_polarization(&f, &f, ord(a), &grid_for(&f, a, 2.0)).unwrap();
        assert!((rep.lhs.re - TAU).abs() < 1e-8 && (rep.rhs.re - TAU).abs() < 1e-8, "{rep:?}");
        assert!(rep.rhs.im.abs() < 1e-8);
    }
    let fs = random_fields(1024, 6, 16, 8);
    for pair in fs.chunks(2) {
        let tg = grid_for(&pair[0], 0.8, 2.0);
        let rep = check_polarization(&pair[0], &pair[1], ord(0.8), &tg).unwrap();
        assert!(rep.residual <= 1e-6, "{rep:?}");
    }
    let c = samples::constant(line(256), BanachSpec::Scalar, Complex64::new(1.0, 0.0));
    let rep = check_polarization(&c, &fs[0].clone(), ord(0.8), &TimeGrid::for_band(1.0, 16.0, 2.0, 0.8).unwrap());
    assert!(rep.is_err(), "grids differ");
    let c = samples::constant(line(1024), BanachSpec::Scalar, Complex64::new(1.0, 0.0));
    let rep = check_polarization(&c, &fs[0], ord(0.8), &TimeGrid::for_band(1.0, 16.0, 2.0, 0.8).unwrap()).unwrap();
    assert!(rep.lhs.norm() < 1e-12 && rep.rhs.norm() < 1e-12);
}

#[test]
fn polarization_tail_guard() {
    let f = &random_fields(256, 1, 8, 9)[0];
    let short = TimeGrid::new(0.1, 1.0, 32).unwrap();
    assert!(matches!(check_polarization(f, f, ord(0.8), &short), Err(fraclps_core::Error::AccuracyBudget { .. })));
}

#[test]
fn iteration_identity() {
    let f = samples::plane_wave(line(64), [1, 0]).unwrap();
    let tg = TimeGrid::for_band(1.0, 1.0, 2.0, 1.0).unwrap();
    let rep = check_iteration_identity(&f, 1, 2.0, &tg).unwrap();
    let closed = beta(2.0, 2.0) * gamma(4.0) / 2f64.powi(4) * TAU;
    assert!(rep.residual <= 1e-6, "{rep:?}");
    assert!((rep.single / closed - 1.0).abs() < 1e-6);
    for f in random_fields(256, 3, 10, 10) {
        for k in [1, 2] {
            let tg = TimeGrid::for_band(1.0, 10.0, 2.0, k as f64).unwrap();
            let rep = check_iteration_identity(&f, k, 2.0, &tg).unwrap();
            assert!(rep.residual <= 1e-4, "k={k}: {rep:?}");
        }
    }
    let z = Field::zeros(line(64), BanachSpec::Scalar);
    assert_eq!(check_iteration_identity(&z, 1, 2.0, &tg).unwrap().residual, 0.0);
}

#[test]
fn maximal_domination() {
    let g = line(512);
    let tg = TimeGrid::new(2.0 * g.spacing(), 0.5, 64).unwrap();
    let c = samples::constant(g, BanachSpec::Scalar, Complex64::new(2.0, 0.0));
    for &lambda in &[2.0, 3.0] {
        let rep = check_maximal_domination(&c, lambda, &tg).unwrap();
        assert!((rep.max_ratio - 2.0 / (lambda - 1.0)).abs() < 1e-3, "{}", rep.max_ratio);
    }
    let ratio = |n: usize| {
        let g = line(n);
        let hot = Field::from_real_fn(g, |x| if (x[0] - PI).abs() < g.spacing() / 2.0 { 1.0 } else { 0.0 }).unwrap();
        let tg = TimeGrid::new(g.spacing(), 1.0, 64).unwrap();
        check_maximal_domination(&hot, 2.0, &tg).unwrap().max_ratio
    };
    let (a, b) = (ratio(256), ratio(512));
    assert!(a.is_finite() && (b / a - 1.0).abs() < 0.1, "{a} {b}");
    let z = Field::zeros(g, BanachSpec::Scalar);
    assert_eq!(check_maximal_domination(&z, 2.0, &tg).unwrap().max_ratio, 0.0);
}

#[test]
fn time_refinement_changes_little() {
    for f in random_fields(512, 3, 12, 11) {
        let tg = grid_for(&f, 0.7, 2.0);
        let a = all_square_functions(&f, ord(0.7), 2.0, 2.0, &tg).unwrap();
        let b = all_square_functions(&f, ord(0.7), 2.0, 2.0, &tg.refined()).unwrap();
        for (x, y) in a.iter().zip(&b) {
            for (u, v) in x.values.iter().zip(&y.values) {
                assert!((u - v).abs() <= 1e-4 * u.abs(), "{}", x.kind.name());
            }
        }
    }
}

#[test]
fn report_csv_and_metadata() {
    let f = samples::plane_wave(line(16), [1, 0]).unwrap();
    let r = gstar_function(&f, ord(1.0), 2.0, 2.0, &grid_for(&f, 1.0, 2.0)).unwrap();
    let mut buf = vec![];
    r.write_csv(&mut buf).unwrap();
    let text = String::from_utf8(buf).unwrap();
    assert_eq!(text.lines().next(), Some("x,value"));
    assert_eq!(text.lines().count(), 17);
    let keys: Vec<_> = r.metadata().into_iter().map(|(k, _)| k).collect();
    for k in ["alpha", "q", "lambda", "t_min", "t_max", "count", "truncation_flag"] {
        assert!(keys.iter().any(|x| x == k), "{k}");
    }
}

#[test]
fn f32_smoke() {
    let f = samples::plane_wave(GridSpec::<f32>::line(64).unwrap(), [1, 0]).unwrap();
    let o = FracOrder::new(1.0f32).unwrap();
    let tg = default_time_grid(&f, o, 2.0).unwrap();
    let r = g_function(&f, o, 2.0, &tg).unwrap();
    assert!(r.values.iter().all(|v| (v - 0.5).abs() < 1e-3));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn time_grid_reproduces_incomplete_gamma(a in 0.5f64..6.0, c in 0.1f64..20.0, lo in -6.0f64..-1.0, hi in 0.0f64..2.0) {
        let (t0, t1) = (10f64.powf(lo), 10f64.powf(hi));
        let tg = TimeGrid::new(t0, t1, TimeGrid::<f64>::default_count(t0, t1)).unwrap();
        let got = tg.integrate(|t| t.powf(a) * (-c * t).exp());
        let p = |x: f64| statrs::function::gamma::gamma_lr(a, x);
        let exact = gamma(a) * c.powf(-a) * (p(c * t1) - p(c * t0));
        prop_assert!(((got - exact) / exact).abs() <= 1e-7, "{} vs {}", got, exact);
    }

    #[test]
    fn reports_are_nonnegative_and_unimodular_invariant(seed in 0u64..1000, theta in 0.0f64..TAU) {
        let f = &random_fields(64, 1, 5, seed)[0];
        let tg = TimeGrid::for_band(1.0, 8.0, 2.0, 1.0).unwrap();
        let u = fraclps_core::cis(theta);
        let a = all_square_functions(f, ord(1.0), 2.0, 2.0, &tg).unwrap();
        let b = all_square_functions(&f.scale(u), ord(1.0), 2.0, 2.0, &tg).unwrap();
        for (x, y) in a.iter().zip(&b) {
            for (p, q) in x.values.iter().zip(&y.values) {
                prop_assert!(*p >= 0.0);
                prop_assert!((p - q).abs() <= 1e-12 * x.max());
            }
        }
    }
}
