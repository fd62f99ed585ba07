use std::io::Cursor;

use fraclps_core::grid::*;
use fraclps_core::{Error, Field64};
use num_complex::Complex64;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

const TAU: f64 = std::f64::consts::TAU;

fn close(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol * b.abs().max(1.0)
}

#[test]
fn grid_validation() {
    assert!(GridSpec::<f64>::new(3, 16, 1.0).is_err());
    assert!(GridSpec::<f64>::new(1, 12, 1.0).is_err());
    assert!(GridSpec::<f64>::new(1, 4, 1.0).is_err());
    assert!(GridSpec::<f64>::new(2, 8, 0.0).is_err());
    let g = GridSpec::<f64>::new(2, 8, 4.0).unwrap();
    assert_eq!(g.npoints(), 64);
    assert_eq!(g.point(9), [0.5, 0.5]);
    assert_eq!(g.frequency(8 * 7 + 4), [-1, -4]);
    assert_eq!(g.slot([-1, -4]), Some(60));
    assert_eq!(g.slot([4, 0]), None);
}

#[test]
fn banach_norms() {
    let v = [Complex64::new(3.0, 0.0), Complex64::new(0.0, -4.0)];
    assert!(close(BanachSpec::sequence(2, 2.0).unwrap().norm(&v), 5.0, 1e-15));
    assert!(close(BanachSpec::sequence(2, 1.0).unwrap().norm(&v), 7.0, 1e-15));
    assert!(close(BanachSpec::sequence(2, f64::INFINITY).unwrap().norm(&v), 4.0, 1e-15));
    assert!(close(BanachSpec::<f64>::Scalar.norm(&v[1..]), 4.0, 1e-15));
    assert!(BanachSpec::sequence(2, 0.5).is_err());
    assert!(BanachSpec::<f64>::sequence(0, 2.0).is_err());
}

#[test]
fn transform_examples() {
    let g = GridSpec::<f64>::line(16).unwrap();
    let c = samples::constant(g, BanachSpec::Scalar, Complex64::new(2.0, 1.0));
    let s = forward_transform(&c);
    assert!((s.coefficient([0, 0], 0) - Complex64::new(2.0, 1.0)).norm() < 1e-15);
    assert!(s.coefficients()[1..].iter().all(|z| z.norm() < 1e-15));

    let f = samples::plane_wave(g, [1, 0]).unwrap();
    let s = forward_transform(&f);
    for p in 0..16 {
        let want = if p == 1 { 1.0 } else { 0.0 };
        assert!((s.coefficients()[p] - want).norm() < 1e-15);
    }

    let zero = Spectrum::new(g, BanachSpec::Scalar, vec![Complex64::new(0.0, 0.0); 16]).unwrap();
    assert!(inverse_transform(&zero).is_zero());
    let mut one = vec![Complex64::new(0.0, 0.0); 16];
    one[0] = Complex64::new(1.0, 0.0);
    let f = inverse_transform(&Spectrum::new(g, BanachSpec::Scalar, one).unwrap());
    assert!(f.values().iter().all(|z| (z - 1.0).norm() < 1e-15));
}

#[test]
fn two_dimensional_plane_wave() {
    let g = GridSpec::<f64>::square(16).unwrap();
    let f = samples::plane_wave(g, [2, -3]).unwrap();
    let s = forward_transform(&f);
    assert!((s.coefficient([2, -3], 0) - 1.0).norm() < 1e-14);
    let off: f64 = s.coefficients().iter().map(|z| z.norm_sqr()).sum::<f64>() - 1.0;
    assert!(off.abs() < 1e-13);
}

#[test]
fn lp_norm_examples() {
    let g = GridSpec::<f64>::line(64).unwrap();
    let one = samples::constant(g, BanachSpec::Scalar, Complex64::new(1.0, 0.0));
    assert!(close(lp_norm(&one, 2.0).unwrap(), TAU.sqrt(), 1e-14));
    assert_eq!(lp_norm(&Field64::zeros(g, BanachSpec::Scalar), 3.0).unwrap(), 0.0);
    let f = samples::plane_wave(g, [1, 0]).unwrap();
    for p in [1.0, 1.5, 2.0, 3.0, 7.0] {
        assert!(close(lp_norm(&f, p).unwrap(), TAU.powf(1.0 / p), 1e-13));
    }
    assert!(close(lp_norm(&f, f64::INFINITY).unwrap(), 1.0, 1e-14));
    assert!(matches!(lp_norm(&f, 0.5), Err(Error::InvalidParameter { name: "p", .. })));
}

#[test]
fn e0_examples() {
    let g = GridSpec::<f64>::line(32).unwrap();
    let c = samples::constant(g, BanachSpec::Scalar, Complex64::new(-1.5, 2.0));
    assert!(relative_l2_distance(&e0_project(&c), &c).unwrap() < 1e-15);
    let f = samples::plane_wave(g, [1, 0]).unwrap();
    assert!(lp_norm(&e0_project(&f), 2.0).unwrap() < 1e-14);
    let h = Field64::from_real_fn(g, |x| 3.0 + (2.0 * x[0]).cos()).unwrap();
    assert!(e0_project(&h).values().iter().all(|z| (z - 3.0).norm() < 1e-14));
}

#[test]
fn csv_round_trip_and_errors() {
    let g = GridSpec::<f64>::square(8).unwrap();
    let b = BanachSpec::sequence(2, 3.0).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let f = samples::band_limited(g, b, 3, true, &mut rng).unwrap();
    let mut buf = Vec::new();
    write_field_csv(&f, &mut buf).unwrap();
    let text = String::from_utf8(buf.clone()).unwrap();
    assert!(text.starts_with("x,y,re_0,im_0,re_1,im_1\n"));
    let back = read_field_csv(Cursor::new(&buf), g, b).unwrap();
    assert_eq!(back, f);

    let mut lines: Vec<&str> = text.lines().collect();
    lines[5] = "0.0,oops,1,2,3,4";
    let bad = lines.join("\n");
    match read_field_csv(Cursor::new(bad.as_bytes()), g, b) {
        Err(Error::Parse { line, .. }) => assert_eq!(line, 6),
        other => panic!("expected parse error, got {other:?}"),
    }
    let short: String = text.lines().take(10).collect::<Vec<_>>().join("\n");
    assert!(matches!(read_field_csv(Cursor::new(short.as_bytes()), g, b), Err(Error::Parse { .. })));
    assert!(matches!(
        read_field_csv(Cursor::new(&buf), g, BanachSpec::Scalar),
        Err(Error::Parse { line: 1, .. })
    ));
}

#[test]
fn single_precision_round_trip() {
    let g = GridSpec::<f32>::line(64).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let f = samples::band_limited(g, BanachSpec::Scalar, 8, true, &mut rng).unwrap();
    let back = inverse_transform(&forward_transform(&f));
    assert!(relative_l2_distance(&back, &f).unwrap() < 1e-5);
}

fn arb_shape() -> impl Strategy<Value = (usize, usize, usize, u64)> {
    (1usize..=2, 3u32..=6, 1usize..=3, any::<u64>()).prop_map(|(dim, e, m, seed)| {
        let n = if dim == 2 { 1 << e.min(5) } else { 1 << (e + 2) };
        (dim, n, m, seed)
    })
}

fn random_field(dim: usize, n: usize, m: usize, seed: u64) -> Field64 {
    let g = GridSpec::new(dim, n, 3.0).unwrap();
    let b = if m == 1 { BanachSpec::Scalar } else { BanachSpec::sequence(m, 1.0 + seed as f64 % 4.0).unwrap() };
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    samples::band_limited(g, b, (n / 2) as i64, true, &mut rng).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn round_trip_is_identity((dim, n, m, seed) in arb_shape()) {
        let f = random_field(dim, n, m, seed);
        let back = inverse_transform(&forward_transform(&f));
        prop_assert!(relative_l2_distance(&back, &f).unwrap() <= 1e-12);
    }

    #[test]
    fn parseval_holds((dim, n, m, seed) in arb_shape()) {
        let f = random_field(dim, n, m, seed);
        let s = forward_transform(&f);
        let direct: f64 = f.grid().cell_measure() * f.values().iter().map(|z| z.norm_sqr()).sum::<f64>();
        prop_assert!(close(s.parseval_energy(), direct, 1e-10));
    }

    #[test]
    fn lp_norm_is_homogeneous((dim, n, m, seed) in arb_shape(), re in -5.0f64..5.0, im in -5.0f64..5.0, p in 1.0f64..8.0) {
        let f = random_field(dim, n, m, seed);
        let c = Complex64::new(re, im);
        let lhs = lp_norm(&f.scale(c), p).unwrap();
        let rhs = c.norm() * lp_norm(&f, p).unwrap();
        prop_assert!((lhs - rhs).abs() <= 1e-13 * rhs.max(1e-300));
    }

    #[test]
    fn lp_norm_is_monotone_on_probability_scale((dim, n, m, seed) in arb_shape(), p in 1.0f64..6.0, dp in 0.0f64..4.0) {
        let f = random_field(dim, n, m, seed);
        let vol = f.grid().volume();
        let a = lp_norm(&f, p).unwrap() / vol.powf(1.0 / p);
        let b = lp_norm(&f, p + dp).unwrap() / vol.powf(1.0 / (p + dp));
        prop_assert!(a <= b * (1.0 + 1e-12));
    }

    #[test]
    fn projection_is_idempotent_and_contractive((dim, n, m, seed) in arb_shape(), p in prop_oneof![Just(1.0), Just(2.0), Just(3.5), Just(f64::INFINITY)]) {
        let f = random_field(dim, n, m, seed);
        let e = e0_project(&f);
        let ee = e0_project(&e);
        prop_assert!(relative_l2_distance(&ee, &e).unwrap() <= 1e-12);
        prop_assert!(lp_norm(&e, p).unwrap() <= lp_norm(&f, p).unwrap() * (1.0 + 1e-12));
    }

    #[test]
    fn banach_norm_axioms(v in prop::collection::vec((-3.0f64..3.0, -3.0f64..3.0), 1..6),
                          w in prop::collection::vec((-3.0f64..3.0, -3.0f64..3.0), 6),
                          r in prop_oneof![1.0f64..8.0, Just(f64::INFINITY)], c in -4.0f64..4.0) {
        let b = BanachSpec::sequence(v.len(), r).unwrap();
        let v: Vec<Complex64> = v.into_iter().map(|(a, b)| Complex64::new(a, b)).collect();
        let w: Vec<Complex64> = w.into_iter().take(v.len()).map(|(a, b)| Complex64::new(a, b)).collect();
        let sv: Vec<Complex64> = v.iter().map(|z| z * c).collect();
        prop_assert!((b.norm(&sv) - c.abs() * b.norm(&v)).abs() <= 1e-12 * (1.0 + b.norm(&v)));
        let sum: Vec<Complex64> = v.iter().zip(&w).map(|(a, b)| a + b).collect();
        prop_assert!(b.norm(&sum) <= (b.norm(&v) + b.norm(&w)) * (1.0 + 1e-12) + 1e-14);
    }
}
