//! `verify`: the fixed table of numerical checks.

use std::f64::consts::TAU;
use std::io::Write;

use fraclps_core::fracderiv::{
    check_composition, check_decay_bound, check_kernel_bounds, check_order_reduction, frac_derivative_quadrature,
    frac_derivative_spectral, FracOrder, SWQuadrature,
};
use fraclps_core::grid::{lp_norm, relative_l2_distance, samples, BanachSpec, Field, GridSpec};
use fraclps_core::hilbert::{comparison_ratio, convergence_study, eps_grid_to, standard_fields, truncated_hilbert, CutoffPhi, LineSample};
use fraclps_core::semigroup::{poisson_apply, poisson_derivative_integer, subordinate_poisson, SubordinationQuad};
use fraclps_core::special::gamma;
use fraclps_core::squarefuncs::{
    check_area_le_gstar, check_beta_gamma_comparison, check_g_le_s, check_iteration_identity, check_lq_identity, check_polarization,
    default_time_grid, g_function, TimeGrid,
};
use fraclps_core::Result;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::config::RunConfig;
use crate::error::{CliError, Exit};
use crate::output::{write_atomic, Sidecar};

pub const SUITES: [&str; 5] = ["semigroup", "fracderiv", "squarefuncs", "hilbert", "all"];

/// One row of the table: `value ≤ tolerance` passes.
pub struct Check {
    pub suite: &'static str,
    pub name: &'static str,
    pub anchor: &'static str,
    pub tolerance: f64,
    run: fn(&RunConfig) -> Result<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Row {
    pub suite: &'static str,
    pub name: &'static str,
    pub anchor: &'static str,
    pub value: f64,
    pub tolerance: f64,
    pub passed: bool,
    pub error: Option<String>,
}

const ALPHAS: [f64; 6] = [0.3, 0.5, 1.0, 1.3, 2.0, 2.7];
const TIMES: [f64; 3] = [0.1, 1.0, 10.0];

fn line(n: usize) -> Result<GridSpec<f64>> {
    GridSpec::line(n)
}

fn ord(a: f64) -> Result<FracOrder<f64>> {
    FracOrder::new(a)
}

/// Random band-limited scalar fields; `salt` separates the draws of different checks.
fn random_fields(cfg: &RunConfig, n: usize, count: usize, kmax: i64, salt: u64) -> Result<Vec<Field<f64>>> {
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed ^ salt.wrapping_mul(0x9e37_79b9_7f4a_7c15));
    (0..count)
        .map(|_| samples::band_limited(line(n)?, BanachSpec::Scalar, kmax, true, &mut rng))
        .collect()
}

fn single_mode(n: usize, k: i64) -> Result<Field<f64>> {
    samples::plane_wave(line(n)?, [k, 0])
}

fn max_of(it: impl IntoIterator<Item = Result<f64>>) -> Result<f64> {
    let mut m = 0.0f64;
    for v in it {
        let v = v?;
        m = if v.is_nan() { f64::NAN } else { m.max(v) };
    }
    Ok(m)
}

fn drift(a: f64, b: f64) -> f64 {
    if a.is_finite() && b.is_finite() && a > 0.0 {
        (b / a - 1.0).abs()
    } else {
        f64::INFINITY
    }
}

fn subordination(cfg: &RunConfig) -> Result<f64> {
    let quad = SubordinationQuad::with_tolerance(cfg.subordination_nodes, cfg.subordination_tolerance)?;
    let fields = random_fields(cfg, 1024, 20, 16, 1)?;
    max_of(fields.par_iter().flat_map(|f| {
        TIMES.par_iter().map(|&t| relative_l2_distance(&subordinate_poisson(f, t, &quad)?, &poisson_apply(f, t)?))
    }).collect::<Vec<_>>())
}

fn semigroup_law(cfg: &RunConfig) -> Result<f64> {
    let fields = random_fields(cfg, 1024, 5, 16, 2)?;
    max_of(fields.iter().map(|f| {
        let two = poisson_apply(&poisson_apply(f, 0.3)?, 0.7)?;
        relative_l2_distance(&two, &poisson_apply(f, 1.0)?)
    }))
}

fn contraction(cfg: &RunConfig) -> Result<f64> {
    let fields = random_fields(cfg, 1024, 5, 16, 3)?;
    let mut worst = f64::NEG_INFINITY;
    for f in &fields {
        for &t in &TIMES {
            let pf = poisson_apply(f, t)?;
            for p in [1.0, 2.0, f64::INFINITY] {
                worst = worst.max(lp_norm(&pf, p)? / lp_norm(f, p)? - 1.0);
            }
        }
    }
    Ok(worst)
}

fn route(cfg: &RunConfig, a: f64) -> Result<f64> {
    let quad = sw(cfg)?;
    let o = ord(a)?;
    let fields = random_fields(cfg, 1024, 20, 16, 4)?;
    max_of(fields.par_iter().flat_map(|f| {
        let quad = &quad;
        TIMES.par_iter().map(move |&t| relative_l2_distance(&frac_derivative_quadrature(f, t, o, quad)?, &frac_derivative_spectral(f, t, o)?))
    }).collect::<Vec<_>>())
}

fn integer_match(cfg: &RunConfig, m: u32) -> Result<f64> {
    let quad = sw(cfg)?;
    let o = ord(m as f64)?;
    let fields = random_fields(cfg, 1024, 20, 16, 4)?;
    max_of(fields.par_iter().flat_map(|f| {
        let quad = &quad;
        TIMES.par_iter().map(move |&t| relative_l2_distance(&frac_derivative_quadrature(f, t, o, quad)?, &poisson_derivative_integer(f, t, m)?))
    }).collect::<Vec<_>>())
}

fn decay(cfg: &RunConfig) -> Result<f64> {
    let fields = random_fields(cfg, 1024, 3, 16, 5)?;
    let mut worst = 0.0f64;
    for f in &fields {
        for a in [0.7, 1.3] {
            let tg = TimeGrid::for_band(1.0, 16.0, 1.0, a)?;
            for p in [1.0, 2.0, 4.0, f64::INFINITY] {
                let coarse = check_decay_bound(f, ord(a)?, p, &tg)?.sup;
                let fine = check_decay_bound(f, ord(a)?, p, &tg.refined())?.sup;
                worst = worst.max(drift(coarse, fine));
            }
        }
    }
    Ok(worst)
}

fn reduction_single(cfg: &RunConfig) -> Result<f64> {
    let quad = sw(cfg)?;
    let f = single_mode(64, 1)?;
    max_of([check_order_reduction(&f, 0.5, 1.5, 1.0, &quad), check_order_reduction(&f, 0.3, 2.2, 0.2, &quad)])
}

fn reduction_random(cfg: &RunConfig) -> Result<f64> {
    let quad = sw(cfg)?;
    let fields = random_fields(cfg, 1024, 5, 16, 6)?;
    max_of(fields.iter().flat_map(|f| [0.1, 1.0].map(|t| check_order_reduction(f, 0.5, 1.5, t, &quad))).collect::<Vec<_>>())
}

fn composition_single(cfg: &RunConfig) -> Result<f64> {
    let quad = sw(cfg)?;
    let f = single_mode(64, 1)?;
    let rep = check_composition(&f, 0.75, 0.75, 1.0, &quad)?;
    Ok(rep.quadrature.max(rep.spectral))
}

fn composition_random(cfg: &RunConfig) -> Result<f64> {
    let quad = sw(cfg)?;
    let fields = random_fields(cfg, 1024, 5, 16, 7)?;
    max_of(fields.iter().map(|f| check_composition(f, 0.5, 1.7, 1.0, &quad).map(|r| r.quadrature.max(r.spectral))))
}

fn kernel_bounds(cfg: &RunConfig) -> Result<f64> {
    let quad = sw(cfg)?;
    let coarse: Vec<f64> = (0..=16).map(|i| 0.1 * 2f64.powf(i as f64 / 4.0)).collect();
    let fine: Vec<f64> = (0..=32).map(|i| 0.1 * 2f64.powf(i as f64 / 8.0)).collect();
    let mut worst = 0.0f64;
    for a in [0.5, 1.0] {
        let c = check_kernel_bounds(ord(a)?, 2.0, &coarse, &quad)?;
        let f = check_kernel_bounds(ord(a)?, 2.0, &fine, &quad)?;
        worst = worst.max(drift(c.size, f.size)).max(drift(c.gradient, f.gradient));
    }
    Ok(worst)
}

fn sw(cfg: &RunConfig) -> Result<SWQuadrature<f64>> {
    SWQuadrature::with_tolerance(cfg.sw_near, cfg.sw_far, cfg.sw_tolerance)
}

fn grid_for(f: &Field<f64>, a: f64, q: f64) -> Result<TimeGrid<f64>> {
    default_time_grid(f, ord(a)?, q)
}

fn g_half(_: &RunConfig) -> Result<f64> {
    let f = single_mode(1024, 1)?;
    let r = g_function(&f, ord(1.0)?, 2.0, &grid_for(&f, 1.0, 2.0)?)?;
    Ok(r.values.iter().map(|v| (v - 0.5).abs()).fold(0.0, f64::max))
}

fn g_closed_form(_: &RunConfig) -> Result<f64> {
    let f = single_mode(128, 3)?;
    let mut worst = 0.0f64;
    for a in [0.5, 1.3, 2.7] {
        for q in [2.0, 3.0] {
            let r = g_function(&f, ord(a)?, q, &grid_for(&f, a, q)?)?;
            let want = gamma(q * a).powf(1.0 / q) / q.powf(a);
            worst = r.values.iter().map(|v| (v - want).abs() / want).fold(worst, f64::max);
        }
    }
    Ok(worst)
}

fn beta_gamma(cfg: &RunConfig) -> Result<f64> {
    let fields = random_fields(cfg, 256, 3, 10, 8)?;
    let mut worst = f64::NEG_INFINITY;
    for f in &fields {
        for (b, g) in [(0.5, 1.5), (1.0, 2.0), (1.3, 2.7)] {
            for q in [2.0, 3.0] {
                let tg = TimeGrid::for_band(1.0, 10.0 * 2f64.sqrt(), q, b)?;
                let rep = check_beta_gamma_comparison(f, b, g, q, &tg)?;
                let excess = rep.violations.iter().map(|v| v.lhs / v.rhs - 1.0).fold(rep.max_ratio / rep.constant - 1.0, f64::max);
                worst = worst.max(excess);
            }
        }
    }
    Ok(worst)
}

fn lq_single(_: &RunConfig) -> Result<f64> {
    let f = single_mode(1024, 1)?;
    max_of([(1.0, 2.0), (0.5, 3.0)].map(|(a, q)| Ok(check_lq_identity(&f, ord(a)?, q, &grid_for(&f, a, q)?)?.residual)))
}

fn lq_random(cfg: &RunConfig) -> Result<f64> {
    let fields = random_fields(cfg, 1024, 10, 16, 9)?;
    max_of(fields.par_iter().map(|f| Ok(check_lq_identity(f, ord(1.0)?, 2.0, &grid_for(f, 1.0, 2.0)?)?.residual)).collect::<Vec<_>>())
}

fn chain(cfg: &RunConfig) -> Result<f64> {
    let fields = random_fields(cfg, 1024, 3, 16, 10)?;
    let mut worst = f64::NEG_INFINITY;
    for f in &fields {
        for lambda in [2.0, 4.0] {
            for q in [2.0, 3.0] {
                let rep = check_area_le_gstar(f, ord(1.0)?, q, lambda, &grid_for(f, 1.0, q)?)?;
                let excess = rep.violations.iter().map(|v| v.lhs / v.rhs - 1.0).fold(rep.max_ratio - 1.0, f64::max);
                worst = worst.max(excess);
            }
        }
    }
    Ok(worst)
}

fn sample_poly(n: usize, poly: &[(i64, num_complex::Complex64)]) -> Result<Field<f64>> {
    Field::from_fn(line(n)?, BanachSpec::Scalar, |x, _| poly.iter().map(|&(k, c)| c * fraclps_core::cis(k as f64 * x[0])).sum())
}

fn g_over_s(cfg: &RunConfig) -> Result<f64> {
    use rand::Rng;
    let mut worst = 0.0f64;
    for salt in 0..5u64 {
        let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed ^ (100 + salt));
        let poly: Vec<(i64, num_complex::Complex64)> =
            (-8..=8).map(|k| (k, num_complex::Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)))).collect();
        let coarse = sample_poly(256, &poly)?;
        let fine = sample_poly(512, &poly)?;
        let tg = grid_for(&coarse, 1.0, 2.0)?;
        let a = check_g_le_s(&coarse, ord(1.0)?, 2.0, &tg)?;
        let b = check_g_le_s(&fine, ord(1.0)?, 2.0, &tg.refined())?;
        worst = worst.max(drift(a, b));
    }
    Ok(worst)
}

fn polarization_random(cfg: &RunConfig) -> Result<f64> {
    let fields = random_fields(cfg, 1024, 6, 16, 11)?;
    max_of(fields.chunks(2).map(|p| Ok(check_polarization(&p[0], &p[1], ord(0.8)?, &grid_for(&p[0], 0.8, 2.0)?)?.residual)).collect::<Vec<_>>())
}

fn polarization_single(_: &RunConfig) -> Result<f64> {
    let f = single_mode(256, 3)?;
    max_of([0.5, 0.8, 1.0, 2.3].map(|a| {
        let rep = check_polarization(&f, &f, ord(a)?, &grid_for(&f, a, 2.0)?)?;
        Ok((rep.lhs.re - TAU).abs().max((rep.rhs.re - TAU).abs()).max(rep.rhs.im.abs()).max(rep.lhs.im.abs()))
    }))
}

fn iteration(cfg: &RunConfig, k: u32) -> Result<f64> {
    let fields = random_fields(cfg, 256, 3, 10, 12)?;
    let tg = TimeGrid::for_band(1.0, 10.0, 2.0, k as f64)?;
    max_of(fields.iter().map(|f| Ok(check_iteration_identity(f, k, 2.0, &tg)?.residual)))
}

fn hilbert_comparison(cfg: &RunConfig) -> Result<f64> {
    let phi = CutoffPhi::default();
    let coarse = standard_fields::<f64>(cfg.half_width, cfg.half_points)?;
    let fine = standard_fields::<f64>(cfg.half_width, 2 * cfg.half_points)?;
    let drifts = coarse
        .par_iter()
        .zip(&fine)
        .map(|((_, c), (_, f))| {
            let a = comparison_ratio(c, &phi, &eps_grid_to(c, cfg.eps_floor, cfg.per_octave)?, cfg.per_octave)?;
            let b = comparison_ratio(f, &phi, &eps_grid_to(f, cfg.eps_floor, cfg.per_octave)?, cfg.per_octave)?;
            Ok(drift(a, b))
        })
        .collect::<Vec<_>>();
    max_of(drifts)
}

fn indicator_log3(cfg: &RunConfig) -> Result<f64> {
    let f = LineSample::from_real_fn(cfg.half_width, cfg.half_points, |x: f64| if x.abs() <= 1.0 { 1.0 } else { 0.0 })?;
    let h = truncated_hilbert(&f, 2.0 * f.step())?;
    let i = cfg.half_points + (2.0 / f.step()).round() as usize;
    let z = h.values()[i];
    Ok((z.re - 3f64.ln()).abs().max(z.im.abs()))
}

fn antisymmetry(cfg: &RunConfig) -> Result<f64> {
    let mut worst = 0.0f64;
    for (_, f) in standard_fields::<f64>(cfg.half_width, 512)? {
        let eps = 3.0 * f.step();
        let h = truncated_hilbert(&f, eps)?;
        let hr = truncated_hilbert(&f.reflect(), eps)?.reflect();
        let scale = h.pointwise_norms().iter().copied().fold(f64::MIN_POSITIVE, f64::max);
        for (a, b) in h.values().iter().zip(hr.values()) {
            worst = worst.max((a + b).norm() / scale);
        }
    }
    Ok(worst)
}

fn convergence_rate(cfg: &RunConfig) -> Result<f64> {
    let bump = |m: usize| LineSample::from_real_fn(cfg.half_width, m, |x: f64| if x.abs() < 2.0 { (-1.0 / (1.0 - x * x / 4.0)).exp() } else { 0.0 });
    let study = convergence_study(bump, &[512, 1024, 2048, 4096], &[16.0, 8.0, 4.0, 2.0], cfg.osc_threshold)?;
    if study.medians.windows(2).any(|w| w[1] >= w[0]) {
        return Ok(f64::INFINITY);
    }
    Ok((study.rate - 1.0).abs())
}

macro_rules! check {
    ($suite:expr, $name:expr, $anchor:expr, $tol:expr, $run:expr) => {
        Check { suite: $suite, name: $name, anchor: $anchor, tolerance: $tol, run: $run }
    };
}

/// Every check in table order.
pub fn checks() -> Vec<Check> {
    vec![
        check!("semigroup", "subordination", "Poisson semigroup as a heat average", 1e-8, subordination),
        check!("semigroup", "semigroup_law", "P_s P_t = P_(s+t)", 1e-12, semigroup_law),
        check!("semigroup", "contraction", "L^p contraction of P_t", 1e-10, contraction),
        check!("fracderiv", "route_alpha_0.3", "quadrature vs spectral derivative", 1e-6, |c| route(c, ALPHAS[0])),
        check!("fracderiv", "route_alpha_0.5", "quadrature vs spectral derivative", 1e-6, |c| route(c, ALPHAS[1])),
        check!("fracderiv", "route_alpha_1.0", "quadrature vs spectral derivative", 1e-6, |c| route(c, ALPHAS[2])),
        check!("fracderiv", "route_alpha_1.3", "quadrature vs spectral derivative", 1e-6, |c| route(c, ALPHAS[3])),
        check!("fracderiv", "route_alpha_2.0", "quadrature vs spectral derivative", 1e-6, |c| route(c, ALPHAS[4])),
        check!("fracderiv", "route_alpha_2.7", "quadrature vs spectral derivative", 1e-6, |c| route(c, ALPHAS[5])),
        check!("fracderiv", "integer_order_1", "integer order is the classical derivative", 1e-7, |c| integer_match(c, 1)),
        check!("fracderiv", "integer_order_2", "integer order is the classical derivative", 1e-7, |c| integer_match(c, 2)),
        check!("fracderiv", "decay_stability", "t^a |d^a P_t f|_p <= C |f|_p", 0.05, decay),
        check!("fracderiv", "order_reduction_single", "order reduction integral", 1e-6, reduction_single),
        check!("fracderiv", "order_reduction_random", "order reduction integral", 1e-5, reduction_random),
        check!("fracderiv", "composition_single", "d^a d^b = d^(a+b)", 1e-6, composition_single),
        check!("fracderiv", "composition_random", "d^a d^b = d^(a+b)", 1e-5, composition_random),
        check!("fracderiv", "kernel_bounds_stability", "size and smoothness of the kernel", 0.1, kernel_bounds),
        check!("squarefuncs", "g_single_mode_half", "g of e^(ix) with a=1, q=2 is 1/2", 1e-6, g_half),
        check!("squarefuncs", "g_single_mode_closed_form", "g of a single mode is Gamma(qa)^(1/q)/q^a", 1e-6, g_closed_form),
        check!("squarefuncs", "beta_gamma_comparison", "g_b <= Gamma(b)/Gamma(c) g_c", 1e-4, beta_gamma),
        check!("squarefuncs", "lq_identity_single", "|S|_q^q = v_n |g|_q^q", 1e-6, lq_single),
        check!("squarefuncs", "lq_identity_random", "|S|_q^q = v_n |g|_q^q", 1e-4, lq_random),
        check!("squarefuncs", "area_gstar_chain", "S <= 2^(ln/q) g*", 1e-4, chain),
        check!("squarefuncs", "g_over_s_stability", "g <= C S under refinement", 0.1, g_over_s),
        check!("squarefuncs", "polarization_random", "polarization with conjugate pairing", 1e-6, polarization_random),
        check!("squarefuncs", "polarization_single", "polarization on a single mode", 1e-8, polarization_single),
        check!("squarefuncs", "iteration_k1", "iterated time integral with Beta constant", 1e-4, |c| iteration(c, 1)),
        check!("squarefuncs", "iteration_k2", "iterated time integral with Beta constant", 1e-4, |c| iteration(c, 2)),
        check!("hilbert", "comparison_stability", "|H*_phi f - H* f| <= C M(|f|)", 0.1, hilbert_comparison),
        check!("hilbert", "indicator_log3", "H 1_[-1,1](2) = log 3", 5e-3, indicator_log3),
        check!("hilbert", "antisymmetry", "odd kernel antisymmetry", 1e-12, antisymmetry),
        check!("hilbert", "convergence_rate", "linear decay of the truncation oscillation", 0.2, convergence_rate),
    ]
}

/// Runs the checks of `suite` in parallel and returns rows in table order.
pub fn evaluate(cfg: &RunConfig, suite: &str) -> Result<Vec<Row>, CliError> {
    if !SUITES.contains(&suite) {
        return Err(CliError::config(format!("unknown suite `{suite}`; expected one of {}", SUITES.join(", "))));
    }
    let selected: Vec<Check> = checks().into_iter().filter(|c| suite == "all" || c.suite == suite).collect();
    Ok(selected
        .par_iter()
        .map(|c| {
            let tolerance = cfg.tolerance.unwrap_or(c.tolerance);
            let (value, error) = match (c.run)(cfg) {
                Ok(v) => (v, None),
                Err(e) => (f64::NAN, Some(e.to_string())),
            };
            Row {
                suite: c.suite,
                name: c.name,
                anchor: c.anchor,
                value,
                tolerance,
                passed: error.is_none() && value <= tolerance,
                error,
            }
        })
        .collect())
}

/// Rows `suite,name,anchor,value,tolerance,status`.
pub fn render_csv(rows: &[Row]) -> String {
    let mut s = String::from("suite,name,anchor,value,tolerance,status\n");
    for r in rows {
        s.push_str(&format!(
            "{},{},\"{}\",{:.6e},{:.1e},{}\n",
            r.suite,
            r.name,
            r.anchor,
            r.value,
            r.tolerance,
            if r.passed { "PASS" } else { "FAIL" }
        ));
    }
    s
}

/// Aligned table for the terminal.
pub fn render_table(rows: &[Row]) -> String {
    let wn = rows.iter().map(|r| r.name.len()).max().unwrap_or(4).max(4);
    let wa = rows.iter().map(|r| r.anchor.len()).max().unwrap_or(6).max(6);
    let mut s = format!("{:<wn$}  {:<wa$}  {:>13}  {:>9}  status\n", "name", "anchor", "value", "tolerance");
    for r in rows {
        s.push_str(&format!(
            "{:<wn$}  {:<wa$}  {:>13.6e}  {:>9.1e}  {}\n",
            r.name,
            r.anchor,
            r.value,
            r.tolerance,
            if r.passed { "PASS" } else { "FAIL" }
        ));
    }
    s
}

pub fn run(cfg: &RunConfig, suite: &str, stdout: &mut dyn Write, stderr: &mut dyn Write) -> Result<Exit, CliError> {
    let rows = evaluate(cfg, suite)?;
    let name = format!("verify_{suite}.csv");
    write_atomic(&cfg.out, &name, render_csv(&rows).as_bytes())?;
    let mut meta = Sidecar::new(cfg, "verify", suite);
    meta.push("tolerance_override", cfg.tolerance.map_or_else(|| "none".into(), |t| format!("{t:e}")));
    meta.write(&cfg.out, &name)?;
    let failed = rows.iter().filter(|r| !r.passed).count();
    let io = |e: std::io::Error| CliError::input(e.to_string());
    write!(stdout, "{}", render_table(&rows)).map_err(io)?;
    writeln!(stdout, "verify {suite}: {} checks, {failed} failed", rows.len()).map_err(io)?;
    for r in rows.iter().filter(|r| r.error.is_some()) {
        writeln!(stderr, "{}: {}", r.name, r.error.as_deref().unwrap_or("")).map_err(io)?;
    }
    Ok(if failed == 0 { Exit::Ok } else { Exit::VerifyFailed })
}
