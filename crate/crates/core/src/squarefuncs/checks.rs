use num_complex::Complex;

use super::{accumulate, area_function, check_lambda, check_q, g_function, gstar_function, kernels, SquareFunctionReport, TimeGrid};
use crate::error::invalid;
use crate::fracderiv::{frac_multiplier, FracOrder};
use crate::grid::{e0_project, forward_transform, inverse_transform, lp_norm, BanachSpec, Field};
use crate::hilbert::hardy_littlewood_maximal_periodic;
use crate::semigroup::poisson_derivative_multiplier;
use crate::special::{beta, gamma};
use crate::{Error, Real, Result};

/// A grid point where an asserted inequality fails.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Violation<T> {
    pub point: usize,
    pub lhs: T,
    pub rhs: T,
}

/// `g_β^q ≤ (Γ(β)/Γ(γ)) g_γ^q` at every point.
#[derive(Debug, Clone, PartialEq)]
pub struct BetaGammaReport<T> {
    pub max_ratio: T,
    pub constant: T,
    pub slack: T,
    pub violations: Vec<Violation<T>>,
}

impl<T: Real> BetaGammaReport<T> {
    pub fn passed(&self) -> bool {
        self.violations.is_empty()
    }
}

fn ratio_where_positive<T: Real>(num: &[T], den: &[T]) -> T {
    let peak = den.iter().copied().fold(T::zero(), T::max);
    let floor = peak * T::lit(1e-14);
    num.iter()
        .zip(den)
        .filter(|(_, &d)| d > floor)
        .map(|(&n, &d)| n / d)
        .fold(T::zero(), T::max)
}

pub fn check_beta_gamma_comparison<T: Real>(f: &Field<T>, beta_: T, gamma_: T, q: T, tg: &TimeGrid<T>) -> Result<BetaGammaReport<T>> {
    if !(beta_ > T::zero()) || !(gamma_ > beta_) {
        return Err(invalid("beta", format!("need 0 < beta < gamma, got beta = {beta_}, gamma = {gamma_}")));
    }
    let gb = g_function(f, FracOrder::new(beta_)?, q, tg)?;
    let gg = g_function(f, FracOrder::new(gamma_)?, q, tg)?;
    let constant = gamma(beta_) / gamma(gamma_);
    let slack = T::lit(1e-4);
    let violations = gb
        .values
        .iter()
        .zip(&gg.values)
        .enumerate()
        .filter(|(_, (&a, &b))| a > constant * b * (T::one() + slack))
        .map(|(point, (&lhs, &b))| Violation { point, lhs, rhs: constant * b })
        .collect();
    Ok(BetaGammaReport {
        max_ratio: ratio_where_positive(&gb.values, &gg.values),
        constant,
        slack,
        violations,
    })
}

/// `max_x g(x)/S(x)` over points where `S > 0`.
pub fn check_g_le_s<T: Real>(f: &Field<T>, ord: FracOrder<T>, q: T, tg: &TimeGrid<T>) -> Result<T> {
    let g = g_function(f, ord, q, tg)?;
    let s = area_function(f, ord, q, tg)?;
    Ok(ratio_where_positive(&g.values, &s.values))
}

/// Both sides of `‖S‖_q^q = v_n ‖g‖_q^q`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LqIdentityReport<T> {
    pub area_side: T,
    pub g_side: T,
    pub residual: T,
}

/// Volume of the unit ball in dimension 1 or 2.
pub fn unit_ball_volume<T: Real>(dim: usize) -> T {
    if dim == 1 {
        T::lit(2.0)
    } else {
        T::PI()
    }
}

fn relative_gap<T: Real>(a: T, b: T) -> T {
    let d = (a - b).abs();
    let s = a.abs().max(b.abs());
    if s == T::zero() {
        T::zero()
    } else {
        d / s
    }
}

pub fn check_lq_identity<T: Real>(f: &Field<T>, ord: FracOrder<T>, q: T, tg: &TimeGrid<T>) -> Result<LqIdentityReport<T>> {
    let g = g_function(f, ord, q, tg)?;
    let s = area_function(f, ord, q, tg)?;
    let area_side = s.lp_norm(q)?.powf(q);
    let g_side = unit_ball_volume::<T>(f.grid().dim()) * g.lp_norm(q)?.powf(q);
    Ok(LqIdentityReport { area_side, g_side, residual: relative_gap(area_side, g_side) })
}

/// `S ≤ 2^{λn/q} g*_λ` at every point.
#[derive(Debug, Clone, PartialEq)]
pub struct ChainReport<T> {
    pub constant: T,
    pub max_ratio: T,
    pub slack: T,
    pub violations: Vec<Violation<T>>,
}

impl<T: Real> ChainReport<T> {
    pub fn passed(&self) -> bool {
        self.violations.is_empty()
    }
}

pub fn check_area_le_gstar<T: Real>(f: &Field<T>, ord: FracOrder<T>, q: T, lambda: T, tg: &TimeGrid<T>) -> Result<ChainReport<T>> {
    let s = area_function(f, ord, q, tg)?;
    let gs = gstar_function(f, ord, q, lambda, tg)?;
    let n = T::from_count(f.grid().dim());
    let constant = T::lit(2.0).powf(lambda * n / q);
    let slack = T::lit(1e-4);
    let peak = s.max();
    let violations = s
        .values
        .iter()
        .zip(&gs.values)
        .enumerate()
        .filter(|(_, (&a, &b))| a > constant * b * (T::one() + slack) + T::lit(1e-10) * peak)
        .map(|(point, (&lhs, &b))| Violation { point, lhs, rhs: constant * b })
        .collect();
    let scaled: Vec<T> = gs.values.iter().map(|&v| v * constant).collect();
    Ok(ChainReport { constant, max_ratio: ratio_where_positive(&s.values, &scaled), slack, violations })
}

/// `‖g*_λ‖_p / ‖g‖_p` for `p ≥ q`.
pub fn check_gstar_vs_g<T: Real>(f: &Field<T>, ord: FracOrder<T>, q: T, lambda: T, p: T, tg: &TimeGrid<T>) -> Result<T> {
    if !(p >= q) {
        return Err(invalid("p", format!("comparison needs p >= q = {q}, got {p}")));
    }
    let g = g_function(f, ord, q, tg)?;
    let gs = gstar_function(f, ord, q, lambda, tg)?;
    let den = g.lp_norm(p)?;
    Ok(if den > T::zero() { gs.lp_norm(p)? / den } else { T::zero() })
}

/// Both sides of the polarization identity.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PolarizationReport<T> {
    pub lhs: Complex<T>,
    pub rhs: Complex<T>,
    pub residual: T,
}

const IDENTITY_TAIL: f64 = 1e-9;

fn tail_guard<T: Real>(first: T, last: T, size: T, what: &'static str) -> Result<()> {
    let est = (first.abs() + last.abs()) / size.max(T::min_positive_value());
    if est > T::lit(IDENTITY_TAIL) {
        return Err(Error::AccuracyBudget { what, estimate: est.as_f64(), tolerance: IDENTITY_TAIL });
    }
    Ok(())
}

/// `∫(f − E₀f) conj(g − E₀g) = 4^α/Γ(2α) ∫∫ t^α∂^α𝒫_t f · conj(t^α∂^α𝒫_t g) dt/t dx`.
pub fn check_polarization<T: Real>(f: &Field<T>, g: &Field<T>, ord: FracOrder<T>, tg: &TimeGrid<T>) -> Result<PolarizationReport<T>> {
    if *f.banach() != BanachSpec::Scalar || *g.banach() != BanachSpec::Scalar {
        return Err(invalid("banach", "polarization is checked on scalar fields"));
    }
    f.check_compatible(g)?;
    let w = f.grid().cell_measure();
    let fc = f.sub(&e0_project(f))?;
    let gc = g.sub(&e0_project(g))?;
    let zero = Complex::new(T::zero(), T::zero());
    let lhs = fc.values().iter().zip(gc.values()).fold(zero, |a, (&x, &y)| a + x * y.conj()) * w;
    let alpha = ord.alpha();
    let (sf, sg) = (forward_transform(f), forward_transform(g));
    let shells = f.grid().radial_shells();
    let pair = |t: T| -> Vec<T> {
        let scale = t.powf(alpha);
        let a = inverse_transform(&sf.apply_radial(&shells, |l| frac_multiplier(l, t, alpha) * scale));
        let b = inverse_transform(&sg.apply_radial(&shells, |l| frac_multiplier(l, t, alpha) * scale));
        let s = a.values().iter().zip(b.values()).fold(zero, |acc, (&x, &y)| acc + x * y.conj()) * w;
        vec![s.re, s.im]
    };
    let acc = accumulate(tg, 2, pair);
    let c = T::lit(4.0).powf(alpha) / gamma(T::lit(2.0) * alpha);
    let rhs = Complex::new(acc.total[0], acc.total[1]) * c;
    let den = lp_norm(&fc, T::lit(2.0))? * lp_norm(&gc, T::lit(2.0))?;
    if den > T::zero() {
        let first = Complex::new(acc.first[0], acc.first[1]).norm() * c / (T::lit(2.0) * alpha);
        let last = Complex::new(acc.last[0], acc.last[1]).norm() * c;
        tail_guard(first, last, den, "polarization time grid")?;
    }
    let gap = (lhs - rhs).norm();
    Ok(PolarizationReport { lhs, rhs, residual: if den > T::zero() { gap / den } else { gap } })
}

/// Both sides of `∬ s^q t^{kq} ‖∂^{k+1}𝒫_{t+s} f‖^q ds/s dt/t = B(kq, q) ∫ u^{(k+1)q} ‖∂^{k+1}𝒫_u f‖^q du/u`,
/// with `‖·‖` the `L^q_𝔹` norm.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IterationReport<T> {
    pub double: T,
    pub single: T,
    pub residual: T,
}

pub fn check_iteration_identity<T: Real>(f: &Field<T>, k: u32, q: T, tg: &TimeGrid<T>) -> Result<IterationReport<T>> {
    if k == 0 {
        return Err(invalid("k", "iteration order must be at least 1"));
    }
    check_q(q)?;
    let spec = forward_transform(f);
    let shells = f.grid().radial_shells();
    let w = f.grid().cell_measure();
    let banach = *f.banach();
    let np = f.grid().npoints();
    let m = k + 1;
    let mass = |u: T| -> T {
        let d = inverse_transform(&spec.apply_radial(&shells, |l| Complex::new(poisson_derivative_multiplier(l, u, m), T::zero())));
        let norms = crate::grid::pointwise_norms(&banach, d.values(), np);
        w * norms.iter().map(|&v| v.powf(q)).sum::<T>()
    };
    let kq = T::from_count(k as usize) * q;
    let mq = T::from_count(m as usize) * q;
    let single_acc = accumulate(tg, 1, |u| vec![u.powf(mq) * mass(u)]);
    let single = beta(kq, q) * single_acc.total[0];
    let rows = accumulate(tg, 1, |t| {
        let inner = tg.integrate(|s| s.powf(q) * mass(t + s));
        vec![t.powf(kq) * inner]
    });
    let double = rows.total[0];
    if single > T::zero() {
        let first = beta(kq, q) * single_acc.first[0] / mq;
        let last = beta(kq, q) * single_acc.last[0];
        tail_guard(first + rows.first[0] / kq, last + rows.last[0], single, "iteration time grid")?;
    }
    Ok(IterationReport { double, single, residual: relative_gap(double, single) })
}

/// `sup_t ∫ t^{-n} (t/(t + |x − y|))^{λn} h(y) dy` against the maximal function of `h`.
#[derive(Debug, Clone, PartialEq)]
pub struct DominationReport<T> {
    pub lhs: Vec<T>,
    pub maximal: Vec<T>,
    pub max_ratio: T,
}

pub fn check_maximal_domination<T: Real>(h: &Field<T>, lambda: T, tg: &TimeGrid<T>) -> Result<DominationReport<T>> {
    check_lambda(lambda)?;
    let grid = *h.grid();
    if grid.dim() != 1 || *h.banach() != BanachSpec::Scalar {
        return Err(invalid("h", "maximal domination is checked on one-dimensional scalar fields"));
    }
    let vals: Vec<T> = h.values().iter().map(|z| z.re).collect();
    if h.values().iter().any(|z| z.re < T::zero() || z.im != T::zero()) {
        return Err(invalid("h", "must be real and nonnegative"));
    }
    let mut lhs = vec![T::zero(); grid.npoints()];
    for &t in tg.nodes() {
        let conv = kernels::gstar_kernel(&grid, t, lambda).convolve(&grid, &vals);
        for (a, v) in lhs.iter_mut().zip(conv) {
            *a = a.max(v / t);
        }
    }
    let maximal = hardy_littlewood_maximal_periodic(&vals, 1);
    let max_ratio = ratio_where_positive(&lhs, &maximal);
    Ok(DominationReport { lhs, maximal, max_ratio })
}

/// Values of the three square functions for one field, for reuse across checks.
pub fn all_square_functions<T: Real>(
    f: &Field<T>,
    ord: FracOrder<T>,
    q: T,
    lambda: T,
    tg: &TimeGrid<T>,
) -> Result<[SquareFunctionReport<T>; 3]> {
    Ok([
        g_function(f, ord, q, tg)?,
        area_function(f, ord, q, tg)?,
        gstar_function(f, ord, q, lambda, tg)?,
    ])
}

