//! The fractional derivative `∂_t^α 𝒫_t` by its spectral symbol and by the
//! defining integral against `∂_t^m 𝒫_{t+s}`.

mod kernel;
mod sw;

use num_complex::Complex;

use crate::error::invalid;
use crate::grid::{forward_transform, inverse_transform, lp_norm, relative_l2_distance, Field, Spectrum};
use crate::semigroup::{poisson_derivative_multiplier, weighted_estimate};
use crate::special::gamma;
use crate::squarefuncs::TimeGrid;
use crate::{cis, Error, Real, Result};

pub use kernel::{
    check_kernel_bounds, kernel_closed_form, kernel_eval, kernel_time_grid, kernel_value, poisson_kernel_t_derivative,
    write_kernel_csv, KernelBounds, KernelProfile,
};
pub use sw::{SWQuadrature, SwRule};

/// Order `α > 0` with `m` the smallest integer strictly above it.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FracOrder<T> {
    alpha: T,
    m: u32,
}

impl<T: Real> FracOrder<T> {
    pub fn new(alpha: T) -> Result<Self> {
        if !(alpha > T::zero()) || !alpha.is_finite() {
            return Err(invalid("alpha", format!("order must be positive and finite, got {alpha}")));
        }
        let m = alpha.floor().to_u32().ok_or_else(|| invalid("alpha", "order too large"))? + 1;
        Ok(Self { alpha, m })
    }

    pub fn alpha(&self) -> T {
        self.alpha
    }

    pub fn m(&self) -> u32 {
        self.m
    }

    /// `m − α ∈ (0, 1]`.
    pub fn mu(&self) -> T {
        T::from_count(self.m as usize) - self.alpha
    }
}

/// `e^{-iπα} λ^α e^{-tλ}`, zero at `λ = 0`.
pub fn frac_multiplier<T: Real>(lambda: T, t: T, alpha: T) -> Complex<T> {
    if lambda == T::zero() {
        return Complex::new(T::zero(), T::zero());
    }
    cis(-T::PI() * alpha) * (lambda.powf(alpha) * (-t * lambda).exp())
}

/// `(tλ)^α e^{-tλ}`, the modulus of the symbol of `t^α ∂_t^α 𝒫_t`.
pub fn scaled_frac_modulus<T: Real>(lambda: T, t: T, alpha: T) -> T {
    if lambda == T::zero() {
        return T::zero();
    }
    let s = t * lambda;
    s.powf(alpha) * (-s).exp()
}

fn check_time<T: Real>(t: T) -> Result<()> {
    if !(t > T::zero()) || !t.is_finite() {
        return Err(invalid("t", format!("time must be positive and finite, got {t}")));
    }
    Ok(())
}

pub(crate) fn spectral_apply<T: Real>(spec: &Spectrum<T>, t: T, alpha: T) -> Field<T> {
    let shells = spec.grid().radial_shells();
    inverse_transform(&spec.apply_radial(&shells, |l| frac_multiplier(l, t, alpha)))
}

/// `∂_t^α 𝒫_t f` through the spectral symbol.
pub fn frac_derivative_spectral<T: Real>(f: &Field<T>, t: T, ord: FracOrder<T>) -> Result<Field<T>> {
    check_time(t)?;
    Ok(spectral_apply(&forward_transform(f), t, ord.alpha))
}

/// Applies `e^{iπμ}/Γ(μ) ∫₀^∞ G_{t+s} s^{μ-1} ds` where `G_τ` has symbol
/// `inner(λ)·(−λ)^m e^{-τλ}`, certifying every shell against the Gamma integral.
fn sw_apply<T: Real>(
    spec: &Spectrum<T>,
    t: T,
    mu: T,
    m: u32,
    quad: &SWQuadrature<T>,
    what: &'static str,
    inner: impl Fn(T) -> Complex<T>,
) -> Result<Field<T>> {
    let grid = *spec.grid();
    let Some((lambda_min, _)) = spec.frequency_band(T::zero()) else {
        return Ok(Field::zeros(grid, *spec.banach()));
    };
    let rule = quad.rule_for_band(t, mu, lambda_min, m);
    let pref = cis(T::PI() * mu) / gamma(mu);
    let shells = grid.radial_shells();
    let mut table = Vec::with_capacity(shells.lambdas.len());
    let mut est = Vec::with_capacity(shells.lambdas.len());
    for &l in &shells.lambdas {
        if l == T::zero() {
            table.push(Complex::new(T::zero(), T::zero()));
            est.push(T::zero());
            continue;
        }
        let c = inner(l);
        let integral = rule.integrate(|s| poisson_derivative_multiplier(l, t + s, m));
        table.push(pref * c * integral);
        let size = (pref * c).norm() * l.powi(m as i32) * (-t * l).exp() * gamma(mu) * l.powf(-mu);
        est.push(size * rule.laplace_error(l));
    }
    let out = spec.apply_shell_table(&shells, &table);
    let estimate = weighted_estimate(spec, &out, &shells, &est);
    if !(estimate <= quad.tolerance()) {
        return Err(Error::AccuracyBudget {
            what,
            estimate: estimate.as_f64(),
            tolerance: quad.tolerance().as_f64(),
        });
    }
    Ok(inverse_transform(&out))
}

/// `∂_t^α 𝒫_t f` through the defining integral over `∂_t^m 𝒫_{t+s} f`.
pub fn frac_derivative_quadrature<T: Real>(f: &Field<T>, t: T, ord: FracOrder<T>, quad: &SWQuadrature<T>) -> Result<Field<T>> {
    check_time(t)?;
    let one = Complex::new(T::one(), T::zero());
    sw_apply(&forward_transform(f), t, ord.mu(), ord.m, quad, "fractional derivative quadrature", |_| one)
}

/// Result of the decay-bound sweep.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DecayReport<T> {
    /// `sup_t t^α ‖∂_t^α 𝒫_t f‖_p / ‖f‖_p` over the time grid.
    pub sup: T,
    pub argmax: T,
}

pub fn check_decay_bound<T: Real>(f: &Field<T>, ord: FracOrder<T>, p: T, tg: &TimeGrid<T>) -> Result<DecayReport<T>> {
    let norm = lp_norm(f, p)?;
    if norm == T::zero() {
        return Err(invalid("f", "decay bound needs a nonzero field"));
    }
    let spec = forward_transform(f);
    let mut best = DecayReport { sup: T::zero(), argmax: tg.nodes()[0] };
    for &t in tg.nodes() {
        let d = spectral_apply(&spec, t, ord.alpha);
        let r = t.powf(ord.alpha) * lp_norm(&d, p)? / norm;
        if r > best.sup {
            best = DecayReport { sup: r, argmax: t };
        }
    }
    Ok(best)
}

/// Relative distance between `∂^β 𝒫_t f` and the integral of `∂^γ 𝒫_{t+s} f`
/// against `s^{γ-β-1}`.
pub fn check_order_reduction<T: Real>(f: &Field<T>, beta: T, gamma_: T, t: T, quad: &SWQuadrature<T>) -> Result<T> {
    check_time(t)?;
    if !(beta > T::zero()) || !(gamma_ > beta) {
        return Err(invalid("beta", format!("need 0 < beta < gamma, got beta = {beta}, gamma = {gamma_}")));
    }
    let spec = forward_transform(f);
    let mu = gamma_ - beta;
    let phase = cis(-T::PI() * gamma_);
    let lhs = sw_apply(&spec, t, mu, 0, quad, "order reduction quadrature", |l| phase * l.powf(gamma_))?;
    let rhs = spectral_apply(&spec, t, beta);
    relative_l2_distance(&lhs, &rhs)
}

/// Residuals of `∂^α(∂^β 𝒫_t f) = ∂^{α+β} 𝒫_t f`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CompositionReport<T> {
    /// Quadrature in `s` applied to `s ↦ ∂^β 𝒫_{t+s} f`.
    pub quadrature: T,
    /// Product of symbols against the symbol of order `α + β`.
    pub spectral: T,
}

pub fn check_composition<T: Real>(f: &Field<T>, alpha: T, beta: T, t: T, quad: &SWQuadrature<T>) -> Result<CompositionReport<T>> {
    check_time(t)?;
    let ord = FracOrder::new(alpha)?;
    if !(beta > T::zero()) {
        return Err(invalid("beta", format!("order must be positive, got {beta}")));
    }
    let spec = forward_transform(f);
    let target = spectral_apply(&spec, t, alpha + beta);
    let phase = cis(-T::PI() * beta);
    let composed = sw_apply(&spec, t, ord.mu(), ord.m, quad, "composition quadrature", |l| phase * l.powf(beta))?;
    let shells = spec.grid().radial_shells();
    let product = inverse_transform(&spec.apply_radial(&shells, |l| frac_multiplier(l, T::zero(), alpha) * frac_multiplier(l, t, beta)));
    Ok(CompositionReport {
        quadrature: relative_l2_distance(&composed, &target)?,
        spectral: relative_l2_distance(&product, &target)?,
    })
}
