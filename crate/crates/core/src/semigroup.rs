//! Heat and Poisson semigroups as Fourier multipliers, and the Poisson
//! semigroup recovered from the heat semigroup by subordination.

use num_complex::Complex;

use crate::error::invalid;
use crate::grid::{forward_transform, inverse_transform, Field, RadialShells, Spectrum};
use crate::{Error, Real, Result};

fn check_time<T: Real>(t: T) -> Result<()> {
    if !(t > T::zero()) || !t.is_finite() {
        return Err(invalid("t", format!("time must be positive and finite, got {t}")));
    }
    Ok(())
}

fn real<T: Real>(x: T) -> Complex<T> {
    Complex::new(x, T::zero())
}

/// `e^{-tλ²}`.
pub fn heat_multiplier<T: Real>(lambda: T, t: T) -> T {
    (-t * lambda * lambda).exp()
}

/// `e^{-tλ}`.
pub fn poisson_multiplier<T: Real>(lambda: T, t: T) -> T {
    (-t * lambda).exp()
}

/// `(-λ)^m e^{-tλ}`, the symbol of `∂_t^m 𝒫_t`; zero at `λ = 0`.
pub fn poisson_derivative_multiplier<T: Real>(lambda: T, t: T, m: u32) -> T {
    if lambda == T::zero() {
        return T::zero();
    }
    let sign = if m % 2 == 0 { T::one() } else { -T::one() };
    sign * lambda.powi(m as i32) * (-t * lambda).exp()
}

fn apply<T: Real>(f: &Field<T>, mult: impl Fn(T) -> T) -> Field<T> {
    let spec = forward_transform(f);
    let shells = f.grid().radial_shells();
    inverse_transform(&spec.apply_radial(&shells, |l| real(mult(l))))
}

/// Gauss–Weierstrass semigroup `𝒯_t`.
pub fn heat_apply<T: Real>(f: &Field<T>, t: T) -> Result<Field<T>> {
    check_time(t)?;
    Ok(apply(f, |l| heat_multiplier(l, t)))
}

/// Poisson semigroup `𝒫_t`.
pub fn poisson_apply<T: Real>(f: &Field<T>, t: T) -> Result<Field<T>> {
    check_time(t)?;
    Ok(apply(f, |l| poisson_multiplier(l, t)))
}

/// `∂_t^m 𝒫_t f`, `m ≥ 1`.
pub fn poisson_derivative_integer<T: Real>(f: &Field<T>, t: T, m: u32) -> Result<Field<T>> {
    check_time(t)?;
    if m == 0 {
        return Err(invalid("m", "derivative order must be at least 1"));
    }
    Ok(apply(f, |l| poisson_derivative_multiplier(l, t, m)))
}

/// Trapezoid rule for the subordination integral written in `w = t²/(4u) = e^v`:
/// `𝒫_t = π^{-1/2} ∫ e^{v/2} e^{-e^v} 𝒯_{t² e^{-v}/4} dv`.
#[derive(Debug, Clone)]
pub struct SubordinationQuad<T> {
    nodes: Vec<T>,
    weights: Vec<T>,
    tolerance: T,
}

impl<T: Real> SubordinationQuad<T> {
    pub const DEFAULT_NODES: usize = 256;
    const V_MIN: f64 = -45.0;
    const V_MAX: f64 = 5.0;

    /// Rule with `j` nodes; fails if the density integral is off by more than `1e-9`.
    pub fn new(j: usize) -> Result<Self> {
        Self::with_tolerance(j, T::lit(1e-8))
    }

    /// As [`new`](Self::new), certifying applications to relative `L²` error `tolerance`.
    pub fn with_tolerance(j: usize, tolerance: T) -> Result<Self> {
        if j < 8 {
            return Err(invalid("subordination_nodes", format!("need at least 8 nodes, got {j}")));
        }
        let (lo, hi) = (T::lit(Self::V_MIN), T::lit(Self::V_MAX));
        let h = (hi - lo) / T::from_count(j - 1);
        let c = T::one() / T::PI().sqrt();
        let mut nodes = Vec::with_capacity(j);
        let mut weights = Vec::with_capacity(j);
        for i in 0..j {
            let v = lo + h * T::from_count(i);
            let w = v.exp();
            nodes.push(w);
            weights.push(h * c * (v * T::lit(0.5)).exp() * (-w).exp());
        }
        let quad = Self { nodes, weights, tolerance };
        let err = quad.density_error();
        if err > T::lit(1e-9) {
            return Err(Error::AccuracyBudget {
                what: "subordination density",
                estimate: err.as_f64(),
                tolerance: 1e-9,
            });
        }
        Ok(quad)
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn tolerance(&self) -> T {
        self.tolerance
    }

    /// `|Σ_j w_j − 1|`, the error on constants.
    pub fn density_error(&self) -> T {
        (self.weights.iter().copied().sum::<T>() - T::one()).abs()
    }

    /// Heat times `u_j = t²/(4 w_j)` paired with their weights.
    pub fn heat_times(&self, t: T) -> impl Iterator<Item = (T, T)> + '_ {
        let c = t * t * T::lit(0.25);
        self.nodes.iter().zip(&self.weights).map(move |(&w, &wt)| (c / w, wt))
    }

    /// Quadrature value of the Poisson symbol at `λ` and its embedded half-rule value.
    pub fn symbol(&self, lambda: T, t: T) -> (T, T) {
        let mut full = T::zero();
        let mut half = T::zero();
        for (i, (u, w)) in self.heat_times(t).enumerate() {
            let term = w * heat_multiplier(lambda, u);
            full += term;
            if i % 2 == 0 {
                half += term + term;
            }
        }
        (full, half)
    }
}

/// Per-shell quadrature symbol and error estimate.
///
/// Trapezoid errors on analytic integrands decay like `e^{-c/h}`, so the
/// error at step `h` is estimated by the squared relative gap to step `2h`.
fn subordination_table<T: Real>(quad: &SubordinationQuad<T>, shells: &RadialShells<T>, t: T) -> (Vec<Complex<T>>, Vec<T>) {
    let mut table = Vec::with_capacity(shells.lambdas.len());
    let mut est = Vec::with_capacity(shells.lambdas.len());
    for &l in &shells.lambdas {
        let (full, half) = quad.symbol(l, t);
        let gap = (full - half).abs();
        let scale = full.abs().max(T::min_positive_value());
        let e = if l == T::zero() {
            quad.density_error()
        } else {
            gap * (gap / scale).min(T::one())
        };
        table.push(real(full));
        est.push(e);
    }
    (table, est)
}

/// Poisson semigroup computed as a weighted sum of heat semigroups.
pub fn subordinate_poisson<T: Real>(f: &Field<T>, t: T, quad: &SubordinationQuad<T>) -> Result<Field<T>> {
    check_time(t)?;
    let spec = forward_transform(f);
    let shells = f.grid().radial_shells();
    let (table, est) = subordination_table(quad, &shells, t);
    let out = spec.apply_shell_table(&shells, &table);
    let estimate = weighted_estimate(&spec, &out, &shells, &est);
    if estimate > quad.tolerance() {
        return Err(Error::AccuracyBudget {
            what: "subordination quadrature",
            estimate: estimate.as_f64(),
            tolerance: quad.tolerance().as_f64(),
        });
    }
    Ok(inverse_transform(&out))
}

/// Relative `L²` error bound from per-shell absolute symbol errors.
pub(crate) fn weighted_estimate<T: Real>(input: &Spectrum<T>, output: &Spectrum<T>, shells: &RadialShells<T>, est: &[T]) -> T {
    let np = input.grid().npoints();
    let err: T = input
        .coefficients()
        .iter()
        .enumerate()
        .map(|(i, z)| {
            let e = est[shells.shell_of[i % np]];
            z.norm_sqr() * e * e
        })
        .sum();
    let size: T = output.coefficients().iter().map(|z| z.norm_sqr()).sum();
    if err == T::zero() {
        T::zero()
    } else if size == T::zero() {
        err.sqrt()
    } else {
        (err / size).sqrt()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::{samples, GridSpec};

    #[test]
    fn density_integrates_to_one() {
        let quad = SubordinationQuad::<f64>::new(256).unwrap();
        assert!(quad.density_error() < 1e-9);
        assert!(quad.weights.iter().all(|&w| w > 0.0));
    }

    #[test]
    fn small_budget_is_rejected() {
        assert!(matches!(
            SubordinationQuad::<f64>::new(24),
            Err(Error::AccuracyBudget { .. })
        ));
    }

    #[test]
    fn reproduces_laplace_transform_of_density() {
        // ∫ u^{-3/2} e^{-t²/4u} e^{-cu} du = 2√π e^{-t√c} / t
        let quad = SubordinationQuad::<f64>::new(256).unwrap();
        for &(c, t) in &[(1.0, 1.0), (4.0, 0.5), (0.25, 3.0), (9.0, 0.1), (0.01, 10.0)] {
            let (sym, _) = quad.symbol(f64::sqrt(c), t);
            let exact = (-t * c.sqrt()).exp();
            assert!((sym - exact).abs() <= 1e-9 * exact, "c={c} t={t}: {sym} vs {exact}");
        }
    }

    #[test]
    fn integer_derivative_multiplier_signs() {
        assert_eq!(poisson_derivative_multiplier(2.0_f64, 0.0, 1), -2.0);
        assert_eq!(poisson_derivative_multiplier(2.0_f64, 0.0, 2), 4.0);
        assert_eq!(poisson_derivative_multiplier(0.0_f64, 1.0, 3), 0.0);
    }

    #[test]
    fn rejects_nonpositive_time() {
        let g = GridSpec::<f64>::line(16).unwrap();
        let f = samples::plane_wave(g, [1, 0]).unwrap();
        assert!(heat_apply(&f, 0.0).is_err());
        assert!(poisson_apply(&f, -1.0).is_err());
        assert!(poisson_derivative_integer(&f, 1.0, 0).is_err());
    }
}
