use std::io::Write;

use num_complex::Complex;

use super::{FracOrder, SWQuadrature};
use crate::error::invalid;
use crate::special::gamma;
use crate::squarefuncs::TimeGrid;
use crate::{cis, Real, Result};

/// `∂_τ^m` of the one-dimensional Poisson kernel `π^{-1} τ/(τ² + x²)`, `m ≤ 4`.
pub fn poisson_kernel_t_derivative<T: Real>(tau: T, x: T, m: u32) -> Result<T> {
    let (t2, x2) = (tau * tau, x * x);
    let c = |v: f64| T::lit(v);
    let numerator = match m {
        0 => tau,
        1 => x2 - t2,
        2 => c(2.0) * tau * (t2 - c(3.0) * x2),
        3 => c(-6.0) * (t2 * t2 - c(6.0) * t2 * x2 + x2 * x2),
        4 => c(24.0) * tau * (t2 * t2 - c(10.0) * t2 * x2 + c(5.0) * x2 * x2),
        _ => return Err(invalid("m", format!("analytic kernel derivatives stop at order 4, got {m}"))),
    };
    Ok(numerator / (T::PI() * (t2 + x2).powi(m as i32 + 1)))
}

fn check_point<T: Real>(x: T) -> Result<()> {
    if !(x.abs() > T::zero()) || !x.is_finite() {
        return Err(invalid("x", format!("kernel needs a finite nonzero x, got {x}")));
    }
    Ok(())
}

/// `K_t(x) = t^α e^{iπμ}/Γ(μ) ∫₀^∞ ∂_t^m P_{t+s}(x) s^{μ-1} ds`.
pub fn kernel_value<T: Real>(t: T, x: T, ord: FracOrder<T>, quad: &SWQuadrature<T>) -> Result<Complex<T>> {
    check_point(x)?;
    if !(t > T::zero()) {
        return Err(invalid("t", format!("time must be positive, got {t}")));
    }
    let (m, mu, alpha) = (ord.m(), ord.mu(), ord.alpha());
    poisson_kernel_t_derivative(t, x, m)?;
    let split = t + x.abs();
    let reach = T::lit(1e14).powf((alpha + T::one()).recip());
    let rule = quad.rule(split, mu, split * reach);
    let integral = rule.integrate(|s| poisson_kernel_t_derivative(t + s, x, m).expect("order checked"));
    Ok(cis(T::PI() * mu) * (t.powf(alpha) * integral / gamma(mu)))
}

/// `e^{-iπα} t^α Γ(α+1)/π · Re[(t + ix)^{-α-1}]`.
pub fn kernel_closed_form<T: Real>(t: T, x: T, alpha: T) -> Complex<T> {
    let z = Complex::new(t, x).powf(-alpha - T::one());
    cis(-T::PI() * alpha) * (t.powf(alpha) * gamma(alpha + T::one()) / T::PI() * z.re)
}

/// Time grid covering `|x| ∈ [x_lo, x_hi]` with negligible tails for `∫|K_t(x)|^q dt/t`.
pub fn kernel_time_grid<T: Real>(x_lo: T, x_hi: T, ord: FracOrder<T>, q: T) -> Result<TimeGrid<T>> {
    if !(x_lo > T::zero()) || !(x_hi >= x_lo) {
        return Err(invalid("x", format!("need 0 < x_lo <= x_hi, got [{x_lo}, {x_hi}]")));
    }
    let qa = q * ord.alpha();
    let lo = (T::lit(1e-12) * qa).powf(qa.recip());
    let hi = (T::lit(1e12) / q).powf(q.recip());
    let t_min = x_lo * lo;
    let t_max = x_hi * hi;
    TimeGrid::new(t_min, t_max, TimeGrid::default_count(t_min, t_max))
}

/// `K_t(x)` along a time grid and `A(x) = (∫|K_t(x)|^q dt/t)^{1/q}`.
#[derive(Debug, Clone, PartialEq)]
pub struct KernelProfile<T> {
    pub x: T,
    pub times: Vec<T>,
    pub values: Vec<Complex<T>>,
    pub aggregate: T,
}

pub fn kernel_eval<T: Real>(x: T, ord: FracOrder<T>, q: T, tg: &TimeGrid<T>, quad: &SWQuadrature<T>) -> Result<KernelProfile<T>> {
    check_point(x)?;
    if x.abs() <= tg.t_min() {
        return Err(invalid("x", format!("|x| = {} is below the time-grid resolution {}", x.abs(), tg.t_min())));
    }
    if !(q > T::one()) {
        return Err(invalid("q", format!("must exceed 1, got {q}")));
    }
    let values = tg
        .nodes()
        .iter()
        .map(|&t| kernel_value(t, x, ord, quad))
        .collect::<Result<Vec<_>>>()?;
    let sum = values
        .iter()
        .zip(tg.weights())
        .fold(T::zero(), |a, (k, &w)| a + w * k.norm().powf(q));
    Ok(KernelProfile { x, times: tg.nodes().to_vec(), values, aggregate: sum.powf(q.recip()) })
}

/// Size and smoothness constants of the kernel aggregate over an `x` grid.
#[derive(Debug, Clone, PartialEq)]
pub struct KernelBounds<T> {
    /// `sup_x |x| A(x)`.
    pub size: T,
    /// `sup_x |x|² |A′(x)|` with centered differences on the grid.
    pub gradient: T,
    pub aggregates: Vec<T>,
}

pub fn check_kernel_bounds<T: Real>(ord: FracOrder<T>, q: T, xgrid: &[T], quad: &SWQuadrature<T>) -> Result<KernelBounds<T>> {
    if xgrid.len() < 3 {
        return Err(invalid("xgrid", "need at least three points"));
    }
    if xgrid.windows(2).any(|w| !(w[0] > T::zero() && w[1] > w[0])) {
        return Err(invalid("xgrid", "points must be positive and strictly increasing"));
    }
    let tg = kernel_time_grid(xgrid[0], xgrid[xgrid.len() - 1], ord, q)?;
    let aggregates = xgrid
        .iter()
        .map(|&x| kernel_eval(x, ord, q, &tg, quad).map(|p| p.aggregate))
        .collect::<Result<Vec<_>>>()?;
    let size = xgrid.iter().zip(&aggregates).map(|(&x, &a)| x * a).fold(T::zero(), T::max);
    let gradient = (1..xgrid.len() - 1)
        .map(|i| {
            let d = (aggregates[i + 1] - aggregates[i - 1]) / (xgrid[i + 1] - xgrid[i - 1]);
            xgrid[i] * xgrid[i] * d.abs()
        })
        .fold(T::zero(), T::max);
    Ok(KernelBounds { size, gradient, aggregates })
}

/// Rows `t,x,re_K,im_K`.
pub fn write_kernel_csv<T: Real, W: Write>(profiles: &[KernelProfile<T>], mut out: W) -> Result<()> {
    writeln!(out, "t,x,re_K,im_K")?;
    for p in profiles {
        for (t, k) in p.times.iter().zip(&p.values) {
            writeln!(out, "{:.16e},{:.16e},{:.16e},{:.16e}", t.as_f64(), p.x.as_f64(), k.re.as_f64(), k.im.as_f64())?;
        }
    }
    Ok(())
}
