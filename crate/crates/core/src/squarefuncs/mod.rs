//! The fractional square functions `g_α^q`, `S_α^q`, `g*_{λ,α}^q` and the
//! identities and inequalities relating them.

mod checks;
pub mod kernels;
mod timegrid;

use std::io::Write;

use rayon::prelude::*;

use crate::error::invalid;
use crate::fracderiv::{scaled_frac_modulus, FracOrder};
use crate::grid::{forward_transform, inverse_transform, lp_norm_of_values, pointwise_norms, Field, GridSpec, RadialShells, Spectrum};
use crate::{Real, Result};

pub use checks::*;
pub use timegrid::TimeGrid;

const CHUNK: usize = 16;
const TRUNCATION_LEVEL: f64 = 1e-8;

/// Which square function a report holds.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SquareKind {
    G,
    Area,
    GStar,
}

impl SquareKind {
    pub fn name(&self) -> &'static str {
        match self {
            SquareKind::G => "g",
            SquareKind::Area => "area",
            SquareKind::GStar => "gstar",
        }
    }
}

/// Pointwise square-function values with the parameters that produced them.
#[derive(Debug, Clone, PartialEq)]
pub struct SquareFunctionReport<T> {
    pub kind: SquareKind,
    pub grid: GridSpec<T>,
    pub values: Vec<T>,
    pub alpha: T,
    pub q: T,
    pub lambda: Option<T>,
    pub t_min: T,
    pub t_max: T,
    pub count: usize,
    pub aperture: T,
    /// Largest estimated contribution of `t ∉ [t_min, t_max]`, relative to the largest value of the integral.
    pub tail_estimate: T,
    pub truncation_flag: bool,
    /// Some cone slice is wider than half the period, so it wraps around the torus.
    pub slice_exceeds_period: bool,
}

impl<T: Real> SquareFunctionReport<T> {
    pub fn lp_norm(&self, p: T) -> Result<T> {
        crate::grid::check_exponent(p)?;
        Ok(lp_norm_of_values(&self.values, p, self.grid.cell_measure()))
    }

    pub fn max(&self) -> T {
        self.values.iter().copied().fold(T::zero(), T::max)
    }

    /// Rows `x[,y],value`.
    pub fn write_csv<W: Write>(&self, mut out: W) -> Result<()> {
        writeln!(out, "{}", if self.grid.dim() == 2 { "x,y,value" } else { "x,value" })?;
        for (p, v) in self.values.iter().enumerate() {
            let x = self.grid.point(p);
            if self.grid.dim() == 2 {
                writeln!(out, "{:.16e},{:.16e},{:.16e}", x[0].as_f64(), x[1].as_f64(), v.as_f64())?;
            } else {
                writeln!(out, "{:.16e},{:.16e}", x[0].as_f64(), v.as_f64())?;
            }
        }
        Ok(())
    }

    /// Metadata as ordered `key=value` pairs.
    pub fn metadata(&self) -> Vec<(String, String)> {
        let mut meta = vec![
            ("kind".to_string(), self.kind.name().to_string()),
            ("alpha".to_string(), format!("{}", self.alpha)),
            ("q".to_string(), format!("{}", self.q)),
            ("lambda".to_string(), self.lambda.map_or_else(|| "none".to_string(), |l| format!("{l}"))),
            ("t_min".to_string(), format!("{:e}", self.t_min)),
            ("t_max".to_string(), format!("{:e}", self.t_max)),
            ("count".to_string(), self.count.to_string()),
            ("aperture".to_string(), format!("{}", self.aperture)),
            ("tail_estimate".to_string(), format!("{:e}", self.tail_estimate)),
            ("truncation_flag".to_string(), self.truncation_flag.to_string()),
        ];
        if self.kind != SquareKind::G {
            meta.push(("slice_exceeds_period".to_string(), self.slice_exceeds_period.to_string()));
        }
        meta
    }
}

/// Evaluates `‖t^α ∂_t^α 𝒫_t f(x)‖^q` on the grid for any `t`.
pub(crate) struct Slicer<T> {
    spec: Spectrum<T>,
    shells: RadialShells<T>,
    alpha: T,
    q: T,
    lambda_min: Option<T>,
}

impl<T: Real> Slicer<T> {
    pub(crate) fn new(f: &Field<T>, alpha: T, q: T) -> Self {
        let spec = forward_transform(f);
        let shells = f.grid().radial_shells();
        let lambda_min = spec.frequency_band(T::zero()).map(|b| b.0);
        Self { spec, shells, alpha, q, lambda_min }
    }

    pub(crate) fn derivative(&self, t: T) -> Field<T> {
        let alpha = self.alpha;
        inverse_transform(&self.spec.apply_radial(&self.shells, |l| {
            num_complex::Complex::new(scaled_frac_modulus(l, t, alpha), T::zero())
        }))
    }

    pub(crate) fn powers(&self, t: T) -> Vec<T> {
        let u = self.derivative(t);
        let q = self.q;
        let mut v = pointwise_norms(self.spec.banach(), u.values(), self.spec.grid().npoints());
        for x in &mut v {
            *x = if q == T::lit(2.0) { *x * *x } else { x.powf(q) };
        }
        v
    }
}

/// `Σ_i w_i F(t_i)` pointwise, plus the unweighted end slices.
pub(crate) struct Accumulated<T> {
    pub total: Vec<T>,
    pub first: Vec<T>,
    pub last: Vec<T>,
}

/// Integrates slices over the time grid; slices run in parallel, the sum runs in node order.
pub(crate) fn accumulate<T: Real>(tg: &TimeGrid<T>, npoints: usize, slice: impl Fn(T) -> Vec<T> + Sync) -> Accumulated<T> {
    let nodes = tg.nodes();
    let weights = tg.weights();
    let mut total = vec![T::zero(); npoints];
    let mut first = Vec::new();
    let mut last = Vec::new();
    for start in (0..nodes.len()).step_by(CHUNK) {
        let end = (start + CHUNK).min(nodes.len());
        let slices: Vec<Vec<T>> = nodes[start..end].par_iter().map(|&t| slice(t)).collect();
        for (k, s) in slices.into_iter().enumerate() {
            let i = start + k;
            let w = weights[i];
            for (a, v) in total.iter_mut().zip(&s) {
                *a += w * *v;
            }
            if i == 0 {
                first = s.clone();
            }
            if i == nodes.len() - 1 {
                last = s;
            }
        }
    }
    Accumulated { total, first, last }
}

fn check_q<T: Real>(q: T) -> Result<()> {
    if !(q > T::one()) || !q.is_finite() {
        return Err(invalid("q", format!("square-function exponent must lie in (1, inf), got {q}")));
    }
    Ok(())
}

fn check_lambda<T: Real>(lambda: T) -> Result<()> {
    if !(lambda > T::one()) || !lambda.is_finite() {
        return Err(invalid("lambda", format!("must exceed 1, got {lambda}")));
    }
    Ok(())
}

/// Default time grid for `f`: see [`TimeGrid::for_band`].
pub fn default_time_grid<T: Real>(f: &Field<T>, ord: FracOrder<T>, q: T) -> Result<TimeGrid<T>> {
    let band = forward_transform(f)
        .frequency_band(T::lit(1e-14))
        .unwrap_or((f.grid().frequency_unit(), f.grid().frequency_unit()));
    TimeGrid::for_band(band.0, band.1, q, ord.alpha())
}

/// Relative size of the neglected `t`-tails: the integrand grows like
/// `t^{qα}` below `t_min` and decays at least like `t^{qα} e^{-qλ_min t}` above `t_max`.
fn tail_estimate<T: Real>(acc: &Accumulated<T>, slicer: &Slicer<T>, tg: &TimeGrid<T>) -> T {
    let qa = slicer.q * slicer.alpha;
    let decay = slicer
        .lambda_min
        .map_or(T::one(), |l| (slicer.q * l * tg.t_max() - qa).max(T::one()));
    let tail = acc
        .first
        .iter()
        .zip(&acc.last)
        .map(|(&a, &b)| a / qa + b / decay)
        .fold(T::zero(), T::max);
    let size = acc.total.iter().copied().fold(T::zero(), T::max);
    if tail == T::zero() {
        T::zero()
    } else if size == T::zero() {
        T::infinity()
    } else {
        tail / size
    }
}

fn finish<T: Real>(
    kind: SquareKind,
    f: &Field<T>,
    ord: FracOrder<T>,
    q: T,
    lambda: Option<T>,
    tg: &TimeGrid<T>,
    slicer: &Slicer<T>,
    acc: Accumulated<T>,
) -> SquareFunctionReport<T> {
    let tail = tail_estimate(&acc, slicer, tg);
    let inv = q.recip();
    let values = acc.total.iter().map(|&v| v.max(T::zero()).powf(inv)).collect();
    SquareFunctionReport {
        kind,
        grid: *f.grid(),
        values,
        alpha: ord.alpha(),
        q,
        lambda,
        t_min: tg.t_min(),
        t_max: tg.t_max(),
        count: tg.count(),
        aperture: T::one(),
        tail_estimate: tail,
        truncation_flag: tail > T::lit(TRUNCATION_LEVEL),
        slice_exceeds_period: kind != SquareKind::G && tg.t_max() > f.grid().period() * T::lit(0.5),
    }
}

/// `g_α^q(f)(x) = (∫₀^∞ ‖t^α ∂_t^α 𝒫_t f(x)‖^q dt/t)^{1/q}`.
pub fn g_function<T: Real>(f: &Field<T>, ord: FracOrder<T>, q: T, tg: &TimeGrid<T>) -> Result<SquareFunctionReport<T>> {
    check_q(q)?;
    let slicer = Slicer::new(f, ord.alpha(), q);
    let acc = accumulate(tg, f.grid().npoints(), |t| slicer.powers(t));
    Ok(finish(SquareKind::G, f, ord, q, None, tg, &slicer, acc))
}

/// Area function over the cone `|x − y| < t` with measure `dy dt / t^{n+1}`.
pub fn area_function<T: Real>(f: &Field<T>, ord: FracOrder<T>, q: T, tg: &TimeGrid<T>) -> Result<SquareFunctionReport<T>> {
    check_q(q)?;
    let grid = *f.grid();
    let n = grid.dim() as i32;
    let slicer = Slicer::new(f, ord.alpha(), q);
    let acc = accumulate(tg, grid.npoints(), |t| {
        let mut v = kernels::area_kernel(&grid, t).convolve(&grid, &slicer.powers(t));
        let s = t.powi(-n);
        v.iter_mut().for_each(|x| *x *= s);
        v
    });
    Ok(finish(SquareKind::Area, f, ord, q, None, tg, &slicer, acc))
}

/// `g*_{λ,α}^q` with weight `(t/(|x − y| + t))^{λn}` over all `y`.
pub fn gstar_function<T: Real>(f: &Field<T>, ord: FracOrder<T>, q: T, lambda: T, tg: &TimeGrid<T>) -> Result<SquareFunctionReport<T>> {
    check_q(q)?;
    check_lambda(lambda)?;
    let grid = *f.grid();
    let n = grid.dim() as i32;
    let slicer = Slicer::new(f, ord.alpha(), q);
    let acc = accumulate(tg, grid.npoints(), |t| {
        let mut v = kernels::gstar_kernel(&grid, t, lambda).convolve(&grid, &slicer.powers(t));
        let s = t.powi(-n);
        v.iter_mut().for_each(|x| *x *= s);
        v
    });
    Ok(finish(SquareKind::GStar, f, ord, q, Some(lambda), tg, &slicer, acc))
}
