//! Truncated and maximal Hilbert transforms and the Hardy–Littlewood
//! maximal function for samples on a window of the line.

mod maximal;
mod probe;

use std::io::{BufRead, Write};

use num_complex::Complex;
use rayon::prelude::*;

use crate::error::invalid;
use crate::grid::BanachSpec;
use crate::{Error, Real, Result};

pub use maximal::{dyadic_radii, hardy_littlewood_maximal, hardy_littlewood_maximal_periodic, maximal_averages, maximal_hilbert, smoothed_maximal_hilbert};
pub(crate) use probe::slope;
pub use probe::{comparison_ratio, convergence_probe, convergence_study, probe_table, ConvergenceReport, ConvergenceStudy, ProbeTable};

/// Samples at `x_i = (i − M) h`, `i = 0, …, 2M`, on the window `[−A, A]`, `A = M h`.
#[derive(Debug, Clone, PartialEq)]
pub struct LineSample<T> {
    half_points: usize,
    step: T,
    banach: BanachSpec<T>,
    values: Vec<Complex<T>>,
}

impl<T: Real> LineSample<T> {
    pub const DEFAULT_HALF_WIDTH: f64 = 16.0;
    pub const DEFAULT_HALF_POINTS: usize = 1 << 13;

    pub fn new(half_width: T, half_points: usize, banach: BanachSpec<T>, values: Vec<Complex<T>>) -> Result<Self> {
        if half_points < 2 {
            return Err(invalid("half_points", format!("need at least 2, got {half_points}")));
        }
        if !(half_width > T::zero()) || !half_width.is_finite() {
            return Err(invalid("half_width", format!("must be positive, got {half_width}")));
        }
        let len = 2 * half_points + 1;
        if values.len() != len * banach.components() {
            return Err(Error::Incompatible(format!(
                "line sample needs {} values, got {}",
                len * banach.components(),
                values.len()
            )));
        }
        if values.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(invalid("values", "samples must be finite"));
        }
        Ok(Self { half_points, step: half_width / T::from_count(half_points), banach, values })
    }

    /// Samples `f(x, coordinate)` on the window.
    pub fn from_fn(half_width: T, half_points: usize, banach: BanachSpec<T>, f: impl Fn(T, usize) -> Complex<T>) -> Result<Self> {
        let h = half_width / T::from_count(half_points);
        let len = 2 * half_points + 1;
        let mut values = Vec::with_capacity(len * banach.components());
        for c in 0..banach.components() {
            for i in 0..len {
                values.push(f(Self::coord(i, half_points, h), c));
            }
        }
        Self::new(half_width, half_points, banach, values)
    }

    /// Real scalar sample of `f`.
    pub fn from_real_fn(half_width: T, half_points: usize, f: impl Fn(T) -> T) -> Result<Self> {
        Self::from_fn(half_width, half_points, BanachSpec::Scalar, |x, _| Complex::new(f(x), T::zero()))
    }

    fn coord(i: usize, m: usize, h: T) -> T {
        (T::from_count(i) - T::from_count(m)) * h
    }

    pub(crate) fn with_values(&self, banach: BanachSpec<T>, values: Vec<Complex<T>>) -> Self {
        Self { half_points: self.half_points, step: self.step, banach, values }
    }

    /// Scalar sample on the same window with the given real values.
    pub fn real_profile(&self, values: Vec<T>) -> Self {
        let values = values.into_iter().map(|v| Complex::new(v, T::zero())).collect();
        self.with_values(BanachSpec::Scalar, values)
    }

    pub fn len(&self) -> usize {
        2 * self.half_points + 1
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn half_points(&self) -> usize {
        self.half_points
    }

    pub fn step(&self) -> T {
        self.step
    }

    pub fn half_width(&self) -> T {
        self.step * T::from_count(self.half_points)
    }

    pub fn banach(&self) -> &BanachSpec<T> {
        &self.banach
    }

    pub fn values(&self) -> &[Complex<T>] {
        &self.values
    }

    pub fn x(&self, i: usize) -> T {
        Self::coord(i, self.half_points, self.step)
    }

    pub fn component(&self, c: usize) -> &[Complex<T>] {
        let n = self.len();
        &self.values[c * n..(c + 1) * n]
    }

    /// Real parts of the first coordinate.
    pub fn real_values(&self) -> Vec<T> {
        self.component(0).iter().map(|z| z.re).collect()
    }

    pub fn pointwise_norms(&self) -> Vec<T> {
        crate::grid::pointwise_norms(&self.banach, &self.values, self.len())
    }

    /// `x ↦ f(−x)`.
    pub fn reflect(&self) -> Self {
        let n = self.len();
        let mut values = self.values.clone();
        for c in 0..self.banach.components() {
            values[c * n..(c + 1) * n].reverse();
        }
        self.with_values(self.banach, values)
    }

    /// `x ↦ f(x − k h)` with zeros shifted in.
    pub fn translate(&self, k: i64) -> Self {
        let n = self.len() as i64;
        let mut values = vec![Complex::new(T::zero(), T::zero()); self.values.len()];
        for c in 0..self.banach.components() {
            for i in 0..n {
                let src = i - k;
                if (0..n).contains(&src) {
                    values[(c as i64 * n + i) as usize] = self.values[(c as i64 * n + src) as usize];
                }
            }
        }
        self.with_values(self.banach, values)
    }

    /// Rows `x,re_0,im_0,…`.
    pub fn write_csv<W: Write>(&self, mut out: W) -> Result<()> {
        let comps = self.banach.components();
        let mut head = vec!["x".to_string()];
        for c in 0..comps {
            head.push(format!("re_{c}"));
            head.push(format!("im_{c}"));
        }
        writeln!(out, "{}", head.join(","))?;
        let n = self.len();
        for i in 0..n {
            let mut line = format!("{:.16e}", self.x(i).as_f64());
            for c in 0..comps {
                let z = self.values[c * n + i];
                line.push_str(&format!(",{:.16e},{:.16e}", z.re.as_f64(), z.im.as_f64()));
            }
            writeln!(out, "{line}")?;
        }
        Ok(())
    }
}

impl<T: Real> LineSample<T> {
    /// Reads rows written by [`LineSample::write_csv`]; the window and step
    /// are inferred from the `x` column, which must be uniform and symmetric.
    ///
    /// Errors carry 1-based line numbers.
    pub fn read_csv<R: BufRead>(input: R, banach: BanachSpec<T>) -> Result<Self> {
        let comps = banach.components();
        let width = 1 + 2 * comps;
        let mut lines = input.lines();
        let head = match lines.next() {
            Some(l) => l?,
            None => return Err(Error::Parse { line: 1, message: "empty input".into() }),
        };
        let mut want = vec!["x".to_string()];
        for c in 0..comps {
            want.push(format!("re_{c}"));
            want.push(format!("im_{c}"));
        }
        let want = want.join(",");
        if head.trim() != want {
            return Err(Error::Parse { line: 1, message: format!("expected header `{want}`") });
        }
        let mut xs = Vec::new();
        let mut rows: Vec<Vec<Complex<T>>> = vec![Vec::new(); comps];
        for (idx, line) in lines.enumerate() {
            let lineno = idx + 2;
            let line = line?;
            if line.trim().is_empty() {
                continue;
            }
            let fields: Vec<&str> = line.split(',').map(str::trim).collect();
            if fields.len() != width {
                return Err(Error::Parse { line: lineno, message: format!("expected {width} columns, found {}", fields.len()) });
            }
            let mut nums = Vec::with_capacity(width);
            for (col, s) in fields.iter().enumerate() {
                match s.parse::<f64>() {
                    Ok(v) if v.is_finite() => nums.push(T::lit(v)),
                    _ => return Err(Error::Parse { line: lineno, message: format!("column {} is not a finite number: `{s}`", col + 1) }),
                }
            }
            xs.push((lineno, nums[0]));
            for c in 0..comps {
                rows[c].push(Complex::new(nums[1 + 2 * c], nums[2 + 2 * c]));
            }
        }
        if xs.len() < 5 || xs.len() % 2 == 0 {
            return Err(Error::Parse { line: xs.len() + 2, message: format!("need an odd number of at least 5 rows, found {}", xs.len()) });
        }
        let m = xs.len() / 2;
        let h = (xs[xs.len() - 1].1 - xs[0].1) / T::from_count(2 * m);
        if !(h > T::zero()) {
            return Err(Error::Parse { line: 2, message: "x must increase".into() });
        }
        for (i, &(lineno, x)) in xs.iter().enumerate() {
            if (x - Self::coord(i, m, h)).abs() > h * T::lit(1e-6) {
                return Err(Error::Parse { line: lineno, message: format!("x = {x} breaks the uniform symmetric grid of step {h}") });
            }
        }
        Self::new(h * T::from_count(m), m, banach, rows.concat())
    }

    /// Keeps every `factor`-th sample, so the step grows by `factor` on the same window.
    pub fn decimate(&self, factor: usize) -> Result<Self> {
        if factor == 0 || self.half_points % factor != 0 || self.half_points / factor < 2 {
            return Err(invalid("factor", format!("must divide the half point count {} and leave at least 2", self.half_points)));
        }
        let n = self.len();
        let values = (0..self.banach.components())
            .flat_map(|c| (0..n).step_by(factor).map(move |i| c * n + i))
            .map(|k| self.values[k])
            .collect();
        Self::new(self.half_width(), self.half_points / factor, self.banach, values)
    }
}

/// Quintic smoothstep from 0 at `u = lo` to 1 at `u = hi`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CutoffPhi<T> {
    lo: T,
    hi: T,
}

impl<T: Real> Default for CutoffPhi<T> {
    fn default() -> Self {
        Self { lo: T::lit(0.5), hi: T::lit(1.5) }
    }
}

impl<T: Real> CutoffPhi<T> {
    pub fn new(lo: T, hi: T) -> Result<Self> {
        if !(lo > T::zero()) || !(hi > lo) {
            return Err(invalid("phi", format!("transition needs 0 < lo < hi, got [{lo}, {hi}]")));
        }
        Ok(Self { lo, hi })
    }

    pub fn transition(&self) -> (T, T) {
        (self.lo, self.hi)
    }

    pub fn eval(&self, u: T) -> T {
        if u <= self.lo {
            return T::zero();
        }
        if u >= self.hi {
            return T::one();
        }
        let s = (u - self.lo) / (self.hi - self.lo);
        s * s * s * (s * (s * T::lit(6.0) - T::lit(15.0)) + T::lit(10.0))
    }

    pub fn derivative(&self, u: T) -> T {
        if u <= self.lo || u >= self.hi {
            return T::zero();
        }
        let s = (u - self.lo) / (self.hi - self.lo);
        T::lit(30.0) * s * s * (s - T::one()) * (s - T::one()) / (self.hi - self.lo)
    }
}

/// Truncation levels from `2A` down to `2h`, `per_octave` per halving.
pub fn eps_grid<T: Real>(f: &LineSample<T>, per_octave: usize) -> Vec<T> {
    eps_grid_to(f, T::lit(2.0) * f.step(), per_octave).expect("two grid steps is a legal floor")
}

/// Truncation levels from `2A` down to `floor ≥ 2h`, `per_octave` per halving.
pub fn eps_grid_to<T: Real>(f: &LineSample<T>, floor: T, per_octave: usize) -> Result<Vec<T>> {
    let min = T::lit(2.0) * f.step();
    if !(floor >= min * (T::one() - T::lit(1e-12))) || !(floor <= T::lit(2.0) * f.half_width()) {
        return Err(invalid("eps_floor", format!("must lie in [{min}, {}], got {floor}", T::lit(2.0) * f.half_width())));
    }
    let per = per_octave.max(1);
    let ratio = T::lit(2.0).powf(-T::from_count(per).recip());
    let stop = floor * (T::one() - T::lit(1e-12));
    let mut out = vec![];
    let mut e = T::lit(2.0) * f.half_width();
    while e >= stop {
        out.push(e);
        e = e * ratio;
    }
    Ok(out)
}

/// `H_ε f(x_i) = h Σ_{|x_i − y_j| > ε} f(y_j)/(x_i − y_j)`, summed in symmetric pairs.
pub fn truncated_hilbert<T: Real>(f: &LineSample<T>, eps: T) -> Result<LineSample<T>> {
    maximal::check_eps(f, &[eps])?;
    let n = f.len();
    let first = cutoff_index(eps, f.step()) + 1;
    let zero = Complex::new(T::zero(), T::zero());
    let mut values = vec![zero; f.values.len()];
    for c in 0..f.banach.components() {
        let src = f.component(c);
        values[c * n..(c + 1) * n].par_iter_mut().enumerate().for_each(|(i, out)| {
            let mut acc = zero;
            let reach = i.max(n - 1 - i);
            for l in first..=reach {
                let left = if i >= l { src[i - l] } else { zero };
                let right = if i + l < n { src[i + l] } else { zero };
                acc += (left - right) / T::from_count(l);
            }
            *out = acc;
        });
    }
    Ok(f.with_values(f.banach, values))
}

/// Largest `ℓ` with `ℓ h ≤ ε`.
pub(crate) fn cutoff_index<T: Real>(eps: T, h: T) -> usize {
    let r = eps / h;
    let k = r.round();
    let k = if (r - k).abs() <= T::lit(1e-9) * r.max(T::one()) { k } else { r.floor() };
    k.to_usize().unwrap_or(0)
}

fn bump<T: Real>(x: T, center: T, radius: T) -> T {
    let u = (x - center) / radius;
    if u.abs() >= T::one() {
        T::zero()
    } else {
        (-T::one() / (T::one() - u * u)).exp()
    }
}

fn gaussian<T: Real>(x: T, center: T, width: T) -> T {
    let u = (x - center) / width;
    if x.abs() > T::lit(4.0) {
        T::zero()
    } else {
        (-u * u / T::lit(2.0)).exp()
    }
}

/// Named test fields supported in `[−4, 4]`: scalar bumps, Gaussians, an
/// indicator, a modulated profile, and `ℓ²`/`ℓ⁴`-valued samples.
pub fn standard_fields<T: Real>(half_width: T, half_points: usize) -> Result<Vec<(&'static str, LineSample<T>)>> {
    let c = T::lit;
    let real = |f: &dyn Fn(T) -> T| LineSample::from_real_fn(half_width, half_points, f);
    let vector = |m: usize, r: T, f: &dyn Fn(T, usize) -> Complex<T>| LineSample::from_fn(half_width, half_points, BanachSpec::sequence(m, r)?, f);
    Ok(vec![
        ("gaussian", real(&|x| gaussian(x, c(0.0), c(0.5)))?),
        ("gaussian_offset", real(&|x| gaussian(x, c(1.0), c(0.3)))?),
        ("bump", real(&|x| bump(x, c(0.0), c(2.0)))?),
        ("bump_pair", real(&|x| bump(x, c(-2.0), c(1.0)) - c(0.5) * bump(x, c(1.5), c(1.5)))?),
        ("indicator", real(&|x| if x.abs() <= c(1.0) { c(1.0) } else { c(0.0) })?),
        ("modulated", real(&|x| gaussian(x, c(0.0), c(0.8)) * (c(3.0) * x).cos())?),
        ("odd_profile", real(&|x| x * bump(x, c(0.0), c(3.0)))?),
        ("complex_wave", LineSample::from_fn(half_width, half_points, BanachSpec::Scalar, |x, _| {
            crate::cis(c(2.0) * x) * bump(x, c(0.5), c(2.5))
        })?),
        ("l2_pair", vector(2, c(2.0), &|x, k| {
            Complex::new(if k == 0 { gaussian(x, c(-1.0), c(0.4)) } else { bump(x, c(1.0), c(1.5)) }, T::zero())
        })?),
        ("l4_triple", vector(3, c(4.0), &|x, k| {
            Complex::new(bump(x, c(-2.0) + c(2.0) * T::from_count(k), c(1.2)), T::zero())
        })?),
    ])
}
