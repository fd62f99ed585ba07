//! Sampled fields on the periodic grid, their spectra and Lebesgue norms.

pub(crate) mod fft;
mod io;
pub mod samples;

use num_complex::Complex;
use rustfft::FftDirection;

use crate::error::invalid;
use crate::{Error, Real, Result};

pub use io::{read_field_csv, write_field_csv};

/// Uniform grid on the torus `[0, L)^dim`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridSpec<T> {
    dim: usize,
    n: usize,
    period: T,
}

impl<T: Real> GridSpec<T> {
    pub fn new(dim: usize, points_per_axis: usize, period: T) -> Result<Self> {
        if dim != 1 && dim != 2 {
            return Err(invalid("dim", format!("must be 1 or 2, got {dim}")));
        }
        if points_per_axis < 8 || !points_per_axis.is_power_of_two() {
            return Err(invalid("points_per_axis", format!("must be a power of two >= 8, got {points_per_axis}")));
        }
        if !(period > T::zero()) || !period.is_finite() {
            return Err(invalid("period", format!("must be positive and finite, got {period}")));
        }
        Ok(Self { dim, n: points_per_axis, period })
    }

    /// One-dimensional grid of period `2π`.
    pub fn line(points: usize) -> Result<Self> {
        Self::new(1, points, T::TAU())
    }

    /// Two-dimensional grid of period `2π`.
    pub fn square(points_per_axis: usize) -> Result<Self> {
        Self::new(2, points_per_axis, T::TAU())
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn points_per_axis(&self) -> usize {
        self.n
    }

    pub fn period(&self) -> T {
        self.period
    }

    /// Total number of grid points, `N^dim`.
    pub fn npoints(&self) -> usize {
        self.n.pow(self.dim as u32)
    }

    /// Grid step `L/N`.
    pub fn spacing(&self) -> T {
        self.period / T::from_count(self.n)
    }

    /// Lebesgue weight of one cell, `(L/N)^dim`.
    pub fn cell_measure(&self) -> T {
        self.spacing().powi(self.dim as i32)
    }

    /// Measure of the torus, `L^dim`.
    pub fn volume(&self) -> T {
        self.period.powi(self.dim as i32)
    }

    /// Multi-index of point `p` in row-major order.
    pub fn index(&self, p: usize) -> [usize; 2] {
        if self.dim == 1 {
            [p, 0]
        } else {
            [p / self.n, p % self.n]
        }
    }

    /// Coordinates of point `p`; the second entry is zero in one dimension.
    pub fn point(&self, p: usize) -> [T; 2] {
        let [i, j] = self.index(p);
        let h = self.spacing();
        [T::from_count(i) * h, T::from_count(j) * h]
    }

    /// Signed integer frequency of spectral slot `p`, each entry in `[-N/2, N/2)`.
    pub fn frequency(&self, p: usize) -> [i64; 2] {
        let [i, j] = self.index(p);
        let signed = |k: usize| {
            let k = k as i64;
            let n = self.n as i64;
            if k >= n / 2 {
                k - n
            } else {
                k
            }
        };
        if self.dim == 1 {
            [signed(i), 0]
        } else {
            [signed(i), signed(j)]
        }
    }

    /// Spectral slot of an integer frequency, if representable.
    pub fn slot(&self, k: [i64; 2]) -> Option<usize> {
        let n = self.n as i64;
        let wrap = |k: i64| -> Option<usize> {
            if k < -n / 2 || k >= n / 2 {
                None
            } else {
                Some(k.rem_euclid(n) as usize)
            }
        };
        if self.dim == 1 {
            if k[1] != 0 {
                return None;
            }
            wrap(k[0])
        } else {
            Some(wrap(k[0])? * self.n + wrap(k[1])?)
        }
    }

    /// `2π/L`, the spacing of the dual lattice.
    pub fn frequency_unit(&self) -> T {
        T::TAU() / self.period
    }

    /// `|ξ_k|` of spectral slot `p`.
    pub fn xi_norm(&self, p: usize) -> T {
        let [a, b] = self.frequency(p);
        T::from_u64((a * a + b * b) as u64).expect("frequency fits").sqrt() * self.frequency_unit()
    }

    /// Groups spectral slots by `|k|^2` so radial multipliers are evaluated once per shell.
    pub fn radial_shells(&self) -> RadialShells<T> {
        let mut keys: Vec<u64> = (0..self.npoints())
            .map(|p| {
                let [a, b] = self.frequency(p);
                (a * a + b * b) as u64
            })
            .collect();
        let per_slot = keys.clone();
        keys.sort_unstable();
        keys.dedup();
        let shell_of = per_slot
            .iter()
            .map(|k| keys.binary_search(k).expect("key present"))
            .collect();
        let unit = self.frequency_unit();
        let lambdas = keys
            .iter()
            .map(|&k| T::from_u64(k).expect("frequency fits").sqrt() * unit)
            .collect();
        RadialShells { shell_of, lambdas }
    }

    pub(crate) fn same_as(&self, other: &Self) -> bool {
        self.dim == other.dim && self.n == other.n && self.period == other.period
    }
}

/// Slots grouped by frequency modulus; `lambdas` ascending, `lambdas[0] == 0`.
#[derive(Debug, Clone)]
pub struct RadialShells<T> {
    pub shell_of: Vec<usize>,
    pub lambdas: Vec<T>,
}

/// Value space of a field: scalars or `ℓ^r_m`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum BanachSpec<T> {
    Scalar,
    Sequence { m: usize, r: T },
}

impl<T: Real> BanachSpec<T> {
    pub fn sequence(m: usize, r: T) -> Result<Self> {
        if m == 0 {
            return Err(invalid("m", "sequence dimension must be at least 1"));
        }
        if r.is_nan() || r < T::one() {
            return Err(invalid("r", format!("norm exponent must lie in [1, inf], got {r}")));
        }
        Ok(BanachSpec::Sequence { m, r })
    }

    /// Number of stored coordinates.
    pub fn components(&self) -> usize {
        match self {
            BanachSpec::Scalar => 1,
            BanachSpec::Sequence { m, .. } => *m,
        }
    }

    /// Norm exponent; scalars behave like any `r` on one coordinate.
    pub fn exponent(&self) -> T {
        match self {
            BanachSpec::Scalar => T::lit(2.0),
            BanachSpec::Sequence { r, .. } => *r,
        }
    }

    pub fn norm(&self, v: &[Complex<T>]) -> T {
        norm_of(v.iter().map(|z| z.norm()), self.exponent())
    }
}

fn norm_of<T: Real>(moduli: impl Iterator<Item = T>, r: T) -> T {
    if r.is_infinite() {
        moduli.fold(T::zero(), T::max)
    } else if r == T::one() {
        moduli.sum()
    } else if r == T::lit(2.0) {
        moduli.map(|a| a * a).sum::<T>().sqrt()
    } else {
        moduli.map(|a| a.powf(r)).sum::<T>().powf(r.recip())
    }
}

/// Pointwise value-space norms of coordinate-major data.
pub(crate) fn pointwise_norms<T: Real>(banach: &BanachSpec<T>, values: &[Complex<T>], npoints: usize) -> Vec<T> {
    let comps = banach.components();
    if comps == 1 {
        return values.iter().map(|z| z.norm()).collect();
    }
    let r = banach.exponent();
    let mut acc = vec![T::zero(); npoints];
    for c in 0..comps {
        let block = &values[c * npoints..(c + 1) * npoints];
        for (a, z) in acc.iter_mut().zip(block) {
            if r.is_infinite() {
                *a = a.max(z.norm());
            } else if r == T::lit(2.0) {
                *a += z.norm_sqr();
            } else if r == T::one() {
                *a += z.norm();
            } else {
                *a += z.norm().powf(r);
            }
        }
    }
    if r.is_finite() && r != T::one() {
        let inv = r.recip();
        for a in &mut acc {
            *a = if r == T::lit(2.0) { a.sqrt() } else { a.powf(inv) };
        }
    }
    acc
}

/// A sampled field; `values[c * npoints + p]` holds coordinate `c` at point `p`.
#[derive(Debug, Clone, PartialEq)]
pub struct Field<T> {
    grid: GridSpec<T>,
    banach: BanachSpec<T>,
    values: Vec<Complex<T>>,
}

impl<T: Real> Field<T> {
    pub fn new(grid: GridSpec<T>, banach: BanachSpec<T>, values: Vec<Complex<T>>) -> Result<Self> {
        let expected = grid.npoints() * banach.components();
        if values.len() != expected {
            return Err(Error::Incompatible(format!(
                "field needs {expected} values, got {}",
                values.len()
            )));
        }
        if values.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(invalid("values", "field samples must be finite"));
        }
        Ok(Self { grid, banach, values })
    }

    pub fn zeros(grid: GridSpec<T>, banach: BanachSpec<T>) -> Self {
        let len = grid.npoints() * banach.components();
        Self { grid, banach, values: vec![Complex::new(T::zero(), T::zero()); len] }
    }

    /// Builds a field from `f(point, coordinate)`.
    pub fn from_fn(grid: GridSpec<T>, banach: BanachSpec<T>, mut f: impl FnMut([T; 2], usize) -> Complex<T>) -> Result<Self> {
        let np = grid.npoints();
        let mut values = Vec::with_capacity(np * banach.components());
        for c in 0..banach.components() {
            for p in 0..np {
                values.push(f(grid.point(p), c));
            }
        }
        Self::new(grid, banach, values)
    }

    /// Scalar field from a real-valued function of position.
    pub fn from_real_fn(grid: GridSpec<T>, mut f: impl FnMut([T; 2]) -> T) -> Result<Self> {
        Self::from_fn(grid, BanachSpec::Scalar, |x, _| Complex::new(f(x), T::zero()))
    }

    pub(crate) fn from_parts(grid: GridSpec<T>, banach: BanachSpec<T>, values: Vec<Complex<T>>) -> Self {
        debug_assert_eq!(values.len(), grid.npoints() * banach.components());
        Self { grid, banach, values }
    }

    pub fn grid(&self) -> &GridSpec<T> {
        &self.grid
    }

    pub fn banach(&self) -> &BanachSpec<T> {
        &self.banach
    }

    pub fn values(&self) -> &[Complex<T>] {
        &self.values
    }

    pub fn into_values(self) -> Vec<Complex<T>> {
        self.values
    }

    pub fn component(&self, c: usize) -> &[Complex<T>] {
        let np = self.grid.npoints();
        &self.values[c * np..(c + 1) * np]
    }

    /// Value-space vector at point `p`.
    pub fn at(&self, p: usize) -> Vec<Complex<T>> {
        let np = self.grid.npoints();
        (0..self.banach.components()).map(|c| self.values[c * np + p]).collect()
    }

    /// `‖f(x_p)‖_𝔹` at every point.
    pub fn pointwise_norms(&self) -> Vec<T> {
        pointwise_norms(&self.banach, &self.values, self.grid.npoints())
    }

    pub fn scale(&self, c: Complex<T>) -> Self {
        Self::from_parts(self.grid, self.banach, self.values.iter().map(|&z| z * c).collect())
    }

    /// `a·self + b·other`.
    pub fn combine(&self, a: Complex<T>, other: &Self, b: Complex<T>) -> Result<Self> {
        self.check_compatible(other)?;
        let values = self.values.iter().zip(&other.values).map(|(&x, &y)| a * x + b * y).collect();
        Ok(Self::from_parts(self.grid, self.banach, values))
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        let one = Complex::new(T::one(), T::zero());
        self.combine(one, other, -one)
    }

    /// Circular shift by whole grid steps: result(x) = self(x − shift·h).
    pub fn shift(&self, shift: [i64; 2]) -> Self {
        let n = self.grid.n as i64;
        let np = self.grid.npoints();
        let mut values = self.values.clone();
        for c in 0..self.banach.components() {
            for p in 0..np {
                let [i, j] = self.grid.index(p);
                let si = (i as i64 - shift[0]).rem_euclid(n) as usize;
                let src = if self.grid.dim == 1 {
                    si
                } else {
                    si * self.grid.n + (j as i64 - shift[1]).rem_euclid(n) as usize
                };
                values[c * np + p] = self.values[c * np + src];
            }
        }
        Self::from_parts(self.grid, self.banach, values)
    }

    pub fn is_zero(&self) -> bool {
        self.values.iter().all(|z| z.re == T::zero() && z.im == T::zero())
    }

    pub(crate) fn check_compatible(&self, other: &Self) -> Result<()> {
        if !self.grid.same_as(&other.grid) || self.banach != other.banach {
            return Err(Error::Incompatible("fields live on different grids or value spaces".into()));
        }
        Ok(())
    }
}

/// Fourier coefficients in FFT slot order, same layout as [`Field`].
#[derive(Debug, Clone, PartialEq)]
pub struct Spectrum<T> {
    grid: GridSpec<T>,
    banach: BanachSpec<T>,
    coefficients: Vec<Complex<T>>,
}

impl<T: Real> Spectrum<T> {
    pub fn new(grid: GridSpec<T>, banach: BanachSpec<T>, coefficients: Vec<Complex<T>>) -> Result<Self> {
        let expected = grid.npoints() * banach.components();
        if coefficients.len() != expected {
            return Err(Error::Incompatible(format!(
                "spectrum needs {expected} coefficients, got {}",
                coefficients.len()
            )));
        }
        Ok(Self { grid, banach, coefficients })
    }

    pub fn grid(&self) -> &GridSpec<T> {
        &self.grid
    }

    pub fn banach(&self) -> &BanachSpec<T> {
        &self.banach
    }

    pub fn coefficients(&self) -> &[Complex<T>] {
        &self.coefficients
    }

    /// `f̂(k)` in coordinate `c`; zero for frequencies outside the grid band.
    pub fn coefficient(&self, k: [i64; 2], c: usize) -> Complex<T> {
        match self.grid.slot(k) {
            Some(p) => self.coefficients[c * self.grid.npoints() + p],
            None => Complex::new(T::zero(), T::zero()),
        }
    }

    /// Multiplies every slot by `mult(|ξ_k|)`, evaluated once per radial shell.
    pub fn apply_radial(&self, shells: &RadialShells<T>, mult: impl Fn(T) -> Complex<T>) -> Self {
        let table: Vec<Complex<T>> = shells.lambdas.iter().map(|&l| mult(l)).collect();
        self.apply_shell_table(shells, &table)
    }

    pub(crate) fn apply_shell_table(&self, shells: &RadialShells<T>, table: &[Complex<T>]) -> Self {
        let np = self.grid.npoints();
        let coefficients = self
            .coefficients
            .iter()
            .enumerate()
            .map(|(i, &z)| z * table[shells.shell_of[i % np]])
            .collect();
        Self { grid: self.grid, banach: self.banach, coefficients }
    }

    /// Smallest and largest nonzero `|ξ_k|` carrying a coefficient above `rel` times the largest one.
    pub fn frequency_band(&self, rel: T) -> Option<(T, T)> {
        let np = self.grid.npoints();
        let peak = self.coefficients.iter().map(|z| z.norm()).fold(T::zero(), T::max);
        if peak == T::zero() {
            return None;
        }
        let mut band: Option<(T, T)> = None;
        for (i, z) in self.coefficients.iter().enumerate() {
            let p = i % np;
            if p == 0 || z.norm() <= rel * peak {
                continue;
            }
            let l = self.grid.xi_norm(p);
            band = Some(match band {
                None => (l, l),
                Some((lo, hi)) => (lo.min(l), hi.max(l)),
            });
        }
        band
    }

    /// `L^dim Σ_k ‖f̂(k)‖²`, the Parseval side of the squared `L²` norm.
    pub fn parseval_energy(&self) -> T {
        self.grid.volume() * self.coefficients.iter().map(|z| z.norm_sqr()).sum::<T>()
    }
}

/// `f̂(k) = N^{-dim} Σ_j f(x_j) e^{-i⟨ξ_k, x_j⟩}` in every coordinate.
pub fn forward_transform<T: Real>(f: &Field<T>) -> Spectrum<T> {
    let grid = f.grid;
    let np = grid.npoints();
    let mut data = f.values.clone();
    let scale = T::one() / T::from_count(np);
    for block in data.chunks_mut(np) {
        fft::transform_block(block, grid.n, grid.dim, FftDirection::Forward);
        for z in block.iter_mut() {
            *z = *z * scale;
        }
    }
    Spectrum { grid, banach: f.banach, coefficients: data }
}

/// Exact inverse of [`forward_transform`].
pub fn inverse_transform<T: Real>(s: &Spectrum<T>) -> Field<T> {
    let grid = s.grid;
    let np = grid.npoints();
    let mut data = s.coefficients.clone();
    for block in data.chunks_mut(np) {
        fft::transform_block(block, grid.n, grid.dim, FftDirection::Inverse);
    }
    Field::from_parts(grid, s.banach, data)
}

/// `((L/N)^dim Σ_j ‖f(x_j)‖^p)^{1/p}`, or the maximum for `p = ∞`.
pub fn lp_norm<T: Real>(f: &Field<T>, p: T) -> Result<T> {
    check_exponent(p)?;
    Ok(lp_norm_of_values(&f.pointwise_norms(), p, f.grid.cell_measure()))
}

pub(crate) fn check_exponent<T: Real>(p: T) -> Result<()> {
    if p.is_nan() || p < T::one() {
        return Err(invalid("p", format!("Lebesgue exponent must lie in [1, inf], got {p}")));
    }
    Ok(())
}

/// Lebesgue norm of a nonnegative sampled function with cell weight `w`.
pub fn lp_norm_of_values<T: Real>(values: &[T], p: T, w: T) -> T {
    if p.is_infinite() {
        values.iter().copied().fold(T::zero(), T::max)
    } else if p == T::one() {
        w * values.iter().copied().sum::<T>()
    } else if p == T::lit(2.0) {
        (w * values.iter().map(|&v| v * v).sum::<T>()).sqrt()
    } else {
        (w * values.iter().map(|&v| v.powf(p)).sum::<T>()).powf(p.recip())
    }
}

/// Projection onto constants: the field equal to the mean of `f`.
pub fn e0_project<T: Real>(f: &Field<T>) -> Field<T> {
    let np = f.grid.npoints();
    let inv = T::one() / T::from_count(np);
    let mut values = Vec::with_capacity(f.values.len());
    for block in f.values.chunks(np) {
        let mean = block.iter().fold(Complex::new(T::zero(), T::zero()), |a, &z| a + z) * inv;
        values.extend(std::iter::repeat_n(mean, np));
    }
    Field::from_parts(f.grid, f.banach, values)
}

/// Relative `L²` distance `‖a − b‖₂ / ‖b‖₂`; absolute when `b` vanishes.
pub fn relative_l2_distance<T: Real>(a: &Field<T>, b: &Field<T>) -> Result<T> {
    let diff = a.sub(b)?;
    let two = T::lit(2.0);
    let num = lp_norm(&diff, two)?;
    let den = lp_norm(b, two)?;
    Ok(if den > T::zero() { num / den } else { num })
}
