//! Standard test fields.

use num_complex::Complex;
use rand::Rng;

use super::{inverse_transform, BanachSpec, Field, GridSpec, Spectrum};
use crate::{cis, Real, Result};

/// Constant field with value `c` in every coordinate.
pub fn constant<T: Real>(grid: GridSpec<T>, banach: BanachSpec<T>, c: Complex<T>) -> Field<T> {
    Field::from_parts(grid, banach, vec![c; grid.npoints() * banach.components()])
}

/// Scalar plane wave `e^{i⟨ξ_k, x⟩}`.
pub fn plane_wave<T: Real>(grid: GridSpec<T>, k: [i64; 2]) -> Result<Field<T>> {
    let unit = grid.frequency_unit();
    let (k0, k1) = (T::lit(k[0] as f64), T::lit(k[1] as f64));
    Field::from_fn(grid, BanachSpec::Scalar, |x, _| cis(unit * (k0 * x[0] + k1 * x[1])))
}

fn band_spectrum<T: Real, R: Rng + ?Sized>(
    grid: GridSpec<T>,
    banach: BanachSpec<T>,
    kmax: i64,
    with_mean: bool,
    rng: &mut R,
) -> Vec<Complex<T>> {
    let np = grid.npoints();
    let mut coef = vec![Complex::new(T::zero(), T::zero()); np * banach.components()];
    for c in 0..banach.components() {
        for p in 0..np {
            let [a, b] = grid.frequency(p);
            if a.abs() > kmax || b.abs() > kmax || (a == 0 && b == 0 && !with_mean) {
                continue;
            }
            let re: f64 = rng.random_range(-1.0..1.0);
            let im: f64 = rng.random_range(-1.0..1.0);
            coef[c * np + p] = Complex::new(T::lit(re), T::lit(im));
        }
    }
    coef
}

/// Random complex field whose spectrum is supported in `|k|_∞ ≤ kmax`.
pub fn band_limited<T: Real, R: Rng + ?Sized>(
    grid: GridSpec<T>,
    banach: BanachSpec<T>,
    kmax: i64,
    with_mean: bool,
    rng: &mut R,
) -> Result<Field<T>> {
    let coef = band_spectrum(grid, banach, kmax, with_mean, rng);
    Ok(inverse_transform(&Spectrum::new(grid, banach, coef)?))
}

/// Random real-valued field with spectrum in `|k|_∞ ≤ kmax`.
pub fn real_band_limited<T: Real, R: Rng + ?Sized>(
    grid: GridSpec<T>,
    banach: BanachSpec<T>,
    kmax: i64,
    with_mean: bool,
    rng: &mut R,
) -> Result<Field<T>> {
    let f = band_limited(grid, banach, kmax, with_mean, rng)?;
    let values = f.values().iter().map(|z| Complex::new(z.re, T::zero())).collect();
    Field::new(grid, banach, values)
}
