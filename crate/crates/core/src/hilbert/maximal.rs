use num_complex::Complex;
use rayon::prelude::*;
use rustfft::FftDirection;

use super::{cutoff_index, CutoffPhi, LineSample};
use crate::error::invalid;
use crate::grid::fft::plan;
use crate::grid::{pointwise_norms, BanachSpec};
use crate::{Real, Result};

/// Zero-padded spectra of every coordinate, ready for linear convolution.
pub(crate) struct Padded<T: Real> {
    len: usize,
    size: usize,
    spectra: Vec<Vec<Complex<T>>>,
}

impl<T: Real> Padded<T> {
    pub(crate) fn new(f: &LineSample<T>) -> Self {
        let len = f.len();
        let size = (2 * len - 1).next_power_of_two();
        let fwd = plan::<T>(size, FftDirection::Forward);
        let spectra = (0..f.banach().components())
            .map(|c| {
                let mut buf = vec![Complex::new(T::zero(), T::zero()); size];
                buf[..len].copy_from_slice(f.component(c));
                fwd.process(&mut buf);
                buf
            })
            .collect();
        Self { len, size, spectra }
    }

    /// `out[i] = Σ_j f[j] k(i − j)` for every coordinate, component-major.
    pub(crate) fn convolve(&self, kernel: impl Fn(i64) -> T) -> Vec<Complex<T>> {
        let (len, size) = (self.len, self.size);
        let mut k = vec![Complex::new(T::zero(), T::zero()); size];
        for l in -(len as i64 - 1)..len as i64 {
            k[l.rem_euclid(size as i64) as usize] = Complex::new(kernel(l), T::zero());
        }
        plan::<T>(size, FftDirection::Forward).process(&mut k);
        let inv = plan::<T>(size, FftDirection::Inverse);
        let scale = T::from_count(size).recip();
        let mut out = Vec::with_capacity(len * self.spectra.len());
        for spec in &self.spectra {
            let mut buf: Vec<Complex<T>> = spec.iter().zip(&k).map(|(a, b)| a * b).collect();
            inv.process(&mut buf);
            out.extend(buf[..len].iter().map(|z| z * scale));
        }
        out
    }
}

pub(crate) fn check_eps<T: Real>(f: &LineSample<T>, eps: &[T]) -> Result<()> {
    if eps.is_empty() {
        return Err(invalid("eps", "need at least one truncation level"));
    }
    let floor = T::lit(2.0) * f.step() * (T::one() - T::lit(1e-12));
    for &e in eps {
        if !e.is_finite() || e < floor {
            return Err(invalid("eps", format!("truncation {e} is below two grid steps ({})", T::lit(2.0) * f.step())));
        }
    }
    Ok(())
}

/// Truncated transforms at every level, each component-major.
pub(crate) fn truncated_levels<T: Real>(f: &LineSample<T>, eps: &[T]) -> Result<Vec<Vec<Complex<T>>>> {
    check_eps(f, eps)?;
    let padded = Padded::new(f);
    let h = f.step();
    Ok(eps
        .par_iter()
        .map(|&e| {
            let l0 = cutoff_index(e, h) as i64;
            padded.convolve(|l| if l.abs() > l0 { T::from_i64(l).unwrap().recip() } else { T::zero() })
        })
        .collect())
}

fn smoothed_levels<T: Real>(f: &LineSample<T>, phi: &CutoffPhi<T>, eps: &[T]) -> Result<Vec<Vec<Complex<T>>>> {
    check_eps(f, eps)?;
    let padded = Padded::new(f);
    let h = f.step();
    Ok(eps
        .par_iter()
        .map(|&e| {
            padded.convolve(|l| {
                if l == 0 {
                    return T::zero();
                }
                let lt = T::from_i64(l).unwrap();
                phi.eval(lt.abs() * h / e) / lt
            })
        })
        .collect())
}

fn sup_norms<T: Real>(banach: &BanachSpec<T>, len: usize, levels: &[Vec<Complex<T>>]) -> Vec<T> {
    let mut best = vec![T::zero(); len];
    for level in levels {
        for (b, v) in best.iter_mut().zip(pointwise_norms(banach, level, len)) {
            if v > *b {
                *b = v;
            }
        }
    }
    best
}

/// `H*f(x) = sup_ε ‖H_ε f(x)‖` over the given levels.
pub fn maximal_hilbert<T: Real>(f: &LineSample<T>, eps: &[T]) -> Result<LineSample<T>> {
    let levels = truncated_levels(f, eps)?;
    Ok(f.real_profile(sup_norms(f.banach(), f.len(), &levels)))
}

/// Same supremum with the kernel `φ(|x − y|/ε)/(x − y)`.
pub fn smoothed_maximal_hilbert<T: Real>(f: &LineSample<T>, phi: &CutoffPhi<T>, eps: &[T]) -> Result<LineSample<T>> {
    let levels = smoothed_levels(f, phi, eps)?;
    Ok(f.real_profile(sup_norms(f.banach(), f.len(), &levels)))
}

/// Radii in cells: 0 and `round(2^{k/per_octave}) − 1` up to `max_r`.
pub fn dyadic_radii(max_r: usize, per_octave: usize) -> Vec<usize> {
    let per = per_octave.max(1) as f64;
    let mut out = vec![0usize];
    let mut k = 1.0;
    loop {
        let r = (2f64.powf(k / per)).round() as usize - 1;
        if r > max_r {
            break;
        }
        if r > *out.last().unwrap() {
            out.push(r);
        }
        k += 1.0;
    }
    if *out.last().unwrap() < max_r {
        out.push(max_r);
    }
    out
}

/// Max over the radii of centered averages `Σ_{|j−i|≤R} v_j/(2R + 1)`; zeros outside unless periodic.
pub fn maximal_averages<T: Real>(values: &[T], radii: &[usize], periodic: bool) -> Vec<T> {
    let n = values.len();
    if n == 0 {
        return vec![];
    }
    let copies = if periodic { 3 } else { 1 };
    let mut prefix = Vec::with_capacity(copies * n + 1);
    prefix.push(T::zero());
    let mut acc = T::zero();
    for k in 0..copies * n {
        acc += values[k % n];
        prefix.push(acc);
    }
    (0..n)
        .into_par_iter()
        .map(|i| {
            let mut best = T::zero();
            for &r in radii {
                let sum = if periodic {
                    let r = r.min((n - 1) / 2);
                    prefix[i + r + n + 1] - prefix[i + n - r]
                } else {
                    prefix[(i + r + 1).min(n)] - prefix[i.saturating_sub(r)]
                };
                let avg = (sum / T::from_count(2 * r + 1)).max(T::zero());
                if avg > best {
                    best = avg;
                }
            }
            best
        })
        .collect()
}

/// `Mh(x) = max_ρ (2ρ)^{−1} ∫_{|x−y|≤ρ} h`, with `ρ = (R + ½)h` so the discrete ball holds `2R + 1` cells.
pub fn hardy_littlewood_maximal<T: Real>(h: &LineSample<T>, per_octave: usize) -> Result<LineSample<T>> {
    if h.banach().components() != 1 {
        return Err(invalid("h", "maximal function takes a scalar sample"));
    }
    let mut vals = Vec::with_capacity(h.len());
    for z in h.values() {
        if z.im != T::zero() || z.re < T::zero() {
            return Err(invalid("h", format!("maximal function needs nonnegative real input, got {z}")));
        }
        vals.push(z.re);
    }
    let radii = dyadic_radii(h.len() - 1, per_octave);
    Ok(h.real_profile(maximal_averages(&vals, &radii, false)))
}

/// Periodic counterpart on a torus of `values.len()` cells, radii up to half the period.
pub fn hardy_littlewood_maximal_periodic<T: Real>(values: &[T], per_octave: usize) -> Vec<T> {
    let n = values.len();
    let max_r = (n / 2).saturating_sub(1);
    maximal_averages(values, &dyadic_radii(max_r, per_octave), true)
}
