use std::io::Write;

use super::maximal::truncated_levels;
use super::{hardy_littlewood_maximal, maximal_hilbert, smoothed_maximal_hilbert, CutoffPhi, LineSample};
use crate::error::invalid;
use crate::grid::pointwise_norms;
use crate::{Error, Real, Result};

/// `max_x |H*_φ f − H* f|(x) / M(‖f‖)(x)`.
pub fn comparison_ratio<T: Real>(f: &LineSample<T>, phi: &CutoffPhi<T>, eps: &[T], per_octave: usize) -> Result<T> {
    let hstar = maximal_hilbert(f, eps)?.real_values();
    let hphi = smoothed_maximal_hilbert(f, phi, eps)?.real_values();
    let m = hardy_littlewood_maximal(&f.real_profile(f.pointwise_norms()), per_octave)?.real_values();
    let peak = m.iter().copied().fold(T::zero(), T::max);
    if peak == T::zero() {
        return Ok(T::zero());
    }
    let floor = peak * T::lit(1e-300).max(T::min_positive_value());
    Ok(hstar
        .iter()
        .zip(&hphi)
        .zip(&m)
        .filter(|&(_, &mv)| mv > floor)
        .map(|((&a, &b), &mv)| (a - b).abs() / mv)
        .fold(T::zero(), T::max))
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConvergenceReport<T> {
    pub eps: Vec<T>,
    /// Largest jump between consecutive truncation levels at each point.
    pub osc: Vec<T>,
    pub threshold: T,
    pub fraction_below: T,
    /// Median of `osc` over the support of `f`.
    pub median: T,
}

/// Oscillation of `ε ↦ H_ε f(x)` along a decreasing sequence of levels.
pub fn convergence_probe<T: Real>(f: &LineSample<T>, eps: &[T], threshold: T) -> Result<ConvergenceReport<T>> {
    if eps.len() < 2 {
        return Err(invalid("eps", "need at least two truncation levels"));
    }
    if eps.windows(2).any(|w| !(w[1] < w[0])) {
        return Err(invalid("eps", "truncation levels must decrease strictly"));
    }
    if !(threshold >= T::zero()) {
        return Err(invalid("threshold", format!("must be nonnegative, got {threshold}")));
    }
    let levels = truncated_levels(f, eps)?;
    let n = f.len();
    let mut osc = vec![T::zero(); n];
    for pair in levels.windows(2) {
        let diff: Vec<_> = pair[0].iter().zip(&pair[1]).map(|(a, b)| a - b).collect();
        for (o, v) in osc.iter_mut().zip(pointwise_norms(f.banach(), &diff, n)) {
            *o = o.max(v);
        }
    }
    let below = osc.iter().filter(|&&o| o <= threshold).count();
    let norms = f.pointwise_norms();
    let peak = norms.iter().copied().fold(T::zero(), T::max);
    let mut support: Vec<T> = osc.iter().zip(&norms).filter(|&(_, &v)| v > T::lit(1e-12) * peak).map(|(&o, _)| o).collect();
    Ok(ConvergenceReport {
        eps: eps.to_vec(),
        threshold,
        fraction_below: T::from_count(below) / T::from_count(n),
        median: median(&mut support),
        osc,
    })
}

fn median<T: Real>(v: &mut [T]) -> T {
    if v.is_empty() {
        return T::zero();
    }
    v.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let k = v.len() / 2;
    if v.len() % 2 == 1 {
        v[k]
    } else {
        (v[k - 1] + v[k]) / T::lit(2.0)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConvergenceStudy<T> {
    pub steps: Vec<T>,
    pub medians: Vec<T>,
    pub fractions: Vec<T>,
    /// Least-squares slope of `ln median` against `ln h`.
    pub rate: T,
}

/// Runs the probe at several resolutions with levels `ε = c·h` for each multiple `c`.
pub fn convergence_study<T: Real>(
    make: impl Fn(usize) -> Result<LineSample<T>>,
    half_points: &[usize],
    multiples: &[T],
    threshold: T,
) -> Result<ConvergenceStudy<T>> {
    if half_points.len() < 2 {
        return Err(invalid("half_points", "need at least two resolutions"));
    }
    let (mut steps, mut medians, mut fractions) = (vec![], vec![], vec![]);
    for &m in half_points {
        let f = make(m)?;
        let eps: Vec<T> = multiples.iter().map(|&c| c * f.step()).collect();
        let rep = convergence_probe(&f, &eps, threshold)?;
        steps.push(f.step());
        medians.push(rep.median);
        fractions.push(rep.fraction_below);
    }
    let pts: Vec<(T, T)> = steps.iter().zip(&medians).filter(|&(_, &m)| m > T::zero()).map(|(&h, &m)| (h.ln(), m.ln())).collect();
    let rate = slope(&pts);
    Ok(ConvergenceStudy { steps, medians, fractions, rate })
}

pub(crate) fn slope<T: Real>(pts: &[(T, T)]) -> T {
    if pts.len() < 2 {
        return T::zero();
    }
    let n = T::from_count(pts.len());
    let mx = pts.iter().map(|p| p.0).sum::<T>() / n;
    let my = pts.iter().map(|p| p.1).sum::<T>() / n;
    let sxy: T = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: T = pts.iter().map(|p| (p.0 - mx) * (p.0 - mx)).sum();
    if sxx == T::zero() {
        T::zero()
    } else {
        sxy / sxx
    }
}

/// Per-point columns of the probe report.
#[derive(Debug, Clone, PartialEq)]
pub struct ProbeTable<T> {
    pub x: Vec<T>,
    pub report: ConvergenceReport<T>,
    pub hstar: Vec<T>,
    pub hstar_phi: Vec<T>,
    pub maximal: Vec<T>,
}

impl<T: Real> ProbeTable<T> {
    /// Rows `x,osc,Hstar,Hstar_phi,M`.
    pub fn write_csv<W: Write>(&self, mut out: W) -> Result<()> {
        let n = self.x.len();
        if [self.report.osc.len(), self.hstar.len(), self.hstar_phi.len(), self.maximal.len()].iter().any(|&l| l != n) {
            return Err(Error::Incompatible("probe columns differ in length".into()));
        }
        writeln!(out, "x,osc,Hstar,Hstar_phi,M")?;
        for i in 0..n {
            writeln!(
                out,
                "{:.16e},{:.16e},{:.16e},{:.16e},{:.16e}",
                self.x[i].as_f64(),
                self.report.osc[i].as_f64(),
                self.hstar[i].as_f64(),
                self.hstar_phi[i].as_f64(),
                self.maximal[i].as_f64()
            )?;
        }
        Ok(())
    }
}

/// Oscillation over `eps` together with `H*`, `H*_φ` and `M(‖f‖)` on the same levels.
pub fn probe_table<T: Real>(f: &LineSample<T>, phi: &CutoffPhi<T>, eps: &[T], per_octave: usize, threshold: T) -> Result<ProbeTable<T>> {
    let report = convergence_probe(f, eps, threshold)?;
    Ok(ProbeTable {
        x: (0..f.len()).map(|i| f.x(i)).collect(),
        hstar: maximal_hilbert(f, eps)?.real_values(),
        hstar_phi: smoothed_maximal_hilbert(f, phi, eps)?.real_values(),
        maximal: hardy_littlewood_maximal(&f.real_profile(f.pointwise_norms()), per_octave)?.real_values(),
        report,
    })
}
