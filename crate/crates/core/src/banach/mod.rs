//! Sequence-space surrogates for Lusin cotype and type: lacunary test
//! fields in `ℓ^r_m` and the ratios whose growth in `m` the probes track.

use std::io::Write;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::error::invalid;
use crate::fracderiv::{scaled_frac_modulus, FracOrder};
use crate::grid::{e0_project, lp_norm, BanachSpec, Field, GridSpec};
use crate::squarefuncs::{g_function, TimeGrid};
use crate::{cis, Error, Real, Result};

/// Which inequality a probe tests.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Direction {
    /// `‖g‖_p / ‖f‖_p`.
    Cotype,
    /// `‖f‖_p / (‖E₀f‖_p + ‖g‖_p)`.
    Type,
}

impl Direction {
    pub fn name(&self) -> &'static str {
        match self {
            Direction::Cotype => "cotype",
            Direction::Type => "type",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ProbeConfig<T> {
    /// Value-space exponent of `ℓ^r_m`.
    pub r: T,
    pub q: T,
    pub p: T,
    pub alpha: FracOrder<T>,
    pub m_list: Vec<usize>,
    pub trials: usize,
    pub seed: u64,
    /// Lowest frequency; coordinate `j` oscillates at `base_freq · 2^j`.
    pub base_freq: u64,
    /// Period of the torus.
    pub period: T,
}

impl<T: Real> ProbeConfig<T> {
    pub fn new(r: T, q: T, m_list: Vec<usize>, trials: usize, seed: u64) -> Result<Self> {
        let cfg = Self {
            r,
            q,
            p: q,
            alpha: FracOrder::new(T::one())?,
            m_list,
            trials,
            seed,
            base_freq: 1,
            period: T::TAU(),
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        if self.r.is_nan() || self.r < T::one() {
            return Err(invalid("r", format!("must lie in [1, inf], got {}", self.r)));
        }
        for (name, v) in [("q", self.q), ("p", self.p)] {
            if !(v > T::one()) || !v.is_finite() {
                return Err(invalid(name, format!("must lie in (1, inf), got {v}")));
            }
        }
        if self.m_list.is_empty() || self.m_list[0] == 0 {
            return Err(invalid("m_list", "need a nonempty list of positive dimensions"));
        }
        if self.m_list.windows(2).any(|w| w[1] <= w[0]) {
            return Err(invalid("m_list", "dimensions must increase strictly"));
        }
        if self.trials == 0 {
            return Err(invalid("trials", "need at least one trial"));
        }
        if self.base_freq == 0 {
            return Err(invalid("base_freq", "must be at least 1"));
        }
        if !(self.period > T::zero()) || !self.period.is_finite() {
            return Err(invalid("period", format!("must be positive, got {}", self.period)));
        }
        let top = *self.m_list.last().unwrap();
        if top > 1000 {
            return Err(invalid("m_list", format!("dimension {top} exceeds the supported 1000")));
        }
        Ok(())
    }
}

/// Per-`m` outcome of a probe.
#[derive(Debug, Clone, PartialEq)]
pub struct ProbeResult<T> {
    pub direction: Direction,
    pub m_list: Vec<usize>,
    /// Best ratio over the trial family, made nondecreasing by embedding smaller fields.
    pub rho: Vec<T>,
    /// Best ratio among the fresh trials at each `m` alone.
    pub fresh: Vec<T>,
    pub trials: usize,
    /// Least-squares slope of `ln ρ` against `ln m`.
    pub growth_exponent: T,
}

impl<T: Real> ProbeResult<T> {
    /// `ρ(m_last) / ρ(m_first)`.
    pub fn trend(&self) -> T {
        self.rho[self.rho.len() - 1] / self.rho[0]
    }

    /// `ρ(b)/ρ(a)` for two listed dimensions.
    pub fn trend_between(&self, a: usize, b: usize) -> Option<T> {
        let i = self.m_list.iter().position(|&m| m == a)?;
        let j = self.m_list.iter().position(|&m| m == b)?;
        Some(self.rho[j] / self.rho[i])
    }

    /// Rows `m,rho,trials,growth_exponent`.
    pub fn write_csv<W: Write>(&self, mut out: W) -> Result<()> {
        writeln!(out, "m,rho,trials,growth_exponent")?;
        for (m, r) in self.m_list.iter().zip(&self.rho) {
            writeln!(out, "{m},{:.16e},{},{:.16e}", r.as_f64(), self.trials, self.growth_exponent.as_f64())?;
        }
        Ok(())
    }
}

/// `f(x) = Σ_{j<m} a_j ε_j e^{i k_j x} e_j` with `k_j = base_freq · 2^j`.
pub fn make_lacunary_field<T: Real>(grid: GridSpec<T>, m: usize, r: T, amplitudes: &[T], signs: &[i8], base_freq: u64) -> Result<Field<T>> {
    if grid.dim() != 1 {
        return Err(invalid("grid", "lacunary fields live on one-dimensional grids"));
    }
    check_family(m, amplitudes, signs)?;
    let nyquist = (grid.points_per_axis() / 2) as u128;
    let top = (base_freq as u128) << (m - 1).min(127);
    if m > 64 || top >= nyquist || base_freq == 0 {
        return Err(invalid(
            "m",
            format!("frequency {base_freq}·2^{} is not below the Nyquist limit {nyquist}", m - 1),
        ));
    }
    let unit = grid.frequency_unit();
    Field::from_fn(grid, BanachSpec::sequence(m, r)?, |x, j| {
        let k = T::from_u64(base_freq << j).unwrap() * unit;
        cis(k * x[0]) * (amplitudes[j] * T::from(signs[j]).unwrap())
    })
}

fn check_family<T: Real>(m: usize, amplitudes: &[T], signs: &[i8]) -> Result<()> {
    if m == 0 {
        return Err(invalid("m", "need at least one coordinate"));
    }
    if amplitudes.len() != m || signs.len() != m {
        return Err(Error::Incompatible(format!(
            "{m} coordinates need {m} amplitudes and signs, got {} and {}",
            amplitudes.len(),
            signs.len()
        )));
    }
    if amplitudes.iter().any(|a| !a.is_finite()) {
        return Err(invalid("amplitudes", "must be finite"));
    }
    if signs.iter().any(|&s| s != 1 && s != -1) {
        return Err(invalid("signs", "must be ±1"));
    }
    Ok(())
}

/// `‖g_α^q(f)‖_p / ‖f‖_p` on the grid.
pub fn cotype_ratio<T: Real>(f: &Field<T>, ord: FracOrder<T>, q: T, p: T, tg: &TimeGrid<T>) -> Result<T> {
    let den = lp_norm(f, p)?;
    if den == T::zero() {
        return Err(invalid("f", "ratio needs a nonzero field"));
    }
    Ok(g_function(f, ord, q, tg)?.lp_norm(p)? / den)
}

/// `‖f‖_p / (‖E₀f‖_p + ‖g_α^q(f)‖_p)` on the grid.
pub fn type_ratio<T: Real>(f: &Field<T>, ord: FracOrder<T>, q: T, p: T, tg: &TimeGrid<T>) -> Result<T> {
    let num = lp_norm(f, p)?;
    if num == T::zero() {
        return Err(invalid("f", "ratio needs a nonzero field"));
    }
    let den = lp_norm(&e0_project(f), p)? + g_function(f, ord, q, tg)?.lp_norm(p)?;
    Ok(num / den)
}

/// A lacunary field kept as its coefficients. Every coordinate is a single
/// mode, so `‖t^α∂^α𝒫_t f(x)‖_{ℓ^r}` does not depend on `x` and all ratios
/// are exact integrals in `t` alone.
#[derive(Debug, Clone, PartialEq)]
pub struct LacunaryField<T> {
    r: T,
    frequencies: Vec<T>,
    amplitudes: Vec<T>,
}

impl<T: Real> LacunaryField<T> {
    pub fn new(r: T, period: T, base_freq: u64, amplitudes: &[T], signs: &[i8]) -> Result<Self> {
        let m = amplitudes.len();
        check_family(m, amplitudes, signs)?;
        BanachSpec::sequence(m, r)?;
        let unit = T::TAU() / period;
        let base = T::from_u64(base_freq).unwrap() * unit;
        let frequencies = (0..m).map(|j| base * T::lit(2.0).powi(j as i32)).collect();
        Ok(Self { r, frequencies, amplitudes: amplitudes.iter().map(|a| a.abs()).collect() })
    }

    pub fn len(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.amplitudes.is_empty()
    }

    fn r_norm(&self, v: impl Iterator<Item = T>) -> T {
        if self.r.is_infinite() {
            v.fold(T::zero(), T::max)
        } else {
            v.map(|a| a.powf(self.r)).sum::<T>().powf(self.r.recip())
        }
    }

    /// `‖f(x)‖_{ℓ^r}`, the same at every `x`.
    pub fn pointwise_norm(&self) -> T {
        self.r_norm(self.amplitudes.iter().copied())
    }

    /// Time grid resolving every coordinate.
    pub fn time_grid(&self, ord: FracOrder<T>, q: T) -> Result<TimeGrid<T>> {
        let lo = self.frequencies[0];
        let hi = self.frequencies[self.len() - 1];
        TimeGrid::for_band(lo, hi, q, ord.alpha())
    }

    /// `g_α^q(f)(x)`, the same at every `x`.
    pub fn g_value(&self, ord: FracOrder<T>, q: T, tg: &TimeGrid<T>) -> T {
        let alpha = ord.alpha();
        tg.integrate(|t| {
            let v = self.r_norm(self.amplitudes.iter().zip(&self.frequencies).map(|(&a, &k)| a * scaled_frac_modulus(k, t, alpha)));
            v.powf(q)
        })
        .powf(q.recip())
    }

    pub fn ratio(&self, direction: Direction, ord: FracOrder<T>, q: T, tg: &TimeGrid<T>) -> T {
        let g = self.g_value(ord, q, tg);
        let f = self.pointwise_norm();
        match direction {
            Direction::Cotype => g / f,
            Direction::Type => f / g,
        }
    }

    /// The same field sampled on a grid, for cross-checks.
    pub fn to_field(&self, grid: GridSpec<T>, base_freq: u64) -> Result<Field<T>> {
        let signs = vec![1i8; self.len()];
        make_lacunary_field(grid, self.len(), self.r, &self.amplitudes, &signs, base_freq)
    }
}

/// Random generator for trial `trial` at dimension `m`, independent of scheduling.
pub fn trial_rng(seed: u64, m: usize, trial: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(((m as u64) << 32) | trial as u64);
    rng
}

/// Amplitudes and Rademacher signs of one trial; trial 0 has unit amplitudes.
pub fn trial_family<T: Real>(seed: u64, m: usize, trial: usize) -> (Vec<T>, Vec<i8>) {
    let mut rng = trial_rng(seed, m, trial);
    let signs = (0..m).map(|_| if rng.random::<bool>() { 1 } else { -1 }).collect();
    let amps = (0..m)
        .map(|_| if trial == 0 { T::one() } else { T::lit(rng.random_range(0.0..1.0)).max(T::lit(1e-3)) })
        .collect();
    (amps, signs)
}

fn run_probe<T: Real>(cfg: &ProbeConfig<T>, direction: Direction) -> Result<ProbeResult<T>> {
    cfg.validate()?;
    let ord = cfg.alpha;
    let mut fresh = Vec::with_capacity(cfg.m_list.len());
    for &m in &cfg.m_list {
        let best = (0..cfg.trials)
            .into_par_iter()
            .map(|trial| {
                let (amps, signs) = trial_family::<T>(cfg.seed, m, trial);
                let field = LacunaryField::new(cfg.r, cfg.period, cfg.base_freq, &amps, &signs)?;
                let tg = field.time_grid(ord, cfg.q)?;
                Ok(field.ratio(direction, ord, cfg.q, &tg))
            })
            .collect::<Result<Vec<T>>>()?
            .into_iter()
            .fold(T::zero(), T::max);
        fresh.push(best);
    }
    let mut rho = fresh.clone();
    for i in 1..rho.len() {
        rho[i] = rho[i].max(rho[i - 1]);
    }
    let pts: Vec<(T, T)> = cfg.m_list.iter().zip(&rho).map(|(&m, &r)| (T::from_count(m).ln(), r.ln())).collect();
    Ok(ProbeResult {
        direction,
        m_list: cfg.m_list.clone(),
        rho,
        fresh,
        trials: cfg.trials,
        growth_exponent: crate::hilbert::slope(&pts),
    })
}

/// Best `‖g‖_p/‖f‖_p` over lacunary `ℓ^r_m` fields for each `m`.
pub fn run_cotype_probe<T: Real>(cfg: &ProbeConfig<T>) -> Result<ProbeResult<T>> {
    run_probe(cfg, Direction::Cotype)
}

/// Best `‖f‖_p/(‖E₀f‖_p + ‖g‖_p)` over lacunary fields; needs `q ≤ 2`.
pub fn run_type_probe<T: Real>(cfg: &ProbeConfig<T>) -> Result<ProbeResult<T>> {
    if cfg.q > T::lit(2.0) {
        return Err(invalid("q", format!("type probe needs q in (1, 2], got {}", cfg.q)));
    }
    run_probe(cfg, Direction::Type)
}
