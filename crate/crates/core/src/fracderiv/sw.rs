use std::collections::HashMap;
use std::sync::{Arc, Mutex};

use num_complex::Complex;

use crate::error::invalid;
use crate::quadrature::{gauss_jacobi, gauss_legendre, Rule};
use crate::special::gamma;
use crate::{Real, Result};

/// Rules for `∫₀^∞ F(s) s^{μ-1} ds`, split at `s = t`.
///
/// On `[0, t]` a Gauss–Jacobi rule absorbs `s^{μ-1}`; on `[t, ∞)` the
/// substitution `s = t e^v` is followed by Gauss–Legendre in `v`.
#[derive(Debug)]
pub struct SWQuadrature<T> {
    j_near: usize,
    j_far: usize,
    tolerance: T,
    far: Rule<T>,
    near: Mutex<HashMap<u64, Arc<Rule<T>>>>,
}

impl<T: Real> Clone for SWQuadrature<T> {
    fn clone(&self) -> Self {
        Self {
            j_near: self.j_near,
            j_far: self.j_far,
            tolerance: self.tolerance,
            far: self.far.clone(),
            near: Mutex::new(HashMap::new()),
        }
    }
}

impl<T: Real> SWQuadrature<T> {
    pub const DEFAULT_NEAR: usize = 128;
    pub const DEFAULT_FAR: usize = 128;

    pub fn new(j_near: usize, j_far: usize) -> Result<Self> {
        Self::with_tolerance(j_near, j_far, T::lit(1e-6))
    }

    /// Budgets plus the relative `L²` tolerance an application must certify.
    pub fn with_tolerance(j_near: usize, j_far: usize, tolerance: T) -> Result<Self> {
        if j_near < 2 {
            return Err(invalid("j_near", format!("need at least 2 nodes, got {j_near}")));
        }
        if j_far < 2 {
            return Err(invalid("j_far", format!("need at least 2 nodes, got {j_far}")));
        }
        if !(tolerance > T::zero()) {
            return Err(invalid("tolerance", format!("must be positive, got {tolerance}")));
        }
        Ok(Self {
            j_near,
            j_far,
            tolerance,
            far: gauss_legendre(j_far),
            near: Mutex::new(HashMap::new()),
        })
    }

    pub fn j_near(&self) -> usize {
        self.j_near
    }

    pub fn j_far(&self) -> usize {
        self.j_far
    }

    pub fn tolerance(&self) -> T {
        self.tolerance
    }

    fn near_rule(&self, mu: T) -> Arc<Rule<T>> {
        let key = mu.as_f64().to_bits();
        let mut cache = self.near.lock().unwrap_or_else(|e| e.into_inner());
        Arc::clone(
            cache
                .entry(key)
                .or_insert_with(|| Arc::new(gauss_jacobi(self.j_near, T::zero(), mu - T::one()))),
        )
    }

    /// Nodes and weights (weight function included) for the split at `t`
    /// with the far interval ending at `s_max`.
    pub fn rule(&self, t: T, mu: T, s_max: T) -> SwRule<T> {
        let near = self.near_rule(mu);
        let half = t * T::lit(0.5);
        let scale = half.powf(mu);
        let mut nodes = Vec::with_capacity(self.j_near + self.j_far);
        let mut weights = Vec::with_capacity(self.j_near + self.j_far);
        for (&x, &w) in near.nodes.iter().zip(&near.weights) {
            nodes.push(half * (T::one() + x));
            weights.push(scale * w);
        }
        let v_max = (s_max / t).max(T::lit(2.0)).ln();
        let far = self.far.mapped(T::zero(), v_max);
        for (&v, &w) in far.nodes.iter().zip(&far.weights) {
            let s = t * v.exp();
            nodes.push(s);
            weights.push(w * s.powf(mu));
        }
        SwRule { mu, nodes, weights }
    }

    /// Rule for integrands decaying like `e^{-λ_min s}`.
    pub fn rule_for_band(&self, t: T, mu: T, lambda_min: T, m: u32) -> SwRule<T> {
        let margin = T::lit(45.0) + T::lit(2.0) * (T::from_count(m as usize) + mu);
        self.rule(t, mu, t + margin / lambda_min)
    }
}

/// A concrete node set for `∫₀^∞ F(s) s^{μ-1} ds`.
#[derive(Debug, Clone)]
pub struct SwRule<T> {
    pub mu: T,
    pub nodes: Vec<T>,
    pub weights: Vec<T>,
}

impl<T: Real> SwRule<T> {
    pub fn integrate(&self, mut f: impl FnMut(T) -> T) -> T {
        self.nodes.iter().zip(&self.weights).fold(T::zero(), |a, (&s, &w)| a + w * f(s))
    }

    pub fn integrate_complex(&self, mut f: impl FnMut(T) -> Complex<T>) -> Complex<T> {
        self.nodes
            .iter()
            .zip(&self.weights)
            .fold(Complex::new(T::zero(), T::zero()), |a, (&s, &w)| a + f(s) * w)
    }

    /// Quadrature value of `∫₀^∞ e^{-λs} s^{μ-1} ds`.
    pub fn laplace(&self, lambda: T) -> T {
        self.integrate(|s| (-lambda * s).exp())
    }

    /// Relative error of [`laplace`](Self::laplace) against `Γ(μ) λ^{-μ}`.
    pub fn laplace_error(&self, lambda: T) -> T {
        let exact = gamma(self.mu) * lambda.powf(-self.mu);
        ((self.laplace(lambda) - exact) / exact).abs()
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }
}
