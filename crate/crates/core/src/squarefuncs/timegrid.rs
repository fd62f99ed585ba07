use crate::error::invalid;
use crate::{Real, Result};

const GREGORY: [(f64, f64); 7] = [
    (5257.0, 17280.0),
    (22081.0, 15120.0),
    (54851.0, 120960.0),
    (103.0, 70.0),
    (89437.0, 120960.0),
    (16367.0, 15120.0),
    (23917.0, 24192.0),
];

/// Log-spaced nodes in `[t_min, t_max]` with weights for `∫ (·) dt/t`.
///
/// The weights are the trapezoid rule in `ln t` with Gregory end corrections
/// through sixth differences.
#[derive(Debug, Clone, PartialEq)]
pub struct TimeGrid<T> {
    t_min: T,
    t_max: T,
    nodes: Vec<T>,
    weights: Vec<T>,
}

impl<T: Real> TimeGrid<T> {
    pub const MIN_COUNT: usize = 16;
    const PER_UNIT_LOG: f64 = 16.0;

    pub fn new(t_min: T, t_max: T, count: usize) -> Result<Self> {
        if !(t_min > T::zero()) || !t_min.is_finite() {
            return Err(invalid("t_min", format!("must be positive, got {t_min}")));
        }
        if !(t_max > t_min) || !t_max.is_finite() {
            return Err(invalid("t_max", format!("must exceed t_min = {t_min}, got {t_max}")));
        }
        if count < Self::MIN_COUNT {
            return Err(invalid("count", format!("need at least {} nodes, got {count}", Self::MIN_COUNT)));
        }
        let (a, b) = (t_min.ln(), t_max.ln());
        let h = (b - a) / T::from_count(count - 1);
        let ends = GREGORY.map(|(a, b)| T::lit(a / b));
        let mut nodes = Vec::with_capacity(count);
        let mut weights = Vec::with_capacity(count);
        for i in 0..count {
            let s = if i == count - 1 { b } else { a + h * T::from_count(i) };
            nodes.push(if i == 0 { t_min } else if i == count - 1 { t_max } else { s.exp() });
            let from_end = i.min(count - 1 - i);
            weights.push(h * if from_end < ends.len() { ends[from_end] } else { T::one() });
        }
        Ok(Self { t_min, t_max, nodes, weights })
    }

    /// Default grid for spectra in the band `[λ_min, λ_max]` and integrands
    /// behaving like `t^{qα}` near zero.
    pub fn for_band(lambda_min: T, lambda_max: T, q: T, alpha: T) -> Result<Self> {
        if !(lambda_min > T::zero()) || !(lambda_max >= lambda_min) {
            return Err(invalid("band", format!("need 0 < lambda_min <= lambda_max, got [{lambda_min}, {lambda_max}]")));
        }
        let qa = q * alpha;
        let lo = T::lit(1e-4).min((T::lit(1e-10) * qa).powf(qa.recip()));
        let hi = T::lit(50.0).max(T::lit(5.0) * qa);
        let t_min = lo / lambda_max;
        let t_max = hi / lambda_min;
        Self::new(t_min, t_max, Self::default_count(t_min, t_max))
    }

    /// `max(64, 16 per unit of ln t)`.
    pub fn default_count(t_min: T, t_max: T) -> usize {
        let span = (t_max / t_min).ln().as_f64();
        ((Self::PER_UNIT_LOG * span).ceil() as usize + 1).max(64)
    }

    pub fn t_min(&self) -> T {
        self.t_min
    }

    pub fn t_max(&self) -> T {
        self.t_max
    }

    pub fn count(&self) -> usize {
        self.nodes.len()
    }

    pub fn nodes(&self) -> &[T] {
        &self.nodes
    }

    pub fn weights(&self) -> &[T] {
        &self.weights
    }

    /// Same range with `2·count − 1` nodes; every old node is kept.
    pub fn refined(&self) -> Self {
        Self::new(self.t_min, self.t_max, 2 * self.count() - 1).expect("refinement of a valid grid")
    }

    /// `Σ_i w_i F(t_i)`.
    pub fn integrate(&self, mut f: impl FnMut(T) -> T) -> T {
        self.nodes.iter().zip(&self.weights).fold(T::zero(), |acc, (&t, &w)| acc + w * f(t))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn refinement_is_nested() {
        let g = TimeGrid::<f64>::new(1e-3, 10.0, 33).unwrap();
        let r = g.refined();
        assert_eq!(r.count(), 65);
        for (i, &t) in g.nodes().iter().enumerate() {
            assert!((r.nodes()[2 * i] - t).abs() <= 1e-14 * t);
        }
    }

    #[test]
    fn weights_sum_to_log_length() {
        let g = TimeGrid::<f64>::new(0.5, 40.0, 100).unwrap();
        let sum: f64 = g.weights().iter().sum();
        assert!((sum - 80f64.ln()).abs() < 1e-13);
    }

    #[test]
    fn rejects_bad_ranges() {
        assert!(TimeGrid::<f64>::new(0.0, 1.0, 64).is_err());
        assert!(TimeGrid::<f64>::new(2.0, 1.0, 64).is_err());
        assert!(TimeGrid::<f64>::new(1.0, 2.0, 4).is_err());
    }
}
