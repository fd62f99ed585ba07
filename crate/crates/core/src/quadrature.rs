//! Gaussian rules on `[-1, 1]` and helpers shared by the semi-infinite
//! integrals in the crate.

use crate::special::gamma;
use crate::Real;

/// Nodes and weights of a quadrature rule, nodes ascending.
#[derive(Debug, Clone, PartialEq)]
pub struct Rule<T> {
    pub nodes: Vec<T>,
    pub weights: Vec<T>,
}

impl<T: Real> Rule<T> {
    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn integrate(&self, mut f: impl FnMut(T) -> T) -> T {
        self.nodes
            .iter()
            .zip(&self.weights)
            .fold(T::zero(), |acc, (&x, &w)| acc + w * f(x))
    }

    /// Affine map of a rule on `[-1, 1]` onto `[a, b]`.
    pub fn mapped(&self, a: T, b: T) -> Rule<T> {
        let half = T::lit(0.5) * (b - a);
        let mid = T::lit(0.5) * (b + a);
        Rule {
            nodes: self.nodes.iter().map(|&x| mid + half * x).collect(),
            weights: self.weights.iter().map(|&w| w * half).collect(),
        }
    }
}

/// Gauss–Legendre rule with `n` nodes on `[-1, 1]`.
pub fn gauss_legendre<T: Real>(n: usize) -> Rule<T> {
    assert!(n >= 1, "Gauss-Legendre rule needs at least one node");
    let mut nodes = vec![T::zero(); n];
    let mut weights = vec![T::zero(); n];
    let nf = T::from_count(n);
    let tol = T::epsilon() * T::lit(4.0);
    for i in 0..n.div_ceil(2) {
        let mut x = (T::PI() * (T::from_count(i) + T::lit(0.75)) / (nf + T::lit(0.5))).cos();
        let mut dp = T::one();
        for _ in 0..100 {
            let (p, d) = legendre_with_derivative(n, x);
            dp = d;
            let dx = p / d;
            x -= dx;
            if dx.abs() <= tol {
                break;
            }
        }
        let (_, d) = legendre_with_derivative(n, x);
        dp = if d.is_finite() { d } else { dp };
        let w = T::lit(2.0) / ((T::one() - x * x) * dp * dp);
        nodes[i] = -x;
        nodes[n - 1 - i] = x;
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    if n % 2 == 1 {
        nodes[n / 2] = T::zero();
    }
    Rule { nodes, weights }
}

fn legendre_with_derivative<T: Real>(n: usize, x: T) -> (T, T) {
    let mut p0 = T::one();
    let mut p1 = x;
    for k in 2..=n {
        let kf = T::from_count(k);
        let p2 = ((T::lit(2.0) * kf - T::one()) * x * p1 - (kf - T::one()) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    if n == 0 {
        return (T::one(), T::zero());
    }
    let nf = T::from_count(n);
    let d = nf * (x * p1 - p0) / (x * x - T::one());
    (p1, d)
}

/// Gauss–Jacobi rule for the weight `(1 - x)^a (1 + x)^b` on `[-1, 1]`,
/// `a, b > -1`, built from the Jacobi matrix (Golub–Welsch).
pub fn gauss_jacobi<T: Real>(n: usize, a: T, b: T) -> Rule<T> {
    assert!(n >= 1, "Gauss-Jacobi rule needs at least one node");
    assert!(a > -T::one() && b > -T::one(), "Jacobi exponents must exceed -1");
    let two = T::lit(2.0);
    let ab = a + b;
    let mut diag = vec![T::zero(); n];
    let mut off = vec![T::zero(); n];
    diag[0] = (b - a) / (ab + two);
    for (k, d) in diag.iter_mut().enumerate().skip(1) {
        let kf = T::from_count(k);
        let s = two * kf + ab;
        *d = (b * b - a * a) / (s * (s + two));
    }
    for k in 1..n {
        let kf = T::from_count(k);
        let s = two * kf + ab;
        let beta = if k == 1 {
            T::lit(4.0) * (T::one() + a) * (T::one() + b) / ((two + ab) * (two + ab) * (T::lit(3.0) + ab))
        } else {
            T::lit(4.0) * kf * (kf + a) * (kf + b) * (kf + ab) / (s * s * (s + T::one()) * (s - T::one()))
        };
        off[k - 1] = beta.sqrt();
    }
    let mu0 = two.powf(ab + T::one()) * gamma(a + T::one()) * gamma(b + T::one()) / gamma(ab + two);
    let mut first = vec![T::zero(); n];
    first[0] = T::one();
    symmetric_tridiagonal_eigen(&mut diag, &mut off, &mut first);
    let mut pairs: Vec<(T, T)> = diag
        .into_iter()
        .zip(first)
        .map(|(x, z)| (x, mu0 * z * z))
        .collect();
    pairs.sort_by(|l, r| l.0.partial_cmp(&r.0).expect("finite nodes"));
    Rule {
        nodes: pairs.iter().map(|p| p.0).collect(),
        weights: pairs.iter().map(|p| p.1).collect(),
    }
}

/// Implicit QL on a symmetric tridiagonal matrix. `off[i]` couples rows `i`
/// and `i + 1`; `first` carries the first components of the eigenvectors.
fn symmetric_tridiagonal_eigen<T: Real>(diag: &mut [T], off: &mut [T], first: &mut [T]) {
    let n = diag.len();
    if n == 1 {
        return;
    }
    off[n - 1] = T::zero();
    for l in 0..n {
        let mut iterations = 0;
        loop {
            let mut m = l;
            while m + 1 < n {
                let dd = diag[m].abs() + diag[m + 1].abs();
                if off[m].abs() <= T::epsilon() * dd {
                    break;
                }
                m += 1;
            }
            if m == l {
                break;
            }
            iterations += 1;
            assert!(iterations < 200, "tridiagonal QL failed to converge");
            let mut g = (diag[l + 1] - diag[l]) / (T::lit(2.0) * off[l]);
            let mut r = g.hypot(T::one());
            g = diag[m] - diag[l] + off[l] / (g + if g >= T::zero() { r } else { -r });
            let (mut s, mut c, mut p) = (T::one(), T::one(), T::zero());
            let mut deflated = false;
            let mut i = m;
            while i > l {
                i -= 1;
                let f = s * off[i];
                let b = c * off[i];
                r = f.hypot(g);
                off[i + 1] = r;
                if r == T::zero() {
                    diag[i + 1] -= p;
                    off[m] = T::zero();
                    deflated = true;
                    break;
                }
                s = f / r;
                c = g / r;
                g = diag[i + 1] - p;
                r = (diag[i] - g) * s + T::lit(2.0) * c * b;
                p = s * r;
                diag[i + 1] = g + p;
                g = c * r - b;
                let z = first[i + 1];
                first[i + 1] = s * first[i] + c * z;
                first[i] = c * first[i] - s * z;
            }
            if deflated {
                continue;
            }
            diag[l] -= p;
            off[l] = g;
            off[m] = T::zero();
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn legendre_integrates_polynomials_exactly() {
        let rule: Rule<f64> = gauss_legendre(7);
        for deg in 0..14 {
            let exact = if deg % 2 == 1 { 0.0 } else { 2.0 / (deg as f64 + 1.0) };
            let got = rule.integrate(|x| x.powi(deg));
            assert!((got - exact).abs() < 1e-14, "degree {deg}: {got} vs {exact}");
        }
        assert!(rule.weights.iter().all(|&w| w > 0.0));
    }

    #[test]
    fn legendre_high_order_nodes_are_accurate() {
        let rule: Rule<f64> = gauss_legendre(128);
        assert_relative_eq!(rule.weights.iter().sum::<f64>(), 2.0, max_relative = 1e-14);
        let got = rule.mapped(0.0, 3.0).integrate(|x| x.exp());
        assert_relative_eq!(got, 3.0_f64.exp() - 1.0, max_relative = 1e-14);
    }

    #[test]
    fn jacobi_reduces_to_legendre() {
        let gj: Rule<f64> = gauss_jacobi(9, 0.0, 0.0);
        let gl: Rule<f64> = gauss_legendre(9);
        for (a, b) in gj.nodes.iter().zip(&gl.nodes) {
            assert!((a - b).abs() < 1e-13);
        }
        for (a, b) in gj.weights.iter().zip(&gl.weights) {
            assert!((a - b).abs() < 1e-13);
        }
    }

    #[test]
    fn jacobi_absorbs_endpoint_singularity() {
        // ∫_{-1}^{1} (1+x)^{b} x^2 dx with b = -0.7
        let b = -0.7_f64;
        let rule: Rule<f64> = gauss_jacobi(12, 0.0, b);
        let got = rule.integrate(|x| x * x);
        // substitute y = 1 + x: ∫_0^2 y^b (y-1)^2 dy
        let m = |p: f64| 2.0_f64.powf(b + p + 1.0) / (b + p + 1.0);
        let exact = m(2.0) - 2.0 * m(1.0) + m(0.0);
        assert_relative_eq!(got, exact, max_relative = 1e-13);
        assert!(rule.weights.iter().all(|&w| w > 0.0));
    }

    #[test]
    fn jacobi_positive_exponent() {
        let rule: Rule<f64> = gauss_jacobi(64, 0.0, 1.2);
        let got = rule.integrate(|x| (-(1.0 + x)).exp());
        // ∫_0^2 y^{1.2} e^{-y} dy = γ(2.2, 2)
        let exact = statrs::function::gamma::gamma_lr(2.2, 2.0) * gamma(2.2_f64);
        assert_relative_eq!(got, exact, max_relative = 1e-13);
    }
}
