//! Convolution kernels on grid offsets for the cone and `g*_λ` integrals.
//!
//! Sampled data are read as piecewise constant on grid cells and extended
//! periodically to the whole space, so every kernel entry is an exact or
//! near-exact integral over one cell summed over all periodic images.

use crate::grid::{fft, GridSpec};
use crate::quadrature::{gauss_legendre, Rule};
use crate::special::hurwitz_zeta;
use crate::Real;

const SPARSE_SUPPORT: usize = 64;

/// Kernel on grid offsets, indexed like grid points.
#[derive(Debug, Clone)]
pub struct OffsetKernel<T> {
    pub values: Vec<T>,
}

impl<T: Real> OffsetKernel<T> {
    pub fn sum(&self) -> T {
        self.values.iter().copied().sum()
    }

    /// Circular convolution `(K ∗ data)(x_i) = Σ_j K(x_i − y_j) data(y_j)`.
    pub fn convolve(&self, grid: &GridSpec<T>, data: &[T]) -> Vec<T> {
        let support: Vec<usize> = (0..self.values.len()).filter(|&i| self.values[i] != T::zero()).collect();
        if support.len() <= SPARSE_SUPPORT {
            return direct_convolve(grid, &self.values, &support, data);
        }
        let mut out = fft::circular_convolve(&self.values, data, grid.points_per_axis(), grid.dim());
        for v in &mut out {
            *v = v.max(T::zero());
        }
        out
    }
}

fn direct_convolve<T: Real>(grid: &GridSpec<T>, kernel: &[T], support: &[usize], data: &[T]) -> Vec<T> {
    let n = grid.points_per_axis();
    let np = grid.npoints();
    let mut out = vec![T::zero(); np];
    for (p, o) in out.iter_mut().enumerate() {
        let [i, j] = grid.index(p);
        let mut acc = T::zero();
        for &s in support {
            let [a, b] = grid.index(s);
            let src = if grid.dim() == 1 {
                (i + n - a) % n
            } else {
                ((i + n - a) % n) * n + (j + n - b) % n
            };
            acc += kernel[s] * data[src];
        }
        *o = acc;
    }
    out
}

/// Offset of grid index `j` reduced to `(-L/2, L/2]`.
fn centered<T: Real>(j: usize, n: usize, h: T) -> T {
    if j > n / 2 {
        -T::from_count(n - j) * h
    } else {
        T::from_count(j) * h
    }
}

fn image_range<T: Real>(reach: T, period: T) -> i64 {
    (reach / period).ceil().to_i64().unwrap_or(0) + 1
}

/// `|cell ∩ B(0, t)|` summed over periodic images: the cone-slice kernel.
pub fn area_kernel<T: Real>(grid: &GridSpec<T>, t: T) -> OffsetKernel<T> {
    let n = grid.points_per_axis();
    let h = grid.spacing();
    let l = grid.period();
    let half = h * T::lit(0.5);
    let reach = image_range(t + h, l);
    let values = (0..grid.npoints())
        .map(|p| {
            let [i, j] = grid.index(p);
            let dx = centered(i, n, h);
            if grid.dim() == 1 {
                (-reach..=reach)
                    .map(|k| {
                        let c = dx + T::lit(k as f64) * l;
                        ((c + half).min(t) - (c - half).max(-t)).max(T::zero())
                    })
                    .sum()
            } else {
                let dy = centered(j, n, h);
                let mut acc = T::zero();
                for k1 in -reach..=reach {
                    let cx = dx + T::lit(k1 as f64) * l;
                    if cx.abs() - half >= t {
                        continue;
                    }
                    for k2 in -reach..=reach {
                        let cy = dy + T::lit(k2 as f64) * l;
                        acc += square_disk_overlap(cx - half, cx + half, cy - half, cy + half, t);
                    }
                }
                acc
            }
        })
        .collect();
    OffsetKernel { values }
}

/// `|[x1,x2]×[y1,y2] ∩ B(0, r)|`.
pub fn square_disk_overlap<T: Real>(x1: T, x2: T, y1: T, y2: T, r: T) -> T {
    let near = |a: T, b: T| if a > T::zero() { a } else if b < T::zero() { -b } else { T::zero() };
    let (nx, ny) = (near(x1, x2), near(y1, y2));
    if nx * nx + ny * ny >= r * r {
        return T::zero();
    }
    let (fx, fy) = (x1.abs().max(x2.abs()), y1.abs().max(y2.abs()));
    if fx * fx + fy * fy <= r * r {
        return (x2 - x1) * (y2 - y1);
    }
    let q = |a, b| quadrant_area(a, b, r);
    (q(x2, y2) - q(x1, y2) - q(x2, y1) + q(x1, y1)).max(T::zero())
}

/// `∫₀^u √(r² − w²) dw`.
fn arc_primitive<T: Real>(u: T, r: T) -> T {
    let u = u.max(-r).min(r);
    T::lit(0.5) * (u * (r * r - u * u).max(T::zero()).sqrt() + r * r * (u / r).asin())
}

/// `|{(u, v) ∈ B(0, r) : u < a, v < b}|`.
fn quadrant_area<T: Real>(a: T, b: T, r: T) -> T {
    let a = a.max(-r).min(r);
    let chord = |p: T, q: T| if q > p { arc_primitive(q, r) - arc_primitive(p, r) } else { T::zero() };
    if b >= r {
        return T::lit(2.0) * chord(-r, a);
    }
    if b <= -r {
        return T::zero();
    }
    let c = (r * r - b * b).sqrt();
    let inner_hi = a.min(c);
    let inner = if inner_hi > -c { b * (inner_hi + c) + chord(-c, inner_hi) } else { T::zero() };
    if b >= T::zero() {
        let left = T::lit(2.0) * chord(-r, a.min(-c));
        let right = T::lit(2.0) * chord(c, a);
        left + inner + right
    } else {
        inner
    }
}

/// `∫_a^b (t/(|u| + t))^Λ du` in closed form.
fn cell_integral_1d<T: Real>(a: T, b: T, t: T, big: T) -> T {
    let pw = |u: T| (t / (u + t)).powf(big - T::one());
    let c = t / (big - T::one());
    let from_zero = |u: T| c * (T::one() - pw(u));
    if a >= T::zero() {
        c * (pw(a) - pw(b))
    } else if b <= T::zero() {
        c * (pw(-b) - pw(-a))
    } else {
        from_zero(-a) + from_zero(b)
    }
}

/// `(t/(|x| + t))^{λn}` integrated over each cell and summed over periodic images.
pub fn gstar_kernel<T: Real>(grid: &GridSpec<T>, t: T, lambda: T) -> OffsetKernel<T> {
    if grid.dim() == 1 {
        gstar_kernel_1d(grid, t, lambda)
    } else {
        gstar_kernel_2d(grid, t, lambda)
    }
}

fn gstar_kernel_1d<T: Real>(grid: &GridSpec<T>, t: T, big: T) -> OffsetKernel<T> {
    let n = grid.points_per_axis();
    let h = grid.spacing();
    let l = grid.period();
    let half = h * T::lit(0.5);
    let ratio = (t / l).powf(big);
    let curvature = h * h * h / T::lit(24.0) * big * (big + T::one()) / (l * l);
    let values = (0..n)
        .map(|j| {
            let d = centered(j, n, h);
            let mut acc = T::zero();
            for k in -1i64..=1 {
                let c = d + T::lit(k as f64) * l;
                acc += cell_integral_1d(c - half, c + half, t, big);
            }
            for side in [d, -d] {
                let shift = T::lit(2.0) + (side + t) / l;
                acc += ratio * (h * hurwitz_zeta(big, shift) + curvature * hurwitz_zeta(big + T::lit(2.0), shift));
            }
            acc
        })
        .collect();
    OffsetKernel { values }
}

fn gstar_kernel_2d<T: Real>(grid: &GridSpec<T>, t: T, lambda: T) -> OffsetKernel<T> {
    let big = T::lit(2.0) * lambda;
    let n = grid.points_per_axis();
    let h = grid.spacing();
    let l = grid.period();
    let half = h * T::lit(0.5);
    let w = |x: T, y: T| (t / ((x * x + y * y).sqrt() + t)).powf(big);
    let coarse: Rule<T> = gauss_legendre(3);
    let fine: Rule<T> = gauss_legendre(8);
    let radius = T::lit(3.0) * l / T::PI().sqrt();
    let rt = radius + t;
    let tail = (t / rt).powf(big) * (rt * rt / (big - T::lit(2.0)) - t * rt / (big - T::one())) * T::TAU() * h * h / (l * l);
    let cell = |cx: T, cy: T| -> T {
        let near = cx.abs() < T::lit(2.0) * h && cy.abs() < T::lit(2.0) * h;
        if near {
            let mut acc = T::zero();
            for (sx, sy) in [(-T::one(), -T::one()), (-T::one(), T::one()), (T::one(), -T::one()), (T::one(), T::one())] {
                let (ox, oy) = (cx + sx * half * T::lit(0.5), cy + sy * half * T::lit(0.5));
                let q = half * T::lit(0.5);
                for (&u, &wu) in fine.nodes.iter().zip(&fine.weights) {
                    for (&v, &wv) in fine.nodes.iter().zip(&fine.weights) {
                        acc += wu * wv * q * q * w(ox + q * u, oy + q * v);
                    }
                }
            }
            acc
        } else {
            let mut acc = T::zero();
            for (&u, &wu) in coarse.nodes.iter().zip(&coarse.weights) {
                for (&v, &wv) in coarse.nodes.iter().zip(&coarse.weights) {
                    acc += wu * wv * half * half * w(cx + half * u, cy + half * v);
                }
            }
            acc
        }
    };
    let values = (0..grid.npoints())
        .map(|p| {
            let [i, j] = grid.index(p);
            let (dx, dy) = (centered(i, n, h), centered(j, n, h));
            let mut acc = tail;
            for k1 in -1i64..=1 {
                for k2 in -1i64..=1 {
                    acc += cell(dx + T::lit(k1 as f64) * l, dy + T::lit(k2 as f64) * l);
                }
            }
            acc
        })
        .collect();
    OffsetKernel { values }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn area_kernel_mass_is_ball_volume() {
        let g = GridSpec::<f64>::line(64).unwrap();
        for t in [0.01, 0.3, 2.0, 7.5, 40.0] {
            let k = area_kernel(&g, t);
            assert!((k.sum() - 2.0 * t).abs() < 1e-12 * t.max(1.0), "t={t}");
        }
        let g = GridSpec::<f64>::square(16).unwrap();
        for t in [0.05, 0.9, 4.0, 9.0] {
            let k = area_kernel(&g, t);
            let want = std::f64::consts::PI * t * t;
            assert!((k.sum() - want).abs() < 1e-11 * want.max(1.0), "t={t}: {} vs {want}", k.sum());
        }
    }

    #[test]
    fn overlap_special_cases() {
        let r = 1.0_f64;
        assert!((square_disk_overlap(-2.0, 2.0, -2.0, 2.0, r) - std::f64::consts::PI).abs() < 1e-14);
        assert!((square_disk_overlap(0.0, 2.0, 0.0, 2.0, r) - std::f64::consts::FRAC_PI_4).abs() < 1e-14);
        assert!((square_disk_overlap(-0.1, 0.1, -0.1, 0.1, r) - 0.04).abs() < 1e-15);
        assert_eq!(square_disk_overlap(1.0, 2.0, 0.0, 1.0, r), 0.0);
        // half-disk strip
        assert!((square_disk_overlap(-2.0, 0.0, -2.0, 2.0, r) - std::f64::consts::FRAC_PI_2).abs() < 1e-14);
    }

    #[test]
    fn gstar_kernel_1d_mass() {
        // ∫_ℝ (t/(|u|+t))^Λ du = 2t/(Λ−1)
        let g = GridSpec::<f64>::line(128).unwrap();
        for &(t, big) in &[(0.05, 2.0), (1.0, 2.0), (3.0, 4.0), (30.0, 3.0)] {
            let k = gstar_kernel(&g, t, big);
            let want = 2.0 * t / (big - 1.0);
            assert!((k.sum() - want).abs() < 1e-6 * want, "t={t} Λ={big}: {} vs {want}", k.sum());
        }
    }

    #[test]
    fn gstar_kernel_2d_mass() {
        // ∫_{ℝ²} (t/(|u|+t))^{2λ} du = 2π t² / ((2λ−1)(2λ−2))
        let g = GridSpec::<f64>::square(32).unwrap();
        for &(t, lambda) in &[(0.3, 2.0), (1.0, 2.0), (5.0, 3.0)] {
            let k = gstar_kernel(&g, t, lambda);
            let big = 2.0 * lambda;
            let want = std::f64::consts::TAU * t * t / ((big - 1.0) * (big - 2.0));
            assert!((k.sum() - want).abs() < 2e-2 * want, "t={t}: {} vs {want}", k.sum());
        }
    }

    #[test]
    fn sparse_and_fft_convolution_agree() {
        let g = GridSpec::<f64>::line(256).unwrap();
        let data: Vec<f64> = (0..256).map(|i| ((i * 37 % 101) as f64).sin().abs()).collect();
        let k = area_kernel(&g, 0.1);
        let sparse = k.convolve(&g, &data);
        let dense = fft::circular_convolve(&k.values, &data, 256, 1);
        for (a, b) in sparse.iter().zip(&dense) {
            assert!((a - b).abs() < 1e-13);
        }
    }
}
