//! Quadrature rules: Gauss–Legendre, product grids on the sphere and the
//! ball, and symmetric rules on triangles.

use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::vec3::Vec3;

/// Gauss–Legendre nodes and weights on `[-1, 1]`, nodes ascending.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut x = vec![0.0; n];
    let mut w = vec![0.0; n];
    for i in 0..n.div_ceil(2) {
        // Tricomi initial guess, then Newton on P_n
        let mut z = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (p, d) = legendre_with_derivative(n, z);
            dp = d;
            let dz = p / d;
            z -= dz;
            if dz.abs() < 1e-16 {
                break;
            }
        }
        let (_, d) = legendre_with_derivative(n, z);
        if d != 0.0 {
            dp = d;
        }
        let wi = 2.0 / ((1.0 - z * z) * dp * dp);
        x[i] = -z;
        x[n - 1 - i] = z;
        w[i] = wi;
        w[n - 1 - i] = wi;
    }
    if n % 2 == 1 {
        x[n / 2] = 0.0;
    }
    (x, w)
}

fn legendre_with_derivative(n: usize, z: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = z;
    if n == 0 {
        return (1.0, 0.0);
    }
    for j in 2..=n {
        let p2 = ((2 * j - 1) as f64 * z * p1 - (j - 1) as f64 * p0) / j as f64;
        p0 = p1;
        p1 = p2;
    }
    (p1, n as f64 * (z * p1 - p0) / (z * z - 1.0))
}

/// Gauss–Legendre rule mapped to `[a, b]`.
pub fn gauss_legendre_interval(n: usize, a: f64, b: f64) -> (Vec<f64>, Vec<f64>) {
    let (x, w) = gauss_legendre(n);
    let h = 0.5 * (b - a);
    (
        x.iter().map(|&t| a + h * (t + 1.0)).collect(),
        w.iter().map(|&v| v * h).collect(),
    )
}

/// Product rule on S²: Gauss–Legendre in cos θ, uniform trapezoid in φ.
/// Exact for spherical harmonics of degree `< min(2·n_theta, n_phi)`.
#[derive(Debug, Clone, PartialEq)]
pub struct SphereGrid {
    pub theta: Vec<f64>,
    pub phi: Vec<f64>,
    pub directions: Vec<Vec3>,
    pub weights: Vec<f64>,
}

impl SphereGrid {
    pub fn gauss(n_theta: usize, n_phi: usize) -> Result<Self> {
        if n_theta == 0 || n_phi == 0 {
            return Err(Error::validation("sphere grid needs at least one node per axis"));
        }
        let (ct, wt) = gauss_legendre(n_theta);
        let mut g = SphereGrid {
            theta: Vec::new(),
            phi: Vec::new(),
            directions: Vec::new(),
            weights: Vec::new(),
        };
        let dphi = 2.0 * PI / n_phi as f64;
        // descending cos θ so θ runs from the north pole southwards
        for i in (0..n_theta).rev() {
            let theta = ct[i].clamp(-1.0, 1.0).acos();
            for j in 0..n_phi {
                let phi = j as f64 * dphi;
                g.theta.push(theta);
                g.phi.push(phi);
                g.directions.push(Vec3::from_spherical(theta, phi));
                g.weights.push(wt[i] * dphi);
            }
        }
        Ok(g)
    }

    pub fn len(&self) -> usize {
        self.directions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.directions.is_empty()
    }
}

/// Tensor-product Gauss rule on the ball `B_ρ(c)` in spherical coordinates.
#[derive(Debug, Clone, PartialEq)]
pub struct BallQuadrature {
    pub points: Vec<Vec3>,
    pub weights: Vec<f64>,
}

impl BallQuadrature {
    /// `n_r` radial Gauss nodes (weight r²), and an `n_theta × n_phi` sphere grid.
    pub fn new(center: Vec3, radius: f64, n_r: usize, n_theta: usize, n_phi: usize) -> Result<Self> {
        if !(radius > 0.0) || n_r == 0 {
            return Err(Error::validation("ball quadrature needs a positive radius and radial order"));
        }
        let sphere = SphereGrid::gauss(n_theta, n_phi)?;
        let (r, wr) = gauss_legendre_interval(n_r, 0.0, radius);
        let mut points = Vec::with_capacity(n_r * sphere.len());
        let mut weights = Vec::with_capacity(n_r * sphere.len());
        for (ri, wri) in r.iter().zip(&wr) {
            for (d, ws) in sphere.directions.iter().zip(&sphere.weights) {
                points.push(center + *d * *ri);
                weights.push(wri * ri * ri * ws);
            }
        }
        Ok(Self { points, weights })
    }

    /// L² norm of a field given its squared magnitudes at the nodes.
    pub fn l2_norm(&self, squared: impl IntoIterator<Item = f64>) -> f64 {
        self.weights
            .iter()
            .zip(squared)
            .map(|(w, s)| w * s)
            .sum::<f64>()
            .sqrt()
    }
}

/// Symmetric triangle rule: barycentric coordinates and weights summing to 1.
pub type TriangleRule = &'static [([f64; 3], f64)];

const A6: f64 = 0.445_948_490_915_965;
const B6: f64 = 0.091_576_213_509_771;
const WA6: f64 = 0.223_381_589_678_011;
const WB6: f64 = 0.109_951_743_655_322;
const A7: f64 = 0.470_142_064_105_115;
const B7: f64 = 0.101_286_507_323_456;
const WA7: f64 = 0.132_394_152_788_506;
const WB7: f64 = 0.125_939_180_544_827;

static RULE1: [([f64; 3], f64); 1] = [([1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0], 1.0)];
static RULE3: [([f64; 3], f64); 3] = [
    ([2.0 / 3.0, 1.0 / 6.0, 1.0 / 6.0], 1.0 / 3.0),
    ([1.0 / 6.0, 2.0 / 3.0, 1.0 / 6.0], 1.0 / 3.0),
    ([1.0 / 6.0, 1.0 / 6.0, 2.0 / 3.0], 1.0 / 3.0),
];
static RULE4: [([f64; 3], f64); 4] = [
    ([1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0], -27.0 / 48.0),
    ([0.6, 0.2, 0.2], 25.0 / 48.0),
    ([0.2, 0.6, 0.2], 25.0 / 48.0),
    ([0.2, 0.2, 0.6], 25.0 / 48.0),
];
static RULE6: [([f64; 3], f64); 6] = [
    ([1.0 - 2.0 * A6, A6, A6], WA6),
    ([A6, 1.0 - 2.0 * A6, A6], WA6),
    ([A6, A6, 1.0 - 2.0 * A6], WA6),
    ([1.0 - 2.0 * B6, B6, B6], WB6),
    ([B6, 1.0 - 2.0 * B6, B6], WB6),
    ([B6, B6, 1.0 - 2.0 * B6], WB6),
];
static RULE7: [([f64; 3], f64); 7] = [
    ([1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0], 0.225),
    ([1.0 - 2.0 * A7, A7, A7], WA7),
    ([A7, 1.0 - 2.0 * A7, A7], WA7),
    ([A7, A7, 1.0 - 2.0 * A7], WA7),
    ([1.0 - 2.0 * B7, B7, B7], WB7),
    ([B7, 1.0 - 2.0 * B7, B7], WB7),
    ([B7, B7, 1.0 - 2.0 * B7], WB7),
];

/// Dunavant rules with 1, 3, 4, 6 or 7 points (polynomial degree 1, 2, 3, 4, 5).
pub fn triangle_rule(points: usize) -> Result<TriangleRule> {
    match points {
        1 => Ok(&RULE1),
        3 => Ok(&RULE3),
        4 => Ok(&RULE4),
        6 => Ok(&RULE6),
        7 => Ok(&RULE7),
        n => Err(Error::UnsupportedQuadrature(n)),
    }
}

/// Nodes of a rule mapped onto the triangle `tri`.
pub fn map_rule(rule: TriangleRule, tri: [Vec3; 3]) -> impl Iterator<Item = (Vec3, f64)> {
    rule.iter()
        .map(move |&([a, b, c], w)| (tri[0] * a + tri[1] * b + tri[2] * c, w))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gauss_legendre_integrates_polynomials() {
        for n in [1usize, 2, 5, 16, 64] {
            let (x, w) = gauss_legendre(n);
            assert!((w.iter().sum::<f64>() - 2.0).abs() < 1e-13);
            for deg in 0..(2 * n).min(40) {
                let exact = if deg % 2 == 1 { 0.0 } else { 2.0 / (deg as f64 + 1.0) };
                let q: f64 = x.iter().zip(&w).map(|(x, w)| w * x.powi(deg as i32)).sum();
                assert!((q - exact).abs() < 1e-13, "n={n} deg={deg}");
            }
            assert!(x.windows(2).all(|p| p[0] < p[1]));
        }
    }

    #[test]
    fn sphere_grid_area_and_moments() {
        let g = SphereGrid::gauss(12, 24).unwrap();
        let area: f64 = g.weights.iter().sum();
        assert!((area - 4.0 * PI).abs() < 1e-12);
        let zz: f64 = g.directions.iter().zip(&g.weights).map(|(d, w)| w * d.z * d.z).sum();
        assert!((zz - 4.0 * PI / 3.0).abs() < 1e-12);
        let x4: f64 = g.directions.iter().zip(&g.weights).map(|(d, w)| w * d.x.powi(4)).sum();
        assert!((x4 - 4.0 * PI / 5.0).abs() < 1e-12);
    }

    #[test]
    fn ball_volume() {
        let b = BallQuadrature::new(Vec3::new(1.0, 2.0, 3.0), 0.7, 8, 6, 12).unwrap();
        let vol: f64 = b.weights.iter().sum();
        assert!((vol - 4.0 / 3.0 * PI * 0.343).abs() < 1e-12);
    }

    #[test]
    fn triangle_rules_are_exact_to_their_degree() {
        // ∫_T x^i y^j over the reference triangle = i! j! / (i+j+2)!
        let fact = |n: u32| (1..=n).product::<u32>() as f64;
        for (pts, deg) in [(1, 1), (3, 2), (4, 3), (6, 4), (7, 5)] {
            let rule = triangle_rule(pts).unwrap();
            assert!((rule.iter().map(|r| r.1).sum::<f64>() - 1.0).abs() < 1e-14);
            for i in 0..=deg {
                for j in 0..=(deg - i) {
                    let q: f64 = rule
                        .iter()
                        .map(|&([_, b, c], w)| 0.5 * w * b.powi(i as i32) * c.powi(j as i32))
                        .sum();
                    let exact = fact(i) * fact(j) / fact(i + j + 2);
                    assert!((q - exact).abs() < 1e-12, "rule {pts} x^{i} y^{j}");
                }
            }
        }
        assert!(matches!(triangle_rule(5), Err(Error::UnsupportedQuadrature(5))));
    }
}
