//! Ball norms of scalar Helmholtz solutions: the empirical three-spheres
//! exponent and the `L∞/L²` dilation ratio.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::mie::bessel::riccati_psi;
use crate::par;
use crate::quadrature::{BallQuadrature, SphereGrid};
use crate::vec3::Vec3;

/// Ball quadrature orders `(n_r, n_theta, n_phi)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BallOrder {
    pub n_r: usize,
    pub n_theta: usize,
    pub n_phi: usize,
}

impl Default for BallOrder {
    fn default() -> Self {
        Self {
            n_r: 64,
            n_theta: 32,
            n_phi: 32,
        }
    }
}

/// `‖u‖_{L²(B_ρ(c))}`.
pub fn ball_l2_norm<U>(u: &U, center: Vec3, rho: f64, order: BallOrder) -> Result<f64>
where
    U: Fn(Vec3) -> Complex64 + Sync,
{
    let q = BallQuadrature::new(center, rho, order.n_r, order.n_theta, order.n_phi)?;
    let sq = par::map(&q.points, |&p| u(p).norm_sqr());
    Ok(q.l2_norm(sq))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ThreeSpheres {
    /// `β̂ = (log‖u‖_{ρ2} − log‖u‖_ρ)/(log‖u‖_{ρ2} − log‖u‖_{ρ1})`.
    pub beta: f64,
    pub norm_rho1: f64,
    pub norm_rho: f64,
    pub norm_rho2: f64,
    /// Whether `‖u‖_{ρ1} ≤ ‖u‖_ρ ≤ ‖u‖_{ρ2}`, the case where `β̂ ∈ [0, 1]` is expected.
    pub ordered: bool,
}

/// Empirical three-spheres exponent of `u` on balls centred at `center`.
pub fn three_spheres_exponent<U>(u: &U, center: Vec3, radii: (f64, f64, f64), order: BallOrder) -> Result<ThreeSpheres>
where
    U: Fn(Vec3) -> Complex64 + Sync,
{
    let (r1, r, r2) = radii;
    if !(0.0 < r1 && r1 < r && r < r2) {
        return Err(Error::validation(format!("need 0 < ρ1 < ρ < ρ2, got {r1}, {r}, {r2}")));
    }
    let n1 = ball_l2_norm(u, center, r1, order)?;
    let n = ball_l2_norm(u, center, r, order)?;
    let n2 = ball_l2_norm(u, center, r2, order)?;
    if !(n1 > 0.0) {
        return Err(Error::Insufficient("u vanishes on the inner ball".into()));
    }
    Ok(ThreeSpheres {
        beta: (n2.ln() - n.ln()) / (n2.ln() - n1.ln()),
        norm_rho1: n1,
        norm_rho: n,
        norm_rho2: n2,
        ordered: n1 <= n && n <= n2,
    })
}

/// `ρ^{3/2} ‖u‖_{L∞(B_{sρ})} / ‖u‖_{L²(B_ρ)}`; the supremum is taken over the
/// quadrature nodes of `B_{sρ}` together with its boundary sphere and centre.
pub fn sup_ratio<U>(u: &U, center: Vec3, rho: f64, s: f64, order: BallOrder) -> Result<f64>
where
    U: Fn(Vec3) -> Complex64 + Sync,
{
    if !(s > 0.0 && s < 1.0) {
        return Err(Error::validation(format!("s must lie in (0, 1), got {s}")));
    }
    let inner = BallQuadrature::new(center, s * rho, order.n_r, order.n_theta, order.n_phi)?;
    let shell = SphereGrid::gauss(order.n_theta, order.n_phi)?;
    let mut pts = inner.points;
    pts.push(center);
    pts.extend(shell.directions.iter().map(|d| center + *d * (s * rho)));
    let sup = par::map(&pts, |&p| u(p).norm()).into_iter().fold(0.0, f64::max);
    let l2 = ball_l2_norm(u, center, rho, order)?;
    if !(l2 > 0.0) {
        return Err(Error::Insufficient("u vanishes on the ball".into()));
    }
    Ok(rho.powf(1.5) * sup / l2)
}

/// Regular spherical multipole `j_n(k r) P_n^m(cos θ) e^{imφ}` about the origin.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Multipole {
    pub k: f64,
    pub n: usize,
    pub m: usize,
}

impl Multipole {
    pub fn new(k: f64, n: usize, m: usize) -> Result<Self> {
        if !(k > 0.0) || m > n {
            return Err(Error::validation(format!("multipole needs k > 0 and m ≤ n, got k={k}, n={n}, m={m}")));
        }
        Ok(Self { k, n, m })
    }

    pub fn eval(&self, x: Vec3) -> Complex64 {
        let r = x.norm();
        if r == 0.0 {
            return Complex64::new(if self.n == 0 { 1.0 } else { 0.0 }, 0.0);
        }
        let kr = self.k * r;
        let jn = riccati_psi(kr, self.n)[self.n] / kr;
        let mu = (x.z / r).clamp(-1.0, 1.0);
        let phi = x.y.atan2(x.x);
        let p = assoc_legendre(self.n, self.m, mu);
        Complex64::from_polar(jn * p, self.m as f64 * phi)
    }
}

/// `P_n^m(μ)` without the Condon–Shortley phase, by the standard upward recurrence.
pub fn assoc_legendre(n: usize, m: usize, mu: f64) -> f64 {
    let s = (1.0 - mu * mu).max(0.0).sqrt();
    let mut pmm = 1.0;
    for i in 0..m {
        pmm *= (2 * i + 1) as f64 * s;
    }
    if n == m {
        return pmm;
    }
    let mut p_prev = pmm;
    let mut p = mu * (2 * m + 1) as f64 * pmm;
    for l in (m + 2)..=n {
        let next = ((2 * l - 1) as f64 * mu * p - (l + m - 1) as f64 * p_prev) / (l - m) as f64;
        p_prev = p;
        p = next;
    }
    p
}

/// `√(3/(4π))`, the sup ratio of any constant-modulus function.
pub fn constant_modulus_sup_ratio() -> f64 {
    (3.0 / (4.0 * PI)).sqrt()
}
