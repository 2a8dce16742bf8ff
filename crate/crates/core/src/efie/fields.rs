//! Fields radiated by a surface current.
//!
//! On each triangle the current is affine, `J(r') = a r' − b`, with surface
//! divergence `2a`. Then
//! `Eˢ(x) = Σ_T ik(a ∫G(r'−x) + (a x − b)∫G) + (i/k) 2a ∫∇ₓG` and
//! `Hˢ(x) = Σ_T ∫∇ₓG × (a x − b)`.

use num_complex::Complex64;

use super::kernel::potentials;
use super::solve::SurfaceCurrent;
use crate::error::{Error, Result};
use crate::farfield::FarFieldPattern;
use crate::geometry::query::point_triangle_distance;
use crate::incident::{eval_plane_wave, EMSample};
use crate::par;
use crate::quadrature::SphereGrid;
use crate::vec3::{CVec3, Vec3};

const I: Complex64 = Complex64 { re: 0.0, im: 1.0 };

/// Evaluation points must stay this many triangle diameters away from the surface.
pub const MIN_SURFACE_DISTANCE: f64 = 0.05;

/// Per-triangle coefficients `(a, b)` of the affine current.
fn affine_parts(c: &SurfaceCurrent) -> Vec<(Complex64, CVec3)> {
    (0..c.basis.mesh().num_triangles())
        .map(|t| {
            let mut a = Complex64::new(0.0, 0.0);
            let mut b = CVec3::ZERO;
            for lb in c.basis.on_triangle(t) {
                let s = c.coefficients[lb.dof] * (lb.sign * lb.scale);
                a += s;
                b += lb.free * s;
            }
            (a, b)
        })
        .collect()
}

fn radiate(c: &SurfaceCurrent, parts: &[(Complex64, CVec3)], x: Vec3) -> EMSample {
    let k = c.k;
    let mut e = CVec3::ZERO;
    let mut h = CVec3::ZERO;
    for (td, &(a, b)) in c.tris.iter().zip(parts) {
        if a == Complex64::new(0.0, 0.0) && b == CVec3::ZERO {
            continue;
        }
        let p = potentials(k, td, x, true);
        let jx = x * a - b;
        e = e + (p.vector * a + jx * p.scalar) * (I * k) + p.gradient * (I / k * 2.0 * a);
        h += p.gradient.cross(&jx);
    }
    EMSample { x, e, h }
}

/// Scattered field at `x`; fails when `x` is within
/// [`MIN_SURFACE_DISTANCE`] triangle diameters of the surface.
pub fn eval_scattered_near(c: &SurfaceCurrent, x: Vec3) -> Result<EMSample> {
    for td in c.tris.iter() {
        let dist = point_triangle_distance(x, td.corners);
        let min = MIN_SURFACE_DISTANCE * td.diameter;
        if dist < min {
            return Err(Error::TooCloseToSurface { distance: dist, min });
        }
    }
    Ok(radiate(c, &affine_parts(c), x))
}

/// Scattered field at many points (same checks as [`eval_scattered_near`]).
pub fn eval_scattered_many(c: &SurfaceCurrent, xs: &[Vec3]) -> Result<Vec<EMSample>> {
    let parts = affine_parts(c);
    par::map(xs, |&x| {
        for td in c.tris.iter() {
            let dist = point_triangle_distance(x, td.corners);
            let min = MIN_SURFACE_DISTANCE * td.diameter;
            if dist < min {
                return Err(Error::TooCloseToSurface { distance: dist, min });
            }
        }
        Ok(radiate(c, &parts, x))
    })
    .into_iter()
    .collect()
}

/// Total field `Eⁱ + Eˢ` at `x`.
pub fn eval_total_near(c: &SurfaceCurrent, x: Vec3) -> Result<EMSample> {
    Ok(eval_plane_wave(&c.wave, x).add(&eval_scattered_near(c, x)?))
}

/// `E∞ = (ik N − x̂ Q)/(4π)` and `H∞ = ik x̂∧N/(4π)` with
/// `N = ∫J e^{−ikx̂·r'}` and `Q = ∫∇'·J e^{−ikx̂·r'}`.
pub fn eval_far_field(c: &SurfaceCurrent, grid: &SphereGrid) -> FarFieldPattern {
    let parts = affine_parts(c);
    let k = c.k;
    let inv4pi = 1.0 / (4.0 * std::f64::consts::PI);
    let fields = par::map(&grid.directions, |&xh| {
        let mut n = CVec3::ZERO;
        let mut q = Complex64::new(0.0, 0.0);
        for (td, &(a, b)) in c.tris.iter().zip(&parts) {
            for &(r, w) in &td.nodes {
                let ph = (-I * (k * xh.dot(r))).exp() * w;
                n += (r * a - b) * ph;
                q += 2.0 * a * ph;
            }
        }
        let e = (n * (I * k) - xh.to_complex() * q) * inv4pi;
        let h = n.cross_real_left(xh) * (I * k * inv4pi);
        (e, h)
    });
    let (e_inf, h_inf) = fields.into_iter().unzip();
    FarFieldPattern {
        grid: grid.clone(),
        e_inf,
        h_inf,
    }
}

/// Barycentric sample coordinates away from quadrature nodes and edges.
fn sample_barycentric(i: usize) -> [f64; 3] {
    const PHI1: f64 = 0.754_877_666_246_692_7;
    const PHI2: f64 = 0.569_840_290_998_053_3;
    let u = (0.5 + PHI1 * (i + 1) as f64).fract();
    let v = (0.5 + PHI2 * (i + 1) as f64).fract();
    let (u, v) = if u + v > 1.0 { (1.0 - u, 1.0 - v) } else { (u, v) };
    // shrink towards the centroid so points stay clear of the edges
    let s = 0.8;
    let c = 1.0 / 3.0;
    [c + s * (1.0 - u - v - c), c + s * (u - c), c + s * (v - c)]
}

/// Area-weighted RMS of `‖ν∧(Eⁱ+Eˢ)‖` over `samples` points per triangle,
/// relative to the RMS of `‖ν∧Eⁱ‖`; 0 when the incident field vanishes.
pub fn pec_residual(c: &SurfaceCurrent, samples: usize) -> f64 {
    let mesh = c.basis.mesh();
    let parts = affine_parts(c);
    let bary: Vec<[f64; 3]> = (0..samples.max(1)).map(sample_barycentric).collect();
    let per_tri = par::map_range(mesh.num_triangles(), |t| {
        let [p0, p1, p2] = mesh.corners(t);
        let nrm = mesh.normal(t);
        let w = mesh.area(t) / bary.len() as f64;
        let mut num = 0.0;
        let mut den = 0.0;
        for l in &bary {
            let x = p0 * l[0] + p1 * l[1] + p2 * l[2];
            let ei = eval_plane_wave(&c.wave, x).e;
            let es = radiate(c, &parts, x).e;
            num += w * (ei + es).cross_real_left(nrm).norm_sq();
            den += w * ei.cross_real_left(nrm).norm_sq();
        }
        (num, den)
    });
    let (num, den) = per_tri.into_iter().fold((0.0, 0.0), |a, b| (a.0 + b.0, a.1 + b.1));
    if den == 0.0 {
        0.0
    } else {
        (num / den).sqrt()
    }
}
