//! Triangle integrals of the Helmholtz kernel `G = e^{ikR}/(4πR)`.
//!
//! Near the source triangle the `1/R` part is integrated in closed form and
//! only the bounded remainder `(e^{ikR} − 1)/(4πR)` goes through the Gauss
//! rule.

use std::f64::consts::PI;

use num_complex::Complex64;

use super::singular::static_integrals;
use crate::geometry::TriangleMesh;
use crate::quadrature::TriangleRule;
use crate::vec3::{CVec3, Vec3};

/// Observation points closer than this many source diameters use singularity extraction.
pub const NEAR_FACTOR: f64 = 3.0;

const I: Complex64 = Complex64 { re: 0.0, im: 1.0 };

/// Geometry and quadrature nodes of one triangle.
#[derive(Debug, Clone)]
pub struct TriData {
    pub corners: [Vec3; 3],
    pub area: f64,
    pub centroid: Vec3,
    pub diameter: f64,
    /// Quadrature nodes and weights (weights include the area).
    pub nodes: Vec<(Vec3, f64)>,
}

impl TriData {
    pub fn new(corners: [Vec3; 3], rule: TriangleRule) -> Self {
        let area = 0.5 * (corners[1] - corners[0]).cross(corners[2] - corners[0]).norm();
        let diameter = corners[0]
            .dist(corners[1])
            .max(corners[1].dist(corners[2]))
            .max(corners[2].dist(corners[0]));
        Self {
            corners,
            area,
            centroid: (corners[0] + corners[1] + corners[2]) / 3.0,
            diameter,
            nodes: crate::quadrature::map_rule(rule, corners)
                .map(|(p, w)| (p, w * area))
                .collect(),
        }
    }

    pub fn all(mesh: &TriangleMesh, rule: TriangleRule) -> Vec<TriData> {
        (0..mesh.num_triangles())
            .map(|t| TriData::new(mesh.corners(t), rule))
            .collect()
    }

    pub fn is_near(&self, x: Vec3) -> bool {
        self.centroid.dist(x) < NEAR_FACTOR * self.diameter
    }
}

/// `∫G`, `∫G(r' − x)` and `∫∇ₓG` over one source triangle.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Potentials {
    pub scalar: Complex64,
    pub vector: CVec3,
    pub gradient: CVec3,
}

/// `(e^{ikR} − 1)/R`, with a series for small `kR`.
fn smooth_kernel(k: f64, r: f64) -> Complex64 {
    let z = I * (k * r);
    if k * r < 1e-3 {
        let ik = I * k;
        ik * (1.0 + z / 2.0 + z * z / 6.0 + z * z * z / 24.0)
    } else {
        (z.exp() - 1.0) / r
    }
}

/// `d/dR[(e^{ikR} − 1)/R]`, with a series for small `kR`.
fn smooth_kernel_derivative(k: f64, r: f64) -> Complex64 {
    let z = I * (k * r);
    if k * r < 1e-3 {
        let ik2 = (I * k) * (I * k);
        ik2 * (0.5 + z / 3.0 + z * z / 8.0 + z * z * z / 30.0)
    } else {
        (z * z.exp() - (z.exp() - 1.0)) / (r * r)
    }
}

/// Integrals of the full kernel over `src` at observation point `x`.
pub fn potentials(k: f64, src: &TriData, x: Vec3, with_gradient: bool) -> Potentials {
    let inv4pi = 1.0 / (4.0 * PI);
    let mut scalar = Complex64::new(0.0, 0.0);
    let mut vector = CVec3::ZERO;
    let mut gradient = CVec3::ZERO;
    if src.is_near(x) {
        let st = static_integrals(src.corners, x);
        scalar += st.scalar * inv4pi;
        vector += st.vector.to_complex() * inv4pi;
        if with_gradient {
            gradient += st.gradient.to_complex() * inv4pi;
        }
        for &(r, w) in &src.nodes {
            let d = r - x;
            let rr = d.norm();
            let g = smooth_kernel(k, rr) * (w * inv4pi);
            scalar += g;
            vector += d * g;
            if with_gradient && rr > 0.0 {
                // ∇ₓ acts through R: ∇ₓR = (x − r')/R
                let dg = smooth_kernel_derivative(k, rr) * (w * inv4pi / rr);
                gradient = gradient - d * dg;
            }
        }
    } else {
        for &(r, w) in &src.nodes {
            let d = r - x;
            let rr = d.norm();
            let e = (I * (k * rr)).exp() * (w * inv4pi / rr);
            scalar += e;
            vector += d * e;
            if with_gradient {
                // ∇ₓG = (x − r')(ikR − 1)e^{ikR}/(4πR³)
                let f = e * ((I * (k * rr)) - 1.0) / (rr * rr);
                gradient = gradient - d * f;
            }
        }
    }
    Potentials {
        scalar,
        vector,
        gradient,
    }
}
