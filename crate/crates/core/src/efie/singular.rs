//! Closed-form integrals of the static kernel `1/R` over a flat triangle.

use crate::vec3::Vec3;

/// `∫_T 1/R`, `∫_T (r' − x)/R` and `∇_x ∫_T 1/R` for `R = ‖x − r'‖`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StaticIntegrals {
    pub scalar: f64,
    pub vector: Vec3,
    pub gradient: Vec3,
}

/// Evaluates the static potential integrals over triangle `tri` at `x`.
///
/// For `x` in the plane of the triangle the normal part of the gradient is
/// the principal value (zero jump term). Points on an edge line inside the
/// edge segment give a divergent gradient; callers keep away from edges.
pub fn static_integrals(tri: [Vec3; 3], x: Vec3) -> StaticIntegrals {
    let raw = (tri[1] - tri[0]).cross(tri[2] - tri[0]);
    let n = raw.normalized();
    let h = n.dot(x - tri[0]);
    let rho = x - n * h;
    let ah = h.abs();
    let scale = (tri[1] - tri[0]).norm().max((tri[2] - tri[0]).norm());
    let tiny = 1e-12 * scale;
    let sgn = if ah <= tiny { 0.0 } else { h.signum() };

    let mut scalar = 0.0;
    let mut in_plane = Vec3::ZERO;
    let mut grad_t = Vec3::ZERO;
    let mut beta_sum = 0.0;
    for i in 0..3 {
        let a = tri[i];
        let b = tri[(i + 1) % 3];
        let len = (b - a).norm();
        let s = (b - a) / len;
        let u = s.cross(n);
        let lm = (a - rho).dot(s);
        let lp = (b - rho).dot(s);
        let t0 = (a - rho).dot(u);
        let r0_sq = t0 * t0 + h * h;
        let rp = (lp * lp + r0_sq).sqrt();
        let rm = (lm * lm + r0_sq).sqrt();
        // ln((R⁺ + l⁺)/(R⁻ + l⁻)), written to avoid cancellation behind the edge
        let log = if r0_sq.sqrt() <= tiny && lm * lp <= 0.0 {
            0.0
        } else if lm >= 0.0 {
            ((rp + lp) / (rm + lm)).ln()
        } else {
            ((rm - lm) / (rp - lp)).ln()
        };
        let beta = if t0.abs() <= tiny {
            0.0
        } else {
            (t0 * lp / (r0_sq + ah * rp)).atan() - (t0 * lm / (r0_sq + ah * rm)).atan()
        };
        scalar += t0 * log - ah * beta;
        in_plane += u * (0.5 * (r0_sq * log + lp * rp - lm * rm));
        grad_t -= u * log;
        beta_sum += beta;
    }
    StaticIntegrals {
        scalar,
        vector: in_plane - n * (h * scalar),
        gradient: grad_t - n * (sgn * beta_sum),
    }
}
