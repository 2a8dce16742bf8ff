//! Radiation-condition and Helmholtz residuals of sampled Maxwell fields.

use std::f64::consts::PI;

use num_complex::Complex64;

use super::{fd, EmField};
use crate::error::{Error, Result};
use crate::quadrature::SphereGrid;
use crate::vec3::{CVec3, Vec3};

/// Silver–Müller residuals on the sphere of radius `r` about the origin.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RadiationResidual {
    pub r: f64,
    /// `max r‖x̂∧H + E‖`.
    pub full: f64,
    /// The same with only the part of `x̂∧H + E` tangential to the sphere.
    pub tangential: f64,
    /// `max r‖x̂∧E − H‖` (the dual condition).
    pub dual_full: f64,
    pub dual_tangential: f64,
}

/// Samples the Silver–Müller residuals of `field` at radius `r`.
pub fn silver_muller_residual<F: EmField + ?Sized>(field: &F, r: f64, grid: &SphereGrid) -> Result<RadiationResidual> {
    if !(r > 0.0 && r.is_finite()) {
        return Err(Error::validation(format!("radius must be positive, got {r}")));
    }
    let mut out = RadiationResidual {
        r,
        full: 0.0,
        tangential: 0.0,
        dual_full: 0.0,
        dual_tangential: 0.0,
    };
    for &xh in &grid.directions {
        let s = field.fields(xh * r)?;
        let a = s.h.cross_real_left(xh) + s.e;
        let b = s.e.cross_real_left(xh) - s.h;
        let tang = |v: CVec3| v - xh.to_complex() * v.dot_real(xh);
        out.full = out.full.max(r * a.norm());
        out.tangential = out.tangential.max(r * tang(a).norm());
        out.dual_full = out.dual_full.max(r * b.norm());
        out.dual_tangential = out.dual_tangential.max(r * tang(b).norm());
    }
    Ok(out)
}

/// Residuals at `r` and `2r` and their ratios; an outgoing field has
/// `full(r)/full(2r) → 2` and `tangential(r)/tangential(2r) → 4`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RadiationDecay {
    pub inner: RadiationResidual,
    pub outer: RadiationResidual,
    pub full_ratio: f64,
    pub tangential_ratio: f64,
    /// Whether the full residual decreases from `r` to `2r`.
    pub decaying: bool,
}

pub fn radiation_decay<F: EmField + ?Sized>(field: &F, r: f64, grid: &SphereGrid) -> Result<RadiationDecay> {
    let inner = silver_muller_residual(field, r, grid)?;
    let outer = silver_muller_residual(field, 2.0 * r, grid)?;
    Ok(RadiationDecay {
        inner,
        outer,
        full_ratio: inner.full / outer.full,
        tangential_ratio: inner.tangential / outer.tangential,
        decaying: outer.full < inner.full,
    })
}

/// Finite-difference residuals of the Helmholtz link at sample points.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HelmholtzResiduals {
    /// `max ‖ΔE + k²E‖ / (k² max‖E‖)`.
    pub vector_helmholtz: f64,
    /// `max |∇·E| / (k max‖E‖)`.
    pub divergence: f64,
    /// `max_j r|∂_r E_j − ik E_j|` with `r` measured from the origin.
    pub sommerfeld: f64,
    /// `max ‖E‖` over the points.
    pub field_scale: f64,
}

pub fn helmholtz_link_residual<F: EmField + ?Sized>(
    field: &F,
    k: f64,
    points: &[Vec3],
    h_fd: f64,
) -> Result<HelmholtzResiduals> {
    if !(h_fd > 0.0 && k > 0.0) || points.is_empty() {
        return Err(Error::validation("need k > 0, h_fd > 0 and at least one point"));
    }
    // errors are surfaced after the sweep; the closure itself must be infallible
    let failure = std::sync::Mutex::new(None);
    let e = |x: Vec3| match field.fields(x) {
        Ok(s) => s.e,
        Err(err) => {
            failure.lock().unwrap().get_or_insert(err);
            CVec3::ZERO
        }
    };
    let ik = Complex64::new(0.0, k);
    let mut out = HelmholtzResiduals {
        vector_helmholtz: 0.0,
        divergence: 0.0,
        sommerfeld: 0.0,
        field_scale: 0.0,
    };
    let mut helm: f64 = 0.0;
    let mut div: f64 = 0.0;
    for &x in points {
        let ex = e(x);
        out.field_scale = out.field_scale.max(ex.norm());
        helm = helm.max((fd::laplacian(&e, x, h_fd) + ex * (k * k)).norm());
        div = div.max(fd::divergence(&e, x, h_fd).norm());
        let r = x.norm();
        if r > 0.0 {
            let xh = x / r;
            let dr = (e(x + xh * h_fd) - e(x - xh * h_fd)) * (0.5 / h_fd);
            let s = dr - ex * ik;
            for c in s.0 {
                out.sommerfeld = out.sommerfeld.max(r * c.norm());
            }
        }
    }
    if let Some(err) = failure.into_inner().unwrap() {
        return Err(err);
    }
    if out.field_scale > 0.0 {
        out.vector_helmholtz = helm / (k * k * out.field_scale);
        out.divergence = div / (k * out.field_scale);
    }
    Ok(out)
}

/// Points on a Fibonacci sphere of radius `r`, used as deterministic sample sets.
pub fn fibonacci_sphere(n: usize, r: f64) -> Vec<Vec3> {
    let golden = PI * (3.0 - 5f64.sqrt());
    (0..n)
        .map(|i| {
            let z = 1.0 - 2.0 * (i as f64 + 0.5) / n as f64;
            let rho = (1.0 - z * z).sqrt();
            let phi = golden * i as f64;
            Vec3::new(rho * phi.cos(), rho * phi.sin(), z) * r
        })
        .collect()
}
