//! Normalised electromagnetic plane waves and related constants.
//!
//! Time dependence `e^{-iωt}` with ε = μ = 1, so every sample satisfies
//! `∇∧E = ikH` and `∇∧H = −ikE`.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::geometry::generators;
use crate::vec3::{CVec3, Vec3};

const UNIT_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PlaneWaveSpec {
    pub k: f64,
    pub d: Vec3,
    pub p: Vec3,
}

impl PlaneWaveSpec {
    /// Checks `k > 0`, `‖d‖ = 1` and `0 < ‖p‖ ≤ 1`. A wave with `p ∥ d` is
    /// accepted here (its fields vanish) and rejected by [`Self::require_usable`].
    pub fn new(k: f64, d: Vec3, p: Vec3) -> Result<Self> {
        if !(k > 0.0 && k.is_finite()) {
            return Err(Error::validation(format!("wavenumber must be positive, got {k}")));
        }
        if !((d.norm() - 1.0).abs() <= UNIT_TOL) {
            return Err(Error::validation(format!("direction must be a unit vector, |d| = {}", d.norm())));
        }
        let pn = p.norm();
        if !(pn > 0.0 && pn <= 1.0 + UNIT_TOL) {
            return Err(Error::validation(format!("polarisation norm must lie in (0, 1], got {pn}")));
        }
        Ok(Self { k, d, p })
    }

    /// As [`Self::new`] but normalises `d` first.
    pub fn with_direction(k: f64, d: Vec3, p: Vec3) -> Result<Self> {
        if !(d.norm() > 0.0) {
            return Err(Error::validation("direction must be nonzero"));
        }
        Self::new(k, d.normalized(), p)
    }

    /// Rejects waves with `b = ‖(d∧p)∧d‖ = 0`.
    pub fn require_usable(&self) -> Result<()> {
        let b = polarization_constant(self);
        if b > 1e-12 {
            Ok(())
        } else {
            Err(Error::validation(format!("polarisation is parallel to the direction (b = {b:e})")))
        }
    }

    /// The same wave with polarisation scaled by `s` (bypasses the `‖p‖ ≤ 1` check).
    pub fn scaled(&self, s: f64) -> Self {
        Self {
            p: self.p * s,
            ..*self
        }
    }

    /// Amplitude vector `(d∧p)∧d`; the electric field is `ik e^{ikx·d}` times it.
    pub fn e_vector(&self) -> Vec3 {
        self.d.cross(self.p).cross(self.d)
    }

    pub fn h_vector(&self) -> Vec3 {
        self.d.cross(self.p)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EMSample {
    pub x: Vec3,
    pub e: CVec3,
    pub h: CVec3,
}

impl EMSample {
    pub fn zero(x: Vec3) -> Self {
        Self {
            x,
            e: CVec3::ZERO,
            h: CVec3::ZERO,
        }
    }

    /// Field-wise sum; the point of `self` is kept.
    pub fn add(&self, o: &EMSample) -> EMSample {
        EMSample {
            x: self.x,
            e: self.e + o.e,
            h: self.h + o.h,
        }
    }
}

/// `E = ik e^{ikx·d}((d∧p)∧d)`, `H = ik e^{ikx·d}(d∧p)`.
pub fn eval_plane_wave(w: &PlaneWaveSpec, x: Vec3) -> EMSample {
    let phase = Complex64::new(0.0, w.k * x.dot(w.d)).exp() * Complex64::new(0.0, w.k);
    EMSample {
        x,
        e: w.e_vector() * phase,
        h: w.h_vector() * phase,
    }
}

/// `(E, H) ↦ (H, −E)`: maps a PEC problem to the PMC one.
pub fn duality_swap(s: &EMSample) -> EMSample {
    EMSample {
        x: s.x,
        e: s.h,
        h: -s.e,
    }
}

/// `b = ‖(d∧p)∧d‖`.
pub fn polarization_constant(w: &PlaneWaveSpec) -> f64 {
    w.e_vector().norm()
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct B0Estimate {
    pub value: f64,
    pub minimizer: Vec3,
    /// Bound on the overestimate caused by the final grid spacing.
    pub resolution_error: f64,
    pub grid_points: usize,
}

/// `b₀ = min_{ν∈S²} max_j ‖ν∧[(d_j∧p_j)∧d_j]‖` by an icosphere search with
/// at least `grid` nodes followed by two local refinement passes.
pub fn independence_constant_b0(w1: &PlaneWaveSpec, w2: &PlaneWaveSpec, grid: usize) -> Result<B0Estimate> {
    if grid < 1000 {
        return Err(Error::validation(format!("b0 grid needs at least 1000 points, got {grid}")));
    }
    let v = [w1.e_vector(), w2.e_vector()];
    let lip = v[0].norm().max(v[1].norm());
    if lip == 0.0 {
        return Err(Error::validation("both polarisation vectors vanish"));
    }
    let f = |n: Vec3| v[0].cross(n).norm().max(v[1].cross(n).norm());

    let mut level = 0;
    while 10 * 4usize.pow(level) + 2 < grid {
        level += 1;
    }
    let sphere = generators::icosphere(1.0, level as usize)?;
    let nodes: Vec<Vec3> = sphere.vertices().iter().map(|p| p.normalized()).collect();
    // icosahedron edge subtends ~1.107 rad, halved at each level
    let mut h = 1.107 / 2f64.powi(level as i32);

    let mut scored: Vec<(f64, Vec3)> = nodes.iter().map(|&n| (f(n), n)).collect();
    scored.sort_by(|a, b| a.0.total_cmp(&b.0));
    let mut best = scored[0];
    let mut candidates: Vec<Vec3> = scored.iter().take(8).map(|s| s.1).collect();
    let mut evaluated = nodes.len();
    const STEPS: i32 = 6;
    for _pass in 0..2 {
        let mut next = Vec::with_capacity(candidates.len());
        for &c in &candidates {
            let (t1, t2) = tangent_frame(c);
            let mut local = (f(c), c);
            for i in -STEPS..=STEPS {
                for j in -STEPS..=STEPS {
                    let n = (c + t1 * (h * i as f64 / STEPS as f64) + t2 * (h * j as f64 / STEPS as f64)).normalized();
                    let val = f(n);
                    evaluated += 1;
                    if val < local.0 {
                        local = (val, n);
                    }
                }
            }
            if local.0 < best.0 {
                best = local;
            }
            next.push(local.1);
        }
        candidates = next;
        h /= STEPS as f64;
    }
    Ok(B0Estimate {
        value: best.0,
        minimizer: best.1,
        resolution_error: lip * h,
        grid_points: evaluated,
    })
}

fn tangent_frame(n: Vec3) -> (Vec3, Vec3) {
    let a = if n.x.abs() < 0.9 { Vec3::X } else { Vec3::Y };
    let t1 = n.cross(a).normalized();
    (t1, n.cross(t1))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use std::f64::consts::{FRAC_1_SQRT_2, PI};

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn plane_wave_examples() {
        let w = PlaneWaveSpec::new(1.0, Vec3::Z, Vec3::X).unwrap();
        let s = eval_plane_wave(&w, Vec3::ZERO);
        assert_eq!(s.e, CVec3::new(c(0.0, 1.0), c(0.0, 0.0), c(0.0, 0.0)));
        assert_eq!(s.h, CVec3::new(c(0.0, 0.0), c(0.0, 1.0), c(0.0, 0.0)));

        let w = PlaneWaveSpec::new(2.0, Vec3::Z, Vec3::X).unwrap();
        let s = eval_plane_wave(&w, Vec3::new(0.0, 0.0, PI / 2.0));
        assert!((s.e - CVec3::new(c(0.0, -2.0), c(0.0, 0.0), c(0.0, 0.0))).norm() < 1e-15);

        let w = PlaneWaveSpec::new(1.0, Vec3::Z, Vec3::new(0.0, 0.0, 0.5)).unwrap();
        let s = eval_plane_wave(&w, Vec3::new(0.3, 1.0, -2.0));
        assert_eq!(s.e.norm(), 0.0);
        assert_eq!(s.h.norm(), 0.0);
        assert!(w.require_usable().is_err());
    }

    #[test]
    fn spec_validation() {
        assert!(PlaneWaveSpec::new(0.0, Vec3::Z, Vec3::X).is_err());
        assert!(PlaneWaveSpec::new(1.0, Vec3::new(0.0, 0.0, 2.0), Vec3::X).is_err());
        assert!(PlaneWaveSpec::new(1.0, Vec3::Z, Vec3::X * 1.5).is_err());
        assert!(PlaneWaveSpec::new(1.0, Vec3::Z, Vec3::ZERO).is_err());
        let w = PlaneWaveSpec::with_direction(1.0, Vec3::new(1.0, 1.0, 0.0), Vec3::Z).unwrap();
        assert!((w.d.norm() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn duality() {
        let s = EMSample {
            x: Vec3::ZERO,
            e: Vec3::X.to_complex(),
            h: Vec3::Y.to_complex(),
        };
        let t = duality_swap(&s);
        assert_eq!(t.e, Vec3::Y.to_complex());
        assert_eq!(t.h, -Vec3::X.to_complex());
        let tt = duality_swap(&t);
        assert_eq!(tt.e, -s.e);
        assert_eq!(tt.h, -s.h);
    }

    #[test]
    fn polarization_examples() {
        let b = |p: Vec3| polarization_constant(&PlaneWaveSpec::new(1.0, Vec3::Z, p).unwrap());
        assert_eq!(b(Vec3::X), 1.0);
        assert_eq!(b(Vec3::Z), 0.0);
        assert!((b(Vec3::new(1.0, 0.0, 1.0) * FRAC_1_SQRT_2) - FRAC_1_SQRT_2).abs() < 1e-15);
    }

    /// Brute force over a fine (θ, φ) lattice; the objective is even in ν so a hemisphere suffices.
    fn b0_brute(v1: Vec3, v2: Vec3) -> f64 {
        let n = 600;
        let mut best = f64::INFINITY;
        for i in 0..=n {
            let theta = 0.5 * PI * i as f64 / n as f64;
            for j in 0..(2 * n) {
                let nu = Vec3::from_spherical(theta, PI * j as f64 / n as f64);
                best = best.min(v1.cross(nu).norm().max(v2.cross(nu).norm()));
            }
        }
        best
    }

    #[test]
    fn b0_examples() {
        let w1 = PlaneWaveSpec::new(1.0, Vec3::Z, Vec3::X).unwrap();
        let w2 = PlaneWaveSpec::new(1.0, Vec3::Z, Vec3::Y).unwrap();
        let est = independence_constant_b0(&w1, &w2, 1000).unwrap();
        let oracle = b0_brute(Vec3::X, Vec3::Y);
        assert!((oracle - FRAC_1_SQRT_2).abs() < 1e-5);
        assert!((est.value - FRAC_1_SQRT_2).abs() <= est.resolution_error.max(1e-6), "{est:?}");
        assert!(est.minimizer.z.abs() < 1e-2);

        let same = independence_constant_b0(&w1, &w1, 1000).unwrap();
        assert!(same.value <= same.resolution_error.max(1e-9));

        let h1 = w1.scaled(0.5);
        let h2 = w2.scaled(0.5);
        let half = independence_constant_b0(&h1, &h2, 1000).unwrap();
        assert!((half.value - 2f64.sqrt() / 4.0).abs() <= half.resolution_error.max(1e-6));
        assert!(independence_constant_b0(&w1, &w2, 10).is_err());
    }

    fn unit() -> impl Strategy<Value = Vec3> {
        (0.0..PI, 0.0..2.0 * PI).prop_map(|(t, p)| Vec3::from_spherical(t, p))
    }

    fn central_curl(f: &dyn Fn(Vec3) -> CVec3, x: Vec3, h: f64) -> CVec3 {
        let d = |axis: Vec3| {
            let a = f(x + axis * h);
            let b = f(x - axis * h);
            (a - b) * (0.5 / h)
        };
        let (dx, dy, dz) = (d(Vec3::X), d(Vec3::Y), d(Vec3::Z));
        CVec3::new(dy.0[2] - dz.0[1], dz.0[0] - dx.0[2], dx.0[1] - dy.0[0])
    }

    proptest! {
        #[test]
        fn plane_wave_is_transverse_with_constant_modulus(
            d in unit(), p in unit(), k in 0.2f64..5.0,
            x in (-3.0f64..3.0, -3.0f64..3.0, -3.0f64..3.0),
        ) {
            let w = PlaneWaveSpec::new(k, d, p * 0.9).unwrap();
            let s = eval_plane_wave(&w, Vec3::new(x.0, x.1, x.2));
            let b = polarization_constant(&w);
            prop_assert!(s.e.dot_real(d).norm() <= 1e-12 * k);
            prop_assert!(s.h.dot_real(d).norm() <= 1e-12 * k);
            prop_assert!((s.e.norm() - k * b).abs() <= 1e-12 * k);
        }

        #[test]
        fn plane_wave_solves_maxwell_to_second_order(
            d in unit(), p in unit(), x in (-2.0f64..2.0, -2.0f64..2.0, -2.0f64..2.0),
        ) {
            let k = 1.5;
            let w = PlaneWaveSpec::new(k, d, p).unwrap();
            let x = Vec3::new(x.0, x.1, x.2);
            let res = |h: f64| {
                let ce = central_curl(&|y| eval_plane_wave(&w, y).e, x, h);
                let ch = central_curl(&|y| eval_plane_wave(&w, y).h, x, h);
                let s = eval_plane_wave(&w, x);
                (ce - s.h * Complex64::new(0.0, k)).norm() + (ch + s.e * Complex64::new(0.0, k)).norm()
            };
            // second-order truncation: error ≈ C h², C ≤ k⁴ b/3 per component
            let (r1, r2) = (res(1e-2), res(5e-3));
            prop_assert!(r1 <= 2.0 * k.powi(4) * 1e-4);
            prop_assert!(r2 <= r1 / 3.0 || r1 < 1e-9);
        }

        #[test]
        fn b0_is_symmetric(d1 in unit(), p1 in unit(), d2 in unit(), p2 in unit()) {
            let w1 = PlaneWaveSpec::new(1.0, d1, p1).unwrap();
            let w2 = PlaneWaveSpec::new(1.0, d2, p2).unwrap();
            prop_assume!(polarization_constant(&w1) + polarization_constant(&w2) > 1e-3);
            let a = independence_constant_b0(&w1, &w2, 1000).unwrap();
            let b = independence_constant_b0(&w2, &w1, 1000).unwrap();
            prop_assert!((a.value - b.value).abs() <= a.resolution_error + b.resolution_error);
        }
    }
}
