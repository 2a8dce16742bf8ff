//! Series solution for plane-wave scattering by a perfectly conducting sphere.
//!
//! With `ξ_n = ψ_n − iχ_n = x h_n⁽¹⁾(x)` the multipole coefficients are
//! `a_n = ψ_n′(ka)/ξ_n′(ka)` and `b_n = ψ_n(ka)/ξ_n(ka)`. For an incident
//! field `ik e^{ikx·d} e` with `e = (d∧p)∧d = b x̂′` the far field in the
//! frame `(x̂′, d∧x̂′, d)` is `E∞ = −b (S₂ cos φ θ̂ − S₁ sin φ φ̂)`.

pub mod bessel;

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::farfield::FarFieldPattern;
use crate::incident::{polarization_constant, PlaneWaveSpec};
use crate::par;
use crate::quadrature::SphereGrid;
use crate::vec3::{CVec3, Vec3};

/// Largest supported size parameter `ka`.
pub const MAX_KA: f64 = 200.0;

#[derive(Debug, Clone, PartialEq)]
pub struct MieSolution {
    pub a: f64,
    pub k: f64,
    pub n_max: usize,
    /// `a_n` for `n = 1..=n_max` (index 0 unused).
    pub coef_a: Vec<Complex64>,
    /// `b_n` for `n = 1..=n_max` (index 0 unused).
    pub coef_b: Vec<Complex64>,
}

/// Default truncation: the larger of Wiscombe's `x + 4x^{1/3} + 2` and `x + 10`.
pub fn default_n_max(ka: f64) -> usize {
    let w = ka + 4.0 * ka.cbrt() + 2.0;
    w.max(ka + 10.0).ceil() as usize
}

impl MieSolution {
    pub fn new(a: f64, k: f64) -> Result<Self> {
        Self::with_n_max(a, k, default_n_max(a * k))
    }

    /// Coefficients truncated at `n_max`, which must be at least `ka + 10`.
    pub fn with_n_max(a: f64, k: f64, n_max: usize) -> Result<Self> {
        if !(a > 0.0 && a.is_finite() && k > 0.0 && k.is_finite()) {
            return Err(Error::validation(format!("sphere needs a > 0 and k > 0, got a = {a}, k = {k}")));
        }
        let x = a * k;
        if x > MAX_KA {
            return Err(Error::OutOfRange(format!("ka = {x} exceeds {MAX_KA}")));
        }
        if (n_max as f64) < x + 10.0 {
            return Err(Error::validation(format!("n_max = {n_max} is below ka + 10 = {}", x + 10.0)));
        }
        let psi = bessel::riccati_psi(x, n_max);
        let chi = bessel::riccati_chi(x, n_max);
        let dpsi = bessel::riccati_derivative(&psi, x);
        let dchi = bessel::riccati_derivative(&chi, x);
        let mut coef_a = vec![Complex64::new(0.0, 0.0); n_max + 1];
        let mut coef_b = coef_a.clone();
        for n in 1..=n_max {
            coef_a[n] = Complex64::new(dpsi[n], 0.0) / Complex64::new(dpsi[n], -dchi[n]);
            coef_b[n] = Complex64::new(psi[n], 0.0) / Complex64::new(psi[n], -chi[n]);
        }
        let sol = Self {
            a,
            k,
            n_max,
            coef_a,
            coef_b,
        };
        if !sol.coef_a.iter().chain(&sol.coef_b).all(|c| c.is_finite()) {
            return Err(Error::OutOfRange(format!("non-finite series coefficients at ka = {x}")));
        }
        Ok(sol)
    }

    /// `(σ_sca, σ_ext)` as absolute cross-sections.
    pub fn cross_sections(&self) -> (f64, f64) {
        let mut sca = 0.0;
        let mut ext = 0.0;
        for n in 1..=self.n_max {
            let w = (2 * n + 1) as f64;
            sca += w * (self.coef_a[n].norm_sqr() + self.coef_b[n].norm_sqr());
            ext += w * (self.coef_a[n] + self.coef_b[n]).re;
        }
        let f = 2.0 * PI / (self.k * self.k);
        (f * sca, f * ext)
    }

    /// Amplitude functions `(S₁, S₂)` at `cos θ = mu`.
    pub fn amplitudes(&self, mu: f64) -> (Complex64, Complex64) {
        let mut s1 = Complex64::new(0.0, 0.0);
        let mut s2 = Complex64::new(0.0, 0.0);
        let (mut pi_prev, mut pi_cur) = (0.0, 1.0);
        for n in 1..=self.n_max {
            let nf = n as f64;
            if n > 1 {
                let next = ((2.0 * nf - 1.0) * mu * pi_cur - nf * pi_prev) / (nf - 1.0);
                pi_prev = pi_cur;
                pi_cur = next;
            }
            let tau = nf * mu * pi_cur - (nf + 1.0) * pi_prev;
            let w = (2.0 * nf + 1.0) / (nf * (nf + 1.0));
            s1 += (self.coef_a[n] * pi_cur + self.coef_b[n] * tau) * w;
            s2 += (self.coef_a[n] * tau + self.coef_b[n] * pi_cur) * w;
        }
        (s1, s2)
    }

    /// `(E∞, H∞)` in direction `xhat` for incidence `w`; `H∞ = x̂∧E∞`.
    pub fn far_field_at(&self, w: &PlaneWaveSpec, xhat: Vec3) -> (CVec3, CVec3) {
        let b = polarization_constant(w);
        if b == 0.0 {
            return (CVec3::ZERO, CVec3::ZERO);
        }
        let ez = w.d;
        let ex = w.e_vector() / b;
        let ey = ez.cross(ex);
        let (u1, u2, u3) = (xhat.dot(ex), xhat.dot(ey), xhat.dot(ez));
        let mu = u3.clamp(-1.0, 1.0);
        let rho = (u1 * u1 + u2 * u2).sqrt();
        let (cp, sp) = if rho > 0.0 { (u1 / rho, u2 / rho) } else { (1.0, 0.0) };
        let (s1, s2) = self.amplitudes(mu);
        let theta_hat = ex * (mu * cp) + ey * (mu * sp) - ez * rho;
        let phi_hat = ey * cp - ex * sp;
        let e = theta_hat.to_complex() * (s2 * (-b * cp)) + phi_hat.to_complex() * (s1 * (b * sp));
        let h = e.cross_real_left(xhat);
        (e, h)
    }

    /// Monostatic radar cross-section `4π‖E∞(−d)‖²/‖E₀‖²`.
    pub fn backscatter_rcs(&self) -> f64 {
        let (_, s2) = self.amplitudes(-1.0);
        4.0 * PI * s2.norm_sqr() / (self.k * self.k)
    }
}

/// Far-field pattern of the sphere of radius `a` centred at the origin.
pub fn mie_far_field(a: f64, k: f64, w: &PlaneWaveSpec, grid: &SphereGrid) -> Result<FarFieldPattern> {
    if (w.k - k).abs() > 1e-12 * k {
        return Err(Error::validation(format!("wave has k = {} but the sphere uses k = {k}", w.k)));
    }
    let sol = MieSolution::new(a, k)?;
    let vals = par::map(&grid.directions, |d| sol.far_field_at(w, *d));
    let (e_inf, h_inf) = vals.into_iter().unzip();
    Ok(FarFieldPattern {
        grid: grid.clone(),
        e_inf,
        h_inf,
    })
}

/// `(σ_sca, σ_ext)` for the sphere of radius `a`.
pub fn mie_cross_sections(a: f64, k: f64) -> Result<(f64, f64)> {
    Ok(MieSolution::new(a, k)?.cross_sections())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::vec3::Mat3;

    fn wave(k: f64) -> PlaneWaveSpec {
        PlaneWaveSpec::new(k, Vec3::Z, Vec3::X).unwrap()
    }

    #[test]
    fn rayleigh_limit() {
        let ka = 0.05;
        let (sca, _) = mie_cross_sections(1.0, ka).unwrap();
        let q = sca / PI;
        let rayleigh = 10.0 / 3.0 * ka.powi(4);
        assert!((q / rayleigh - 1.0).abs() < 0.01, "{q} vs {rayleigh}");
    }

    #[test]
    fn geometric_optics_backscatter() {
        let s = MieSolution::new(1.0, 20.0).unwrap();
        let r = s.backscatter_rcs() / PI;
        assert!((0.9..=1.1).contains(&r), "{r}");
    }

    #[test]
    fn lossless_and_truncation() {
        for ka in [0.1, 0.5, 1.0, 3.0, 10.0] {
            let s = MieSolution::new(1.0, ka).unwrap();
            let (sca, ext) = s.cross_sections();
            assert!((sca - ext).abs() / sca < 1e-10, "ka={ka}");
            let t = MieSolution::with_n_max(1.0, ka, s.n_max + 10).unwrap();
            assert!((t.cross_sections().0 - sca).abs() / sca < 1e-10, "ka={ka}");
        }
    }

    #[test]
    fn rejects_bad_inputs() {
        assert!(matches!(MieSolution::new(1.0, 201.0), Err(Error::OutOfRange(_))));
        assert!(MieSolution::new(0.0, 1.0).is_err());
        assert!(MieSolution::with_n_max(1.0, 5.0, 14).is_err());
    }

    #[test]
    fn cross_section_matches_far_field_integral() {
        let k = 1.0;
        let grid = SphereGrid::gauss(24, 48).unwrap();
        let p = mie_far_field(1.0, k, &wave(k), &grid).unwrap();
        // ‖E₀‖ = k
        let sigma = p.scattered_power() / (k * k);
        let (sca, _) = mie_cross_sections(1.0, k).unwrap();
        assert!((sigma / sca - 1.0).abs() < 1e-3, "{sigma} vs {sca}");
        assert!(p.transversality_error() < 1e-12);
        assert!(p.relation_error() < 1e-12);
    }

    #[test]
    fn rotation_equivariance() {
        let (c, s) = (0.6f64, 0.8f64);
        let rz = Mat3([[c, -s, 0.0], [s, c, 0.0], [0.0, 0.0, 1.0]]);
        let rx = Mat3([[1.0, 0.0, 0.0], [0.0, 0.28, -0.96], [0.0, 0.96, 0.28]]);
        let r = rz.mul_mat(&rx);
        let w = PlaneWaveSpec::new(2.0, Vec3::new(0.0, 0.6, 0.8), Vec3::new(0.5, 0.3, -0.2)).unwrap();
        let wr = PlaneWaveSpec::new(2.0, r.mul_vec(w.d), r.mul_vec(w.p)).unwrap();
        let sol = MieSolution::new(0.7, 2.0).unwrap();
        let grid = SphereGrid::gauss(6, 11).unwrap();
        for d in &grid.directions {
            let (e, h) = sol.far_field_at(&w, *d);
            let (er, hr) = sol.far_field_at(&wr, r.mul_vec(*d));
            assert!((er - r.mul_cvec(&e)).norm() < 1e-10 * (1.0 + e.norm()));
            assert!((hr - r.mul_cvec(&h)).norm() < 1e-10 * (1.0 + h.norm()));
        }
    }

    #[test]
    fn linear_in_polarisation() {
        let sol = MieSolution::new(1.0, 1.5).unwrap();
        let w1 = PlaneWaveSpec::new(1.5, Vec3::Z, Vec3::X).unwrap();
        let w2 = PlaneWaveSpec::new(1.5, Vec3::Z, Vec3::Y).unwrap();
        let w3 = PlaneWaveSpec::new(1.5, Vec3::Z, Vec3::new(0.6, 0.8, 0.0)).unwrap();
        let x = Vec3::new(0.3, -0.4, 0.2).normalized();
        let e = sol.far_field_at(&w1, x).0 * Complex64::new(0.6, 0.0) + sol.far_field_at(&w2, x).0 * Complex64::new(0.8, 0.0);
        assert!((e - sol.far_field_at(&w3, x).0).norm() < 1e-12);
    }

    #[test]
    fn deterministic_table() {
        let run = || -> Vec<u64> {
            (1..=10)
                .map(|i| mie_cross_sections(1.0, i as f64 * 0.1).unwrap().0.to_bits())
                .collect()
        };
        assert_eq!(run(), run());
    }
}
