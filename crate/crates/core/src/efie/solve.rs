//! Dense LU solve of the EFIE system with a condition estimate.

use std::sync::Arc;

use faer::linalg::solvers::PartialPivLu;
use faer::prelude::*;
use faer::Mat;
use num_complex::Complex64;

use super::assemble::EfieSystem;
use super::kernel::TriData;
use super::rwg::RwgBasis;
use crate::error::{Error, Result};
use crate::incident::PlaneWaveSpec;

/// Matrices with a 1-norm condition estimate above this are reported singular.
pub const SINGULAR_CONDITION: f64 = 1e12;

pub struct FactoredSystem {
    system: EfieSystem,
    lu: PartialPivLu<Complex64>,
    condition: f64,
}

impl std::fmt::Debug for FactoredSystem {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("FactoredSystem")
            .field("num_dofs", &self.system.num_dofs())
            .field("condition", &self.condition)
            .finish()
    }
}

#[derive(Debug, Clone)]
pub struct SurfaceCurrent {
    pub coefficients: Vec<Complex64>,
    pub wave: PlaneWaveSpec,
    /// `‖Zc − b‖ / ‖b‖` (0 when `b = 0`).
    pub residual: f64,
    pub(crate) basis: Arc<RwgBasis>,
    pub(crate) tris: Arc<Vec<TriData>>,
    pub(crate) k: f64,
}

impl SurfaceCurrent {
    pub fn basis(&self) -> &RwgBasis {
        &self.basis
    }

    pub fn wavenumber(&self) -> f64 {
        self.k
    }

    /// A current with arbitrary coefficients on `basis` (used to probe the field evaluators).
    pub fn from_coefficients(
        basis: Arc<RwgBasis>,
        coefficients: Vec<Complex64>,
        wave: PlaneWaveSpec,
        quad: usize,
    ) -> Result<Self> {
        if coefficients.len() != basis.num_dofs() {
            return Err(Error::validation(format!(
                "{} coefficients for {} basis functions",
                coefficients.len(),
                basis.num_dofs()
            )));
        }
        let rule = crate::quadrature::triangle_rule(quad)?;
        let tris = Arc::new(TriData::all(basis.mesh(), rule));
        Ok(Self {
            coefficients,
            k: wave.k,
            wave,
            residual: 0.0,
            basis,
            tris,
        })
    }
}

impl FactoredSystem {
    /// LU-factorizes the impedance matrix; fails when it is numerically singular.
    pub fn new(system: EfieSystem) -> Result<Self> {
        let lu = system.z.partial_piv_lu();
        let mut f = Self {
            system,
            lu,
            condition: f64::INFINITY,
        };
        f.condition = f.estimate_condition();
        if !(f.condition <= SINGULAR_CONDITION) {
            return Err(Error::Singular {
                condition: f.condition,
            });
        }
        Ok(f)
    }

    pub fn system(&self) -> &EfieSystem {
        &self.system
    }

    /// 1-norm condition estimate `‖Z‖₁ · est(‖Z⁻¹‖₁)`.
    pub fn condition(&self) -> f64 {
        self.condition
    }

    fn solve_vec(&self, b: &[Complex64]) -> Vec<Complex64> {
        let rhs = Mat::from_fn(b.len(), 1, |i, _| b[i]);
        let x = self.lu.solve(&rhs);
        (0..b.len()).map(|i| x[(i, 0)]).collect()
    }

    /// Solves `Zᴴ y = x` using `Zᴴ = conj(Z)` for a symmetric `Z`.
    fn solve_adjoint(&self, x: &[Complex64]) -> Vec<Complex64> {
        let c: Vec<Complex64> = x.iter().map(|v| v.conj()).collect();
        self.solve_vec(&c).into_iter().map(|v| v.conj()).collect()
    }

    /// Hager's estimator with Higham's extra test vector.
    fn estimate_condition(&self) -> f64 {
        let z = &self.system.z;
        let n = z.nrows();
        let norm1 = (0..n)
            .map(|j| (0..n).map(|i| z[(i, j)].norm()).sum::<f64>())
            .fold(0.0, f64::max);
        let mut x = vec![Complex64::new(1.0 / n as f64, 0.0); n];
        let mut est = 0.0;
        let mut last_j = usize::MAX;
        for _ in 0..5 {
            let y = self.solve_vec(&x);
            if y.iter().any(|v| !v.is_finite()) {
                return f64::INFINITY;
            }
            let new_est: f64 = y.iter().map(|v| v.norm()).sum();
            if new_est <= est {
                break;
            }
            est = new_est;
            let xi: Vec<Complex64> = y
                .iter()
                .map(|v| if v.norm() > 0.0 { v / v.norm() } else { Complex64::new(1.0, 0.0) })
                .collect();
            let w = self.solve_adjoint(&xi);
            let (j, wmax) = w
                .iter()
                .enumerate()
                .map(|(i, v)| (i, v.norm()))
                .fold((0, -1.0), |acc, c| if c.1 > acc.1 { c } else { acc });
            let wx: f64 = w.iter().zip(&x).map(|(a, b)| (a.conj() * b).re).sum();
            if wmax <= wx || j == last_j {
                break;
            }
            last_j = j;
            x = vec![Complex64::new(0.0, 0.0); n];
            x[j] = Complex64::new(1.0, 0.0);
        }
        let alt: Vec<Complex64> = (0..n)
            .map(|i| {
                let s = if i % 2 == 0 { 1.0 } else { -1.0 };
                Complex64::new(s * (1.0 + i as f64 / (n as f64 - 1.0).max(1.0)), 0.0)
            })
            .collect();
        let ya = self.solve_vec(&alt);
        let alt_est = 2.0 * ya.iter().map(|v| v.norm()).sum::<f64>() / (3.0 * n as f64);
        norm1 * est.max(alt_est)
    }

    /// Solves for the surface current induced by `w`.
    pub fn solve(&self, w: &PlaneWaveSpec) -> Result<SurfaceCurrent> {
        let b = self.system.rhs(w)?;
        let c = self.solve_vec(&b);
        if c.iter().any(|v| !v.is_finite()) {
            return Err(Error::Singular {
                condition: self.condition,
            });
        }
        let z = &self.system.z;
        let n = b.len();
        let mut r2 = 0.0;
        let mut b2 = 0.0;
        for i in 0..n {
            let mut acc = -b[i];
            for j in 0..n {
                acc += z[(i, j)] * c[j];
            }
            r2 += acc.norm_sqr();
            b2 += b[i].norm_sqr();
        }
        let residual = if b2 == 0.0 { 0.0 } else { (r2 / b2).sqrt() };
        Ok(SurfaceCurrent {
            coefficients: c,
            wave: *w,
            residual,
            basis: self.system.basis.clone(),
            tris: self.system.tris.clone(),
            k: self.system.k,
        })
    }
}

/// Solves `system` for the incident wave `w`.
pub fn solve_current(system: &FactoredSystem, w: &PlaneWaveSpec) -> Result<SurfaceCurrent> {
    system.solve(w)
}
