//! Sampled far-field patterns `(E∞, H∞)` on a sphere grid.

use std::fmt::Write as _;

use crate::error::{Error, Result};
use crate::quadrature::SphereGrid;
use crate::vec3::CVec3;

#[derive(Debug, Clone, PartialEq)]
pub struct FarFieldPattern {
    pub grid: SphereGrid,
    pub e_inf: Vec<CVec3>,
    pub h_inf: Vec<CVec3>,
}

pub const FARFIELD_CSV_HEADER: &str =
    "theta,phi,ReEx,ImEx,ReEy,ImEy,ReEz,ImEz,ReHx,ImHx,ReHy,ImHy,ReHz,ImHz";

impl FarFieldPattern {
    fn max_e(&self) -> f64 {
        self.e_inf.iter().map(CVec3::norm).fold(0.0, f64::max)
    }

    /// `max |x̂·E∞| / max ‖E∞‖` (0 for a vanishing pattern).
    pub fn transversality_error(&self) -> f64 {
        let m = self.max_e();
        if m == 0.0 {
            return 0.0;
        }
        let r = self
            .grid
            .directions
            .iter()
            .zip(&self.e_inf)
            .map(|(d, e)| e.dot_real(*d).norm())
            .fold(0.0, f64::max);
        r / m
    }

    /// `max ‖H∞ − x̂∧E∞‖ / max ‖E∞‖`.
    pub fn relation_error(&self) -> f64 {
        let m = self.max_e();
        if m == 0.0 {
            return 0.0;
        }
        let r = self
            .grid
            .directions
            .iter()
            .zip(self.e_inf.iter().zip(&self.h_inf))
            .map(|(d, (e, h))| (*h - e.cross_real_left(*d)).norm())
            .fold(0.0, f64::max);
        r / m
    }

    /// `‖E∞‖_{L²(S²)}`.
    pub fn l2_norm(&self) -> f64 {
        self.grid
            .weights
            .iter()
            .zip(&self.e_inf)
            .map(|(w, e)| w * e.norm_sq())
            .sum::<f64>()
            .sqrt()
    }

    /// `‖E∞ − E∞'‖_{L²(S²)}`; the grids must coincide.
    pub fn l2_distance(&self, other: &FarFieldPattern) -> Result<f64> {
        if self.grid != other.grid {
            return Err(Error::validation("far-field patterns live on different grids"));
        }
        Ok(self
            .grid
            .weights
            .iter()
            .zip(self.e_inf.iter().zip(&other.e_inf))
            .map(|(w, (a, b))| w * (*a - *b).norm_sq())
            .sum::<f64>()
            .sqrt())
    }

    /// `∫ ‖E∞‖²`, the scattered power up to normalisation.
    pub fn scattered_power(&self) -> f64 {
        self.l2_norm().powi(2)
    }

    /// CSV with one row per direction, 17 significant digits.
    pub fn to_csv(&self) -> String {
        let mut s = String::with_capacity(self.e_inf.len() * 300);
        s.push_str(FARFIELD_CSV_HEADER);
        s.push('\n');
        for i in 0..self.e_inf.len() {
            let _ = write!(s, "{:.16e},{:.16e}", self.grid.theta[i], self.grid.phi[i]);
            for v in [&self.e_inf[i], &self.h_inf[i]] {
                for c in v.0 {
                    let _ = write!(s, ",{:.16e},{:.16e}", c.re, c.im);
                }
            }
            s.push('\n');
        }
        s
    }
}
