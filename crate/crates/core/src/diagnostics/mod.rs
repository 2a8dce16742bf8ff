//! Executable checks of the analytic machinery: changes of variables,
//! reflections, truncation, radiation and Helmholtz residuals, ball norms,
//! and the stability moduli.

pub mod fd;
pub mod moduli;
pub mod radiation;
pub mod spheres;
pub mod transforms;
pub mod truncation;

use std::fmt::Write as _;

use crate::error::Result;
use crate::incident::EMSample;
use crate::vec3::Vec3;

pub use moduli::{eta, eta1};
pub use radiation::{
    fibonacci_sphere, helmholtz_link_residual, radiation_decay, silver_muller_residual, HelmholtzResiduals,
    RadiationDecay, RadiationResidual,
};
pub use spheres::{ball_l2_norm, sup_ratio, three_spheres_exponent, BallOrder, Multipole, ThreeSpheres};
pub use transforms::{curl_transform_check, pullback_hcurl, pushforward_coefficient, reflect_solution, BiLipschitzMap};
pub use truncation::{truncate_field, truncation_curl_check, FieldOnGrid, TruncationCurlReport};

/// Anything that can produce `(E, H)` at a point.
pub trait EmField: Sync {
    fn fields(&self, x: Vec3) -> Result<EMSample>;
}

impl<F> EmField for F
where
    F: Fn(Vec3) -> Result<EMSample> + Sync,
{
    fn fields(&self, x: Vec3) -> Result<EMSample> {
        self(x)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CheckStatus {
    Pass,
    Fail,
    /// Reported without a binding threshold.
    Advisory,
}

impl CheckStatus {
    pub fn as_str(self) -> &'static str {
        match self {
            CheckStatus::Pass => "pass",
            CheckStatus::Fail => "fail",
            CheckStatus::Advisory => "advisory",
        }
    }
}

/// One row of the diagnostics CSV.
#[derive(Debug, Clone, PartialEq)]
pub struct DiagnosticRow {
    pub check: String,
    /// `key=value` pairs joined by `;`.
    pub params: String,
    pub residual: f64,
    pub threshold: f64,
    pub status: CheckStatus,
}

impl DiagnosticRow {
    /// Pass when `residual ≤ threshold`.
    pub fn bounded(check: &str, params: String, residual: f64, threshold: f64) -> Self {
        let status = if residual <= threshold {
            CheckStatus::Pass
        } else {
            CheckStatus::Fail
        };
        Self {
            check: check.into(),
            params,
            residual,
            threshold,
            status,
        }
    }

    pub fn advisory(check: &str, params: String, residual: f64) -> Self {
        Self {
            check: check.into(),
            params,
            residual,
            threshold: f64::NAN,
            status: CheckStatus::Advisory,
        }
    }
}

pub const DIAGNOSTICS_CSV_HEADER: &str = "check_name,parameters,residual,threshold,status";

pub fn diagnostics_csv(rows: &[DiagnosticRow]) -> String {
    let mut s = String::from(DIAGNOSTICS_CSV_HEADER);
    s.push('\n');
    for r in rows {
        let _ = writeln!(
            s,
            "{},{},{:.16e},{:.16e},{}",
            r.check,
            r.params,
            r.residual,
            r.threshold,
            r.status.as_str()
        );
    }
    s
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn csv_rows() {
        let rows = [
            DiagnosticRow::bounded("a", "h=0.1".into(), 1e-3, 1e-2),
            DiagnosticRow::bounded("b", "h=0.1;k=2".into(), 1.0, 1e-2),
            DiagnosticRow::advisory("c", String::new(), 0.5),
        ];
        let csv = diagnostics_csv(&rows);
        let lines: Vec<&str> = csv.lines().collect();
        assert_eq!(lines[0], DIAGNOSTICS_CSV_HEADER);
        assert!(lines[1].ends_with(",pass") && lines[2].ends_with(",fail") && lines[3].ends_with(",advisory"));
        assert_eq!(lines[2].split(',').count(), 5);
    }
}
