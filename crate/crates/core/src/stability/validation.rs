//! Cross-validation of the boundary-element solver against the Mie series.

use std::sync::Arc;

use crate::efie::{assemble_efie, build_rwg, eval_far_field, FactoredSystem};
use crate::error::{Error, Result};
use crate::geometry::generators;
use crate::incident::PlaneWaveSpec;
use crate::mie::mie_far_field;
use crate::quadrature::SphereGrid;
use crate::vec3::Vec3;

/// Relative `L²(S²)` far-field difference between the EFIE solution on an
/// icosphere of radius 1 and the Mie series, for the wave `d = ẑ`, `p = x̂`.
pub fn mie_validation_error(ka: f64, mesh_level: usize, quad_order: usize, grid: &SphereGrid) -> Result<f64> {
    if !(ka > 0.0) {
        return Err(Error::validation(format!("ka must be positive, got {ka}")));
    }
    let w = PlaneWaveSpec::new(ka, Vec3::Z, Vec3::X)?;
    let mie = mie_far_field(1.0, ka, &w, grid)?;
    let mesh = generators::icosphere(1.0, mesh_level)?;
    let sys = FactoredSystem::new(assemble_efie(Arc::new(build_rwg(&mesh)?), ka, quad_order)?)?;
    let ff = eval_far_field(&sys.solve(&w)?, grid);
    Ok(ff.l2_distance(&mie)? / mie.l2_norm())
}

