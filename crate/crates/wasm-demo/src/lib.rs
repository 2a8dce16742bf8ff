//! Browser bindings for a few cheap computations: the Mie reference solution,
//! the logarithmic stability modulus, and a small EFIE-versus-Mie check.
//!
//! The plain functions return `Result<_, String>` so they can be tested natively;
//! the `#[wasm_bindgen]` wrappers turn errors into JS exceptions.

use pec_scatter::diagnostics::eta;
use pec_scatter::incident::PlaneWaveSpec;
use pec_scatter::mie::MieSolution;
use pec_scatter::quadrature::SphereGrid;
use pec_scatter::stability::mie_validation_error;
use pec_scatter::Vec3;
use wasm_bindgen::prelude::*;

/// Largest icosphere level offered in the page; level 3 takes seconds in a browser.
pub const MAX_DEMO_LEVEL: usize = 3;

/// `[σ_sca, σ_ext, σ_back]` for the unit sphere at size parameter `ka`.
pub fn sphere_cross_sections(ka: f64) -> Result<Vec<f64>, String> {
    let sol = MieSolution::new(1.0, ka).map_err(|e| e.to_string())?;
    let (sca, ext) = sol.cross_sections();
    Ok(vec![sca, ext, sol.backscatter_rcs()])
}

/// `‖E∞‖` on `n` angles `θ ∈ [0, π]` in the E-plane followed by the H-plane,
/// for incidence along `ẑ` polarised along `x̂`.
pub fn sphere_pattern(ka: f64, n: usize) -> Result<Vec<f64>, String> {
    if n < 2 {
        return Err("need at least two angles".into());
    }
    let sol = MieSolution::new(1.0, ka).map_err(|e| e.to_string())?;
    let w = PlaneWaveSpec::new(ka, Vec3::Z, Vec3::X).map_err(|e| e.to_string())?;
    let mut out = Vec::with_capacity(2 * n);
    for plane in [Vec3::X, Vec3::Y] {
        for i in 0..n {
            let th = std::f64::consts::PI * i as f64 / (n - 1) as f64;
            let dir = plane * th.sin() + Vec3::Z * th.cos();
            out.push(sol.far_field_at(&w, dir).0.norm());
        }
    }
    Ok(out)
}

/// `η(ε)`, or an error outside `0 < ε < 1/e`.
pub fn modulus(eps: f64) -> Result<f64, String> {
    eta(eps).map_err(|e| e.to_string())
}

/// Relative far-field error of the boundary-element solution on an icosphere of the given level.
pub fn efie_check(ka: f64, level: usize) -> Result<f64, String> {
    if !(1..=MAX_DEMO_LEVEL).contains(&level) {
        return Err(format!("level must be between 1 and {MAX_DEMO_LEVEL}"));
    }
    let grid = SphereGrid::gauss(12, 24).map_err(|e| e.to_string())?;
    mie_validation_error(ka, level, 3, &grid).map_err(|e| e.to_string())
}

#[wasm_bindgen(js_name = sphereCrossSections)]
pub fn js_sphere_cross_sections(ka: f64) -> Result<Vec<f64>, JsError> {
    sphere_cross_sections(ka).map_err(|e| JsError::new(&e))
}

#[wasm_bindgen(js_name = spherePattern)]
pub fn js_sphere_pattern(ka: f64, n: usize) -> Result<Vec<f64>, JsError> {
    sphere_pattern(ka, n).map_err(|e| JsError::new(&e))
}

#[wasm_bindgen(js_name = modulus)]
pub fn js_modulus(eps: f64) -> Result<f64, JsError> {
    modulus(eps).map_err(|e| JsError::new(&e))
}

#[wasm_bindgen(js_name = efieCheck)]
pub fn js_efie_check(ka: f64, level: usize) -> Result<f64, JsError> {
    efie_check(ka, level).map_err(|e| JsError::new(&e))
}
