//! Electromagnetic scattering by perfectly conducting polyhedral scatterers.

// `!(x > 0.0)` is used on purpose so that NaN inputs are rejected
#![allow(clippy::neg_cmp_op_on_partial_ord)]

#[cfg(feature = "cli")]
pub mod cli;
pub mod diagnostics;
pub mod efie;
pub mod error;
pub mod farfield;
pub mod geometry;
pub mod incident;
pub mod mie;
mod par;
pub mod quadrature;
pub mod stability;
pub mod vec3;

pub use error::{Error, Result};
pub use vec3::{CVec3, Mat3, Vec3};
