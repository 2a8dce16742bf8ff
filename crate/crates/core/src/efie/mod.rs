//! EFIE method of moments on RWG functions for perfectly conducting surfaces.

pub mod assemble;
pub mod fields;
pub mod kernel;
pub mod rwg;
pub mod singular;
pub mod solve;

pub use assemble::{assemble_efie, EfieSystem};
pub use fields::{eval_far_field, eval_scattered_many, eval_scattered_near, eval_total_near, pec_residual};
pub use rwg::{build_rwg, RwgBasis, RwgEdge};
pub use solve::{solve_current, FactoredSystem, SurfaceCurrent};
