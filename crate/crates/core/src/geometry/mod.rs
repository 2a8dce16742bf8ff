//! Polyhedral scatterers: meshes, generators, distances and class checks.

pub mod class;
pub mod connectivity;
pub mod distance;
pub mod generators;
pub mod io;
pub mod mesh;
pub mod plane;
pub mod query;
pub mod scatterer;

pub use class::{validate_class_membership, CellReport, ClassReport};
pub use connectivity::{exterior_connectedness, ConnectednessReport};
pub use distance::{delta_inverse, distance_report, DeltaTable, DistanceReport};
pub use io::{load_mesh, parse_mesh, save_mesh, write_mesh_string};
pub use mesh::{Aabb, TriangleMesh};
pub use plane::{reflect_mesh, Plane};
pub use scatterer::{ClassParams, Scatterer, ScattererKind};
