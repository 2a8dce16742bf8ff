//! Scatterers: a validated boundary mesh together with its kind and the a
//! priori class constants.

use super::mesh::TriangleMesh;
use super::query::{winding_number, SurfaceIndex};
use crate::error::{Error, Result};
use crate::vec3::Vec3;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ScattererKind {
    /// Every component is a closed, consistently oriented surface.
    Obstacle,
    /// Every component is an open surface.
    Screen,
    Mixed,
}

impl ScattererKind {
    pub fn as_str(self) -> &'static str {
        match self {
            ScattererKind::Obstacle => "obstacle",
            ScattererKind::Screen => "screen",
            ScattererKind::Mixed => "mixed",
        }
    }
}

/// A priori constants of the admissible polyhedral class.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ClassParams {
    pub r: f64,
    pub lipschitz: f64,
    pub r0: f64,
    pub h: f64,
}

impl Default for ClassParams {
    fn default() -> Self {
        Self {
            r: 0.1,
            lipschitz: 1.0,
            r0: 1.5,
            h: 0.25,
        }
    }
}

#[derive(Debug, Clone)]
pub struct Scatterer {
    mesh: TriangleMesh,
    kind: ScattererKind,
    params: ClassParams,
    /// Triangle indices belonging to closed components (the solid parts).
    closed: Vec<usize>,
    closed_mesh: Option<TriangleMesh>,
}

impl Scatterer {
    /// Classifies the mesh components and checks containment in `B̄_{R₀}`.
    ///
    /// Closed components with inward orientation are flipped; closed components
    /// that are not consistently oriented are rejected.
    pub fn new(mesh: TriangleMesh, params: ClassParams) -> Result<Self> {
        if mesh.max_radius() > params.r0 * (1.0 + 1e-12) {
            return Err(Error::validation(format!(
                "scatterer radius {:.6} exceeds R0 = {}",
                mesh.max_radius(),
                params.r0
            )));
        }
        let edges = mesh.edge_map();
        let mut closed = Vec::new();
        let mut n_closed = 0;
        let mut n_open = 0;
        let mut flip = vec![false; mesh.num_triangles()];
        for comp in mesh.components() {
            let in_comp: std::collections::BTreeSet<usize> = comp.iter().copied().collect();
            let watertight = edges
                .values()
                .filter(|u| in_comp.contains(&u[0].0))
                .all(|u| u.len() == 2);
            if !watertight {
                n_open += 1;
                continue;
            }
            let oriented = edges.values().filter(|u| in_comp.contains(&u[0].0)).all(|u| {
                let dir = |(t, k): (usize, usize)| {
                    let tri = mesh.triangles()[t];
                    (tri[k], tri[(k + 1) % 3])
                };
                dir(u[0]) != dir(u[1])
            });
            if !oriented {
                return Err(Error::validation(
                    "closed component is not consistently oriented",
                ));
            }
            let vol: f64 = comp
                .iter()
                .map(|&t| {
                    let [a, b, c] = mesh.corners(t);
                    a.dot(b.cross(c)) / 6.0
                })
                .sum();
            if vol < 0.0 {
                for &t in &comp {
                    flip[t] = true;
                }
            }
            n_closed += 1;
            closed.extend_from_slice(&comp);
        }
        let mesh = if flip.iter().any(|&f| f) {
            let tris = mesh
                .triangles()
                .iter()
                .zip(&flip)
                .map(|(&[a, b, c], &f)| if f { [a, c, b] } else { [a, b, c] })
                .collect();
            TriangleMesh::new(mesh.vertices().to_vec(), tris, Some(mesh.facet_group().to_vec()))?
        } else {
            mesh
        };
        closed.sort_unstable();
        let kind = match (n_closed, n_open) {
            (_, 0) => ScattererKind::Obstacle,
            (0, _) => ScattererKind::Screen,
            _ => ScattererKind::Mixed,
        };
        let closed_mesh = if closed.is_empty() {
            None
        } else {
            Some(TriangleMesh::new(
                mesh.vertices().to_vec(),
                closed.iter().map(|&t| mesh.triangles()[t]).collect(),
                Some(closed.iter().map(|&t| mesh.facet_group()[t]).collect()),
            )?)
        };
        Ok(Self {
            mesh,
            kind,
            params,
            closed,
            closed_mesh,
        })
    }

    pub fn with_default_params(mesh: TriangleMesh) -> Result<Self> {
        let r0 = ClassParams::default().r0.max(mesh.max_radius());
        Self::new(
            mesh,
            ClassParams {
                r0,
                ..ClassParams::default()
            },
        )
    }

    pub fn mesh(&self) -> &TriangleMesh {
        &self.mesh
    }

    pub fn kind(&self) -> ScattererKind {
        self.kind
    }

    pub fn params(&self) -> &ClassParams {
        &self.params
    }

    /// Triangles of closed components.
    pub fn solid_triangles(&self) -> &[usize] {
        &self.closed
    }

    /// Whether `p` lies in the interior of a closed component (winding number ≥ 0.5).
    pub fn inside_solid(&self, p: Vec3) -> bool {
        match &self.closed_mesh {
            Some(m) => winding_number(m, p) >= 0.5,
            None => false,
        }
    }

    /// Membership in Σ: inside a solid part, or within `tol` of the surface.
    pub fn contains(&self, index: &SurfaceIndex<'_>, p: Vec3, tol: f64) -> bool {
        index.distance(p) <= tol || self.inside_solid(p)
    }

    /// Distance from `p` to Σ (zero inside solid parts).
    pub fn distance_to_set(&self, index: &SurfaceIndex<'_>, p: Vec3) -> f64 {
        if self.inside_solid(p) {
            0.0
        } else {
            index.distance(p)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::generators;

    #[test]
    fn kinds() {
        let cube = Scatterer::with_default_params(generators::cube(Vec3::ZERO, 1.0, 2).unwrap()).unwrap();
        assert_eq!(cube.kind(), ScattererKind::Obstacle);
        assert!(cube.inside_solid(Vec3::ZERO));
        assert!(!cube.inside_solid(Vec3::new(0.6, 0.0, 0.0)));

        let screen = Scatterer::with_default_params(generators::square_screen(Vec3::ZERO, 1.0, 1).unwrap()).unwrap();
        assert_eq!(screen.kind(), ScattererKind::Screen);
        assert!(!screen.inside_solid(Vec3::ZERO));

        let both = generators::cube(Vec3::ZERO, 0.5, 1)
            .unwrap()
            .merged(&generators::square_screen(Vec3::new(0.0, 0.0, 0.8), 0.5, 1).unwrap())
            .unwrap();
        assert_eq!(Scatterer::with_default_params(both).unwrap().kind(), ScattererKind::Mixed);
    }

    #[test]
    fn inward_cube_is_flipped() {
        let m = generators::cube(Vec3::ZERO, 1.0, 1).unwrap().flipped();
        assert!(m.signed_volume() < 0.0);
        let s = Scatterer::with_default_params(m).unwrap();
        assert!(s.mesh().signed_volume() > 0.0);
    }

    #[test]
    fn radius_must_fit_r0() {
        let m = generators::cube(Vec3::ZERO, 4.0, 1).unwrap();
        let err = Scatterer::new(m, ClassParams::default()).unwrap_err();
        assert!(err.to_string().contains("exceeds R0"));
    }
}
