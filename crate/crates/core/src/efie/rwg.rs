//! Rao–Wilton–Glisson basis on interior edges.
//!
//! On its plus triangle a basis function is `(l / 2A⁺)(r − p⁺)`, on its minus
//! triangle `(l / 2A⁻)(p⁻ − r)`, with `p±` the vertex opposite the edge.
//! Boundary edges of open surfaces carry no unknown.

use crate::error::{Error, Result};
use crate::geometry::TriangleMesh;
use crate::vec3::Vec3;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RwgEdge {
    /// Edge endpoints, ascending vertex indices.
    pub vertices: [usize; 2],
    pub length: f64,
    /// (triangle, opposite vertex index) for the plus and minus sides.
    pub plus: (usize, usize),
    pub minus: (usize, usize),
}

/// One basis function restricted to one triangle: `sign · scale · (r − free)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LocalBasis {
    pub dof: usize,
    pub sign: f64,
    /// `l / (2A)`.
    pub scale: f64,
    pub free: Vec3,
}

impl LocalBasis {
    pub fn eval(&self, r: Vec3) -> Vec3 {
        (r - self.free) * (self.sign * self.scale)
    }

    /// Surface divergence, constant on the triangle.
    pub fn divergence(&self) -> f64 {
        2.0 * self.sign * self.scale
    }
}

#[derive(Debug, Clone)]
pub struct RwgBasis {
    mesh: TriangleMesh,
    edges: Vec<RwgEdge>,
    per_triangle: Vec<Vec<LocalBasis>>,
}

impl RwgBasis {
    pub fn mesh(&self) -> &TriangleMesh {
        &self.mesh
    }

    pub fn edges(&self) -> &[RwgEdge] {
        &self.edges
    }

    pub fn num_dofs(&self) -> usize {
        self.edges.len()
    }

    /// Basis functions supported on triangle `t`.
    pub fn on_triangle(&self, t: usize) -> &[LocalBasis] {
        &self.per_triangle[t]
    }
}

/// Enumerates interior edges in ascending (vertex, vertex) order; the lower
/// numbered triangle is the plus side.
pub fn build_rwg(mesh: &TriangleMesh) -> Result<RwgBasis> {
    let mut edges = Vec::new();
    let mut per_triangle = vec![Vec::new(); mesh.num_triangles()];
    for (key, users) in mesh.edge_map() {
        if users.len() != 2 {
            continue;
        }
        let opposite = |(t, k): (usize, usize)| (t, mesh.triangles()[t][(k + 2) % 3]);
        let (a, b) = (opposite(users[0]), opposite(users[1]));
        let (plus, minus) = if a.0 < b.0 { (a, b) } else { (b, a) };
        let (v0, v1) = key;
        let length = mesh.vertices()[v0].dist(mesh.vertices()[v1]);
        let dof = edges.len();
        for ((t, free), sign) in [(plus, 1.0), (minus, -1.0)] {
            per_triangle[t].push(LocalBasis {
                dof,
                sign,
                scale: length / (2.0 * mesh.area(t)),
                free: mesh.vertices()[free],
            });
        }
        edges.push(RwgEdge {
            vertices: [v0, v1],
            length,
            plus,
            minus,
        });
    }
    if edges.is_empty() {
        return Err(Error::NoInteriorEdges);
    }
    Ok(RwgBasis {
        mesh: mesh.clone(),
        edges,
        per_triangle,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::generators;

    #[test]
    fn dof_counts() {
        let cube = generators::cube(Vec3::ZERO, 1.0, 1).unwrap();
        assert_eq!(cube.num_triangles(), 12);
        assert_eq!(build_rwg(&cube).unwrap().num_dofs(), 18);
        let screen = generators::square_screen(Vec3::ZERO, 1.0, 1).unwrap();
        assert_eq!(build_rwg(&screen).unwrap().num_dofs(), 1);
        for level in 0..4 {
            let s = generators::icosphere(1.0, level).unwrap();
            assert_eq!(build_rwg(&s).unwrap().num_dofs(), 3 * s.num_triangles() / 2);
        }
    }

    #[test]
    fn single_triangle_has_no_interior_edge() {
        let m = TriangleMesh::new(vec![Vec3::ZERO, Vec3::X, Vec3::Y], vec![[0, 1, 2]], None).unwrap();
        assert!(matches!(build_rwg(&m), Err(Error::NoInteriorEdges)));
    }

    #[test]
    fn normal_component_is_continuous_across_edge() {
        let m = generators::icosphere(1.0, 1).unwrap();
        let basis = build_rwg(&m).unwrap();
        for (n, e) in basis.edges().iter().enumerate() {
            let a = m.vertices()[e.vertices[0]];
            let b = m.vertices()[e.vertices[1]];
            let mid = (a + b) * 0.5;
            let t = (b - a).normalized();
            let flux = |tri: usize| {
                let lb = basis.on_triangle(tri).iter().find(|l| l.dof == n).unwrap();
                // in-plane normal to the edge, pointing away from the free vertex
                let nrm = m.normal(tri).cross(t);
                let out = if (mid - lb.free).dot(nrm) > 0.0 { nrm } else { -nrm };
                (lb.eval(mid).dot(out), lb.divergence())
            };
            let (fp, dp) = flux(e.plus.0);
            let (fm, dm) = flux(e.minus.0);
            assert!((fp - 1.0).abs() < 1e-12, "unit normal flux on plus side");
            assert!((fp + fm).abs() < 1e-12);
            // total charge vanishes: ∫ div f = l − l
            assert!((dp * m.area(e.plus.0) + dm * m.area(e.minus.0)).abs() < 1e-12);
        }
    }
}
