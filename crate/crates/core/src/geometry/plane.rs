use super::mesh::TriangleMesh;
use crate::error::{Error, Result};
use crate::vec3::{Mat3, Vec3};

/// The plane `{x : ν·x = c}` with unit normal ν.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Plane {
    normal: Vec3,
    offset: f64,
}

impl Plane {
    pub fn new(normal: Vec3, offset: f64) -> Result<Self> {
        let n = normal.norm();
        if !(n > 0.0) || !offset.is_finite() {
            return Err(Error::validation("plane normal must be nonzero"));
        }
        // renormalize and store; callers may pass slightly unnormalized input
        Ok(Self {
            normal: normal / n,
            offset: offset / n,
        })
    }

    /// `{y₃ = 0}`.
    pub fn xy() -> Self {
        Self {
            normal: Vec3::Z,
            offset: 0.0,
        }
    }

    pub fn normal(&self) -> Vec3 {
        self.normal
    }

    pub fn offset(&self) -> f64 {
        self.offset
    }

    pub fn signed_distance(&self, x: Vec3) -> f64 {
        self.normal.dot(x) - self.offset
    }

    /// `T_Π(x) = x − 2(ν·x − c)ν`.
    pub fn reflect_point(&self, x: Vec3) -> Vec3 {
        x - self.normal * (2.0 * self.signed_distance(x))
    }

    /// Jacobian of the reflection, `I − 2ννᵀ` (symmetric, orthogonal, det −1).
    pub fn reflection_matrix(&self) -> Mat3 {
        let n = self.normal.to_array();
        let mut m = [[0.0; 3]; 3];
        for (i, row) in m.iter_mut().enumerate() {
            for (j, v) in row.iter_mut().enumerate() {
                *v = if i == j { 1.0 } else { 0.0 } - 2.0 * n[i] * n[j];
            }
        }
        Mat3(m)
    }
}

/// Mirror image of a mesh; triangle orientation is reversed so outward normals stay outward.
pub fn reflect_mesh(mesh: &TriangleMesh, plane: &Plane) -> TriangleMesh {
    TriangleMesh::from_parts_unchecked(
        mesh.vertices().iter().map(|&v| plane.reflect_point(v)).collect(),
        mesh.triangles().iter().map(|&[a, b, c]| [a, c, b]).collect(),
        mesh.facet_group().to_vec(),
    )
}
