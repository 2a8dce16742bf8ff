//! Indexed triangle surface meshes and their topology.

use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::vec3::Vec3;

/// Relative area below which a triangle counts as degenerate (times bounding-box diagonal²).
pub const DEGENERATE_AREA_TOL: f64 = 1e-12;
/// Relative coplanarity tolerance for facet groups (times mesh diameter).
pub const COPLANAR_TOL: f64 = 1e-9;

/// Undirected edge key with `0 <= .0 < .1`.
pub type EdgeKey = (usize, usize);

#[inline]
pub fn edge_key(a: usize, b: usize) -> EdgeKey {
    if a < b {
        (a, b)
    } else {
        (b, a)
    }
}

/// Indexed triangle mesh for the boundary of a scatterer.
///
/// Triangles are 0-based vertex index triples. `facet_group[t]` labels the
/// planar cell that triangle `t` belongs to.
#[derive(Debug, Clone, PartialEq)]
pub struct TriangleMesh {
    vertices: Vec<Vec3>,
    triangles: Vec<[usize; 3]>,
    facet_group: Vec<usize>,
}

impl TriangleMesh {
    /// Builds and validates a mesh. When `facet_group` is `None` groups are
    /// computed by clustering edge-connected coplanar triangles.
    pub fn new(
        vertices: Vec<Vec3>,
        triangles: Vec<[usize; 3]>,
        facet_group: Option<Vec<usize>>,
    ) -> Result<Self> {
        if vertices.is_empty() || triangles.is_empty() {
            return Err(Error::EmptyMesh);
        }
        for (t, tri) in triangles.iter().enumerate() {
            for &i in tri {
                if i >= vertices.len() {
                    return Err(Error::validation(format!(
                        "triangle {t} references vertex {i} but mesh has {} vertices",
                        vertices.len()
                    )));
                }
            }
            if tri[0] == tri[1] || tri[1] == tri[2] || tri[0] == tri[2] {
                return Err(Error::validation(format!("triangle {t} repeats a vertex")));
            }
        }
        if vertices.iter().any(|v| !(v.x.is_finite() && v.y.is_finite() && v.z.is_finite())) {
            return Err(Error::validation("non-finite vertex coordinate"));
        }
        let mut mesh = TriangleMesh {
            vertices,
            triangles,
            facet_group: Vec::new(),
        };
        let diag = mesh.bounding_box().diagonal();
        let min_area = DEGENERATE_AREA_TOL * diag * diag;
        for t in 0..mesh.triangles.len() {
            if mesh.area(t) <= min_area {
                return Err(Error::validation(format!("triangle {t} is degenerate")));
            }
        }
        for (e, users) in mesh.edge_map() {
            if users.len() > 2 {
                return Err(Error::validation(format!(
                    "edge ({}, {}) is shared by {} triangles",
                    e.0,
                    e.1,
                    users.len()
                )));
            }
        }
        match facet_group {
            Some(groups) => {
                if groups.len() != mesh.triangles.len() {
                    return Err(Error::validation("facet_group length differs from triangle count"));
                }
                mesh.facet_group = canonical_labels(&groups);
                mesh.check_group_planarity()?;
            }
            None => mesh.facet_group = mesh.cluster_coplanar(),
        }
        Ok(mesh)
    }

    pub fn vertices(&self) -> &[Vec3] {
        &self.vertices
    }

    pub fn triangles(&self) -> &[[usize; 3]] {
        &self.triangles
    }

    pub fn facet_group(&self) -> &[usize] {
        &self.facet_group
    }

    pub fn num_groups(&self) -> usize {
        self.facet_group.iter().max().map_or(0, |m| m + 1)
    }

    pub fn num_triangles(&self) -> usize {
        self.triangles.len()
    }

    #[inline]
    pub fn corners(&self, t: usize) -> [Vec3; 3] {
        let [a, b, c] = self.triangles[t];
        [self.vertices[a], self.vertices[b], self.vertices[c]]
    }

    /// Unnormalized normal `(b - a) ∧ (c - a)`, length twice the area.
    #[inline]
    pub fn raw_normal(&self, t: usize) -> Vec3 {
        let [a, b, c] = self.corners(t);
        (b - a).cross(c - a)
    }

    pub fn normal(&self, t: usize) -> Vec3 {
        self.raw_normal(t).normalized()
    }

    pub fn area(&self, t: usize) -> f64 {
        0.5 * self.raw_normal(t).norm()
    }

    pub fn centroid(&self, t: usize) -> Vec3 {
        let [a, b, c] = self.corners(t);
        (a + b + c) / 3.0
    }

    pub fn total_area(&self) -> f64 {
        (0..self.triangles.len()).map(|t| self.area(t)).sum()
    }

    pub fn bounding_box(&self) -> Aabb {
        Aabb::from_points(self.vertices.iter().copied())
    }

    /// Radius of the smallest origin-centred ball containing every vertex.
    pub fn max_radius(&self) -> f64 {
        self.vertices.iter().map(|v| v.norm()).fold(0.0, f64::max)
    }

    pub fn diameter(&self) -> f64 {
        self.bounding_box().diagonal()
    }

    pub fn max_edge_length(&self) -> f64 {
        self.triangles
            .iter()
            .flat_map(|&[a, b, c]| [(a, b), (b, c), (c, a)])
            .map(|(i, j)| self.vertices[i].dist(self.vertices[j]))
            .fold(0.0, f64::max)
    }

    /// Map from undirected edge to the triangles using it, with the local edge
    /// slot (edge `k` joins local vertices `k` and `k + 1`). Ordered by key.
    pub fn edge_map(&self) -> BTreeMap<EdgeKey, Vec<(usize, usize)>> {
        let mut map: BTreeMap<EdgeKey, Vec<(usize, usize)>> = BTreeMap::new();
        for (t, tri) in self.triangles.iter().enumerate() {
            for k in 0..3 {
                let e = edge_key(tri[k], tri[(k + 1) % 3]);
                map.entry(e).or_default().push((t, k));
            }
        }
        map
    }

    /// Edges used by exactly one triangle (screen boundary).
    pub fn boundary_edges(&self) -> Vec<EdgeKey> {
        self.edge_map()
            .into_iter()
            .filter(|(_, u)| u.len() == 1)
            .map(|(e, _)| e)
            .collect()
    }

    pub fn is_watertight(&self) -> bool {
        self.edge_map().values().all(|u| u.len() == 2)
    }

    /// Every shared edge is traversed in opposite directions by its two triangles.
    pub fn is_consistently_oriented(&self) -> bool {
        self.edge_map().values().all(|users| {
            if users.len() != 2 {
                return true;
            }
            let dir = |(t, k): (usize, usize)| {
                let tri = self.triangles[t];
                (tri[k], tri[(k + 1) % 3])
            };
            dir(users[0]) != dir(users[1])
        })
    }

    /// Signed enclosed volume (positive for outward orientation of a closed mesh).
    pub fn signed_volume(&self) -> f64 {
        (0..self.triangles.len())
            .map(|t| {
                let [a, b, c] = self.corners(t);
                a.dot(b.cross(c)) / 6.0
            })
            .sum()
    }

    /// Edge-connected components as lists of triangle indices, ordered by first triangle.
    pub fn components(&self) -> Vec<Vec<usize>> {
        let mut uf = UnionFind::new(self.triangles.len());
        for users in self.edge_map().values() {
            if users.len() == 2 {
                uf.union(users[0].0, users[1].0);
            }
        }
        group_by_root(&mut uf, self.triangles.len())
    }

    /// Reverses every triangle's orientation.
    pub fn flipped(&self) -> TriangleMesh {
        TriangleMesh {
            vertices: self.vertices.clone(),
            triangles: self.triangles.iter().map(|&[a, b, c]| [a, c, b]).collect(),
            facet_group: self.facet_group.clone(),
        }
    }

    /// Applies `f` to every vertex, keeping connectivity and groups.
    pub fn map_vertices(&self, f: impl Fn(Vec3) -> Vec3) -> Result<TriangleMesh> {
        TriangleMesh::new(
            self.vertices.iter().map(|&v| f(v)).collect(),
            self.triangles.clone(),
            None,
        )
    }

    pub fn translated(&self, v: Vec3) -> TriangleMesh {
        TriangleMesh {
            vertices: self.vertices.iter().map(|&p| p + v).collect(),
            triangles: self.triangles.clone(),
            facet_group: self.facet_group.clone(),
        }
    }

    /// Disjoint union of two meshes.
    pub fn merged(&self, other: &TriangleMesh) -> Result<TriangleMesh> {
        let off = self.vertices.len();
        let goff = self.num_groups();
        let mut vertices = self.vertices.clone();
        vertices.extend_from_slice(&other.vertices);
        let mut triangles = self.triangles.clone();
        triangles.extend(other.triangles.iter().map(|t| t.map(|i| i + off)));
        let mut groups = self.facet_group.clone();
        groups.extend(other.facet_group.iter().map(|g| g + goff));
        TriangleMesh::new(vertices, triangles, Some(groups))
    }

    /// Builds from raw parts without re-validation; for transforms that
    /// provably preserve validity (rigid maps, reflections).
    pub(crate) fn from_parts_unchecked(
        vertices: Vec<Vec3>,
        triangles: Vec<[usize; 3]>,
        facet_group: Vec<usize>,
    ) -> TriangleMesh {
        TriangleMesh {
            vertices,
            triangles,
            facet_group,
        }
    }

    /// Plane `(unit normal, offset)` of a triangle.
    pub fn plane_of(&self, t: usize) -> (Vec3, f64) {
        let n = self.normal(t);
        (n, n.dot(self.vertices[self.triangles[t][0]]))
    }

    fn check_group_planarity(&self) -> Result<()> {
        let tol = COPLANAR_TOL * self.diameter().max(f64::MIN_POSITIVE);
        let mut reference: BTreeMap<usize, usize> = BTreeMap::new();
        for t in 0..self.triangles.len() {
            let g = self.facet_group[t];
            let r = *reference.entry(g).or_insert(t);
            let (n, c) = self.plane_of(r);
            for &i in &self.triangles[t] {
                if (n.dot(self.vertices[i]) - c).abs() > tol {
                    return Err(Error::validation(format!(
                        "facet group {g} is not planar (triangle {t})"
                    )));
                }
            }
        }
        Ok(())
    }

    /// Groups edge-adjacent triangles whose vertices lie on a common plane.
    fn cluster_coplanar(&self) -> Vec<usize> {
        let tol = COPLANAR_TOL * self.diameter().max(f64::MIN_POSITIVE);
        let mut uf = UnionFind::new(self.triangles.len());
        for users in self.edge_map().values() {
            if users.len() != 2 {
                continue;
            }
            let (t0, t1) = (users[0].0, users[1].0);
            let (n, c) = self.plane_of(t0);
            let (n1, _) = self.plane_of(t1);
            let on_plane = self.triangles[t1]
                .iter()
                .all(|&i| (n.dot(self.vertices[i]) - c).abs() <= tol);
            if on_plane && n.cross(n1).norm() <= 1e-9 {
                uf.union(t0, t1);
            }
        }
        let comps = group_by_root(&mut uf, self.triangles.len());
        let mut labels = vec![0; self.triangles.len()];
        for (g, comp) in comps.iter().enumerate() {
            for &t in comp {
                labels[t] = g;
            }
        }
        labels
    }
}

/// Relabels arbitrary group ids to `0..n` in order of first appearance.
fn canonical_labels(groups: &[usize]) -> Vec<usize> {
    let mut map = BTreeMap::new();
    groups
        .iter()
        .map(|g| {
            let next = map.len();
            *map.entry(*g).or_insert(next)
        })
        .collect()
}

fn group_by_root(uf: &mut UnionFind, n: usize) -> Vec<Vec<usize>> {
    let mut by_root: BTreeMap<usize, usize> = BTreeMap::new();
    let mut out: Vec<Vec<usize>> = Vec::new();
    for t in 0..n {
        let r = uf.find(t);
        let idx = *by_root.entry(r).or_insert_with(|| {
            out.push(Vec::new());
            out.len() - 1
        });
        out[idx].push(t);
    }
    out
}

pub(crate) struct UnionFind {
    parent: Vec<usize>,
}

impl UnionFind {
    pub(crate) fn new(n: usize) -> Self {
        Self {
            parent: (0..n).collect(),
        }
    }

    pub(crate) fn find(&mut self, mut i: usize) -> usize {
        while self.parent[i] != i {
            self.parent[i] = self.parent[self.parent[i]];
            i = self.parent[i];
        }
        i
    }

    pub(crate) fn union(&mut self, a: usize, b: usize) {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra != rb {
            let (lo, hi) = if ra < rb { (ra, rb) } else { (rb, ra) };
            self.parent[hi] = lo;
        }
    }
}

/// Axis-aligned bounding box.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Aabb {
    pub min: Vec3,
    pub max: Vec3,
}

impl Aabb {
    pub fn from_points(points: impl IntoIterator<Item = Vec3>) -> Self {
        let mut it = points.into_iter();
        let first = it.next().unwrap_or(Vec3::ZERO);
        it.fold(Aabb { min: first, max: first }, |b, p| Aabb {
            min: b.min.min(p),
            max: b.max.max(p),
        })
    }

    pub fn diagonal(&self) -> f64 {
        (self.max - self.min).norm()
    }

    pub fn expanded(&self, m: f64) -> Aabb {
        let d = Vec3::new(m, m, m);
        Aabb {
            min: self.min - d,
            max: self.max + d,
        }
    }

    pub fn center(&self) -> Vec3 {
        (self.min + self.max) * 0.5
    }

    /// Euclidean distance from `p` to the box (0 inside).
    pub fn distance(&self, p: Vec3) -> f64 {
        let dx = (self.min.x - p.x).max(0.0).max(p.x - self.max.x);
        let dy = (self.min.y - p.y).max(0.0).max(p.y - self.max.y);
        let dz = (self.min.z - p.z).max(0.0).max(p.z - self.max.z);
        (dx * dx + dy * dy + dz * dz).sqrt()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::generators;

    #[test]
    fn unit_cube_topology() {
        let m = generators::cube(Vec3::ZERO, 1.0, 1).unwrap();
        assert_eq!(m.vertices().len(), 8);
        assert_eq!(m.num_triangles(), 12);
        assert_eq!(m.num_groups(), 6);
        assert!(m.is_watertight());
        assert!(m.is_consistently_oriented());
        assert!((m.signed_volume() - 1.0).abs() < 1e-14);
        assert_eq!(m.components().len(), 1);
    }

    #[test]
    fn rejects_degenerate_and_nonmanifold() {
        let v = vec![
            Vec3::new(0.0, 0.0, 0.0),
            Vec3::new(1.0, 0.0, 0.0),
            Vec3::new(2.0, 0.0, 0.0),
            Vec3::new(0.0, 1.0, 0.0),
        ];
        let err = TriangleMesh::new(v.clone(), vec![[0, 1, 2]], None).unwrap_err();
        assert!(matches!(err, Error::Validation(_)));

        let v = vec![
            Vec3::new(0.0, 0.0, 0.0),
            Vec3::new(1.0, 0.0, 0.0),
            Vec3::new(0.0, 1.0, 0.0),
            Vec3::new(0.0, -1.0, 0.0),
            Vec3::new(0.0, 0.0, 1.0),
        ];
        let err = TriangleMesh::new(v, vec![[0, 1, 2], [1, 0, 3], [0, 1, 4]], None).unwrap_err();
        assert!(err.to_string().contains("shared by 3"));
    }

    #[test]
    fn square_screen_boundary() {
        let m = generators::square_screen(Vec3::ZERO, 1.0, 1).unwrap();
        assert_eq!(m.num_triangles(), 2);
        assert_eq!(m.boundary_edges().len(), 4);
        assert!(!m.is_watertight());
        assert_eq!(m.num_groups(), 1);
    }

    #[test]
    fn explicit_groups_must_be_planar() {
        let m = generators::cube(Vec3::ZERO, 1.0, 1).unwrap();
        let err = TriangleMesh::new(
            m.vertices().to_vec(),
            m.triangles().to_vec(),
            Some(vec![0; 12]),
        )
        .unwrap_err();
        assert!(err.to_string().contains("not planar"));
    }
}
