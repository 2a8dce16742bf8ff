//! Point queries against triangle meshes: closest points, surface sampling,
//! and generalized winding numbers.

use std::f64::consts::PI;

use super::mesh::TriangleMesh;
use crate::vec3::Vec3;

/// Closest point on triangle `abc` to `p` (Ericson, Real-Time Collision Detection).
pub fn closest_point_on_triangle(p: Vec3, a: Vec3, b: Vec3, c: Vec3) -> Vec3 {
    let ab = b - a;
    let ac = c - a;
    let ap = p - a;
    let d1 = ab.dot(ap);
    let d2 = ac.dot(ap);
    if d1 <= 0.0 && d2 <= 0.0 {
        return a;
    }
    let bp = p - b;
    let d3 = ab.dot(bp);
    let d4 = ac.dot(bp);
    if d3 >= 0.0 && d4 <= d3 {
        return b;
    }
    let vc = d1 * d4 - d3 * d2;
    if vc <= 0.0 && d1 >= 0.0 && d3 <= 0.0 {
        let v = d1 / (d1 - d3);
        return a + ab * v;
    }
    let cp = p - c;
    let d5 = ab.dot(cp);
    let d6 = ac.dot(cp);
    if d6 >= 0.0 && d5 <= d6 {
        return c;
    }
    let vb = d5 * d2 - d1 * d6;
    if vb <= 0.0 && d2 >= 0.0 && d6 <= 0.0 {
        let w = d2 / (d2 - d6);
        return a + ac * w;
    }
    let va = d3 * d6 - d5 * d4;
    if va <= 0.0 && (d4 - d3) >= 0.0 && (d5 - d6) >= 0.0 {
        let w = (d4 - d3) / ((d4 - d3) + (d5 - d6));
        return b + (c - b) * w;
    }
    let denom = 1.0 / (va + vb + vc);
    let v = vb * denom;
    let w = vc * denom;
    a + ab * v + ac * w
}

pub fn point_triangle_distance(p: Vec3, tri: [Vec3; 3]) -> f64 {
    p.dist(closest_point_on_triangle(p, tri[0], tri[1], tri[2]))
}

/// Unsigned distance from `p` to the surface of `mesh` (brute force over triangles
/// with a bounding-sphere early out).
pub fn distance_to_surface(mesh: &TriangleMesh, p: Vec3) -> f64 {
    SurfaceIndex::new(mesh).distance(p)
}

/// Per-triangle bounding spheres for fast exact distance queries.
pub struct SurfaceIndex<'a> {
    mesh: &'a TriangleMesh,
    centers: Vec<Vec3>,
    radii: Vec<f64>,
}

impl<'a> SurfaceIndex<'a> {
    pub fn new(mesh: &'a TriangleMesh) -> Self {
        let mut centers = Vec::with_capacity(mesh.num_triangles());
        let mut radii = Vec::with_capacity(mesh.num_triangles());
        for t in 0..mesh.num_triangles() {
            let c = mesh.centroid(t);
            let r = mesh.corners(t).iter().map(|v| v.dist(c)).fold(0.0, f64::max);
            centers.push(c);
            radii.push(r);
        }
        Self { mesh, centers, radii }
    }

    pub fn mesh(&self) -> &TriangleMesh {
        self.mesh
    }

    pub fn distance(&self, p: Vec3) -> f64 {
        let mut best = f64::INFINITY;
        for t in 0..self.centers.len() {
            let lower = p.dist(self.centers[t]) - self.radii[t];
            if lower >= best {
                continue;
            }
            best = best.min(point_triangle_distance(p, self.mesh.corners(t)));
        }
        best
    }
}

/// Signed solid angle subtended by triangle `abc` at `p` (Van Oosterom–Strackee).
pub fn solid_angle(p: Vec3, a: Vec3, b: Vec3, c: Vec3) -> f64 {
    let (ra, rb, rc) = (a - p, b - p, c - p);
    let (la, lb, lc) = (ra.norm(), rb.norm(), rc.norm());
    let num = ra.dot(rb.cross(rc));
    let den = la * lb * lc + ra.dot(rb) * lc + rb.dot(rc) * la + rc.dot(ra) * lb;
    2.0 * num.atan2(den)
}

/// Generalized winding number of `mesh` at `p`; ≈1 inside an outward-oriented
/// closed surface, ≈0 outside.
pub fn winding_number(mesh: &TriangleMesh, p: Vec3) -> f64 {
    let sum: f64 = (0..mesh.num_triangles())
        .map(|t| {
            let [a, b, c] = mesh.corners(t);
            solid_angle(p, a, b, c)
        })
        .sum();
    sum / (4.0 * PI)
}

/// Points covering each triangle with spacing at most `res` (vertices of a
/// uniform barycentric subdivision), deduplicated per triangle only.
pub fn sample_surface(mesh: &TriangleMesh, res: f64) -> Vec<Vec3> {
    let mut pts = Vec::new();
    for t in 0..mesh.num_triangles() {
        let [a, b, c] = mesh.corners(t);
        let longest = a.dist(b).max(b.dist(c)).max(c.dist(a));
        let m = (longest / res).ceil().max(1.0) as usize;
        for i in 0..=m {
            for j in 0..=(m - i) {
                let u = i as f64 / m as f64;
                let v = j as f64 / m as f64;
                pts.push(a + (b - a) * u + (c - a) * v);
            }
        }
    }
    pts
}
