//! Built-in scatterer meshes: cubes and boxes, square screens, icospheres,
//! and the one-parameter perturbation families used by the stability sweeps.

use std::collections::HashMap;

use super::mesh::TriangleMesh;
use crate::error::{Error, Result};
use crate::vec3::Vec3;

/// Collects planar polygons and welds coincident vertices.
#[derive(Default)]
struct PolyBuilder {
    vertices: Vec<Vec3>,
    lookup: HashMap<[u64; 3], usize>,
    triangles: Vec<[usize; 3]>,
}

impl PolyBuilder {
    fn vertex(&mut self, p: Vec3) -> usize {
        // +0.0 folds negative zero onto positive zero
        let key = [(p.x + 0.0).to_bits(), (p.y + 0.0).to_bits(), (p.z + 0.0).to_bits()];
        *self.lookup.entry(key).or_insert_with(|| {
            self.vertices.push(p);
            self.vertices.len() - 1
        })
    }

    /// Adds a convex planar polygon (counter-clockwise seen from the normal side) as a fan.
    fn polygon(&mut self, pts: &[Vec3]) {
        let idx: Vec<usize> = pts.iter().map(|&p| self.vertex(p)).collect();
        for i in 1..idx.len() - 1 {
            self.triangles.push([idx[0], idx[i], idx[i + 1]]);
        }
    }

    fn finish(self) -> Result<TriangleMesh> {
        TriangleMesh::new(self.vertices, self.triangles, None)
    }
}

fn uniform(a: f64, b: f64, n: usize) -> Vec<f64> {
    (0..=n).map(|i| a + (b - a) * i as f64 / n as f64).collect()
}

/// Sorted union of breakpoint lists, merging values closer than `1e-12`.
fn merge_breaks(lists: &[&[f64]]) -> Vec<f64> {
    let mut all: Vec<f64> = lists.iter().flat_map(|l| l.iter().copied()).collect();
    all.sort_by(f64::total_cmp);
    all.dedup_by(|a, b| (*a - *b).abs() < 1e-12);
    all
}

/// Boundary of a union of cells of a rectilinear grid, oriented outward.
///
/// `inside(i, j, k)` selects cell `[xs[i], xs[i+1]] × [ys[j], ys[j+1]] × [zs[k], zs[k+1]]`.
fn rectilinear_solid(
    xs: &[f64],
    ys: &[f64],
    zs: &[f64],
    inside: impl Fn(usize, usize, usize) -> bool,
) -> Result<TriangleMesh> {
    let (nx, ny, nz) = (xs.len() - 1, ys.len() - 1, zs.len() - 1);
    let cell = |i: isize, j: isize, k: isize| -> bool {
        i >= 0
            && j >= 0
            && k >= 0
            && (i as usize) < nx
            && (j as usize) < ny
            && (k as usize) < nz
            && inside(i as usize, j as usize, k as usize)
    };
    let p = |i: usize, j: usize, k: usize| Vec3::new(xs[i], ys[j], zs[k]);
    let mut b = PolyBuilder::default();
    for k in 0..nz {
        for j in 0..ny {
            for i in 0..nx {
                if !inside(i, j, k) {
                    continue;
                }
                let (ii, jj, kk) = (i as isize, j as isize, k as isize);
                // each face: neighbour offset, outward direction, quad corners
                let faces: [((isize, isize, isize), Vec3, [Vec3; 4]); 6] = [
                    ((-1, 0, 0), -Vec3::X, [p(i, j, k), p(i, j, k + 1), p(i, j + 1, k + 1), p(i, j + 1, k)]),
                    ((1, 0, 0), Vec3::X, [p(i + 1, j, k), p(i + 1, j + 1, k), p(i + 1, j + 1, k + 1), p(i + 1, j, k + 1)]),
                    ((0, -1, 0), -Vec3::Y, [p(i, j, k), p(i + 1, j, k), p(i + 1, j, k + 1), p(i, j, k + 1)]),
                    ((0, 1, 0), Vec3::Y, [p(i, j + 1, k), p(i, j + 1, k + 1), p(i + 1, j + 1, k + 1), p(i + 1, j + 1, k)]),
                    ((0, 0, -1), -Vec3::Z, [p(i, j, k), p(i, j + 1, k), p(i + 1, j + 1, k), p(i + 1, j, k)]),
                    ((0, 0, 1), Vec3::Z, [p(i, j, k + 1), p(i + 1, j, k + 1), p(i + 1, j + 1, k + 1), p(i, j + 1, k + 1)]),
                ];
                for ((di, dj, dk), out, mut quad) in faces {
                    if cell(ii + di, jj + dj, kk + dk) {
                        continue;
                    }
                    let n = (quad[1] - quad[0]).cross(quad[2] - quad[0]);
                    if n.dot(out) < 0.0 {
                        quad.reverse();
                    }
                    b.polygon(&quad);
                }
            }
        }
    }
    b.finish()
}

/// Axis-aligned cube of side `side` centred at `center`, `n × n` quads per face.
pub fn cube(center: Vec3, side: f64, n: usize) -> Result<TriangleMesh> {
    let h = side / 2.0;
    box_mesh(center - Vec3::new(h, h, h), center + Vec3::new(h, h, h), [n, n, n])
}

/// Axis-aligned box with `divs[a]` subdivisions along axis `a`.
pub fn box_mesh(min: Vec3, max: Vec3, divs: [usize; 3]) -> Result<TriangleMesh> {
    if divs.contains(&0) || !(max.x > min.x && max.y > min.y && max.z > min.z) {
        return Err(Error::validation("box needs positive extent and subdivisions"));
    }
    rectilinear_solid(
        &uniform(min.x, max.x, divs[0]),
        &uniform(min.y, max.y, divs[1]),
        &uniform(min.z, max.z, divs[2]),
        |_, _, _| true,
    )
}

/// Square screen of side `side` in the plane `z = center.z`, `n × n` quads.
pub fn square_screen(center: Vec3, side: f64, n: usize) -> Result<TriangleMesh> {
    if n == 0 || side <= 0.0 {
        return Err(Error::validation("screen needs positive side and subdivisions"));
    }
    let h = side / 2.0;
    let xs = uniform(center.x - h, center.x + h, n);
    let ys = uniform(center.y - h, center.y + h, n);
    let mut b = PolyBuilder::default();
    for j in 0..n {
        for i in 0..n {
            let z = center.z;
            b.polygon(&[
                Vec3::new(xs[i], ys[j], z),
                Vec3::new(xs[i + 1], ys[j], z),
                Vec3::new(xs[i + 1], ys[j + 1], z),
                Vec3::new(xs[i], ys[j + 1], z),
            ]);
        }
    }
    b.finish()
}

/// Geodesic sphere: icosahedron refined `level` times, `20·4^level` triangles,
/// vertices on the sphere of radius `radius` about the origin.
pub fn icosphere(radius: f64, level: usize) -> Result<TriangleMesh> {
    if radius <= 0.0 {
        return Err(Error::validation("sphere radius must be positive"));
    }
    let t = (1.0 + 5f64.sqrt()) / 2.0;
    let mut vertices: Vec<Vec3> = [
        (-1.0, t, 0.0),
        (1.0, t, 0.0),
        (-1.0, -t, 0.0),
        (1.0, -t, 0.0),
        (0.0, -1.0, t),
        (0.0, 1.0, t),
        (0.0, -1.0, -t),
        (0.0, 1.0, -t),
        (t, 0.0, -1.0),
        (t, 0.0, 1.0),
        (-t, 0.0, -1.0),
        (-t, 0.0, 1.0),
    ]
    .iter()
    .map(|&(x, y, z)| Vec3::new(x, y, z).normalized())
    .collect();
    let mut faces: Vec<[usize; 3]> = vec![
        [0, 11, 5],
        [0, 5, 1],
        [0, 1, 7],
        [0, 7, 10],
        [0, 10, 11],
        [1, 5, 9],
        [5, 11, 4],
        [11, 10, 2],
        [10, 7, 6],
        [7, 1, 8],
        [3, 9, 4],
        [3, 4, 2],
        [3, 2, 6],
        [3, 6, 8],
        [3, 8, 9],
        [4, 9, 5],
        [2, 4, 11],
        [6, 2, 10],
        [8, 6, 7],
        [9, 8, 1],
    ];
    for _ in 0..level {
        let mut cache: HashMap<(usize, usize), usize> = HashMap::new();
        let mut mid = |a: usize, b: usize, verts: &mut Vec<Vec3>| -> usize {
            let key = if a < b { (a, b) } else { (b, a) };
            *cache.entry(key).or_insert_with(|| {
                verts.push(((verts[a] + verts[b]) * 0.5).normalized());
                verts.len() - 1
            })
        };
        let mut next = Vec::with_capacity(faces.len() * 4);
        for &[a, b, c] in &faces {
            let ab = mid(a, b, &mut vertices);
            let bc = mid(b, c, &mut vertices);
            let ca = mid(c, a, &mut vertices);
            next.extend_from_slice(&[[a, ab, ca], [b, bc, ab], [c, ca, bc], [ab, bc, ca]]);
        }
        faces = next;
    }
    let vertices = vertices.into_iter().map(|v| v * radius).collect();
    TriangleMesh::new(vertices, faces, None)
}

/// Centred cube of side 1 whose top face (`z = 0.5`) carries a flat-bottomed
/// dent of depth `depth` over the central `0.5 × 0.5` patch.
///
/// `n` must be a multiple of 4 so the patch edges are grid lines.
pub fn dented_cube(depth: f64, n: usize) -> Result<TriangleMesh> {
    if !(depth > 0.0 && depth < 1.0) || n == 0 || !n.is_multiple_of(4) {
        return Err(Error::validation("dent needs 0 < depth < 1 and n a multiple of 4"));
    }
    let base = uniform(-0.5, 0.5, n);
    let zs = merge_breaks(&[&base, &[0.5 - depth]]);
    let (xs, ys) = (base.clone(), base);
    rectilinear_solid(&xs, &ys, &zs, |i, j, k| {
        let cx = 0.5 * (xs[i] + xs[i + 1]);
        let cy = 0.5 * (ys[j] + ys[j + 1]);
        let cz = 0.5 * (zs[k] + zs[k + 1]);
        !(cx.abs() < 0.25 && cy.abs() < 0.25 && cz > 0.5 - depth)
    })
}

/// Centred unit cube with a slot of width `width` and depth 0.25 cut across
/// the top face along the y axis.
pub fn notched_cube(width: f64, n: usize) -> Result<TriangleMesh> {
    if !(width > 0.0 && width < 1.0) || n == 0 || !n.is_multiple_of(4) {
        return Err(Error::validation("notch needs 0 < width < 1 and n a multiple of 4"));
    }
    let base = uniform(-0.5, 0.5, n);
    let xs = merge_breaks(&[&base, &[-width / 2.0, width / 2.0]]);
    let (ys, zs) = (base.clone(), base);
    rectilinear_solid(&xs, &ys, &zs, |i, _, k| {
        let cx = 0.5 * (xs[i] + xs[i + 1]);
        let cz = 0.5 * (zs[k] + zs[k + 1]);
        !(cx.abs() < width / 2.0 && cz > 0.25)
    })
}

/// Centred unit cube stretched along x to length `1 + t` (convex for all t > -1).
pub fn stretched_cube(t: f64, n: usize) -> Result<TriangleMesh> {
    if t <= -1.0 {
        return Err(Error::validation("stretch must keep positive length"));
    }
    box_mesh(
        Vec3::new(-0.5, -0.5, -0.5),
        Vec3::new(0.5 + t, 0.5, 0.5),
        [n, n, n],
    )
}

/// Unit cube `[0,1]³` with the edge at `y = z = 1` chamfered so the new facet has width `width`.
pub fn chamfered_cube(width: f64) -> Result<TriangleMesh> {
    if !(width > 0.0 && width < 1.0) {
        return Err(Error::validation("chamfer width must lie in (0, 1)"));
    }
    let c = width / std::f64::consts::SQRT_2;
    let v = Vec3::new;
    let mut b = PolyBuilder::default();
    b.polygon(&[v(0., 0., 0.), v(0., 1., 0.), v(1., 1., 0.), v(1., 0., 0.)]);
    b.polygon(&[v(0., 0., 0.), v(1., 0., 0.), v(1., 0., 1.), v(0., 0., 1.)]);
    b.polygon(&[v(0., 1., 0.), v(0., 1., 1. - c), v(1., 1., 1. - c), v(1., 1., 0.)]);
    b.polygon(&[v(0., 0., 1.), v(1., 0., 1.), v(1., 1. - c, 1.), v(0., 1. - c, 1.)]);
    b.polygon(&[v(0., 1. - c, 1.), v(1., 1. - c, 1.), v(1., 1., 1. - c), v(0., 1., 1. - c)]);
    b.polygon(&[v(0., 0., 0.), v(0., 0., 1.), v(0., 1. - c, 1.), v(0., 1., 1. - c), v(0., 1., 0.)]);
    b.polygon(&[v(1., 0., 0.), v(1., 1., 0.), v(1., 1., 1. - c), v(1., 1. - c, 1.), v(1., 0., 1.)]);
    b.finish()
}

/// Two open "cup" screens that together form the surface of the box
/// `[-h, h]³` minus an equatorial band of height `gap`.
pub fn split_box_screens(half: f64, gap: f64) -> Result<TriangleMesh> {
    if !(gap > 0.0 && gap < 2.0 * half) {
        return Err(Error::validation("gap must lie in (0, 2·half)"));
    }
    let g = gap / 2.0;
    let h = half;
    let v = Vec3::new;
    let mut b = PolyBuilder::default();
    for (z0, z1, cap) in [(-h, -g, -h), (g, h, h)] {
        b.polygon(&[v(-h, -h, cap), v(h, -h, cap), v(h, h, cap), v(-h, h, cap)]);
        b.polygon(&[v(-h, -h, z0), v(h, -h, z0), v(h, -h, z1), v(-h, -h, z1)]);
        b.polygon(&[v(h, -h, z0), v(h, h, z0), v(h, h, z1), v(h, -h, z1)]);
        b.polygon(&[v(h, h, z0), v(-h, h, z0), v(-h, h, z1), v(h, h, z1)]);
        b.polygon(&[v(-h, h, z0), v(-h, -h, z0), v(-h, -h, z1), v(-h, h, z1)]);
    }
    b.finish()
}

/// Uniform scaling about `center`.
pub fn scaled(mesh: &TriangleMesh, center: Vec3, factor: f64) -> Result<TriangleMesh> {
    mesh.map_vertices(|p| center + (p - center) * factor)
}
