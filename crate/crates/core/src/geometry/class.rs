//! Per-cell check of the minimum feature size `h` and an advisory corner
//! angle check against the Lipschitz constant.
//!
//! A cell is a facet group. Its boundary loops are traced from the group's
//! boundary edges and consecutive collinear edges are merged into polygon
//! sides. The feature size of the cell is the smallest of: side lengths,
//! distances between non-adjacent sides, and distances from a corner to a
//! side not incident to it.

use std::collections::BTreeMap;

use super::mesh::{edge_key, TriangleMesh};
use super::scatterer::ClassParams;
use crate::error::{Error, Result};
use crate::vec3::Vec3;

const COLLINEAR_TOL: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq)]
pub struct CellReport {
    pub group: usize,
    pub feature_size: f64,
    /// Smallest and largest interior corner angle (radians).
    pub min_angle: f64,
    pub max_angle: f64,
    pub meets_h: bool,
    pub angles_ok: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ClassReport {
    pub cells: Vec<CellReport>,
    /// Every cell meets the feature-size bound.
    pub pass: bool,
    /// Every corner angle is compatible with the Lipschitz constant (advisory only).
    pub lipschitz_advisory_ok: bool,
}

impl ClassReport {
    pub fn failing_cells(&self) -> impl Iterator<Item = &CellReport> {
        self.cells.iter().filter(|c| !c.meets_h)
    }
}

pub fn validate_class_membership(mesh: &TriangleMesh, params: &ClassParams) -> Result<ClassReport> {
    if !(params.h > 0.0) || !(params.lipschitz > 0.0) {
        return Err(Error::validation("class parameters h and L must be positive"));
    }
    let min_angle = 2.0 * (1.0 / params.lipschitz).atan();
    let max_angle = 2.0 * std::f64::consts::PI - min_angle;
    let mut cells = Vec::with_capacity(mesh.num_groups());
    for g in 0..mesh.num_groups() {
        let loops = boundary_loops(mesh, g)?;
        let feature = feature_size(&loops);
        let (lo, hi) = angle_range(&loops.polys, loops.normal);
        cells.push(CellReport {
            group: g,
            feature_size: feature,
            min_angle: lo,
            max_angle: hi,
            meets_h: feature >= params.h * (1.0 - 1e-9),
            angles_ok: lo >= min_angle - 1e-9 && hi <= max_angle + 1e-9,
        });
    }
    Ok(ClassReport {
        pass: cells.iter().all(|c| c.meets_h),
        lipschitz_advisory_ok: cells.iter().all(|c| c.angles_ok),
        cells,
    })
}

struct Loops {
    /// Corners of each merged boundary polygon, in traversal order with the cell on the left.
    polys: Vec<Vec<Vec3>>,
    normal: Vec3,
}

fn boundary_loops(mesh: &TriangleMesh, group: usize) -> Result<Loops> {
    let tris: Vec<usize> = (0..mesh.num_triangles())
        .filter(|&t| mesh.facet_group()[t] == group)
        .collect();
    let normal = mesh.normal(tris[0]);
    let mut count: BTreeMap<_, usize> = BTreeMap::new();
    for &t in &tris {
        let tri = mesh.triangles()[t];
        for k in 0..3 {
            *count.entry(edge_key(tri[k], tri[(k + 1) % 3])).or_default() += 1;
        }
    }
    // directed boundary edges, oriented so the cell lies to the left about `normal`
    let mut next: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
    let mut n_edges = 0;
    for &t in &tris {
        let tri = mesh.triangles()[t];
        let flip = mesh.normal(t).dot(normal) < 0.0;
        for k in 0..3 {
            let (a, b) = (tri[k], tri[(k + 1) % 3]);
            if count[&edge_key(a, b)] == 1 {
                let (a, b) = if flip { (b, a) } else { (a, b) };
                next.entry(a).or_default().push(b);
                n_edges += 1;
            }
        }
    }
    let mut polys = Vec::new();
    let mut used = 0;
    while let Some((&start, _)) = next.iter().find(|(_, v)| !v.is_empty()) {
        let mut chain = vec![start];
        let mut cur = start;
        loop {
            let Some(nb) = next.get_mut(&cur).and_then(|v| v.pop()) else {
                return Err(Error::validation(format!("cell {group} has an unclosed boundary")));
            };
            used += 1;
            if nb == start {
                break;
            }
            chain.push(nb);
            cur = nb;
        }
        polys.push(merge_collinear(chain.iter().map(|&i| mesh.vertices()[i]).collect()));
    }
    debug_assert_eq!(used, n_edges);
    Ok(Loops { polys, normal })
}

fn merge_collinear(pts: Vec<Vec3>) -> Vec<Vec3> {
    let n = pts.len();
    let keep: Vec<Vec3> = (0..n)
        .filter(|&i| {
            let a = pts[(i + n - 1) % n];
            let b = pts[i];
            let c = pts[(i + 1) % n];
            let u = b - a;
            let v = c - b;
            u.cross(v).norm() > COLLINEAR_TOL * u.norm() * v.norm() || u.dot(v) < 0.0
        })
        .map(|i| pts[i])
        .collect();
    if keep.len() >= 3 {
        keep
    } else {
        pts
    }
}

fn feature_size(loops: &Loops) -> f64 {
    let mut segs = Vec::new();
    for (li, p) in loops.polys.iter().enumerate() {
        for i in 0..p.len() {
            segs.push((li, i, p.len(), p[i], p[(i + 1) % p.len()]));
        }
    }
    let mut best = f64::INFINITY;
    for &(_, _, _, a, b) in &segs {
        best = best.min(a.dist(b));
    }
    for (x, &(la, ia, na, a0, a1)) in segs.iter().enumerate() {
        for &(lb, ib, _, b0, b1) in &segs[x + 1..] {
            let adjacent = la == lb && (ib == (ia + 1) % na || ia == (ib + 1) % na);
            if !adjacent {
                best = best.min(segment_distance(a0, a1, b0, b1));
            }
        }
        for (li, p) in loops.polys.iter().enumerate() {
            for (j, &v) in p.iter().enumerate() {
                let incident = li == la && (j == ia || j == (ia + 1) % na);
                if !incident {
                    best = best.min(segment_distance(a0, a1, v, v));
                }
            }
        }
    }
    best
}

fn angle_range(polys: &[Vec<Vec3>], normal: Vec3) -> (f64, f64) {
    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    for p in polys {
        let n = p.len();
        for i in 0..n {
            let u = p[i] - p[(i + n - 1) % n];
            let v = p[(i + 1) % n] - p[i];
            let turn = normal.dot(u.cross(v)).atan2(u.dot(v));
            let interior = std::f64::consts::PI - turn;
            lo = lo.min(interior);
            hi = hi.max(interior);
        }
    }
    (lo, hi)
}

/// Distance between segments `[p1, q1]` and `[p2, q2]` (either may be a point).
pub fn segment_distance(p1: Vec3, q1: Vec3, p2: Vec3, q2: Vec3) -> f64 {
    let d1 = q1 - p1;
    let d2 = q2 - p2;
    let r = p1 - p2;
    let a = d1.norm_sq();
    let e = d2.norm_sq();
    let f = d2.dot(r);
    let eps = 1e-300;
    let (s, t) = if a <= eps && e <= eps {
        (0.0, 0.0)
    } else if a <= eps {
        (0.0, (f / e).clamp(0.0, 1.0))
    } else {
        let c = d1.dot(r);
        if e <= eps {
            ((-c / a).clamp(0.0, 1.0), 0.0)
        } else {
            let b = d1.dot(d2);
            let denom = a * e - b * b;
            let mut s = if denom > 1e-14 * a * e {
                ((b * f - c * e) / denom).clamp(0.0, 1.0)
            } else {
                0.0
            };
            let mut t = (b * s + f) / e;
            if t < 0.0 {
                t = 0.0;
                s = (-c / a).clamp(0.0, 1.0);
            } else if t > 1.0 {
                t = 1.0;
                s = ((b - c) / a).clamp(0.0, 1.0);
            }
            (s, t)
        }
    };
    (p1 + d1 * s).dist(p2 + d2 * t)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::generators;

    fn params(h: f64) -> ClassParams {
        ClassParams {
            h,
            ..ClassParams::default()
        }
    }

    #[test]
    fn cube_cells_have_unit_feature() {
        let m = generators::cube(Vec3::ZERO, 1.0, 3).unwrap();
        let r = validate_class_membership(&m, &params(0.5)).unwrap();
        assert_eq!(r.cells.len(), 6);
        assert!(r.pass);
        for c in &r.cells {
            assert!((c.feature_size - 1.0).abs() < 1e-12);
            assert!((c.min_angle - std::f64::consts::FRAC_PI_2).abs() < 1e-12);
        }
        assert!(r.lipschitz_advisory_ok);
    }

    #[test]
    fn sliver_chamfer_fails() {
        let w = 1e-3;
        let m = generators::chamfered_cube(w).unwrap();
        let r = validate_class_membership(&m, &params(0.25)).unwrap();
        assert!(!r.pass);
        let worst = r.cells.iter().map(|c| c.feature_size).fold(f64::INFINITY, f64::min);
        assert!((worst - w).abs() < 1e-9, "{worst}");
        assert!(r.failing_cells().count() >= 1);
    }

    #[test]
    fn screen_boundary_is_inclusive() {
        let m = generators::square_screen(Vec3::ZERO, 1.0, 4).unwrap();
        assert!(validate_class_membership(&m, &params(1.0)).unwrap().pass);
        assert!(!validate_class_membership(&m, &params(1.0 + 1e-6)).unwrap().pass);
    }

    #[test]
    fn reflex_corner_detected() {
        // the notch floor meets the top face at reflex corners on the side cells
        let m = generators::notched_cube(0.5, 4).unwrap();
        let r = validate_class_membership(&m, &params(0.1)).unwrap();
        let hi = r.cells.iter().map(|c| c.max_angle).fold(0.0, f64::max);
        assert!((hi - 1.5 * std::f64::consts::PI).abs() < 1e-9, "{hi}");
    }

    #[test]
    fn segment_distance_cases() {
        let v = Vec3::new;
        assert!((segment_distance(v(0., 0., 0.), v(1., 0., 0.), v(0., 1., 0.), v(1., 1., 0.)) - 1.0).abs() < 1e-15);
        assert!((segment_distance(v(0., 0., 0.), v(1., 0., 0.), v(2., 0., 0.), v(3., 0., 0.)) - 1.0).abs() < 1e-15);
        assert!(segment_distance(v(-1., 0., 0.), v(1., 0., 0.), v(0., -1., 0.), v(0., 1., 0.)) < 1e-15);
        assert!((segment_distance(v(0., 0., 0.), v(0., 0., 0.), v(0., 2., 1.), v(0., 2., 1.)) - 5f64.sqrt()).abs() < 1e-15);
    }
}
