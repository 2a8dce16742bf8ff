//! Sampled sup-distances between scatterers.
//!
//! Three quantities are computed: the Hausdorff distance between the sets
//! (`d_tilde`), between their boundaries (`d_hat`), and the one-sided
//! "exposed boundary" distance `d`, which only looks at the part of each
//! boundary lying outside the other scatterer. Surfaces are sampled at
//! spacing `res` and point-to-surface distances are exact, so every value
//! is within `res` of the true one.

use super::query::{sample_surface, SurfaceIndex};
use super::scatterer::Scatterer;
use crate::error::{Error, Result};
use crate::par;
use crate::vec3::Vec3;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DistanceReport {
    pub d: f64,
    pub d_hat: f64,
    pub d_tilde: f64,
    pub sampling_resolution: f64,
}

fn check_res(res: f64) -> Result<()> {
    if res > 0.0 && res.is_finite() {
        Ok(())
    } else {
        Err(Error::validation(format!("sampling resolution must be positive, got {res}")))
    }
}

fn same_geometry(a: &Scatterer, b: &Scatterer) -> bool {
    a.mesh().vertices() == b.mesh().vertices() && a.mesh().triangles() == b.mesh().triangles()
}

fn max_of(values: Vec<f64>) -> f64 {
    values.into_iter().fold(0.0, f64::max)
}

/// `sup_{x ∈ ∂A} dist(x, ∂B)` over surface samples of A.
fn directed_boundary(a: &Scatterer, b: &Scatterer, res: f64) -> f64 {
    let index = SurfaceIndex::new(b.mesh());
    let pts = sample_surface(a.mesh(), res);
    max_of(par::map(&pts, |&p| index.distance(p)))
}

/// Hausdorff distance between the boundary surfaces.
pub fn hausdorff_hat(a: &Scatterer, b: &Scatterer, res: f64) -> Result<f64> {
    check_res(res)?;
    if same_geometry(a, b) {
        return Ok(0.0);
    }
    Ok(directed_boundary(a, b, res).max(directed_boundary(b, a, res)))
}

/// `sup_{x ∈ A} dist(x, B)`: boundary samples plus a branch-and-bound octree
/// over the solid interior of A.
fn directed_set(a: &Scatterer, b: &Scatterer, res: f64) -> f64 {
    let index_b = SurfaceIndex::new(b.mesh());
    let pts = sample_surface(a.mesh(), res);
    let mut best = max_of(par::map(&pts, |&p| b.distance_to_set(&index_b, p)));
    if a.solid_triangles().is_empty() {
        return best;
    }
    let index_a = SurfaceIndex::new(a.mesh());
    let bbox = a.mesh().bounding_box();
    let side = (bbox.max - bbox.min).x.max((bbox.max - bbox.min).y).max((bbox.max - bbox.min).z);
    let mut stack = vec![(bbox.center(), side / 2.0)];
    while let Some((c, half)) = stack.pop() {
        let radius = half * 3f64.sqrt();
        let inside = a.inside_solid(c);
        if !inside && index_a.distance(c) > radius {
            continue;
        }
        let surface_b = index_b.distance(c);
        let in_b = b.inside_solid(c);
        // upper bound of dist(·, B) over the cell; zero when the cell lies inside B
        let upper = if in_b { (radius - surface_b).max(0.0) } else { surface_b + radius };
        if upper <= best {
            continue;
        }
        if radius <= res / 2.0 {
            if inside && !in_b {
                best = best.max(surface_b);
            }
            continue;
        }
        let q = half / 2.0;
        for dx in [-q, q] {
            for dy in [-q, q] {
                for dz in [-q, q] {
                    stack.push((c + Vec3::new(dx, dy, dz), q));
                }
            }
        }
    }
    best
}

/// Hausdorff distance between the scatterers as sets (solid interiors included).
pub fn hausdorff_tilde(a: &Scatterer, b: &Scatterer, res: f64) -> Result<f64> {
    check_res(res)?;
    if same_geometry(a, b) {
        return Ok(0.0);
    }
    Ok(directed_set(a, b, res).max(directed_set(b, a, res)))
}

/// `sup_{x ∈ ∂A \ B} dist(x, ∂B)`. Membership in B is decided by winding
/// number for solid parts and by surface distance `<= res` for open parts.
fn directed_exposed(a: &Scatterer, b: &Scatterer, res: f64) -> f64 {
    let index_b = SurfaceIndex::new(b.mesh());
    let has_open = b.solid_triangles().len() < b.mesh().num_triangles();
    let pts = sample_surface(a.mesh(), res);
    max_of(par::map(&pts, |&p| {
        let dist = index_b.distance(p);
        let member = b.inside_solid(p) || (has_open && dist <= res);
        if member {
            0.0
        } else {
            dist
        }
    }))
}

pub fn distance_d(a: &Scatterer, b: &Scatterer, res: f64) -> Result<f64> {
    check_res(res)?;
    if same_geometry(a, b) {
        return Ok(0.0);
    }
    Ok(directed_exposed(a, b, res).max(directed_exposed(b, a, res)))
}

pub fn distance_report(a: &Scatterer, b: &Scatterer, res: f64) -> Result<DistanceReport> {
    Ok(DistanceReport {
        d: distance_d(a, b, res)?,
        d_hat: hausdorff_hat(a, b, res)?,
        d_tilde: hausdorff_tilde(a, b, res)?,
        sampling_resolution: res,
    })
}

/// Tabulated nondecreasing modulus `s ↦ δ(s)`, piecewise linear between
/// samples and constant beyond the last one.
#[derive(Debug, Clone, PartialEq)]
pub struct DeltaTable {
    s: Vec<f64>,
    delta: Vec<f64>,
}

impl DeltaTable {
    pub fn new(s: Vec<f64>, delta: Vec<f64>) -> Result<Self> {
        if s.is_empty() || s.len() != delta.len() {
            return Err(Error::validation("delta table must be non-empty with matching columns"));
        }
        if s.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::validation("delta table abscissae must be strictly increasing"));
        }
        if delta.windows(2).any(|w| w[1] < w[0]) {
            return Err(Error::validation("delta table must be nondecreasing"));
        }
        Ok(Self { s, delta })
    }

    /// Samples `f` at `n` uniform points on `[0, s_max]`.
    pub fn from_fn(s_max: f64, n: usize, f: impl Fn(f64) -> f64) -> Result<Self> {
        if n < 2 {
            return Err(Error::validation("delta table needs at least two samples"));
        }
        let s: Vec<f64> = (0..n).map(|i| s_max * i as f64 / (n - 1) as f64).collect();
        let delta = s.iter().map(|&x| f(x)).collect();
        Self::new(s, delta)
    }
}

/// `min{ sup{s : δ(s) ≤ t}, 2R₀ }` on the tabulated modulus.
pub fn delta_inverse(t: f64, table: &DeltaTable, r0: f64) -> Result<f64> {
    if !(t > 0.0) {
        return Err(Error::validation("delta_inverse needs t > 0"));
    }
    let cap = 2.0 * r0;
    // number of samples with δ ≤ t; the table is sorted so this is a bisection
    let n_le = table.delta.partition_point(|&d| d <= t);
    if n_le == table.delta.len() {
        return Ok(cap);
    }
    if n_le == 0 {
        return Ok(0.0f64.min(cap));
    }
    let i = n_le - 1;
    let (s0, s1) = (table.s[i], table.s[i + 1]);
    let (d0, d1) = (table.delta[i], table.delta[i + 1]);
    let s = s0 + (t - d0) / (d1 - d0) * (s1 - s0);
    Ok(s.min(cap))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::generators;
    use crate::geometry::query::point_triangle_distance;

    fn obstacle(m: crate::geometry::TriangleMesh) -> Scatterer {
        Scatterer::with_default_params(m).unwrap()
    }

    #[test]
    fn identity_is_exactly_zero() {
        let a = obstacle(generators::cube(Vec3::ZERO, 1.0, 2).unwrap());
        let r = distance_report(&a, &a.clone(), 0.05).unwrap();
        assert_eq!((r.d, r.d_hat, r.d_tilde), (0.0, 0.0, 0.0));
    }

    #[test]
    fn translated_cube() {
        let res = 0.02;
        let a = obstacle(generators::cube(Vec3::ZERO, 1.0, 1).unwrap());
        let b = obstacle(generators::cube(Vec3::new(0.2, 0.0, 0.0), 1.0, 1).unwrap());
        let r = distance_report(&a, &b, res).unwrap();
        for v in [r.d, r.d_hat, r.d_tilde] {
            assert!((v - 0.2).abs() <= res, "{r:?}");
        }
    }

    /// Independent brute force: dense samples of both surfaces, nearest
    /// neighbours by exhaustive point-triangle distance.
    fn brute_hat(a: &Scatterer, b: &Scatterer, n: usize) -> f64 {
        let sample = |m: &crate::geometry::TriangleMesh| {
            let mut pts = Vec::new();
            for t in 0..m.num_triangles() {
                let [p, q, r] = m.corners(t);
                for i in 0..=n {
                    for j in 0..=(n - i) {
                        pts.push(p + (q - p) * (i as f64 / n as f64) + (r - p) * (j as f64 / n as f64));
                    }
                }
            }
            pts
        };
        let directed = |x: &Scatterer, y: &Scatterer| {
            sample(x.mesh())
                .into_iter()
                .map(|p| {
                    (0..y.mesh().num_triangles())
                        .map(|t| point_triangle_distance(p, y.mesh().corners(t)))
                        .fold(f64::INFINITY, f64::min)
                })
                .fold(0.0, f64::max)
        };
        directed(a, b).max(directed(b, a))
    }

    #[test]
    fn scaled_cube_tilde() {
        // d̃ of a unit cube and its 1.1 scaling about the centre: 0.05·√3 (corner to corner)
        let res = 0.01;
        let base = generators::cube(Vec3::ZERO, 1.0, 1).unwrap();
        let big = generators::scaled(&base, Vec3::ZERO, 1.1).unwrap();
        let (a, b) = (obstacle(base), obstacle(big));
        let dt = hausdorff_tilde(&a, &b, res).unwrap();
        let expected = 0.05 * 3f64.sqrt();
        assert!((dt - expected).abs() <= res, "{dt} vs {expected}");
        let brute = brute_hat(&a, &b, 40);
        assert!((brute - expected).abs() < 1e-9);
    }

    #[test]
    fn dented_cube_hat() {
        let res = 0.01;
        let a = obstacle(generators::cube(Vec3::ZERO, 1.0, 4).unwrap());
        let b = obstacle(generators::dented_cube(0.1, 4).unwrap());
        let h = hausdorff_hat(&a, &b, res).unwrap();
        let brute = brute_hat(&a, &b, 24);
        assert!((brute - 0.1).abs() < 1e-9, "brute {brute}");
        assert!((h - 0.1).abs() <= res, "{h}");
    }

    #[test]
    fn d_bounded_by_hat() {
        let res = 0.02;
        let a = obstacle(generators::cube(Vec3::ZERO, 1.0, 2).unwrap());
        let b = obstacle(generators::notched_cube(0.2, 4).unwrap());
        let r = distance_report(&a, &b, res).unwrap();
        assert!(r.d <= r.d_hat + 2.0 * res);
        assert!(r.d_tilde >= 0.0);
    }

    #[test]
    fn tilde_sees_interior_points() {
        // a solid cube against a hollow screen box: the cube's centre is far from the screen
        let res = 0.02;
        let a = obstacle(generators::cube(Vec3::ZERO, 1.0, 1).unwrap());
        let b = Scatterer::with_default_params(generators::split_box_screens(0.5, 0.02).unwrap()).unwrap();
        let dt = hausdorff_tilde(&a, &b, res).unwrap();
        assert!((dt - 0.5).abs() <= res, "{dt}");
        let dh = hausdorff_hat(&a, &b, res).unwrap();
        assert!(dh < 0.05);
    }

    #[test]
    fn delta_inverse_examples() {
        let id = DeltaTable::from_fn(4.0, 4001, |s| s).unwrap();
        assert!((delta_inverse(0.3, &id, 1.0).unwrap() - 0.3).abs() < 1e-12);
        assert_eq!(delta_inverse(10.0, &id, 1.0).unwrap(), 2.0);
        let sq = DeltaTable::from_fn(1.0, 1001, |s| s * s).unwrap();
        assert!((delta_inverse(0.04, &sq, 1.0).unwrap() - 0.2).abs() < 1e-6);
        assert!(delta_inverse(0.0, &sq, 1.0).is_err());
        assert!(DeltaTable::new(vec![], vec![]).is_err());
    }

    #[test]
    fn delta_inverse_takes_right_end_of_plateaus() {
        let t = DeltaTable::new(vec![0.0, 1.0, 2.0, 3.0], vec![0.0, 0.5, 0.5, 1.0]).unwrap();
        assert_eq!(delta_inverse(0.5, &t, 10.0).unwrap(), 2.0);
    }
}
