//! Voxel check of uniform exterior connectedness at a single scale.
//!
//! The exterior eroded by `s` is flood-filled on a grid of spacing `res`;
//! the check passes when every centre of an exterior ball of radius `t`
//! lies in the unbounded component. This is a finite-resolution
//! approximation and is labelled as such in the result.

use std::collections::VecDeque;

use super::query::SurfaceIndex;
use super::scatterer::Scatterer;
use crate::error::{Error, Result};
use crate::par;
use crate::vec3::Vec3;

#[derive(Debug, Clone, PartialEq)]
pub struct ConnectednessReport {
    pub connected: bool,
    /// Number of eroded components containing centres of radius-`t` balls.
    pub components_with_balls: usize,
    /// A ball centre outside the unbounded component, when the check fails.
    pub witness: Option<Vec3>,
    pub resolution: f64,
    pub approximate: bool,
}

pub fn exterior_connectedness(
    scatterer: Option<&Scatterer>,
    t: f64,
    s: f64,
    res: f64,
) -> Result<ConnectednessReport> {
    if !(s > 0.0 && s <= t) {
        return Err(Error::validation(format!("need 0 < s <= t, got s = {s}, t = {t}")));
    }
    if !(res > 0.0) || res > s / 4.0 {
        return Err(Error::validation(format!(
            "resolution {res} too coarse for erosion scale {s} (need res <= s/4)"
        )));
    }
    let Some(sc) = scatterer else {
        return Ok(ConnectednessReport {
            connected: true,
            components_with_balls: 1,
            witness: None,
            resolution: res,
            approximate: true,
        });
    };
    let bbox = sc.mesh().bounding_box().expanded(t + 3.0 * res);
    let extent = bbox.max - bbox.min;
    let dims = [
        (extent.x / res).ceil() as usize + 1,
        (extent.y / res).ceil() as usize + 1,
        (extent.z / res).ceil() as usize + 1,
    ];
    let n = dims[0] * dims[1] * dims[2];
    let center = |idx: usize| {
        let i = idx % dims[0];
        let j = (idx / dims[0]) % dims[1];
        let k = idx / (dims[0] * dims[1]);
        bbox.min + Vec3::new(i as f64, j as f64, k as f64) * res
    };
    let index = SurfaceIndex::new(sc.mesh());
    let dist = par::map_range(n, |idx| sc.distance_to_set(&index, center(idx)));

    let mut label = vec![usize::MAX; n];
    let mut n_labels = 0;
    for seed in 0..n {
        if label[seed] != usize::MAX || dist[seed] <= s {
            continue;
        }
        let id = n_labels;
        n_labels += 1;
        label[seed] = id;
        let mut queue = VecDeque::from([seed]);
        while let Some(v) = queue.pop_front() {
            let i = v % dims[0];
            let j = (v / dims[0]) % dims[1];
            let k = v / (dims[0] * dims[1]);
            let mut visit = |w: usize| {
                if label[w] == usize::MAX && dist[w] > s {
                    label[w] = id;
                    queue.push_back(w);
                }
            };
            if i > 0 {
                visit(v - 1);
            }
            if i + 1 < dims[0] {
                visit(v + 1);
            }
            if j > 0 {
                visit(v - dims[0]);
            }
            if j + 1 < dims[1] {
                visit(v + dims[0]);
            }
            if k > 0 {
                visit(v - dims[0] * dims[1]);
            }
            if k + 1 < dims[2] {
                visit(v + dims[0] * dims[1]);
            }
        }
    }
    // voxel 0 is a bounding-box corner, at distance > t from the scatterer
    let outer = label[0];
    let mut seen = std::collections::BTreeSet::new();
    let mut witness = None;
    for idx in 0..n {
        if dist[idx] >= t {
            seen.insert(label[idx]);
            if label[idx] != outer && witness.is_none() {
                witness = Some(center(idx));
            }
        }
    }
    Ok(ConnectednessReport {
        connected: witness.is_none(),
        components_with_balls: seen.len(),
        witness,
        resolution: res,
        approximate: true,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::generators;

    #[test]
    fn convex_cube_is_connected() {
        let a = Scatterer::with_default_params(generators::cube(Vec3::ZERO, 1.0, 1).unwrap()).unwrap();
        let r = exterior_connectedness(Some(&a), 0.3, 0.2, 0.05).unwrap();
        assert!(r.connected);
        assert_eq!(r.components_with_balls, 1);
        assert!(r.approximate);
    }

    #[test]
    fn near_closed_box_is_disconnected_when_gap_is_eroded() {
        let a = Scatterer::with_default_params(generators::split_box_screens(0.5, 0.3).unwrap()).unwrap();
        let closed = exterior_connectedness(Some(&a), 0.25, 0.2, 0.05).unwrap();
        assert!(!closed.connected);
        let w = closed.witness.unwrap();
        assert!(w.x.abs() < 0.5 && w.y.abs() < 0.5 && w.z.abs() < 0.5);
        // erosion below half the gap keeps the inside reachable
        let open = exterior_connectedness(Some(&a), 0.25, 0.08, 0.02).unwrap();
        assert!(open.connected, "{open:?}");
    }

    #[test]
    fn empty_and_bad_resolution() {
        assert!(exterior_connectedness(None, 0.2, 0.1, 0.01).unwrap().connected);
        let a = Scatterer::with_default_params(generators::cube(Vec3::ZERO, 1.0, 1).unwrap()).unwrap();
        assert!(exterior_connectedness(Some(&a), 0.2, 0.1, 0.05).is_err());
        assert!(exterior_connectedness(Some(&a), 0.1, 0.2, 0.01).is_err());
    }
}
