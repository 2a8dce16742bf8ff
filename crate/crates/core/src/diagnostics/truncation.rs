//! Pointwise norm truncation `F_M(v) = v` if `‖v‖ ≤ M`, else `M v/‖v‖`, on
//! sampled real vector fields, and discrete checks of its curl.
//!
//! Where `‖v‖ < M` the curl is untouched. Where `‖v‖ > M` the chain rule gives
//! `∇(F_M∘v) = (M/‖v‖)(I − v̂v̂ᵀ)∇v`, which vanishes only when `∇v` maps into
//! the direction of `v` (radial fields are the standard example). The check
//! therefore compares against the chain-rule curl and separately reports the
//! size of the curl itself.

use crate::error::{Error, Result};
use crate::vec3::{Mat3, Vec3};

/// Real vector samples on the lattice `origin + h·(i, j, l)`, `x` fastest.
#[derive(Debug, Clone, PartialEq)]
pub struct FieldOnGrid {
    pub origin: Vec3,
    pub spacing: f64,
    pub dims: [usize; 3],
    pub values: Vec<Vec3>,
}

impl FieldOnGrid {
    pub fn sample(origin: Vec3, spacing: f64, dims: [usize; 3], f: impl Fn(Vec3) -> Vec3) -> Result<Self> {
        if !(spacing > 0.0) || dims.contains(&0) {
            return Err(Error::validation("grid needs positive spacing and nonzero dimensions"));
        }
        let mut values = Vec::with_capacity(dims[0] * dims[1] * dims[2]);
        for l in 0..dims[2] {
            for j in 0..dims[1] {
                for i in 0..dims[0] {
                    values.push(f(origin + Vec3::new(i as f64, j as f64, l as f64) * spacing));
                }
            }
        }
        if values.iter().any(|v| !(v.x.is_finite() && v.y.is_finite() && v.z.is_finite())) {
            return Err(Error::validation("field samples must be finite"));
        }
        Ok(Self {
            origin,
            spacing,
            dims,
            values,
        })
    }

    pub fn index(&self, i: usize, j: usize, l: usize) -> usize {
        i + self.dims[0] * (j + self.dims[1] * l)
    }

    pub fn point(&self, i: usize, j: usize, l: usize) -> Vec3 {
        self.origin + Vec3::new(i as f64, j as f64, l as f64) * self.spacing
    }

    /// Central-difference `∂_c v_r` at an interior node, indexed `[r][c]`.
    pub fn gradient(&self, i: usize, j: usize, l: usize) -> Mat3 {
        let h2 = 2.0 * self.spacing;
        let d = [
            (self.values[self.index(i + 1, j, l)] - self.values[self.index(i - 1, j, l)]) / h2,
            (self.values[self.index(i, j + 1, l)] - self.values[self.index(i, j - 1, l)]) / h2,
            (self.values[self.index(i, j, l + 1)] - self.values[self.index(i, j, l - 1)]) / h2,
        ];
        Mat3::from_cols(d[0], d[1], d[2])
    }

    pub fn curl(&self, i: usize, j: usize, l: usize) -> Vec3 {
        curl_of(&self.gradient(i, j, l))
    }

    fn interior(&self) -> impl Iterator<Item = (usize, usize, usize)> + '_ {
        let [nx, ny, nz] = self.dims;
        (1..nz.saturating_sub(1)).flat_map(move |l| {
            (1..ny.saturating_sub(1)).flat_map(move |j| (1..nx.saturating_sub(1)).map(move |i| (i, j, l)))
        })
    }

    /// Smallest and largest `‖v‖` over the node and its six stencil neighbours.
    fn stencil_norm_range(&self, i: usize, j: usize, l: usize) -> (f64, f64) {
        let ids = [
            self.index(i, j, l),
            self.index(i + 1, j, l),
            self.index(i - 1, j, l),
            self.index(i, j + 1, l),
            self.index(i, j - 1, l),
            self.index(i, j, l + 1),
            self.index(i, j, l - 1),
        ];
        ids.iter().map(|&n| self.values[n].norm()).fold((f64::INFINITY, 0.0), |(lo, hi), v| (lo.min(v), hi.max(v)))
    }
}

fn curl_of(d: &Mat3) -> Vec3 {
    let m = &d.0;
    Vec3::new(m[2][1] - m[1][2], m[0][2] - m[2][0], m[1][0] - m[0][1])
}

/// Relative slack below which a vector counts as already truncated; makes
/// `F_M∘F_M = F_M` hold bit for bit despite rounding in `M v/‖v‖`.
const ROUNDING_SLACK: f64 = 4.0 * f64::EPSILON;

/// `F_M` applied to a single vector.
pub fn truncate_vector(v: Vec3, m: f64) -> Vec3 {
    let n = v.norm();
    if n <= m * (1.0 + ROUNDING_SLACK) {
        v
    } else {
        v * (m / n)
    }
}

/// `F_M` applied pointwise.
pub fn truncate_field(v: &FieldOnGrid, m: f64) -> Result<FieldOnGrid> {
    if !(m > 0.0 && m.is_finite()) {
        return Err(Error::validation(format!("truncation level must be positive, got {m}")));
    }
    Ok(FieldOnGrid {
        values: v.values.iter().map(|&x| truncate_vector(x, m)).collect(),
        ..v.clone()
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TruncationCurlReport {
    /// Interior nodes whose whole stencil has `‖v‖ < M − τ`.
    pub inner_nodes: usize,
    /// `max ‖curl F_M v − curl v‖` there (0 by construction).
    pub inner_max_diff: f64,
    /// Interior nodes whose whole stencil has `‖v‖ > M + τ`.
    pub outer_nodes: usize,
    /// `max ‖curl F_M v‖` there.
    pub outer_max_curl: f64,
    /// `max ‖curl F_M v − curl[(M/‖v‖)(I − v̂v̂ᵀ)∇v]‖` there.
    pub outer_max_chain_rule_diff: f64,
    /// `max ‖curl v‖` over the outer nodes, for scale.
    pub outer_curl_scale: f64,
}

/// Compares the discrete curl of `F_M v` with the two regimes of the chain rule.
pub fn truncation_curl_check(v: &FieldOnGrid, m: f64, tau: f64) -> Result<TruncationCurlReport> {
    if !(tau >= 0.0) {
        return Err(Error::validation("stencil margin must be nonnegative"));
    }
    let t = truncate_field(v, m)?;
    let mut rep = TruncationCurlReport {
        inner_nodes: 0,
        inner_max_diff: 0.0,
        outer_nodes: 0,
        outer_max_curl: 0.0,
        outer_max_chain_rule_diff: 0.0,
        outer_curl_scale: 0.0,
    };
    for (i, j, l) in v.interior() {
        let (lo, hi) = v.stencil_norm_range(i, j, l);
        if hi < m - tau {
            rep.inner_nodes += 1;
            rep.inner_max_diff = rep.inner_max_diff.max((t.curl(i, j, l) - v.curl(i, j, l)).norm());
        } else if lo > m + tau {
            rep.outer_nodes += 1;
            let ct = t.curl(i, j, l);
            let val = v.values[v.index(i, j, l)];
            let n = val.norm();
            let u = val / n;
            let g = v.gradient(i, j, l);
            let proj = Mat3::from_cols(
                Vec3::X - u * u.x,
                Vec3::Y - u * u.y,
                Vec3::Z - u * u.z,
            );
            let chain = curl_of(&proj.mul_mat(&g).scale(m / n));
            rep.outer_max_curl = rep.outer_max_curl.max(ct.norm());
            rep.outer_max_chain_rule_diff = rep.outer_max_chain_rule_diff.max((ct - chain).norm());
            rep.outer_curl_scale = rep.outer_curl_scale.max(v.curl(i, j, l).norm());
        }
    }
    Ok(rep)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn swirl(p: Vec3) -> Vec3 {
        Vec3::new(-p.y + 0.3 * p.z, p.x + p.z * p.z, 0.5 * p.x * p.y + 1.0) * (1.0 + p.norm_sq())
    }

    fn grid(h: f64, f: impl Fn(Vec3) -> Vec3) -> FieldOnGrid {
        let n = (2.0 / h).round() as usize + 1;
        FieldOnGrid::sample(Vec3::new(-1.0, -1.0, -1.0), h, [n, n, n], f).unwrap()
    }

    #[test]
    fn caps_the_norm() {
        assert_eq!(truncate_vector(Vec3::new(3.0, 0.0, 0.0), 2.0), Vec3::new(2.0, 0.0, 0.0));
        let v = grid(0.25, swirl);
        let t = truncate_field(&v, 2.0).unwrap();
        for (a, b) in v.values.iter().zip(&t.values) {
            assert!(b.norm() <= 2.0 * (1.0 + 1e-15));
            if a.norm() <= 2.0 {
                assert_eq!(a, b);
            }
        }
        assert_eq!(truncate_field(&t, 2.0).unwrap(), t);
        let big = truncate_field(&v, 1e9).unwrap();
        assert_eq!(big, v);
        assert!(truncate_field(&v, 0.0).is_err());
    }

    #[test]
    fn radial_field_has_zero_curl_where_truncated() {
        // v = (1 + ‖x‖²)(x − c); F_M v = M(x − c)/‖x − c‖ is a gradient away from c
        let c = Vec3::new(0.05, -0.03, 0.02);
        let curls: Vec<f64> = [0.1, 0.05]
            .iter()
            .map(|&h| {
                let v = grid(h, |p| (p - c) * (1.0 + p.norm_sq()));
                let r = truncation_curl_check(&v, 0.6, 0.2).unwrap();
                assert!(r.inner_nodes > 0 && r.outer_nodes > 0);
                assert_eq!(r.inner_max_diff, 0.0);
                assert!(r.outer_max_curl < 2.0 * h * h, "h={h}: {r:?}");
                r.outer_max_curl
            })
            .collect();
        assert!(curls[0] / curls[1] > 2.5, "{curls:?}");
    }

    #[test]
    fn general_field_follows_chain_rule() {
        let errs: Vec<f64> = [0.1, 0.05, 0.025]
            .iter()
            .map(|&h| {
                let r = truncation_curl_check(&grid(h, swirl), 2.0, 0.4).unwrap();
                assert_eq!(r.inner_max_diff, 0.0);
                // the truncated curl is not zero for non-radial fields
                assert!(r.outer_max_curl > 0.1);
                r.outer_max_chain_rule_diff
            })
            .collect();
        // second order, approached from below on these coarse grids
        assert!(errs[0] / errs[1] > 2.5 && errs[1] / errs[2] > 3.3, "{errs:?}");
    }

    proptest! {
        #[test]
        fn truncation_is_idempotent(x in prop::array::uniform3(-10.0f64..10.0), m in 0.01f64..5.0) {
            let v = Vec3::from_array(x);
            let once = truncate_vector(v, m);
            prop_assert!(once.norm() <= m * (1.0 + 1e-15));
            prop_assert_eq!(truncate_vector(once, m), once);
        }
    }
}
