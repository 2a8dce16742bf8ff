//! Changes of variables for `H(curl)` fields and coefficient tensors, and the
//! reflection rule for electromagnetic solutions.
//!
//! For `T` with Jacobian `J = DT` the covariant pullback is
//! `v(x) = Jᵀ(x) u(T(x))`, and curls transform as
//! `(∇∧u)(y) = (J/det J · ∇∧v)(T⁻¹(y))`.

use crate::error::{Error, Result};
use crate::geometry::Plane;
use crate::incident::EMSample;
use crate::vec3::{CVec3, Mat3, Vec3};

use super::fd;

type PointMap = Box<dyn Fn(Vec3) -> Vec3 + Send + Sync>;
type JacobianFn = Box<dyn Fn(Vec3) -> Mat3 + Send + Sync>;

/// Bi-Lipschitz map with its inverse and (optionally analytic) Jacobian.
pub struct BiLipschitzMap {
    forward: PointMap,
    inverse: PointMap,
    jacobian: Option<JacobianFn>,
    lipschitz: f64,
    /// Step of the finite-difference Jacobian when no analytic one is given.
    pub fd_step: f64,
}

impl std::fmt::Debug for BiLipschitzMap {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("BiLipschitzMap")
            .field("lipschitz", &self.lipschitz)
            .field("analytic_jacobian", &self.jacobian.is_some())
            .finish()
    }
}

impl BiLipschitzMap {
    pub fn new(
        forward: impl Fn(Vec3) -> Vec3 + Send + Sync + 'static,
        inverse: impl Fn(Vec3) -> Vec3 + Send + Sync + 'static,
        jacobian: Option<JacobianFn>,
        lipschitz: f64,
    ) -> Result<Self> {
        if !(lipschitz >= 1.0 && lipschitz.is_finite()) {
            return Err(Error::validation(format!("Lipschitz constant must be ≥ 1, got {lipschitz}")));
        }
        Ok(Self {
            forward: Box::new(forward),
            inverse: Box::new(inverse),
            jacobian,
            lipschitz,
            fd_step: 1e-5,
        })
    }

    /// `x ↦ A x + b` for invertible `A`.
    pub fn affine(a: Mat3, b: Vec3) -> Result<Self> {
        let inv = a
            .inverse()
            .ok_or_else(|| Error::validation("affine map matrix is singular"))?;
        let norm = |m: &Mat3| m.0.iter().flatten().map(|v| v * v).sum::<f64>().sqrt();
        let l = norm(&a).max(norm(&inv)).max(1.0);
        Self::new(
            move |x| a.mul_vec(x) + b,
            move |y| inv.mul_vec(y - b),
            Some(Box::new(move |_| a)),
            l,
        )
    }

    pub fn scaling(s: f64) -> Result<Self> {
        Self::affine(Mat3::scaled(s), Vec3::ZERO)
    }

    pub fn rotation(axis: Vec3, angle: f64) -> Result<Self> {
        Self::affine(Mat3::rotation(axis, angle), Vec3::ZERO)
    }

    pub fn reflection(plane: &Plane) -> Result<Self> {
        let j = plane.reflection_matrix();
        let p = *plane;
        Self::new(move |x| p.reflect_point(x), move |y| p.reflect_point(y), Some(Box::new(move |_| j)), 1.0)
    }

    /// `T(x) = x + a sin(x₂) e₁`, bi-Lipschitz for `|a| < 1`.
    pub fn sine_shear(a: f64) -> Result<Self> {
        if !(a.abs() < 1.0) {
            return Err(Error::validation(format!("shear amplitude must satisfy |a| < 1, got {a}")));
        }
        Self::new(
            move |x| Vec3::new(x.x + a * x.y.sin(), x.y, x.z),
            move |y| Vec3::new(y.x - a * y.y.sin(), y.y, y.z),
            Some(Box::new(move |x: Vec3| Mat3([[1.0, a * x.y.cos(), 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]]))),
            1.0 + a.abs(),
        )
    }

    pub fn apply(&self, x: Vec3) -> Vec3 {
        (self.forward)(x)
    }

    pub fn apply_inverse(&self, y: Vec3) -> Vec3 {
        (self.inverse)(y)
    }

    pub fn lipschitz(&self) -> f64 {
        self.lipschitz
    }

    /// `J(x) = DT(x)`, analytic when available.
    pub fn jacobian(&self, x: Vec3) -> Mat3 {
        if let Some(j) = &self.jacobian {
            return j(x);
        }
        let h = self.fd_step;
        let cols: Vec<Vec3> = [Vec3::X, Vec3::Y, Vec3::Z]
            .iter()
            .map(|e| (self.apply(x + *e * h) - self.apply(x - *e * h)) / (2.0 * h))
            .collect();
        Mat3::from_cols(cols[0], cols[1], cols[2])
    }

    /// Checks `T(T⁻¹(y)) = y` to `1e-10` and returns the common sign of `det J`.
    pub fn orientation(&self, points: &[Vec3]) -> Result<i8> {
        let mut sign = 0i8;
        for &y in points {
            let back = self.apply(self.apply_inverse(y));
            if back.dist(y) > 1e-10 * (1.0 + y.norm()) {
                return Err(Error::validation(format!("T(T⁻¹(y)) ≠ y at {y:?}")));
            }
            let det = self.jacobian(self.apply_inverse(y)).det();
            let s = if det > 0.0 {
                1
            } else if det < 0.0 {
                -1
            } else {
                return Err(Error::validation(format!("degenerate Jacobian at {y:?}")));
            };
            if sign != 0 && s != sign {
                return Err(Error::validation("det J changes sign over the test points"));
            }
            sign = s;
        }
        Ok(if sign == 0 { 1 } else { sign })
    }
}

/// `v(x) = J(x)ᵀ u(T(x))`.
pub fn pullback_hcurl<'a, U>(u: U, t: &'a BiLipschitzMap) -> impl Fn(Vec3) -> CVec3 + 'a
where
    U: Fn(Vec3) -> CVec3 + 'a,
{
    move |x| t.jacobian(x).transpose().mul_cvec(&u(t.apply(x)))
}

/// Max over `points` (in the target domain) of
/// `‖∇∧u(y) − (J/det J)∇∧v(T⁻¹y)‖ / ‖∇∧u(y)‖` with curls by central differences.
pub fn curl_transform_check<U>(u: U, t: &BiLipschitzMap, h_fd: f64, points: &[Vec3]) -> Result<f64>
where
    U: Fn(Vec3) -> CVec3,
{
    if !(h_fd > 0.0) {
        return Err(Error::validation("finite-difference step must be positive"));
    }
    t.orientation(points)?;
    let v = pullback_hcurl(&u, t);
    let mut worst: f64 = 0.0;
    for &y in points {
        let lhs = fd::curl(&u, y, h_fd);
        let x = t.apply_inverse(y);
        let j = t.jacobian(x);
        let rhs = j.scale(1.0 / j.det()).mul_cvec(&fd::curl(&v, x, h_fd));
        let scale = lhs.norm().max(rhs.norm());
        let r = (lhs - rhs).norm();
        worst = worst.max(if scale > 0.0 { r / scale } else { r });
    }
    Ok(worst)
}

/// `T_*(a)(x) = J⁻¹ a(T(x)) J⁻ᵀ / |det J⁻¹|`.
pub fn pushforward_coefficient<'a, A>(a: A, t: &'a BiLipschitzMap) -> impl Fn(Vec3) -> Result<Mat3> + 'a
where
    A: Fn(Vec3) -> Mat3 + 'a,
{
    move |x| {
        let j = t.jacobian(x);
        let inv = j
            .inverse()
            .ok_or_else(|| Error::validation(format!("singular Jacobian at {x:?}")))?;
        let m = inv.mul_mat(&a(t.apply(x))).mul_mat(&inv.transpose());
        Ok(m.scale(j.det().abs()))
    }
}

/// Image of a sample under `(E, H) ↦ (−T̂(E), T̂(H))`: the returned sample sits at
/// the mirrored point with `E′ = −JᵀE`, `H′ = JᵀH`.
pub fn reflect_solution(sample: &EMSample, plane: &Plane) -> EMSample {
    let jt = plane.reflection_matrix().transpose();
    EMSample {
        x: plane.reflect_point(sample.x),
        e: -jt.mul_cvec(&sample.e),
        h: jt.mul_cvec(&sample.h),
    }
}
