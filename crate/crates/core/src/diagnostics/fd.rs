//! Second-order central differences of vector fields.

use num_complex::Complex64;

use crate::vec3::{CVec3, Vec3};

const AXES: [Vec3; 3] = [Vec3::X, Vec3::Y, Vec3::Z];

/// `∂_j F_i` at `x`, indexed `[i][j]`.
pub fn jacobian<F: Fn(Vec3) -> CVec3>(f: &F, x: Vec3, h: f64) -> [[Complex64; 3]; 3] {
    let mut d = [[Complex64::new(0.0, 0.0); 3]; 3];
    for (j, e) in AXES.iter().enumerate() {
        let diff = (f(x + *e * h) - f(x - *e * h)) * (0.5 / h);
        for (i, row) in d.iter_mut().enumerate() {
            row[j] = diff.0[i];
        }
    }
    d
}

pub fn curl<F: Fn(Vec3) -> CVec3>(f: &F, x: Vec3, h: f64) -> CVec3 {
    let d = jacobian(f, x, h);
    CVec3([d[2][1] - d[1][2], d[0][2] - d[2][0], d[1][0] - d[0][1]])
}

pub fn divergence<F: Fn(Vec3) -> CVec3>(f: &F, x: Vec3, h: f64) -> Complex64 {
    let d = jacobian(f, x, h);
    d[0][0] + d[1][1] + d[2][2]
}

/// Seven-point Laplacian applied componentwise.
pub fn laplacian<F: Fn(Vec3) -> CVec3>(f: &F, x: Vec3, h: f64) -> CVec3 {
    let c = f(x) * -6.0;
    let mut acc = c;
    for e in AXES {
        acc = acc + f(x + e * h) + f(x - e * h);
    }
    acc * (1.0 / (h * h))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exact_on_quadratics() {
        let f = |p: Vec3| Vec3::new(p.y * p.y, p.x * p.z, p.x + 3.0 * p.y * p.z).to_complex();
        let x = Vec3::new(0.3, -1.2, 0.7);
        let c = curl(&f, x, 0.1);
        // curl = (3z − x, −1, z − 2y)
        let want = Vec3::new(3.0 * x.z - x.x, -1.0, x.z - 2.0 * x.y).to_complex();
        assert!((c - want).norm() < 1e-13);
        assert!((divergence(&f, x, 0.1) - Complex64::new(3.0 * x.y, 0.0)).norm() < 1e-13);
        let l = laplacian(&f, x, 0.1);
        assert!((l - Vec3::new(2.0, 0.0, 0.0).to_complex()).norm() < 1e-11);
    }
}
