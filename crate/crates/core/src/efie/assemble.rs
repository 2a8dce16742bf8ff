//! Galerkin assembly of the mixed-potential EFIE
//!
//! `Z_mn = ik ∫∫ f_m·f_n G − (i/k) ∫∫ (∇·f_m)(∇'·f_n) G`,
//! `b_m = −∫ f_m·Eⁱ`.
//!
//! Each unordered triangle pair is integrated once (outer Gauss rule on the
//! lower-indexed triangle) and written to both `Z_mn` and `Z_nm`, so the
//! matrix is complex symmetric by construction.

use std::sync::Arc;

use faer::Mat;
use num_complex::Complex64;

use super::kernel::{potentials, TriData};
use super::rwg::RwgBasis;
use crate::error::{Error, Result};
use crate::incident::{eval_plane_wave, PlaneWaveSpec};
use crate::par;
use crate::quadrature::triangle_rule;

const I: Complex64 = Complex64 { re: 0.0, im: 1.0 };
/// Triangles processed per parallel batch; bounds the memory of pending blocks.
const BATCH: usize = 48;

/// Assembled impedance matrix together with the data needed to build right-hand sides.
#[derive(Debug, Clone)]
pub struct EfieSystem {
    pub(crate) basis: Arc<RwgBasis>,
    pub(crate) k: f64,
    pub(crate) quad: usize,
    pub(crate) tris: Arc<Vec<TriData>>,
    pub(crate) z: Mat<Complex64>,
}

impl EfieSystem {
    pub fn basis(&self) -> &RwgBasis {
        &self.basis
    }

    pub fn wavenumber(&self) -> f64 {
        self.k
    }

    pub fn quad_order(&self) -> usize {
        self.quad
    }

    pub fn matrix(&self) -> &Mat<Complex64> {
        &self.z
    }

    pub fn num_dofs(&self) -> usize {
        self.basis.num_dofs()
    }

    /// `b_m = −∫ f_m·Eⁱ` with the assembly rule on every triangle.
    pub fn rhs(&self, w: &PlaneWaveSpec) -> Result<Vec<Complex64>> {
        if (w.k - self.k).abs() > 1e-12 * self.k {
            return Err(Error::validation(format!(
                "wave has k = {} but the system was assembled for k = {}",
                w.k, self.k
            )));
        }
        let mut b = vec![Complex64::new(0.0, 0.0); self.num_dofs()];
        for (t, td) in self.tris.iter().enumerate() {
            for &(x, wt) in &td.nodes {
                let e = eval_plane_wave(w, x).e;
                for lb in self.basis.on_triangle(t) {
                    b[lb.dof] -= e.dot_real(lb.eval(x)) * wt;
                }
            }
        }
        Ok(b)
    }
}

/// Assembles the dense impedance matrix with a `quad`-point rule per triangle.
pub fn assemble_efie(basis: Arc<RwgBasis>, k: f64, quad: usize) -> Result<EfieSystem> {
    if !(k > 0.0 && k.is_finite()) {
        return Err(Error::validation(format!("wavenumber must be positive, got {k}")));
    }
    let rule = match quad {
        3 | 4 | 6 | 7 => triangle_rule(quad)?,
        n => return Err(Error::UnsupportedQuadrature(n)),
    };
    let mesh = basis.mesh();
    let tris = Arc::new(TriData::all(mesh, rule));
    let n_tri = tris.len();
    let n = basis.num_dofs();
    let mut z = Mat::<Complex64>::zeros(n, n);

    let ik = I * k;
    let i_over_k = I / k;
    let mut start = 0;
    while start < n_tri {
        let end = (start + BATCH).min(n_tri);
        let rows: Vec<usize> = (start..end).collect();
        let blocks = par::map(&rows, |&p| {
            let tp = &tris[p];
            let test = basis.on_triangle(p);
            let mut out = Vec::with_capacity(n_tri - p);
            for q in p..n_tri {
                let src = basis.on_triangle(q);
                if test.is_empty() || src.is_empty() {
                    continue;
                }
                let tq = &tris[q];
                let mut blk = [[Complex64::new(0.0, 0.0); 3]; 3];
                for &(x, wx) in &tp.nodes {
                    let pot = potentials(k, tq, x, false);
                    for (a, fm) in test.iter().enumerate() {
                        let fmx = fm.eval(x);
                        let dm = fm.divergence();
                        for (b, fnn) in src.iter().enumerate() {
                            // ∫ f_n G = s c (∫G(r' − x) + (x − p)∫G)
                            let vec = pot.vector + (x - fnn.free) * pot.scalar;
                            let a_term = vec.dot_real(fmx) * (fnn.sign * fnn.scale);
                            let phi_term = pot.scalar * (dm * fnn.divergence());
                            blk[a][b] += (ik * a_term - i_over_k * phi_term) * wx;
                        }
                    }
                }
                out.push((q, blk));
            }
            out
        });
        for (p, row) in (start..end).zip(blocks) {
            let test = basis.on_triangle(p);
            for (q, blk) in row {
                let src = basis.on_triangle(q);
                for (a, fm) in test.iter().enumerate() {
                    for (b, fnn) in src.iter().enumerate() {
                        if p == q {
                            // average the self block with its transpose
                            let v = (blk[a][b] + blk[b][a]) * 0.5;
                            z[(fm.dof, fnn.dof)] += v;
                        } else {
                            z[(fm.dof, fnn.dof)] += blk[a][b];
                            z[(fnn.dof, fm.dof)] += blk[a][b];
                        }
                    }
                }
            }
        }
        start = end;
    }
    Ok(EfieSystem {
        basis,
        k,
        quad,
        tris,
        z,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::efie::rwg::build_rwg;
    use crate::geometry::generators;
    use crate::vec3::Vec3;

    fn sys(quad: usize) -> EfieSystem {
        let m = generators::icosphere(0.5, 1).unwrap();
        assemble_efie(Arc::new(build_rwg(&m).unwrap()), 2.0, quad).unwrap()
    }

    #[test]
    fn matrix_is_complex_symmetric() {
        let s = sys(6);
        let z = s.matrix();
        let mut diff: f64 = 0.0;
        let mut max: f64 = 0.0;
        for i in 0..z.nrows() {
            for j in 0..z.ncols() {
                diff = diff.max((z[(i, j)] - z[(j, i)]).norm());
                max = max.max(z[(i, j)].norm());
            }
        }
        assert!(diff / max < 1e-10);
        assert!(max.is_finite() && max > 0.0);
    }

    #[test]
    fn rejects_bad_inputs() {
        let m = generators::icosphere(0.5, 0).unwrap();
        let b = Arc::new(build_rwg(&m).unwrap());
        assert!(matches!(assemble_efie(b.clone(), 1.0, 5), Err(Error::UnsupportedQuadrature(5))));
        assert!(assemble_efie(b.clone(), 1.0, 1).is_err());
        assert!(assemble_efie(b, 0.0, 3).is_err());
    }

    #[test]
    fn rhs_is_linear_and_checks_k() {
        let s = sys(3);
        let w = PlaneWaveSpec::new(2.0, Vec3::Z, Vec3::X).unwrap();
        let b1 = s.rhs(&w).unwrap();
        let b2 = s.rhs(&w.scaled(0.25)).unwrap();
        for (x, y) in b1.iter().zip(&b2) {
            assert!((x * 0.25 - y).norm() <= 1e-15 * x.norm().max(1e-300) + 1e-18);
        }
        assert!(s.rhs(&PlaneWaveSpec::new(1.0, Vec3::Z, Vec3::X).unwrap()).is_err());
    }
}
