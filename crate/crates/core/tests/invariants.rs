//! Property tests for cross-module invariants.

use proptest::prelude::*;

use pec_scatter::diagnostics::{eta, eta1};
use pec_scatter::geometry::{delta_inverse, distance_report, generators, reflect_mesh, DeltaTable, Plane, Scatterer, ScattererKind};
use pec_scatter::incident::PlaneWaveSpec;
use pec_scatter::mie::mie_far_field;
use pec_scatter::quadrature::SphereGrid;
use pec_scatter::stability::{eta_of, spearman, StabilityRecord};
use pec_scatter::Vec3;

fn unit(theta: f64, phi: f64) -> Vec3 {
    Vec3::new(theta.sin() * phi.cos(), theta.sin() * phi.sin(), theta.cos())
}

fn cube_at(c: Vec3) -> Scatterer {
    Scatterer::with_default_params(generators::cube(c, 1.0, 1).unwrap()).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn translated_cube_distances(x in -0.3..0.3f64, y in -0.3..0.3f64, z in -0.3..0.3f64) {
        let res = 0.05;
        let v = Vec3::new(x, y, z);
        let a = cube_at(Vec3::ZERO);
        let b = cube_at(v);
        let ab = distance_report(&a, &b, res).unwrap();
        let ba = distance_report(&b, &a, res).unwrap();
        prop_assert!(ab.d <= ab.d_hat + 2.0 * res);
        for (p, q) in [(ab.d, ba.d), (ab.d_hat, ba.d_hat), (ab.d_tilde, ba.d_tilde)] {
            prop_assert!(p >= 0.0 && (p - q).abs() <= 2.0 * res);
        }
        for dist in [ab.d, ab.d_hat, ab.d_tilde] {
            prop_assert!((dist - v.norm()).abs() <= res, "{ab:?} {v:?}");
        }
    }

    #[test]
    fn reflection_is_an_involution(nt in 0.1..3.0f64, np in 0.0..6.2f64, off in -1.0..1.0f64) {
        let plane = Plane::new(unit(nt, np), off).unwrap();
        let mesh = generators::notched_cube(0.3, 4).unwrap();
        let twice = reflect_mesh(&reflect_mesh(&mesh, &plane), &plane);
        for (p, q) in mesh.vertices().iter().zip(twice.vertices()) {
            prop_assert!((*p - *q).norm() <= 1e-12);
        }
    }

    #[test]
    fn mie_far_field_identities(ka in 0.2..8.0f64, dt in 0.0..3.1f64, dp in 0.0..6.2f64, pt in 0.0..3.1f64, pp in 0.0..6.2f64) {
        let d = unit(dt, dp);
        let w = PlaneWaveSpec::new(ka, d, unit(pt, pp) * 0.9).unwrap();
        prop_assume!(w.d.cross(w.p).norm() > 1e-3);
        let ff = mie_far_field(1.0, ka, &w, &SphereGrid::gauss(8, 16).unwrap()).unwrap();
        prop_assert!(ff.transversality_error() < 1e-10);
        prop_assert!(ff.relation_error() < 1e-10);
    }

    #[test]
    fn moduli_are_monotone(a in 1e-12..0.36f64, b in 1e-12..0.36f64, c1 in 0.1..5.0f64) {
        prop_assume!(a != b);
        let (lo, hi) = if a < b { (a, b) } else { (b, a) };
        prop_assert!(eta(lo).unwrap() < eta(hi).unwrap());
        prop_assert!(eta1(lo, c1).unwrap() < eta1(hi, c1).unwrap());
        prop_assert!(eta1(lo, c1 + 0.5).unwrap() < eta1(lo, c1).unwrap());
    }

    #[test]
    fn record_row_carries_eta_of_eps(eps in 0.0..1.0f64, d in 0.0..1.0f64) {
        let r = StabilityRecord {
            case_id: "p".into(), t: d, d, d_hat: d, d_tilde: d,
            eps_near: eps, eps_near_h: eps, eps_far: eps, eta_of_eps: eta_of(eps),
            k: 1.0, n_waves: 1, ndof_a: 1, ndof_b: 1, kind: ScattererKind::Obstacle, b0: None,
        };
        let row = r.csv_row();
        let cols: Vec<&str> = row.split(',').collect();
        prop_assert_eq!(cols.len(), 12);
        match eta(eps) {
            Ok(e) => prop_assert_eq!(cols[7].parse::<f64>().unwrap(), e),
            Err(_) => prop_assert_eq!(cols[7], ""),
        }
    }

    #[test]
    fn spearman_is_rank_invariant(xs in prop::collection::vec(-10.0..10.0f64, 3..20)) {
        let ys: Vec<f64> = xs.iter().map(|x| x.exp()).collect();
        if let Some(r) = spearman(&xs, &ys) {
            prop_assert!((r - 1.0).abs() < 1e-12);
            prop_assert_eq!(Some(r), spearman(&ys, &xs));
        }
        let neg: Vec<f64> = xs.iter().map(|x| -x).collect();
        if let Some(r) = spearman(&xs, &neg) {
            prop_assert!((r + 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn delta_inverse_is_monotone_and_capped(t1 in 1e-3..3.0f64, t2 in 1e-3..3.0f64, slope in 0.1..4.0f64) {
        let table = DeltaTable::from_fn(2.0, 41, |s| slope * s * s).unwrap();
        let r0 = 1.5;
        let (lo, hi) = if t1 < t2 { (t1, t2) } else { (t2, t1) };
        let (a, b) = (delta_inverse(lo, &table, r0).unwrap(), delta_inverse(hi, &table, r0).unwrap());
        prop_assert!(a <= b && b <= 2.0 * r0);
    }
}

#[test]
fn self_distances_vanish() {
    let a = Scatterer::with_default_params(generators::dented_cube(0.2, 4).unwrap()).unwrap();
    let r = distance_report(&a, &a, 0.05).unwrap();
    assert_eq!((r.d, r.d_hat, r.d_tilde), (0.0, 0.0, 0.0));
}
