//! Solving scatterer pairs, parameter sweeps and convergence studies.

use std::sync::Arc;

use super::config::{Family, ScattererSpec, ScenarioConfig};
use super::records::{eta_of, fit_stability_curve, spearman, StabilityFit, StabilityRecord};
use crate::diagnostics::BallOrder;
use crate::efie::{assemble_efie, build_rwg, eval_far_field, eval_scattered_many, FactoredSystem, SurfaceCurrent};
use crate::error::{Error, Result};
use crate::farfield::FarFieldPattern;
use crate::geometry::{distance_report, ClassParams, DistanceReport, Scatterer, ScattererKind};
use crate::incident::{eval_plane_wave, EMSample};
use crate::par;
use crate::quadrature::{BallQuadrature, SphereGrid};
use crate::vec3::Vec3;

/// A scatterer solved for every wave of a scenario, reduced to what the comparisons need.
#[derive(Debug, Clone)]
pub struct SolvedScatterer {
    pub spec: ScattererSpec,
    pub level: usize,
    pub ndof: usize,
    pub kind: ScattererKind,
    /// Coarse description of the same point set, for distances.
    pub geometry: Scatterer,
    /// Total fields at the ball quadrature nodes, per wave.
    pub near: Vec<Vec<EMSample>>,
    pub far: Vec<FarFieldPattern>,
    /// Relative algebraic residual of each solve.
    pub residuals: Vec<f64>,
}

fn class_params(cfg: &ScenarioConfig) -> ClassParams {
    ClassParams {
        r0: cfg.r0,
        ..ClassParams::default()
    }
}

fn ball(cfg: &ScenarioConfig) -> Result<BallQuadrature> {
    BallQuadrature::new(cfg.x0, cfg.rho_tilde, cfg.ball.n_r, cfg.ball.n_theta, cfg.ball.n_phi)
}

fn far_grid(cfg: &ScenarioConfig) -> Result<SphereGrid> {
    SphereGrid::gauss(cfg.farfield_n_theta, cfg.farfield_n_phi)
}

fn total_fields(c: &SurfaceCurrent, points: &[Vec3]) -> Result<Vec<EMSample>> {
    Ok(eval_scattered_many(c, points)?
        .iter()
        .map(|s| eval_plane_wave(&c.wave, s.x).add(s))
        .collect())
}

pub fn solve_scatterer(cfg: &ScenarioConfig, spec: &ScattererSpec, level: usize) -> Result<SolvedScatterer> {
    let scatterer = Scatterer::new(spec.build(level)?, class_params(cfg))?;
    let geometry = Scatterer::new(spec.geometry_mesh(level)?, class_params(cfg))?;
    let basis = Arc::new(build_rwg(scatterer.mesh())?);
    let system = FactoredSystem::new(assemble_efie(basis, cfg.k, cfg.quad_order)?)?;
    let ball = ball(cfg)?;
    let grid = far_grid(cfg)?;
    let mut out = SolvedScatterer {
        spec: spec.clone(),
        level,
        ndof: system.system().num_dofs(),
        kind: scatterer.kind(),
        geometry,
        near: Vec::new(),
        far: Vec::new(),
        residuals: Vec::new(),
    };
    for w in &cfg.waves {
        let c = system.solve(w)?;
        out.near.push(total_fields(&c, &ball.points)?);
        out.far.push(eval_far_field(&c, &grid));
        out.residuals.push(c.residual);
    }
    Ok(out)
}

/// `‖E_A − E_B‖` and `‖H_A − H_B‖` in `L²(B_ρ̃(x₀))`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NearFieldErrors {
    pub e: f64,
    pub h: f64,
}

fn sample_difference(q: &BallQuadrature, a: &[EMSample], b: &[EMSample]) -> NearFieldErrors {
    NearFieldErrors {
        e: q.l2_norm(a.iter().zip(b).map(|(x, y)| (x.e - y.e).norm_sq())),
        h: q.l2_norm(a.iter().zip(b).map(|(x, y)| (x.h - y.h).norm_sq())),
    }
}

/// Near-field error between two solutions for the same incident wave, from
/// the total fields on the ball `B_ρ(x₀)`.
pub fn near_field_error(
    a: &SurfaceCurrent,
    b: &SurfaceCurrent,
    x0: Vec3,
    rho: f64,
    order: BallOrder,
) -> Result<NearFieldErrors> {
    if a.wave != b.wave {
        return Err(Error::validation("near-field error needs the same incident wave on both sides"));
    }
    let q = BallQuadrature::new(x0, rho, order.n_r, order.n_theta, order.n_phi)?;
    Ok(sample_difference(&q, &total_fields(a, &q.points)?, &total_fields(b, &q.points)?))
}

/// `‖E∞_A − E∞_B‖_{L²(S²)}`.
pub fn far_field_error(a: &FarFieldPattern, b: &FarFieldPattern) -> Result<f64> {
    a.l2_distance(b)
}

fn distances(cfg: &ScenarioConfig, a: &SolvedScatterer, b: &SolvedScatterer) -> Result<DistanceReport> {
    distance_report(&a.geometry, &b.geometry, cfg.mesh_res)
}

/// Builds the record comparing two solved scatterers; errors are maxima over the waves.
pub fn compare(
    case_id: &str,
    t: f64,
    cfg: &ScenarioConfig,
    a: &SolvedScatterer,
    b: &SolvedScatterer,
    b0: Option<f64>,
) -> Result<StabilityRecord> {
    let q = ball(cfg)?;
    let mut eps_near: f64 = 0.0;
    let mut eps_near_h: f64 = 0.0;
    let mut eps_far: f64 = 0.0;
    for j in 0..cfg.waves.len() {
        let n = sample_difference(&q, &a.near[j], &b.near[j]);
        eps_near = eps_near.max(n.e);
        eps_near_h = eps_near_h.max(n.h);
        eps_far = eps_far.max(far_field_error(&a.far[j], &b.far[j])?);
    }
    let dist = distances(cfg, a, b)?;
    Ok(StabilityRecord {
        case_id: case_id.to_string(),
        t,
        d: dist.d,
        d_hat: dist.d_hat,
        d_tilde: dist.d_tilde,
        eps_near,
        eps_near_h,
        eps_far,
        eta_of_eps: eta_of(eps_near),
        k: cfg.k,
        n_waves: cfg.waves.len(),
        ndof_a: a.ndof,
        ndof_b: b.ndof,
        kind: b.kind,
        b0,
    })
}

fn in_case<T>(case_id: &str, r: Result<T>) -> Result<T> {
    r.map_err(|e| Error::Case {
        case_id: case_id.to_string(),
        source: Box::new(e),
    })
}

fn spec_parameter(spec: &ScattererSpec) -> f64 {
    match *spec {
        ScattererSpec::Translate(t)
        | ScattererSpec::Dent(t)
        | ScattererSpec::Notch(t)
        | ScattererSpec::Stretch(t) => t,
        _ => 0.0,
    }
}

/// Solves `mesh.a` and `mesh.b` of the scenario and compares them. Identical
/// specs reuse the first solution, so the errors are exactly zero.
pub fn run_pair(cfg: &ScenarioConfig) -> Result<StabilityRecord> {
    let id = "pair";
    let b0 = in_case(id, cfg.b0())?;
    let a = in_case(id, solve_scatterer(cfg, &cfg.scatterer_a, cfg.mesh_level))?;
    let t = spec_parameter(&cfg.scatterer_b);
    if cfg.scatterer_b == cfg.scatterer_a {
        return in_case(id, compare(id, t, cfg, &a, &a, b0));
    }
    let b = in_case(id, solve_scatterer(cfg, &cfg.scatterer_b, cfg.mesh_level))?;
    in_case(id, compare(id, t, cfg, &a, &b, b0))
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepReport {
    pub family: Family,
    /// Sorted by `t`.
    pub records: Vec<StabilityRecord>,
    /// Spearman correlation of `eps_near` with `eps_far`.
    pub spearman: Option<f64>,
    pub fit: Option<StabilityFit>,
    pub d_nondecreasing: bool,
    pub eps_nondecreasing: bool,
    pub eps_strictly_increasing: bool,
}

fn check_params(params: &[f64], increasing: bool) -> Result<()> {
    if params.iter().any(|t| !(t.is_finite() && *t >= 0.0)) {
        return Err(Error::validation("family parameters must be finite and nonnegative"));
    }
    let ok = params.windows(2).all(|w| if increasing { w[0] < w[1] } else { w[0] > w[1] });
    if !ok {
        let dir = if increasing { "increasing" } else { "decreasing" };
        return Err(Error::validation(format!("family parameters must be strictly {dir}")));
    }
    Ok(())
}

/// Compares each member of the family (`B = member(t)`) with the unperturbed cube `A`.
fn run_family(cfg: &ScenarioConfig, family: Family, params: &[f64]) -> Result<Vec<StabilityRecord>> {
    if params.is_empty() {
        return Ok(Vec::new());
    }
    let level = family.level(cfg.mesh_level);
    let b0 = cfg.b0()?;
    let base = in_case(&format!("{}-base", family.as_str()), solve_scatterer(cfg, &ScattererSpec::Cube, level))?;
    let ids: Vec<usize> = (0..params.len()).collect();
    par::map(&ids, |&i| {
        let t = params[i];
        let id = format!("{}-{i:02}", family.as_str());
        in_case(&id, (|| {
            let spec = family.member(t)?;
            if spec == ScattererSpec::Cube {
                return compare(&id, t, cfg, &base, &base, b0);
            }
            let b = solve_scatterer(cfg, &spec, level)?;
            compare(&id, t, cfg, &base, &b, b0)
        })())
    })
    .into_iter()
    .collect()
}

/// One record per parameter (strictly increasing), with the monotonicity,
/// rank-correlation and log-log fit summaries.
pub fn run_sweep(cfg: &ScenarioConfig, family: Family, params: &[f64]) -> Result<SweepReport> {
    check_params(params, true)?;
    let records = run_family(cfg, family, params)?;
    let near: Vec<f64> = records.iter().map(|r| r.eps_near).collect();
    let far: Vec<f64> = records.iter().map(|r| r.eps_far).collect();
    Ok(SweepReport {
        family,
        spearman: spearman(&near, &far),
        fit: fit_stability_curve(&records).ok(),
        d_nondecreasing: records.windows(2).all(|w| w[0].d <= w[1].d),
        eps_nondecreasing: near.windows(2).all(|w| w[0] <= w[1]),
        eps_strictly_increasing: near.windows(2).all(|w| w[0] < w[1]),
        records,
    })
}

/// `t_n = 0.4/2ⁿ` for `n = 0..count`.
pub fn default_convergence_params(count: usize) -> Vec<f64> {
    (0..count).map(|n| 0.4 / 2f64.powi(n as i32)).collect()
}

/// Near-field error between the cube solved at `level` and at `2·level`.
pub fn discretization_floor(cfg: &ScenarioConfig, family: Family, level: usize) -> Result<f64> {
    let coarse = solve_scatterer(cfg, &ScattererSpec::Cube, family.level(level))?;
    let fine = solve_scatterer(cfg, &ScattererSpec::Cube, family.level(2 * level))?;
    let q = ball(cfg)?;
    Ok((0..cfg.waves.len())
        .map(|j| sample_difference(&q, &coarse.near[j], &fine.near[j]).e)
        .fold(0.0, f64::max))
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConvergenceReport {
    pub family: Family,
    /// In the order of the (decreasing) parameters.
    pub records: Vec<StabilityRecord>,
    /// Cube at `mesh.level` against the cube at twice that level.
    pub floor: f64,
    pub strictly_decreasing: bool,
    /// Every member whose error exceeds the floor is followed by a smaller error.
    pub decreasing_above_floor: bool,
}

/// Runs the family along parameters decreasing towards 0 and measures the
/// discretization floor by a same-scatterer refinement.
pub fn run_convergence_study(cfg: &ScenarioConfig, family: Family, params: &[f64]) -> Result<ConvergenceReport> {
    check_params(params, false)?;
    let records = run_family(cfg, family, params)?;
    let floor = in_case("floor", discretization_floor(cfg, family, cfg.mesh_level))?;
    let eps: Vec<f64> = records.iter().map(|r| r.eps_near).collect();
    Ok(ConvergenceReport {
        family,
        strictly_decreasing: eps.windows(2).all(|w| w[1] < w[0]),
        decreasing_above_floor: eps.windows(2).all(|w| w[0] <= floor || w[1] < w[0]),
        floor,
        records,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::generators;
    use crate::incident::PlaneWaveSpec;
    use crate::quadrature::SphereGrid;

    fn small() -> ScenarioConfig {
        ScenarioConfig {
            mesh_level: 2,
            mesh_res: 0.05,
            quad_order: 3,
            ..ScenarioConfig::default()
        }
    }

    #[test]
    fn identical_pair_is_exactly_zero() {
        let r = run_pair(&small()).unwrap();
        assert_eq!((r.d, r.d_hat, r.d_tilde, r.eps_near, r.eps_far), (0.0, 0.0, 0.0, 0.0, 0.0));
        assert_eq!(r.eta_of_eps, None);
        assert_eq!(r.kind, ScattererKind::Obstacle);
    }

    #[test]
    fn errors_are_symmetric_and_recomputation_is_bitwise() {
        let cfg = small();
        let a = solve_scatterer(&cfg, &ScattererSpec::Cube, 2).unwrap();
        let a2 = solve_scatterer(&cfg, &ScattererSpec::Cube, 2).unwrap();
        let b = solve_scatterer(&cfg, &ScattererSpec::Translate(0.1), 2).unwrap();
        let ab = compare("x", 0.1, &cfg, &a, &b, None).unwrap();
        let ba = compare("x", 0.1, &cfg, &b, &a, None).unwrap();
        assert_eq!((ab.eps_near, ab.eps_near_h, ab.eps_far), (ba.eps_near, ba.eps_near_h, ba.eps_far));
        assert!(ab.eps_near > 0.0 && ab.eps_near_h > 0.0 && ab.eps_far > 0.0);
        let aa = compare("x", 0.0, &cfg, &a, &a2, None).unwrap();
        assert_eq!((aa.eps_near, aa.eps_far), (0.0, 0.0));
    }

    #[test]
    fn near_field_error_on_currents() {
        let cfg = small();
        let w = cfg.waves[0];
        let solve = |mesh| {
            let basis = Arc::new(build_rwg(&mesh).unwrap());
            FactoredSystem::new(assemble_efie(basis, cfg.k, 3).unwrap()).unwrap().solve(&w).unwrap()
        };
        let a = solve(generators::cube(Vec3::ZERO, 1.0, 2).unwrap());
        let b = solve(generators::cube(Vec3::new(0.1, 0.0, 0.0), 1.0, 2).unwrap());
        let e = near_field_error(&a, &b, cfg.x0, cfg.rho_tilde, cfg.ball).unwrap();
        assert!(e.e > 0.0 && e.h > 0.0);
        assert_eq!(near_field_error(&a, &a, cfg.x0, cfg.rho_tilde, cfg.ball).unwrap(), NearFieldErrors { e: 0.0, h: 0.0 });
        let mut other = b.clone();
        other.wave = PlaneWaveSpec::new(cfg.k, Vec3::X, Vec3::Z).unwrap();
        assert!(near_field_error(&a, &other, cfg.x0, cfg.rho_tilde, cfg.ball).is_err());
    }

    #[test]
    fn far_field_error_scales_linearly() {
        let g = SphereGrid::gauss(6, 12).unwrap();
        let w = PlaneWaveSpec::new(1.0, Vec3::Z, Vec3::X).unwrap();
        let p = crate::mie::mie_far_field(1.0, 1.0, &w, &g).unwrap();
        assert_eq!(far_field_error(&p, &p).unwrap(), 0.0);
        let alpha = 0.3;
        let scaled = FarFieldPattern {
            e_inf: p.e_inf.iter().map(|e| *e * (1.0 + alpha)).collect(),
            ..p.clone()
        };
        assert!((far_field_error(&p, &scaled).unwrap() - alpha * p.l2_norm()).abs() < 1e-12 * p.l2_norm());
        // Mie spheres of radius 1 and 1.05 at ka = 1
        let q = crate::mie::mie_far_field(1.05, 1.0, &w, &g).unwrap();
        let e = far_field_error(&p, &q).unwrap();
        assert!(e > 0.0 && e < 0.2 * p.l2_norm(), "{e}");
    }

    #[test]
    fn sweep_inputs() {
        let cfg = small();
        let empty = run_sweep(&cfg, Family::Translate, &[]).unwrap();
        assert!(empty.records.is_empty() && empty.spearman.is_none() && empty.fit.is_none());
        assert!(run_sweep(&cfg, Family::Translate, &[0.2, 0.1]).is_err());
        assert!(run_sweep(&cfg, Family::Translate, &[-0.1, 0.1]).is_err());
        assert!(run_convergence_study(&cfg, Family::Translate, &[0.1, 0.2]).is_err());
        assert_eq!(default_convergence_params(3), vec![0.4, 0.2, 0.1]);
    }

    #[test]
    fn small_translate_sweep() {
        let cfg = small();
        let rep = run_sweep(&cfg, Family::Translate, &[0.0, 0.1, 0.2]).unwrap();
        let ts: Vec<f64> = rep.records.iter().map(|r| r.t).collect();
        assert_eq!(ts, vec![0.0, 0.1, 0.2]);
        assert_eq!(rep.records[0].eps_near, 0.0);
        assert!(rep.eps_strictly_increasing && rep.d_nondecreasing, "{rep:?}");
        assert_eq!(rep.spearman, Some(1.0));
        for r in &rep.records[1..] {
            assert!((r.d - r.t).abs() <= cfg.mesh_res, "{r:?}");
            assert_eq!(r.eta_of_eps, Some(crate::diagnostics::eta(r.eps_near).unwrap()));
        }
    }

    #[test]
    fn solver_failures_carry_the_case_id() {
        let cfg = ScenarioConfig {
            scatterer_b: ScattererSpec::Sphere(2.0),
            ..small()
        };
        match run_pair(&cfg) {
            Err(Error::Case { case_id, .. }) => assert_eq!(case_id, "pair"),
            other => panic!("{other:?}"),
        }
    }
}
