//! Line-oriented `key = value` scenario files.

use std::collections::BTreeMap;
use std::fmt;
use std::path::Path;

use crate::diagnostics::BallOrder;
use crate::error::{Error, Result};
use crate::geometry::generators;
use crate::geometry::io::load_mesh;
use crate::geometry::mesh::TriangleMesh;
use crate::incident::{independence_constant_b0, PlaneWaveSpec};
use crate::quadrature::triangle_rule;
use crate::vec3::Vec3;

/// A scatterer description: a built-in generator with its parameter, or a mesh file.
#[derive(Debug, Clone, PartialEq)]
pub enum ScattererSpec {
    /// Unit cube centred at the origin.
    Cube,
    /// Unit cube centred at `(t, 0, 0)`.
    Translate(f64),
    Dent(f64),
    Notch(f64),
    /// Unit cube stretched along x to length `1 + t`.
    Stretch(f64),
    /// Icosphere of the given radius.
    Sphere(f64),
    /// Square screen of the given side in the plane `z = 0`.
    Screen(f64),
    File(String),
}

impl ScattererSpec {
    pub fn parse(s: &str) -> Result<Self> {
        let s = s.trim();
        let (name, arg) = match s.split_once(char::is_whitespace) {
            Some((n, a)) => (n, Some(a.trim())),
            None => (s, None),
        };
        let num = |what: &str| -> Result<f64> {
            let a = arg.ok_or_else(|| Error::validation(format!("`{what}` needs a numeric parameter")))?;
            a.parse::<f64>()
                .ok()
                .filter(|v| v.is_finite())
                .ok_or_else(|| Error::validation(format!("bad parameter `{a}` for `{what}`")))
        };
        Ok(match name {
            "cube" if arg.is_none() => Self::Cube,
            "translate" => Self::Translate(num(name)?),
            "dent" => Self::Dent(num(name)?),
            "notch" => Self::Notch(num(name)?),
            "stretch" => Self::Stretch(num(name)?),
            "sphere" => Self::Sphere(num(name)?),
            "screen" => Self::Screen(num(name)?),
            "file" => Self::File(arg.filter(|a| !a.is_empty()).ok_or_else(|| Error::validation("`file` needs a path"))?.into()),
            _ => return Err(Error::validation(format!("unknown scatterer `{s}`"))),
        })
    }

    /// Cube subdivision actually used for `level` (dents and notches need multiples of 4).
    fn divisions(&self, level: usize) -> usize {
        match self {
            Self::Dent(_) | Self::Notch(_) => level.max(1).div_ceil(4) * 4,
            _ => level.max(1),
        }
    }

    /// The solver mesh: cubes get `level` divisions per edge, spheres `level` refinements.
    pub fn build(&self, level: usize) -> Result<TriangleMesh> {
        let n = self.divisions(level);
        match *self {
            Self::Cube => generators::cube(Vec3::ZERO, 1.0, n),
            Self::Translate(t) => generators::cube(Vec3::new(t, 0.0, 0.0), 1.0, n),
            Self::Dent(t) => generators::dented_cube(t, n),
            Self::Notch(t) => generators::notched_cube(t, n),
            Self::Stretch(t) => generators::stretched_cube(t, n),
            Self::Sphere(a) => generators::icosphere(a, level),
            Self::Screen(s) => generators::square_screen(Vec3::ZERO, s, n),
            Self::File(ref p) => load_mesh(p),
        }
    }

    /// The coarsest mesh with the same point set, used for distance computations.
    pub fn geometry_mesh(&self, level: usize) -> Result<TriangleMesh> {
        match self {
            Self::Sphere(_) | Self::File(_) => self.build(level),
            _ => self.build(1),
        }
    }
}

impl fmt::Display for ScattererSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Cube => write!(f, "cube"),
            Self::Translate(t) => write!(f, "translate {t}"),
            Self::Dent(t) => write!(f, "dent {t}"),
            Self::Notch(t) => write!(f, "notch {t}"),
            Self::Stretch(t) => write!(f, "stretch {t}"),
            Self::Sphere(a) => write!(f, "sphere {a}"),
            Self::Screen(s) => write!(f, "screen {s}"),
            Self::File(p) => write!(f, "file {p}"),
        }
    }
}

/// One-parameter perturbations of the unit cube; `t = 0` is the cube itself.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Family {
    Translate,
    Dent,
    Notch,
    /// Stretched cubes: convex for every `t ≥ 0`.
    Stretch,
}

impl Family {
    pub fn parse(s: &str) -> Result<Self> {
        match s.trim() {
            "translate" => Ok(Self::Translate),
            "dent" => Ok(Self::Dent),
            "notch" => Ok(Self::Notch),
            "stretch" => Ok(Self::Stretch),
            other => Err(Error::validation(format!("unknown family `{other}` (translate, dent, notch, stretch)"))),
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Self::Translate => "translate",
            Self::Dent => "dent",
            Self::Notch => "notch",
            Self::Stretch => "stretch",
        }
    }

    pub fn member(self, t: f64) -> Result<ScattererSpec> {
        if !(t >= 0.0 && t.is_finite()) {
            return Err(Error::validation(format!("family parameter must be nonnegative, got {t}")));
        }
        if t == 0.0 {
            return Ok(ScattererSpec::Cube);
        }
        Ok(match self {
            Self::Translate => ScattererSpec::Translate(t),
            Self::Dent => ScattererSpec::Dent(t),
            Self::Notch => ScattererSpec::Notch(t),
            Self::Stretch => ScattererSpec::Stretch(t),
        })
    }

    /// Mesh level shared by every member, so that A and B are discretised alike.
    pub fn level(self, level: usize) -> usize {
        match self {
            Self::Dent | Self::Notch => level.max(1).div_ceil(4) * 4,
            _ => level.max(1),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScenarioConfig {
    pub k: f64,
    pub waves: Vec<PlaneWaveSpec>,
    pub x0: Vec3,
    pub rho_tilde: f64,
    pub r0: f64,
    pub r1: f64,
    pub scatterer_a: ScattererSpec,
    pub scatterer_b: ScattererSpec,
    pub mesh_level: usize,
    /// Surface sampling resolution for the distances.
    pub mesh_res: f64,
    pub quad_order: usize,
    pub seed: u64,
    pub farfield_n_theta: usize,
    pub farfield_n_phi: usize,
    pub ball: BallOrder,
    pub family: Option<Family>,
    pub family_params: Vec<f64>,
}

/// Every key accepted in a scenario file.
pub const CONFIG_KEYS: &[&str] = &[
    "k",
    "wave1.d",
    "wave1.p",
    "wave2.d",
    "wave2.p",
    "x0",
    "x0.x",
    "x0.y",
    "x0.z",
    "rho_tilde",
    "R0",
    "R1",
    "mesh.a",
    "mesh.b",
    "mesh.level",
    "mesh.res",
    "quad_order",
    "seed",
    "farfield.n_theta",
    "farfield.n_phi",
    "ball.n_r",
    "ball.n_theta",
    "ball.n_phi",
    "family",
    "family.params",
];

impl Default for ScenarioConfig {
    fn default() -> Self {
        let k = 2.0;
        Self {
            k,
            waves: vec![PlaneWaveSpec {
                k,
                d: Vec3::Z,
                p: Vec3::X,
            }],
            x0: Vec3::new(3.0, 0.0, 0.0),
            rho_tilde: 0.5,
            r0: 1.5,
            r1: 4.0,
            scatterer_a: ScattererSpec::Cube,
            scatterer_b: ScattererSpec::Cube,
            mesh_level: 4,
            mesh_res: 0.02,
            quad_order: 6,
            seed: 0,
            farfield_n_theta: 12,
            farfield_n_phi: 24,
            ball: BallOrder {
                n_r: 8,
                n_theta: 8,
                n_phi: 16,
            },
            family: None,
            family_params: Vec::new(),
        }
    }
}

fn parse_f64(line: usize, key: &str, v: &str) -> Result<f64> {
    v.parse::<f64>()
        .ok()
        .filter(|x| x.is_finite())
        .ok_or_else(|| Error::Parse {
            line,
            msg: format!("`{key}` expects a finite number, got `{v}`"),
        })
}

fn parse_usize(line: usize, key: &str, v: &str) -> Result<usize> {
    v.parse::<usize>().map_err(|_| Error::Parse {
        line,
        msg: format!("`{key}` expects a nonnegative integer, got `{v}`"),
    })
}

fn parse_list(line: usize, key: &str, v: &str) -> Result<Vec<f64>> {
    if v.trim().is_empty() {
        return Ok(Vec::new());
    }
    v.split(',').map(|s| parse_f64(line, key, s.trim())).collect()
}

fn parse_triple(line: usize, key: &str, v: &str) -> Result<Vec3> {
    let xs = parse_list(line, key, v)?;
    if xs.len() != 3 {
        return Err(Error::Parse {
            line,
            msg: format!("`{key}` expects three comma-separated numbers"),
        });
    }
    Ok(Vec3::new(xs[0], xs[1], xs[2]))
}

impl ScenarioConfig {
    pub fn from_file(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|source| Error::Io {
            path: path.to_path_buf(),
            source,
        })?;
        Self::parse(&text)
    }

    /// Parses and validates a scenario; keys absent from the text keep their defaults.
    pub fn parse(text: &str) -> Result<Self> {
        let mut entries: BTreeMap<String, (usize, String)> = BTreeMap::new();
        for (i, raw) in text.lines().enumerate() {
            let line = i + 1;
            let content = raw.split('#').next().unwrap_or("").trim();
            if content.is_empty() {
                continue;
            }
            let (key, value) = content.split_once('=').ok_or_else(|| Error::Parse {
                line,
                msg: format!("expected `key = value`, got `{content}`"),
            })?;
            let key = key.trim();
            if !CONFIG_KEYS.contains(&key) {
                return Err(Error::Parse {
                    line,
                    msg: format!("unknown key `{key}`"),
                });
            }
            if entries.insert(key.to_string(), (line, value.trim().to_string())).is_some() {
                return Err(Error::Parse {
                    line,
                    msg: format!("duplicate key `{key}`"),
                });
            }
        }

        let mut c = Self::default();
        let get = |k: &str| entries.get(k).map(|(l, v)| (*l, v.as_str()));
        if let Some((l, v)) = get("k") {
            c.k = parse_f64(l, "k", v)?;
        }
        if let Some((l, v)) = get("x0") {
            c.x0 = parse_triple(l, "x0", v)?;
        }
        for (key, slot) in [("x0.x", 0), ("x0.y", 1), ("x0.z", 2)] {
            if let Some((l, v)) = get(key) {
                let mut a = c.x0.to_array();
                a[slot] = parse_f64(l, key, v)?;
                c.x0 = Vec3::from_array(a);
            }
        }
        macro_rules! scalar {
            ($key:literal, $field:expr, $parse:ident) => {
                if let Some((l, v)) = get($key) {
                    $field = $parse(l, $key, v)?;
                }
            };
        }
        scalar!("rho_tilde", c.rho_tilde, parse_f64);
        scalar!("R0", c.r0, parse_f64);
        scalar!("R1", c.r1, parse_f64);
        scalar!("mesh.level", c.mesh_level, parse_usize);
        scalar!("mesh.res", c.mesh_res, parse_f64);
        scalar!("quad_order", c.quad_order, parse_usize);
        scalar!("farfield.n_theta", c.farfield_n_theta, parse_usize);
        scalar!("farfield.n_phi", c.farfield_n_phi, parse_usize);
        scalar!("ball.n_r", c.ball.n_r, parse_usize);
        scalar!("ball.n_theta", c.ball.n_theta, parse_usize);
        scalar!("ball.n_phi", c.ball.n_phi, parse_usize);
        if let Some((l, v)) = get("seed") {
            c.seed = v.parse().map_err(|_| Error::Parse {
                line: l,
                msg: format!("`seed` expects an unsigned integer, got `{v}`"),
            })?;
        }
        if let Some((_, v)) = get("mesh.a") {
            c.scatterer_a = ScattererSpec::parse(v)?;
        }
        if let Some((_, v)) = get("mesh.b") {
            c.scatterer_b = ScattererSpec::parse(v)?;
        }
        if let Some((_, v)) = get("family") {
            c.family = Some(Family::parse(v)?);
        }
        if let Some((l, v)) = get("family.params") {
            c.family_params = parse_list(l, "family.params", v)?;
        }

        let mut waves = Vec::new();
        for j in 1..=2 {
            let dk = format!("wave{j}.d");
            let pk = format!("wave{j}.p");
            match (get(&dk), get(&pk)) {
                (None, None) if j == 1 => waves.push((Vec3::Z, Vec3::X)),
                (None, None) => {}
                (Some((l1, d)), Some((l2, p))) => waves.push((parse_triple(l1, &dk, d)?, parse_triple(l2, &pk, p)?)),
                _ => return Err(Error::validation(format!("wave{j} needs both `{dk}` and `{pk}`"))),
            }
        }
        c.waves = waves
            .into_iter()
            .map(|(d, p)| PlaneWaveSpec::with_direction(c.k, d, p))
            .collect::<Result<_>>()?;
        c.validate()?;
        Ok(c)
    }

    /// Checks the measurement geometry, the waves and the numerical parameters.
    /// Scatterer containment is checked when the meshes are built.
    pub fn validate(&self) -> Result<()> {
        if !(self.k > 0.0 && self.k.is_finite()) {
            return Err(Error::validation(format!("k must be positive, got {}", self.k)));
        }
        if self.waves.is_empty() || self.waves.len() > 2 {
            return Err(Error::validation("one or two incident waves are required"));
        }
        for w in &self.waves {
            if w.k != self.k {
                return Err(Error::validation("every wave must use the scenario wavenumber"));
            }
            w.require_usable()?;
        }
        if !(self.rho_tilde > 0.0 && self.r0 > 0.0) {
            return Err(Error::validation("rho_tilde and R0 must be positive"));
        }
        let dist = self.x0.norm();
        if !(self.r0 + 1.0 + self.rho_tilde <= dist && dist <= self.r1) {
            return Err(Error::validation(format!(
                "need R0 + 1 + rho_tilde <= |x0| <= R1, got {} <= {dist} <= {}",
                self.r0 + 1.0 + self.rho_tilde,
                self.r1
            )));
        }
        if !(self.mesh_res > 0.0 && self.mesh_res.is_finite()) {
            return Err(Error::validation("mesh.res must be positive"));
        }
        if self.mesh_level == 0 {
            return Err(Error::validation("mesh.level must be at least 1"));
        }
        triangle_rule(self.quad_order)?;
        if self.farfield_n_theta == 0 || self.farfield_n_phi == 0 {
            return Err(Error::validation("far-field grid must be nonempty"));
        }
        if self.ball.n_r == 0 || self.ball.n_theta == 0 || self.ball.n_phi == 0 {
            return Err(Error::validation("ball quadrature orders must be positive"));
        }
        if self.waves.len() == 2 {
            let b0 = self.b0()?.unwrap_or(0.0);
            if !(b0 > 1e-12) {
                return Err(Error::validation("the two waves are not independent (b0 = 0)"));
            }
        }
        Ok(())
    }

    /// The independence constant `b₀` of a two-wave scenario.
    pub fn b0(&self) -> Result<Option<f64>> {
        match self.waves.as_slice() {
            [w1, w2] => Ok(Some(independence_constant_b0(w1, w2, 2000)?.value)),
            _ => Ok(None),
        }
    }

    /// The same scenario with other incident waves.
    pub fn with_waves(&self, waves: Vec<PlaneWaveSpec>) -> Result<Self> {
        let c = Self { waves, ..self.clone() };
        c.validate()?;
        Ok(c)
    }

    /// Renders the scenario as a config file that parses back to `self`.
    pub fn to_config_string(&self) -> String {
        let v = |p: Vec3| format!("{}, {}, {}", p.x, p.y, p.z);
        let mut s = format!("k = {}\n", self.k);
        for (j, w) in self.waves.iter().enumerate() {
            s += &format!("wave{}.d = {}\nwave{}.p = {}\n", j + 1, v(w.d), j + 1, v(w.p));
        }
        s += &format!("x0 = {}\nrho_tilde = {}\nR0 = {}\nR1 = {}\n", v(self.x0), self.rho_tilde, self.r0, self.r1);
        s += &format!("mesh.a = {}\nmesh.b = {}\n", self.scatterer_a, self.scatterer_b);
        s += &format!("mesh.level = {}\nmesh.res = {}\nquad_order = {}\nseed = {}\n", self.mesh_level, self.mesh_res, self.quad_order, self.seed);
        s += &format!("farfield.n_theta = {}\nfarfield.n_phi = {}\n", self.farfield_n_theta, self.farfield_n_phi);
        s += &format!("ball.n_r = {}\nball.n_theta = {}\nball.n_phi = {}\n", self.ball.n_r, self.ball.n_theta, self.ball.n_phi);
        if let Some(f) = self.family {
            s += &format!("family = {}\n", f.as_str());
        }
        if !self.family_params.is_empty() {
            let ps: Vec<String> = self.family_params.iter().map(|t| t.to_string()).collect();
            s += &format!("family.params = {}\n", ps.join(", "));
        }
        s
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_are_valid_and_round_trip() {
        let c = ScenarioConfig::parse("").unwrap();
        assert_eq!(c, ScenarioConfig::default());
        let text = "k = 1.5\nwave1.d = 0,0,1\nwave1.p = 1,0,0\nwave2.d = 0,0,1\nwave2.p = 0,1,0\n\
                    x0.x = 3.2\nmesh.a = cube\nmesh.b = translate 0.2\nfamily = dent\nfamily.params = 0.05, 0.1\n";
        let c = ScenarioConfig::parse(text).unwrap();
        assert_eq!(c.waves.len(), 2);
        assert_eq!(c.x0, Vec3::new(3.2, 0.0, 0.0));
        assert_eq!(c.scatterer_b, ScattererSpec::Translate(0.2));
        assert_eq!(c.family_params, vec![0.05, 0.1]);
        assert_eq!(ScenarioConfig::parse(&c.to_config_string()).unwrap(), c);
    }

    #[test]
    fn rejects_bad_input() {
        for bad in [
            "frequency = 3",
            "k = 1\nk = 2",
            "k = abc",
            "x0 = 2, 0, 0",
            "x0 = 5, 0, 0",
            "wave1.d = 1,0,0\nwave1.p = 1,0,0",
            "wave1.d = 0,0,1\nwave1.p = 1,0,0\nwave2.d = 0,0,1\nwave2.p = 2,0,0",
            "wave1.d = 0,0,1\nwave1.p = 1,0,0\nwave2.d = 0,0,1\nwave2.p = 1,0,0",
            "wave2.d = 0,0,1",
            "quad_order = 5",
            "mesh.a = blob",
            "family = twist",
            "no equals sign",
        ] {
            assert!(ScenarioConfig::parse(bad).is_err(), "{bad}");
        }
    }

    #[test]
    fn two_wave_b0() {
        let c = ScenarioConfig::parse("wave1.d = 0,0,1\nwave1.p = 1,0,0\nwave2.d = 0,0,1\nwave2.p = 0,1,0").unwrap();
        let b0 = c.b0().unwrap().unwrap();
        assert!((b0 - std::f64::consts::FRAC_1_SQRT_2).abs() < 1e-3, "{b0}");
    }

    #[test]
    fn families() {
        assert_eq!(Family::Translate.member(0.0).unwrap(), ScattererSpec::Cube);
        assert_eq!(Family::Dent.member(0.1).unwrap(), ScattererSpec::Dent(0.1));
        assert_eq!(Family::Notch.level(3), 4);
        assert!(Family::Stretch.member(-0.1).is_err());
        for s in ["cube", "translate 0.25", "sphere 1", "file a b.msh"] {
            assert_eq!(ScattererSpec::parse(s).unwrap().to_string(), s);
        }
        let m = ScattererSpec::Translate(0.2).build(2).unwrap();
        let xs = m.vertices().iter().map(|v| v.x);
        assert_eq!(xs.fold(f64::NEG_INFINITY, f64::max), 0.7);
    }
}
