use std::path::Path;
use std::process::{Command, Output};

fn pecscat(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_pecscat")).args(args).output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

const SMALL: &str = "mesh.level = 2\nmesh.res = 0.05\nquad_order = 3\n";

fn write_config(dir: &Path, name: &str, text: &str) -> String {
    let p = dir.join(name);
    std::fs::write(&p, text).unwrap();
    p.to_str().unwrap().to_string()
}

#[test]
fn unknown_subcommand_prints_usage_and_exits_1() {
    let o = pecscat(&["frobnicate"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stderr).contains("Usage"));
    assert_eq!(pecscat(&[]).status.code(), Some(1));
    assert_eq!(pecscat(&["--help"]).status.code(), Some(0));
}

#[test]
fn mie_validate_reports_error_and_verdict() {
    let o = pecscat(&["mie-validate", "--ka", "1.0", "--mesh-level", "2"]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    let err: f64 = text
        .lines()
        .find_map(|l| l.strip_prefix("relative_l2_error="))
        .unwrap()
        .parse()
        .unwrap();
    assert!(err > 0.0 && err < 0.03, "{text}");
    assert!(text.lines().any(|l| l == "PASS"));
    let strict = pecscat(&["mie-validate", "--ka", "1.0", "--mesh-level", "2", "--threshold", "1e-6"]);
    assert!(stdout(&strict).lines().any(|l| l == "FAIL"));
    assert_eq!(pecscat(&["mie-validate", "--ka", "-1", "--mesh-level", "2"]).status.code(), Some(1));
    assert_eq!(pecscat(&["mie-validate", "--ka", "300", "--mesh-level", "1"]).status.code(), Some(1));
}

#[test]
fn distance_between_mesh_files() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("cube.msh");
    let b = dir.path().join("cube_t0.2.msh");
    let cube = pec_scatter::geometry::generators::cube(pec_scatter::Vec3::ZERO, 1.0, 1).unwrap();
    pec_scatter::geometry::save_mesh(&cube, &a).unwrap();
    pec_scatter::geometry::save_mesh(&cube.translated(pec_scatter::Vec3::new(0.2, 0.0, 0.0)), &b).unwrap();
    let o = pecscat(&["distance", "--a", a.to_str().unwrap(), "--b", b.to_str().unwrap(), "--res", "0.01"]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    let vals: Vec<f64> = text.lines().nth(1).unwrap().split(',').map(|v| v.parse().unwrap()).collect();
    for v in &vals[..3] {
        assert!((v - 0.2).abs() <= 0.01, "{text}");
    }
    assert_eq!(pecscat(&["distance", "--a", "nowhere.msh", "--b", "cube"]).status.code(), Some(1));
}

#[test]
fn invalid_config_exits_1() {
    let dir = tempfile::tempdir().unwrap();
    let bad = write_config(dir.path(), "bad.cfg", "x0 = 1, 0, 0\n");
    assert_eq!(pecscat(&["solve", "--config", &bad]).status.code(), Some(1));
    let unknown = write_config(dir.path(), "unknown.cfg", "colour = red\n");
    assert_eq!(pecscat(&["solve", "--config", &unknown]).status.code(), Some(1));
    assert_eq!(pecscat(&["solve", "--config", "/nonexistent/file.cfg"]).status.code(), Some(1));
    let parallel = write_config(dir.path(), "par.cfg", "wave1.d = 1,0,0\nwave1.p = 1,0,0\n");
    assert_eq!(pecscat(&["solve", "--config", &parallel]).status.code(), Some(1));
}

#[test]
fn solver_failure_exits_2() {
    let dir = tempfile::tempdir().unwrap();
    // a lone triangle has no interior edges, hence no unknowns
    let mesh = dir.path().join("tri.msh");
    std::fs::write(&mesh, "v 0 0 0\nv 1 0 0\nv 0 1 0\nf 1 2 3\n").unwrap();
    let cfg = write_config(dir.path(), "tri.cfg", &format!("mesh.a = file {}\n", mesh.display()));
    let o = pecscat(&["solve", "--config", &cfg]);
    assert_eq!(o.status.code(), Some(2), "{}", String::from_utf8_lossy(&o.stderr));
}

#[test]
fn solve_and_farfield_outputs() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "s.cfg", SMALL);
    let o = pecscat(&["solve", "--config", &cfg]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    let row: Vec<&str> = text.lines().nth(1).unwrap().split(',').collect();
    assert_eq!(row[1], "obstacle");
    let relation: f64 = row[7].parse().unwrap();
    assert!(relation < 1e-3);
    let out = dir.path().join("ff.csv");
    let o = pecscat(&["farfield", "--config", &cfg, "--out", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    let ff = std::fs::read_to_string(&out).unwrap();
    assert_eq!(ff.lines().count(), 1 + 12 * 24);
    assert_eq!(pecscat(&["farfield", "--config", &cfg, "--wave", "2"]).status.code(), Some(1));
}

#[test]
fn diagnostics_subcommands() {
    for map in ["affine", "rotation", "reflection", "shear"] {
        let o = pecscat(&["transform-check", "--map", map]);
        assert_eq!(o.status.code(), Some(0));
        assert!(!stdout(&o).contains(",fail"), "{map}: {}", stdout(&o));
    }
    let o = pecscat(&["three-spheres", "--field", "plane", "--radii", "0.5,1,2"]);
    assert!(stdout(&o).contains("three_spheres_beta_closed_form") && !stdout(&o).contains(",fail"));
    assert_eq!(pecscat(&["three-spheres", "--radii", "1,0.5,2"]).status.code(), Some(1));
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "s.cfg", SMALL);
    let o = pecscat(&["radiation-check", "--config", &cfg]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("incident_flagged_non_decaying"));
}

#[test]
fn sweep_csv_is_append_only() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "s.cfg", SMALL);
    let out = dir.path().join("sweep.csv");
    let o = pecscat(&["stability-sweep", "--config", &cfg, "--family", "translate", "--params", "0.1,0.2", "--out", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let first = std::fs::read_to_string(&out).unwrap();
    assert!(first.starts_with("# schema_version=1\n"));
    let o = pecscat(&["stability-sweep", "--config", &cfg, "--family", "translate", "--params", "0.3", "--out", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    let second = std::fs::read_to_string(&out).unwrap();
    assert!(second.starts_with(&first));
    assert_eq!(second.lines().filter(|l| l.starts_with("translate-")).count(), 3);

    // an empty parameter list is not an error
    let o = pecscat(&["stability-sweep", "--config", &cfg, "--family", "translate", "--params", ""]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).lines().last().unwrap().starts_with("case_id"));
    let o = pecscat(&["stability-sweep", "--config", &cfg, "--family", "translate", "--params", "0.2,0.1"]);
    assert_eq!(o.status.code(), Some(1));
    assert_eq!(pecscat(&["stability-sweep", "--config", &cfg]).status.code(), Some(1));
}
