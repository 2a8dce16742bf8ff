//! Line-oriented ASCII mesh format.
//!
//! ```text
//! # comment
//! v x y z        vertex
//! g NAME         start a facet group
//! f i j k        triangle, 1-based vertex indices
//! ```

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::Path;

use super::mesh::TriangleMesh;
use crate::error::{Error, Result};
use crate::vec3::Vec3;

pub fn load_mesh(path: impl AsRef<Path>) -> Result<TriangleMesh> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })?;
    parse_mesh(&text)
}

pub fn parse_mesh(text: &str) -> Result<TriangleMesh> {
    let mut vertices = Vec::new();
    let mut triangles = Vec::new();
    let mut groups = Vec::new();
    let mut group_ids: BTreeMap<String, usize> = BTreeMap::new();
    let mut current_group: Option<usize> = None;
    let mut any_group = false;

    for (lineno, raw) in text.lines().enumerate() {
        let line_no = lineno + 1;
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let mut parts = line.split_whitespace();
        let tag = parts.next().unwrap_or_default();
        let rest: Vec<&str> = parts.collect();
        let err = |msg: String| Error::Parse { line: line_no, msg };
        match tag {
            "v" => {
                if rest.len() != 3 {
                    return Err(err(format!("vertex needs 3 coordinates, got {}", rest.len())));
                }
                let mut c = [0.0; 3];
                for (slot, s) in c.iter_mut().zip(&rest) {
                    *slot = s
                        .parse::<f64>()
                        .map_err(|e| err(format!("bad coordinate {s:?}: {e}")))?;
                }
                vertices.push(Vec3::from_array(c));
            }
            "f" => {
                if rest.len() != 3 {
                    return Err(err(format!("face needs 3 indices, got {}", rest.len())));
                }
                let mut idx = [0usize; 3];
                for (slot, s) in idx.iter_mut().zip(&rest) {
                    let i: usize = s.parse().map_err(|e| err(format!("bad index {s:?}: {e}")))?;
                    if i == 0 {
                        return Err(err("vertex indices are 1-based".into()));
                    }
                    *slot = i - 1;
                }
                triangles.push(idx);
                groups.push(current_group);
            }
            "g" => {
                let name = rest.join(" ");
                let next = group_ids.len();
                current_group = Some(*group_ids.entry(name).or_insert(next));
                any_group = true;
            }
            other => return Err(err(format!("unknown record {other:?}"))),
        }
    }

    let facet_group = if any_group {
        // faces before the first `g` line share an implicit group
        let implicit = group_ids.len();
        Some(groups.into_iter().map(|g| g.unwrap_or(implicit)).collect())
    } else {
        None
    };
    TriangleMesh::new(vertices, triangles, facet_group)
}

/// Serializes with shortest round-trip float formatting; one `g` record per facet group.
pub fn write_mesh_string(mesh: &TriangleMesh) -> String {
    let mut out = String::new();
    let _ = writeln!(
        out,
        "# {} vertices, {} triangles",
        mesh.vertices().len(),
        mesh.num_triangles()
    );
    for v in mesh.vertices() {
        let _ = writeln!(out, "v {:?} {:?} {:?}", v.x, v.y, v.z);
    }
    let mut order: Vec<usize> = (0..mesh.num_triangles()).collect();
    order.sort_by_key(|&t| (mesh.facet_group()[t], t));
    let mut last = None;
    for t in order {
        let g = mesh.facet_group()[t];
        if last != Some(g) {
            let _ = writeln!(out, "g cell{g}");
            last = Some(g);
        }
        let [a, b, c] = mesh.triangles()[t];
        let _ = writeln!(out, "f {} {} {}", a + 1, b + 1, c + 1);
    }
    out
}

pub fn save_mesh(mesh: &TriangleMesh, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    std::fs::write(path, write_mesh_string(mesh)).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })
}
