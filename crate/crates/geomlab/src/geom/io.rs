//! File formats.
//!
//! OBJ subset: `v x y z` and `f i j k` lines (1-based indices) plus `#`
//! comments; anything else is rejected. Curves are CSV, one `x,y,z` vertex
//! per line, closed implicitly; `#` comment lines and a non-numeric header
//! row are skipped on input.

use std::fmt::Write as _;
use std::path::Path;

use crate::error::{GeomError, Result};
use crate::geom::curve::Curve;
use crate::geom::mesh::TriMesh;
use crate::geom::point::P3;

/// Identifies output files written by this crate.
pub const ARTIFACT_VERSION: &str = concat!("geomlab/", env!("CARGO_PKG_VERSION"));

/// Load and validate a mesh from the OBJ subset.
pub fn load_mesh(path: impl AsRef<Path>) -> Result<TriMesh> {
    let text = std::fs::read_to_string(path.as_ref())?;
    parse_obj(&text)
}

pub fn parse_obj(text: &str) -> Result<TriMesh> {
    let mut vertices: Vec<P3> = Vec::new();
    let mut faces: Vec<[usize; 3]> = Vec::new();
    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let mut parts = line.split_whitespace();
        let tag = parts.next().unwrap();
        let fields: Vec<&str> = parts.collect();
        match tag {
            "v" => {
                if fields.len() != 3 {
                    return Err(GeomError::Parse(format!(
                        "line {}: vertex needs exactly 3 coordinates",
                        lineno + 1
                    )));
                }
                let mut c = [0.0; 3];
                for (k, f) in fields.iter().enumerate() {
                    c[k] = f.parse::<f64>().map_err(|_| {
                        GeomError::Parse(format!("line {}: bad coordinate {f:?}", lineno + 1))
                    })?;
                }
                vertices.push(P3::new(c[0], c[1], c[2]));
            }
            "f" => {
                if fields.len() != 3 {
                    return Err(GeomError::Parse(format!(
                        "line {}: only triangle faces are supported",
                        lineno + 1
                    )));
                }
                let mut idx = [0usize; 3];
                for (k, f) in fields.iter().enumerate() {
                    let i: i64 = f.parse().map_err(|_| {
                        GeomError::Parse(format!("line {}: bad face index {f:?}", lineno + 1))
                    })?;
                    if i < 1 {
                        return Err(GeomError::Parse(format!(
                            "line {}: face indices are 1-based and positive",
                            lineno + 1
                        )));
                    }
                    idx[k] = (i - 1) as usize;
                }
                faces.push(idx);
            }
            other => {
                return Err(GeomError::Parse(format!(
                    "line {}: unsupported directive {other:?}",
                    lineno + 1
                )));
            }
        }
    }
    TriMesh::new(vertices, faces)
}

pub fn write_obj(mesh: &TriMesh) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "# {ARTIFACT_VERSION}");
    for p in mesh.vertices() {
        let _ = writeln!(out, "v {} {} {}", p.x(), p.y(), p.z());
    }
    for f in mesh.faces() {
        let _ = writeln!(out, "f {} {} {}", f[0] + 1, f[1] + 1, f[2] + 1);
    }
    out
}

pub fn save_mesh(mesh: &TriMesh, path: impl AsRef<Path>) -> Result<()> {
    std::fs::write(path, write_obj(mesh))?;
    Ok(())
}

/// Load a closed curve from CSV (`x,y,z` per line).
pub fn load_curve(path: impl AsRef<Path>) -> Result<Curve<3>> {
    let text = std::fs::read_to_string(path.as_ref())?;
    parse_curve_csv(&text)
}

pub fn parse_curve_csv(text: &str) -> Result<Curve<3>> {
    let mut pts = Vec::new();
    let mut header_allowed = true;
    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let fields: Vec<&str> = line.split(',').map(str::trim).collect();
        let parsed: Option<Vec<f64>> = fields.iter().map(|f| f.parse::<f64>().ok()).collect();
        match parsed {
            Some(c) if c.len() == 3 => {
                pts.push(P3::new(c[0], c[1], c[2]));
                header_allowed = false;
            }
            // a single non-numeric row before any data is a column header
            _ if header_allowed => header_allowed = false,
            _ => {
                return Err(GeomError::Parse(format!(
                    "line {}: expected `x,y,z`, got {line:?}",
                    lineno + 1
                )))
            }
        }
    }
    Curve::closed(pts)
}

pub fn write_curve_csv(curve: &Curve<3>) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "# {ARTIFACT_VERSION}");
    let _ = writeln!(out, "x,y,z");
    for p in curve.vertices() {
        let _ = writeln!(out, "{},{},{}", p.x(), p.y(), p.z());
    }
    out
}

pub fn save_curve(curve: &Curve<3>, path: impl AsRef<Path>) -> Result<()> {
    std::fs::write(path, write_curve_csv(curve))?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::shapes;

    #[test]
    fn obj_roundtrip_disk() {
        let m = shapes::disk_fan(1.0, 64);
        let text = write_obj(&m);
        let back = parse_obj(&text).unwrap();
        assert_eq!(back.vertices().len(), m.vertices().len());
        assert_eq!(back.faces(), m.faces());
        assert_eq!(back.boundary_loops().len(), 1);
        assert_eq!(back.boundary_loops()[0].len(), 64);
    }

    #[test]
    fn obj_rejects_unsupported_directives() {
        let r = parse_obj("v 0 0 0\nvn 1 0 0\n");
        assert!(matches!(r, Err(GeomError::Parse(_))));
        let r = parse_obj("v 0 0 0\nv 1 0 0\nv 0 1 0\nf 1/1 2/2 3/3\n");
        assert!(matches!(r, Err(GeomError::Parse(_))));
    }

    #[test]
    fn obj_rejects_nonmanifold_topology() {
        let text = "v 0 0 0\nv 1 0 0\nv 0 1 0\nv 0 -1 0\nv 0 0 1\nf 1 2 3\nf 1 2 4\nf 1 2 5\n";
        assert!(matches!(parse_obj(text), Err(GeomError::Topology(_))));
    }

    #[test]
    fn curve_csv_roundtrip() {
        let c = shapes::circle_curve(1.0, 32);
        let text = write_curve_csv(&c);
        let back = parse_curve_csv(&text).unwrap();
        assert_eq!(back.len(), 32);
        assert!(back.vertices()[5].dist(&c.vertices()[5]) < 1e-15);
    }
}
