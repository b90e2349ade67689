//! Wavefront OBJ reader: `v` and `f` records only, polygons fan-triangulated.

use alloc::format;
use alloc::vec::Vec;

use super::{GeometryError, TriangleMesh};
use crate::math::Vec3;

pub fn parse_obj(bytes: &[u8]) -> Result<TriangleMesh, GeometryError> {
    let text = core::str::from_utf8(bytes).map_err(|e| GeometryError::Parse {
        offset: e.valid_up_to(),
        message: "OBJ input is not valid UTF-8".into(),
    })?;

    let mut vertices: Vec<Vec3> = Vec::new();
    // (offset of the face record, raw 1-based or negative indices)
    let mut faces: Vec<(usize, Vec<i64>)> = Vec::new();

    let mut offset = 0usize;
    for raw_line in text.split_inclusive('\n') {
        let line_start = offset;
        offset += raw_line.len();
        let line = raw_line.split('#').next().unwrap_or("").trim();
        let mut tokens = line.split_whitespace();
        match tokens.next() {
            Some("v") => {
                let mut coords = [0.0f64; 3];
                for c in coords.iter_mut() {
                    let tok = tokens.next().ok_or_else(|| GeometryError::Parse {
                        offset: line_start,
                        message: "vertex record needs three coordinates".into(),
                    })?;
                    *c = tok.parse::<f64>().map_err(|_| GeometryError::Parse {
                        offset: line_start,
                        message: format!("invalid vertex coordinate {tok:?}"),
                    })?;
                }
                vertices.push(Vec3::from(coords));
            }
            Some("f") => {
                let mut idx = Vec::new();
                for tok in tokens {
                    let head = tok.split('/').next().unwrap_or("");
                    let i = head.parse::<i64>().map_err(|_| GeometryError::Parse {
                        offset: line_start,
                        message: format!("invalid face index {tok:?}"),
                    })?;
                    if i == 0 {
                        return Err(GeometryError::Parse {
                            offset: line_start,
                            message: "face indices are 1-based; 0 is invalid".into(),
                        });
                    }
                    idx.push(i);
                }
                if idx.len() < 3 {
                    return Err(GeometryError::Parse {
                        offset: line_start,
                        message: "face record needs at least three vertices".into(),
                    });
                }
                faces.push((line_start, idx));
            }
            _ => {}
        }
    }

    let n = vertices.len() as i64;
    let mut triangles = Vec::new();
    for (at, idx) in faces {
        let mut resolved = Vec::with_capacity(idx.len());
        for i in idx {
            // Negative indices count back from the end of the vertex list.
            let zero_based = if i > 0 { i - 1 } else { n + i };
            if zero_based < 0 || zero_based >= n {
                return Err(GeometryError::Parse {
                    offset: at,
                    message: format!("face index {i} out of range for {n} vertices"),
                });
            }
            resolved.push(zero_based as u32);
        }
        for w in 1..resolved.len() - 1 {
            triangles.push([resolved[0], resolved[w], resolved[w + 1]]);
        }
    }

    TriangleMesh::new(vertices, triangles)
}

/// Writes `v` and `f` records with shortest round-trip float formatting.
pub fn write_obj(mesh: &TriangleMesh) -> alloc::string::String {
    use core::fmt::Write as _;
    let mut out = alloc::string::String::new();
    for v in mesh.vertices() {
        let _ = writeln!(out, "v {} {} {}", v.x, v.y, v.z);
    }
    for t in mesh.triangles() {
        let _ = writeln!(out, "f {} {} {}", t[0] + 1, t[1] + 1, t[2] + 1);
    }
    out
}
