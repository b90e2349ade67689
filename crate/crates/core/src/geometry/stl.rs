//! STL readers. Binary: 80-byte header, little-endian u32 facet count,
//! 50-byte facets. ASCII: `solid` / `facet` / `outer loop` / `vertex` grammar.

use alloc::format;
use alloc::vec::Vec;

use super::{GeometryError, TriangleMesh};
use crate::math::Vec3;

const HEADER_LEN: usize = 80;
const FACET_LEN: usize = 50;

/// True when the length matches the count stored in the header.
pub fn looks_like_binary_stl(bytes: &[u8]) -> bool {
    bytes.len() >= HEADER_LEN + 4 && bytes.len() == HEADER_LEN + 4 + FACET_LEN * facet_count(bytes)
}

fn facet_count(bytes: &[u8]) -> usize {
    u32::from_le_bytes([bytes[80], bytes[81], bytes[82], bytes[83]]) as usize
}

fn read_f32(bytes: &[u8], at: usize) -> f64 {
    f32::from_le_bytes([bytes[at], bytes[at + 1], bytes[at + 2], bytes[at + 3]]) as f64
}

pub fn parse_binary_stl(bytes: &[u8]) -> Result<TriangleMesh, GeometryError> {
    if bytes.len() < HEADER_LEN + 4 {
        return Err(GeometryError::Parse {
            offset: bytes.len(),
            message: "binary STL shorter than its 84-byte preamble".into(),
        });
    }
    let count = facet_count(bytes);
    let expected = HEADER_LEN + 4 + FACET_LEN * count;
    if bytes.len() < expected {
        return Err(GeometryError::Parse {
            offset: bytes.len(),
            message: format!("binary STL declares {count} facets but is truncated"),
        });
    }
    if count == 0 {
        return Err(GeometryError::EmptyMesh);
    }
    let mut vertices = Vec::with_capacity(count * 3);
    let mut triangles = Vec::with_capacity(count);
    for f in 0..count {
        // Facet normal (12 bytes) is ignored; winding is not trusted either.
        let base = HEADER_LEN + 4 + f * FACET_LEN + 12;
        let first = vertices.len() as u32;
        for v in 0..3 {
            let at = base + v * 12;
            vertices.push(Vec3::new(
                read_f32(bytes, at),
                read_f32(bytes, at + 4),
                read_f32(bytes, at + 8),
            ));
        }
        triangles.push([first, first + 1, first + 2]);
    }
    TriangleMesh::new(vertices, triangles)
}

pub fn parse_ascii_stl(bytes: &[u8]) -> Result<TriangleMesh, GeometryError> {
    let text = core::str::from_utf8(bytes).map_err(|e| GeometryError::Parse {
        offset: e.valid_up_to(),
        message: "ASCII STL is not valid UTF-8".into(),
    })?;

    // Tokenize keeping byte offsets for error reporting.
    let tokens: Vec<(usize, &str)> = text
        .split_ascii_whitespace()
        .map(|t| (t.as_ptr() as usize - text.as_ptr() as usize, t))
        .collect();
    let mut pos = 0usize;
    let err = |offset: usize, message: &str| GeometryError::Parse {
        offset,
        message: message.into(),
    };
    let at = |pos: usize| tokens.get(pos).map(|t| t.0).unwrap_or(text.len());

    let expect = |pos: &mut usize, word: &str| -> Result<(), GeometryError> {
        match tokens.get(*pos) {
            Some((_, t)) if t.eq_ignore_ascii_case(word) => {
                *pos += 1;
                Ok(())
            }
            Some((o, t)) => Err(GeometryError::Parse {
                offset: *o,
                message: format!("expected `{word}`, found `{t}`"),
            }),
            None => Err(GeometryError::Parse {
                offset: text.len(),
                message: format!("expected `{word}`, found end of input"),
            }),
        }
    };

    expect(&mut pos, "solid")?;
    // Optional solid name: everything up to the first `facet` or `endsolid`.
    while let Some((_, t)) = tokens.get(pos) {
        if t.eq_ignore_ascii_case("facet") || t.eq_ignore_ascii_case("endsolid") {
            break;
        }
        pos += 1;
    }

    let mut vertices = Vec::new();
    let mut triangles = Vec::new();
    loop {
        match tokens.get(pos) {
            Some((_, t)) if t.eq_ignore_ascii_case("endsolid") => break,
            Some((_, t)) if t.eq_ignore_ascii_case("facet") => {}
            Some((o, t)) => return Err(GeometryError::Parse {
                offset: *o,
                message: format!("expected `facet` or `endsolid`, found `{t}`"),
            }),
            None => return Err(err(text.len(), "missing `endsolid`")),
        }
        pos += 1;
        expect(&mut pos, "normal")?;
        for _ in 0..3 {
            parse_number(&tokens, &mut pos, text.len())?;
        }
        expect(&mut pos, "outer")?;
        expect(&mut pos, "loop")?;
        let first = vertices.len() as u32;
        for _ in 0..3 {
            expect(&mut pos, "vertex")?;
            let x = parse_number(&tokens, &mut pos, text.len())?;
            let y = parse_number(&tokens, &mut pos, text.len())?;
            let z = parse_number(&tokens, &mut pos, text.len())?;
            vertices.push(Vec3::new(x, y, z));
        }
        if !matches!(tokens.get(pos), Some((_, t)) if t.eq_ignore_ascii_case("endloop")) {
            return Err(err(at(pos), "facets must have exactly three vertices"));
        }
        pos += 1;
        expect(&mut pos, "endfacet")?;
        triangles.push([first, first + 1, first + 2]);
    }
    TriangleMesh::new(vertices, triangles)
}

fn parse_number(tokens: &[(usize, &str)], pos: &mut usize, end: usize) -> Result<f64, GeometryError> {
    match tokens.get(*pos) {
        Some((o, t)) => {
            let v = t.parse::<f64>().map_err(|_| GeometryError::Parse {
                offset: *o,
                message: format!("invalid number `{t}`"),
            })?;
            *pos += 1;
            Ok(v)
        }
        None => Err(GeometryError::Parse {
            offset: end,
            message: "expected a number, found end of input".into(),
        }),
    }
}

/// Serializes triangles as a binary STL (normals written as zero).
pub fn write_binary_stl(mesh: &TriangleMesh) -> Vec<u8> {
    let mut out = Vec::with_capacity(84 + 50 * mesh.triangles().len());
    out.extend_from_slice(&[0u8; 80]);
    out.extend_from_slice(&(mesh.triangles().len() as u32).to_le_bytes());
    for t in 0..mesh.triangles().len() {
        out.extend_from_slice(&[0u8; 12]);
        for v in mesh.triangle(t) {
            for c in v.to_array() {
                out.extend_from_slice(&(c as f32).to_le_bytes());
            }
        }
        out.extend_from_slice(&[0u8; 2]);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ascii_single_facet() {
        let src = "solid tri\n facet normal 0 0 1\n  outer loop\n   vertex 0 0 0\n   vertex 1 0 0\n   vertex 0 1 0\n  endloop\n endfacet\nendsolid tri\n";
        let mesh = parse_ascii_stl(src.as_bytes()).unwrap();
        assert_eq!(mesh.triangles().len(), 1);
        assert_eq!(mesh.bbox().max, Vec3::new(1.0, 1.0, 0.0));
    }

    #[test]
    fn ascii_missing_endloop() {
        let src = "solid\nfacet normal 0 0 1\nouter loop\nvertex 0 0 0\nvertex 1 0 0\nvertex 0 1 0\nvertex 1 1 0\nendloop\nendfacet\nendsolid\n";
        assert!(matches!(parse_ascii_stl(src.as_bytes()), Err(GeometryError::Parse { .. })));
    }

    #[test]
    fn ascii_empty_solid() {
        assert_eq!(parse_ascii_stl(b"solid x\nendsolid x\n"), Err(GeometryError::EmptyMesh));
    }

    #[test]
    fn binary_truncated() {
        let mut bytes = alloc::vec![0u8; 84];
        bytes[80] = 2;
        bytes.extend_from_slice(&[0u8; 50]);
        assert!(matches!(parse_binary_stl(&bytes), Err(GeometryError::Parse { .. })));
        assert!(!looks_like_binary_stl(&bytes));
    }
}
