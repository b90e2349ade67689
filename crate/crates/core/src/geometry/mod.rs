//! Mesh loading and voxelization onto the structural-component grid.

mod mesh;
mod obj;
mod stl;
mod voxelize;

use alloc::string::String;

use serde::{Deserialize, Serialize};

pub(crate) use voxelize::NEIGHBOURS_6;
pub use mesh::{Aabb, ComponentSpec, TriangleMesh};
pub use obj::{parse_obj, write_obj};
pub use stl::{looks_like_binary_stl, parse_ascii_stl, parse_binary_stl, write_binary_stl};
pub use voxelize::{
    triangle_box_overlap, voxelize, CellIndex, FillMethod, VoxelGrid, MAX_GRID_CELLS,
};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum GeometryError {
    #[error("parse error at byte {offset}: {message}")]
    Parse { offset: usize, message: String },
    #[error("mesh has no triangles")]
    EmptyMesh,
    #[error("triangle {triangle} references vertex {index} but only {vertex_count} exist")]
    InvalidIndex {
        triangle: usize,
        index: u32,
        vertex_count: usize,
    },
    #[error("vertex {0} has a non-finite coordinate")]
    NonFiniteVertex(usize),
    #[error("mesh bounding box has zero extent along the {0} axis")]
    DegenerateMesh(char),
    #[error("grid resolution too coarse: no cells would be produced")]
    ResolutionTooCoarse,
    #[error("grid of {cells} cells exceeds the limit of {limit}")]
    ResolutionTooFine { cells: u64, limit: u64 },
    #[error("invalid component spec: {0}")]
    InvalidSpec(String),
}

/// Supported mesh encodings.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MeshFormat {
    Obj,
    StlBinary,
    StlAscii,
}

impl MeshFormat {
    /// Guesses the format from a file extension and the leading bytes.
    ///
    /// Binary STL is recognised by its length matching the facet count, so a
    /// binary file whose header happens to begin with `solid` is still read
    /// as binary.
    pub fn sniff(bytes: &[u8], extension: Option<&str>) -> MeshFormat {
        if looks_like_binary_stl(bytes) {
            return MeshFormat::StlBinary;
        }
        let ext_is = |e: &str| extension.is_some_and(|x| x.eq_ignore_ascii_case(e));
        let starts_solid = bytes
            .iter()
            .skip_while(|b| b.is_ascii_whitespace())
            .take(5)
            .copied()
            .eq(b"solid".iter().copied());
        if ext_is("stl") {
            if starts_solid {
                MeshFormat::StlAscii
            } else {
                MeshFormat::StlBinary
            }
        } else if ext_is("obj") || !starts_solid {
            MeshFormat::Obj
        } else {
            MeshFormat::StlAscii
        }
    }
}

/// Parses a mesh from raw bytes.
pub fn load_mesh(bytes: &[u8], format: MeshFormat) -> Result<TriangleMesh, GeometryError> {
    if bytes.is_empty() {
        return Err(GeometryError::Parse {
            offset: 0,
            message: "input is empty".into(),
        });
    }
    match format {
        MeshFormat::Obj => parse_obj(bytes),
        MeshFormat::StlBinary => parse_binary_stl(bytes),
        MeshFormat::StlAscii => parse_ascii_stl(bytes),
    }
}
