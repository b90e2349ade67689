//! Exposed voxel faces, coplanar merging into labeled patches, and the
//! reachability filter.

use alloc::collections::{BTreeMap, BTreeSet, VecDeque};
use alloc::vec::Vec;
use core::fmt;

use serde::{Deserialize, Serialize};

use crate::geometry::{CellIndex, VoxelGrid};
use crate::math::Vec3;

/// Outward face normal. Declaration order is the label ordering:
/// +Z, +X, -X, +Y, -Y, then -Z (never labeled).
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Direction {
    #[serde(rename = "+Z")]
    PosZ,
    #[serde(rename = "+X")]
    PosX,
    #[serde(rename = "-X")]
    NegX,
    #[serde(rename = "+Y")]
    PosY,
    #[serde(rename = "-Y")]
    NegY,
    #[serde(rename = "-Z")]
    NegZ,
}

impl Direction {
    pub const ALL: [Direction; 6] = [
        Direction::PosZ,
        Direction::PosX,
        Direction::NegX,
        Direction::PosY,
        Direction::NegY,
        Direction::NegZ,
    ];

    pub fn axis(self) -> usize {
        match self {
            Direction::PosX | Direction::NegX => 0,
            Direction::PosY | Direction::NegY => 1,
            Direction::PosZ | Direction::NegZ => 2,
        }
    }

    pub fn is_positive(self) -> bool {
        matches!(self, Direction::PosX | Direction::PosY | Direction::PosZ)
    }

    pub fn is_vertical_face(self) -> bool {
        self.axis() != 2
    }

    pub fn offset(self) -> [i32; 3] {
        let mut d = [0; 3];
        d[self.axis()] = if self.is_positive() { 1 } else { -1 };
        d
    }

    pub fn normal(self) -> Vec3 {
        let d = self.offset();
        Vec3::new(d[0] as f64, d[1] as f64, d[2] as f64)
    }

    pub fn opposite(self) -> Direction {
        match self {
            Direction::PosX => Direction::NegX,
            Direction::NegX => Direction::PosX,
            Direction::PosY => Direction::NegY,
            Direction::NegY => Direction::PosY,
            Direction::PosZ => Direction::NegZ,
            Direction::NegZ => Direction::PosZ,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Direction::PosZ => "+Z",
            Direction::PosX => "+X",
            Direction::NegX => "-X",
            Direction::PosY => "+Y",
            Direction::NegY => "-Y",
            Direction::NegZ => "-Z",
        }
    }
}

impl fmt::Display for Direction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// One exposed face of an occupied cell.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct CellFace {
    pub cell: CellIndex,
    pub dir: Direction,
}

impl CellFace {
    pub fn new(cell: CellIndex, dir: Direction) -> Self {
        Self { cell, dir }
    }

    /// Index of the grid plane the face lies on, along `dir.axis()`.
    pub fn plane_coord(&self) -> u32 {
        let c = self.cell.axis(self.dir.axis());
        if self.dir.is_positive() {
            c + 1
        } else {
            c
        }
    }

    /// Signed coordinate of the cell across the face.
    pub fn neighbour(&self) -> [i64; 3] {
        let d = self.dir.offset();
        [
            self.cell.i as i64 + d[0] as i64,
            self.cell.j as i64 + d[1] as i64,
            self.cell.k as i64 + d[2] as i64,
        ]
    }

    /// Face center in continuous grid coordinates.
    pub fn center_grid(&self) -> [f64; 3] {
        let d = self.dir.offset();
        [
            self.cell.i as f64 + 0.5 + 0.5 * d[0] as f64,
            self.cell.j as f64 + 0.5 + 0.5 * d[1] as f64,
            self.cell.k as f64 + 0.5 + 0.5 * d[2] as f64,
        ]
    }

    pub fn center_world(&self, grid: &VoxelGrid) -> Vec3 {
        grid.point_at(self.center_grid())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, thiserror::Error)]
pub enum DecomposeError {
    #[error("grid has no occupied cells")]
    EmptyGrid,
}

/// Maximal 4-connected coplanar region of exposed faces sharing a normal.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FacePatch {
    pub label: Option<u32>,
    pub normal: Direction,
    pub plane_coord: u32,
    /// Member faces, sorted.
    pub cells: Vec<CellFace>,
    pub centroid_world: Vec3,
    pub area_cells: usize,
}

impl FacePatch {
    pub fn min_cell(&self) -> CellIndex {
        self.cells[0].cell
    }

    /// Mean face center in continuous grid coordinates.
    pub fn centroid_grid(&self) -> [f64; 3] {
        let mut sum = [0.0; 3];
        for f in &self.cells {
            let c = f.center_grid();
            for a in 0..3 {
                sum[a] += c[a];
            }
        }
        let n = self.cells.len() as f64;
        [sum[0] / n, sum[1] / n, sum[2] / n]
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum OmissionReason {
    DownwardHorizontal,
    InwardVertical,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OmittedPatch {
    pub patch: FacePatch,
    pub reason: OmissionReason,
}

/// Labeled patches of a grid plus the patches withheld from labeling.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Decomposition {
    pub grid: VoxelGrid,
    pub patches: Vec<FacePatch>,
    pub omitted: Vec<OmittedPatch>,
}

impl Decomposition {
    pub fn label_count(&self) -> usize {
        self.patches.len()
    }

    pub fn labels(&self) -> impl Iterator<Item = u32> + '_ {
        self.patches.iter().filter_map(|p| p.label)
    }

    pub fn has_label(&self, label: u32) -> bool {
        label >= 1 && (label as usize) <= self.patches.len()
    }

    pub fn patch(&self, label: u32) -> Option<&FacePatch> {
        if self.has_label(label) {
            Some(&self.patches[label as usize - 1])
        } else {
            None
        }
    }

    /// Labeled and omitted patches together.
    pub fn all_patches(&self) -> impl Iterator<Item = &FacePatch> {
        self.patches.iter().chain(self.omitted.iter().map(|o| &o.patch))
    }
}

/// Faces of occupied cells whose neighbour across the face is empty or
/// outside the grid, sorted by cell then direction.
pub fn exposed_faces(grid: &VoxelGrid) -> Result<Vec<CellFace>, DecomposeError> {
    if grid.occupied_count() == 0 {
        return Err(DecomposeError::EmptyGrid);
    }
    let mut out = Vec::new();
    for cell in grid.occupied_cells() {
        for dir in Direction::ALL {
            let face = CellFace::new(cell, dir);
            if !grid.is_occupied_signed(face.neighbour()) {
                out.push(face);
            }
        }
    }
    out.sort();
    Ok(out)
}

/// Partitions faces into maximal 4-connected regions that share a normal and
/// a plane. Output is ordered by normal, plane, then minimum cell.
pub fn merge_coplanar(grid: &VoxelGrid, faces: &[CellFace]) -> Vec<FacePatch> {
    let mut groups: BTreeMap<(Direction, u32), BTreeSet<CellIndex>> = BTreeMap::new();
    for f in faces {
        groups.entry((f.dir, f.plane_coord())).or_default().insert(f.cell);
    }

    let mut patches = Vec::new();
    for ((dir, plane), mut remaining) in groups {
        let axis = dir.axis();
        let in_plane: [usize; 2] = match axis {
            0 => [1, 2],
            1 => [0, 2],
            _ => [0, 1],
        };
        while let Some(&seed) = remaining.iter().next() {
            remaining.remove(&seed);
            let mut members = alloc::vec![seed];
            let mut queue = VecDeque::from([seed]);
            while let Some(c) = queue.pop_front() {
                for a in in_plane {
                    for step in [-1i32, 1] {
                        let mut d = [0i32; 3];
                        d[a] = step;
                        if let Some(n) = c.offset(d) {
                            if remaining.remove(&n) {
                                members.push(n);
                                queue.push_back(n);
                            }
                        }
                    }
                }
            }
            members.sort();
            let cells: Vec<CellFace> = members.into_iter().map(|c| CellFace::new(c, dir)).collect();
            let mut patch = FacePatch {
                label: None,
                normal: dir,
                plane_coord: plane,
                area_cells: cells.len(),
                cells,
                centroid_world: Vec3::ZERO,
            };
            patch.centroid_world = grid.point_at(patch.centroid_grid());
            patches.push(patch);
        }
    }
    patches
}

/// True when the ray from the patch centroid along its outward normal passes
/// through an occupied cell before leaving the grid.
pub fn is_inward_facing(patch: &FacePatch, grid: &VoxelGrid) -> bool {
    let axis = patch.normal.axis();
    let g = patch.centroid_grid();
    let mut col = [0i64; 3];
    for a in 0..3 {
        col[a] = libm::floor(g[a]) as i64;
    }
    let dims = grid.dims();
    let plane = patch.plane_coord as i64;
    let (start, end) = if patch.normal.is_positive() {
        (plane, dims[axis] as i64)
    } else {
        (0, plane)
    };
    for t in start..end {
        col[axis] = t;
        if grid.is_occupied_signed(col) {
            return true;
        }
    }
    false
}

/// Applies the reachability filter and assigns labels `1..=n` in patch order.
///
/// `-Z` patches are omitted as downward horizontal. Vertical patches are
/// omitted as inward when [`is_inward_facing`] holds.
pub fn filter_and_label(patches: Vec<FacePatch>, grid: &VoxelGrid) -> Decomposition {
    let mut kept = Vec::new();
    let mut omitted = Vec::new();
    for mut patch in patches {
        patch.label = None;
        let reason = if patch.normal == Direction::NegZ {
            Some(OmissionReason::DownwardHorizontal)
        } else if patch.normal.is_vertical_face() && is_inward_facing(&patch, grid) {
            Some(OmissionReason::InwardVertical)
        } else {
            None
        };
        match reason {
            Some(reason) => omitted.push(OmittedPatch { patch, reason }),
            None => kept.push(patch),
        }
    }
    kept.sort_by_key(patch_order);
    for (n, p) in kept.iter_mut().enumerate() {
        p.label = Some(n as u32 + 1);
    }
    Decomposition {
        grid: grid.clone(),
        patches: kept,
        omitted,
    }
}

fn patch_order(p: &FacePatch) -> (Direction, u32, CellIndex) {
    (p.normal, p.plane_coord, p.min_cell())
}

/// Full decomposition of a grid.
pub fn decompose(grid: &VoxelGrid) -> Result<Decomposition, DecomposeError> {
    let faces = exposed_faces(grid)?;
    Ok(filter_and_label(merge_coplanar(grid, &faces), grid))
}

/// Closed triangle surface of the occupied cells in world coordinates,
/// two outward-wound triangles per exposed face, with shared corners welded.
pub fn surface_mesh(grid: &VoxelGrid) -> Result<crate::geometry::TriangleMesh, DecomposeError> {
    let faces = exposed_faces(grid)?;
    let mut index: BTreeMap<[u32; 3], u32> = BTreeMap::new();
    let mut vertices = Vec::new();
    let mut triangles = Vec::with_capacity(faces.len() * 2);
    let mut vertex = |g: [u32; 3]| -> u32 {
        *index.entry(g).or_insert_with(|| {
            vertices.push(grid.point_at([g[0] as f64, g[1] as f64, g[2] as f64]));
            (vertices.len() - 1) as u32
        })
    };
    for f in &faces {
        let a = f.dir.axis();
        let (u, v) = ((a + 1) % 3, (a + 2) % 3);
        let mut base = [f.cell.i, f.cell.j, f.cell.k];
        base[a] = f.plane_coord();
        let corner = |du: u32, dv: u32| {
            let mut c = base;
            c[u] += du;
            c[v] += dv;
            c
        };
        let q = [vertex(corner(0, 0)), vertex(corner(1, 0)), vertex(corner(1, 1)), vertex(corner(0, 1))];
        if f.dir.is_positive() {
            triangles.push([q[0], q[1], q[2]]);
            triangles.push([q[0], q[2], q[3]]);
        } else {
            triangles.push([q[0], q[2], q[1]]);
            triangles.push([q[0], q[3], q[2]]);
        }
    }
    Ok(crate::geometry::TriangleMesh::new(vertices, triangles).expect("grid corners are finite and indexed"))
}
