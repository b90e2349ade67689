use alloc::collections::BTreeSet;
use alloc::vec::Vec;
use core::f64::consts::{FRAC_PI_2, PI};

use serde::{Deserialize, Serialize};

use super::sequence::SequenceWarning;
use super::PlanError;
use crate::decompose::{CellFace, Decomposition, Direction};
use crate::geometry::{CellIndex, ComponentSpec, VoxelGrid};
use crate::math::Vec3;
use crate::select::LabelSet;

/// Component type code as exported in the type list `T`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum ComponentKind {
    Structural,
    Panel,
}

impl ComponentKind {
    pub fn code(self) -> u8 {
        match self {
            ComponentKind::Structural => 0,
            ComponentKind::Panel => 1,
        }
    }
}

/// The grid slot a placement fills.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum PlacementTarget {
    Cell { cell: CellIndex },
    Face { cell: CellIndex, dir: Direction },
}

impl PlacementTarget {
    pub fn cell(&self) -> CellIndex {
        match *self {
            PlacementTarget::Cell { cell } | PlacementTarget::Face { cell, .. } => cell,
        }
    }
}

/// World placement of the grid: enough to turn targets back into poses.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GridFrame {
    pub origin: Vec3,
    pub cell_size: f64,
}

impl GridFrame {
    pub fn of(grid: &VoxelGrid) -> Self {
        Self {
            origin: grid.origin(),
            cell_size: grid.cell_size(),
        }
    }

    fn point(&self, g: [f64; 3]) -> Vec3 {
        self.origin + Vec3::new(g[0], g[1], g[2]) * self.cell_size
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ComponentPlacement {
    pub position: Vec3,
    /// Intrinsic XYZ Euler angles, radians.
    pub rotation: [f64; 3],
    pub ctype: ComponentKind,
    pub source_patch: Option<u32>,
    pub target: PlacementTarget,
}

impl ComponentPlacement {
    /// The `(x, y, z, rx, ry, rz)` row of the coordinate list `C`.
    pub fn pose6(&self) -> [f64; 6] {
        let p = self.position;
        let r = self.rotation;
        [p.x, p.y, p.z, r[0], r[1], r[2]]
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AssemblyModel {
    pub placements: Vec<ComponentPlacement>,
    pub grid: VoxelGrid,
    pub panel_labels: LabelSet,
    pub panel_thickness: f64,
    pub ordered: bool,
    pub warnings: Vec<SequenceWarning>,
}

impl AssemblyModel {
    pub fn frame(&self) -> GridFrame {
        GridFrame::of(&self.grid)
    }

    pub fn structural_count(&self) -> usize {
        self.placements.iter().filter(|p| p.ctype == ComponentKind::Structural).count()
    }

    pub fn panel_count(&self) -> usize {
        self.placements.len() - self.structural_count()
    }

    /// The exported pair of lists `(C, T)`.
    pub fn export_lists(&self) -> (Vec<[f64; 6]>, Vec<u8>) {
        let c = self.placements.iter().map(|p| p.pose6()).collect();
        let t = self.placements.iter().map(|p| p.ctype.code()).collect();
        (c, t)
    }
}

/// Euler angles taking local +Z onto the outward normal of `dir`.
pub fn panel_rotation(dir: Direction) -> [f64; 3] {
    match dir {
        Direction::PosZ => [0.0, 0.0, 0.0],
        Direction::PosX => [0.0, FRAC_PI_2, 0.0],
        Direction::NegX => [0.0, -FRAC_PI_2, 0.0],
        Direction::PosY => [-FRAC_PI_2, 0.0, 0.0],
        Direction::NegY => [FRAC_PI_2, 0.0, 0.0],
        Direction::NegZ => [PI, 0.0, 0.0],
    }
}

/// Row-major `Rx(rx) * Ry(ry) * Rz(rz)`.
pub fn euler_xyz_matrix(r: [f64; 3]) -> [[f64; 3]; 3] {
    let (sx, cx) = (libm::sin(r[0]), libm::cos(r[0]));
    let (sy, cy) = (libm::sin(r[1]), libm::cos(r[1]));
    let (sz, cz) = (libm::sin(r[2]), libm::cos(r[2]));
    [
        [cy * cz, -cy * sz, sy],
        [cx * sz + sx * sy * cz, cx * cz - sx * sy * sz, -sx * cy],
        [sx * sz - cx * sy * cz, sx * cz + cx * sy * sz, cx * cy],
    ]
}

pub fn structural_pose(frame: &GridFrame, cell: CellIndex) -> (Vec3, [f64; 3]) {
    let g = [cell.i as f64 + 0.5, cell.j as f64 + 0.5, cell.k as f64 + 0.5];
    (frame.point(g), [0.0; 3])
}

/// Face center pushed half a panel thickness outward.
pub fn panel_pose(frame: &GridFrame, face: CellFace, thickness: f64) -> (Vec3, [f64; 3]) {
    let center = frame.point(face.center_grid());
    (center + face.dir.normal() * (thickness / 2.0), panel_rotation(face.dir))
}

/// One structural placement per occupied cell, then one panel per member
/// face of each selected patch. The result is unordered.
pub fn build_assembly(
    grid: &VoxelGrid,
    panels: &LabelSet,
    decomp: &Decomposition,
    spec: &ComponentSpec,
) -> Result<AssemblyModel, PlanError> {
    if grid != &decomp.grid {
        return Err(PlanError::GridMismatch);
    }
    spec.validate()
        .map_err(|e| PlanError::Config(alloc::format!("{e}")))?;
    let unknown: Vec<u32> = panels.labels.iter().copied().filter(|&l| !decomp.has_label(l)).collect();
    if !unknown.is_empty() {
        return Err(PlanError::UnknownLabels(unknown));
    }
    let frame = GridFrame::of(grid);
    let mut placements: Vec<ComponentPlacement> = grid
        .occupied_cells()
        .map(|cell| {
            let (position, rotation) = structural_pose(&frame, cell);
            ComponentPlacement {
                position,
                rotation,
                ctype: ComponentKind::Structural,
                source_patch: None,
                target: PlacementTarget::Cell { cell },
            }
        })
        .collect();
    let mut seen = BTreeSet::new();
    for &label in &panels.labels {
        let patch = decomp.patch(label).expect("checked above");
        for &face in &patch.cells {
            if !seen.insert(face) {
                continue;
            }
            let (position, rotation) = panel_pose(&frame, face, spec.panel_thickness);
            placements.push(ComponentPlacement {
                position,
                rotation,
                ctype: ComponentKind::Panel,
                source_patch: Some(label),
                target: PlacementTarget::Face {
                    cell: face.cell,
                    dir: face.dir,
                },
            });
        }
    }
    Ok(AssemblyModel {
        placements,
        grid: grid.clone(),
        panel_labels: panels.clone(),
        panel_thickness: spec.panel_thickness,
        ordered: false,
        warnings: Vec::new(),
    })
}
