use alloc::collections::BTreeSet;
use alloc::string::{String, ToString};
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use super::RenderError;
use crate::decompose::{CellFace, Decomposition, Direction};
use crate::math::Vec3;

/// Orthographic camera looking along `view_dir`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AxonometricView {
    pub name: String,
    pub view_dir: Vec3,
    pub up: Vec3,
}

impl AxonometricView {
    /// Normalizes both vectors; rejects zero or parallel inputs.
    pub fn new(name: &str, view_dir: Vec3, up: Vec3) -> Result<Self, RenderError> {
        let d = view_dir.normalized().ok_or(RenderError::InvalidView)?;
        let u = up.normalized().ok_or(RenderError::InvalidView)?;
        if d.cross(u).norm() < 1e-9 {
            return Err(RenderError::InvalidView);
        }
        Ok(Self {
            name: name.to_string(),
            view_dir: d,
            up: u,
        })
    }

    /// Screen basis `(right, up)` orthogonal to the view direction.
    fn basis(&self) -> (Vec3, Vec3) {
        let right = self.view_dir.cross(self.up).normalized().expect("validated view");
        let up = right.cross(self.view_dir);
        (right, up)
    }

    pub fn faces_viewer(&self, normal: Vec3) -> bool {
        normal.dot(self.view_dir) < 0.0
    }
}

/// The two opposite-corner views used for labeled renders: `A` looks toward
/// `(-1,-1,-1)` and `B` toward `(+1,+1,-1)`, both with `+Z` up.
pub fn standard_views() -> (AxonometricView, AxonometricView) {
    let up = Vec3::new(0.0, 0.0, 1.0);
    (
        AxonometricView::new("A", Vec3::new(-1.0, -1.0, -1.0), up).expect("valid"),
        AxonometricView::new("B", Vec3::new(1.0, 1.0, -1.0), up).expect("valid"),
    )
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "kind", content = "normal")]
pub enum FillClass {
    Face(Direction),
    Highlight,
    Omitted,
}

impl FillClass {
    pub fn rgb(self) -> [u8; 3] {
        match self {
            FillClass::Face(Direction::PosZ) => [0xe8, 0xc1, 0x70],
            FillClass::Face(Direction::PosX) => [0x8f, 0xb3, 0xd9],
            FillClass::Face(Direction::NegX) => [0x6f, 0x93, 0xb9],
            FillClass::Face(Direction::PosY) => [0xa8, 0xc9, 0x9a],
            FillClass::Face(Direction::NegY) => [0x88, 0xa9, 0x7a],
            FillClass::Face(Direction::NegZ) => [0x99, 0x99, 0x99],
            FillClass::Highlight => [0xe0, 0x60, 0x3a],
            FillClass::Omitted => [0xc8, 0xc8, 0xc8],
        }
    }
}

pub const BACKGROUND: [u8; 3] = [0xff, 0xff, 0xff];
pub const STROKE: [u8; 3] = [0x33, 0x33, 0x33];
pub const TEXT: [u8; 3] = [0x00, 0x00, 0x00];
pub const HALO: [u8; 3] = [0xff, 0xff, 0xff];

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SceneLabel {
    pub text: String,
    /// Pixel coordinates, y down.
    pub anchor: [f64; 2],
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScenePolygon {
    /// Pixel coordinates, y down.
    pub points: Vec<[f64; 2]>,
    /// Larger is nearer the viewer; polygons are stored in ascending order.
    pub depth: f64,
    pub fill: FillClass,
    pub face: CellFace,
    /// Label of the owning patch, if any.
    pub patch_label: Option<u32>,
    /// Set on exactly one polygon per visible labeled patch.
    pub label: Option<SceneLabel>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LabeledScene {
    pub width: u32,
    pub height: u32,
    pub view: AxonometricView,
    pub polygons: Vec<ScenePolygon>,
}

impl LabeledScene {
    pub fn empty(width: u32, height: u32, view: AxonometricView) -> Self {
        Self {
            width,
            height,
            view,
            polygons: Vec::new(),
        }
    }

    pub fn labels(&self) -> impl Iterator<Item = &SceneLabel> {
        self.polygons.iter().filter_map(|p| p.label.as_ref())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RenderOptions {
    pub width: u32,
    pub height: u32,
    /// Draw patch labels.
    pub labeled: bool,
    /// Labels drawn with the highlight fill.
    pub highlight: BTreeSet<u32>,
}

impl Default for RenderOptions {
    fn default() -> Self {
        Self {
            width: 1024,
            height: 1024,
            labeled: true,
            highlight: BTreeSet::new(),
        }
    }
}

const MARGIN: f64 = 0.08;

/// Orthographic projection of every front-facing exposed cell face, ordered
/// back to front. Labels are anchored at the projected patch centroid.
pub fn project(decomp: &Decomposition, view: &AxonometricView, opts: &RenderOptions) -> LabeledScene {
    let grid = &decomp.grid;
    let (right, up) = view.basis();
    let to_screen = |p: Vec3| [p.dot(right), p.dot(up)];

    // Frame the occupied cells' bounding box so both views share a scale.
    let mut lo = [u32::MAX; 3];
    let mut hi = [0u32; 3];
    for c in grid.occupied_cells() {
        for a in 0..3 {
            lo[a] = lo[a].min(c.axis(a));
            hi[a] = hi[a].max(c.axis(a) + 1);
        }
    }
    let mut smin = [f64::INFINITY; 2];
    let mut smax = [f64::NEG_INFINITY; 2];
    if grid.occupied_count() > 0 {
        for corner in 0..8u32 {
            let pick = |a: usize| if corner & (1 << a) != 0 { hi[a] } else { lo[a] } as f64;
            let s = to_screen(grid.point_at([pick(0), pick(1), pick(2)]));
            for a in 0..2 {
                smin[a] = smin[a].min(s[a]);
                smax[a] = smax[a].max(s[a]);
            }
        }
    } else {
        smin = [0.0; 2];
        smax = [1.0; 2];
    }
    let (w, h) = (opts.width as f64, opts.height as f64);
    let span = [(smax[0] - smin[0]).max(1e-12), (smax[1] - smin[1]).max(1e-12)];
    let scale = (w * (1.0 - 2.0 * MARGIN) / span[0]).min(h * (1.0 - 2.0 * MARGIN) / span[1]);
    let mid = [(smin[0] + smax[0]) * 0.5, (smin[1] + smax[1]) * 0.5];
    let to_pixel = |p: Vec3| {
        let s = to_screen(p);
        [w * 0.5 + scale * (s[0] - mid[0]), h * 0.5 - scale * (s[1] - mid[1])]
    };

    let mut polygons: Vec<ScenePolygon> = Vec::new();
    for (patch, omitted) in decomp
        .patches
        .iter()
        .map(|p| (p, false))
        .chain(decomp.omitted.iter().map(|o| (&o.patch, true)))
    {
        if !view.faces_viewer(patch.normal.normal()) {
            continue;
        }
        let fill = match patch.label {
            Some(l) if opts.highlight.contains(&l) => FillClass::Highlight,
            _ if omitted => FillClass::Omitted,
            _ => FillClass::Face(patch.normal),
        };
        for face in &patch.cells {
            let center = face.center_grid();
            let axis = face.dir.axis();
            let (ua, va) = match axis {
                0 => (1, 2),
                1 => (0, 2),
                _ => (0, 1),
            };
            let corner = |du: f64, dv: f64| {
                let mut g = center;
                g[ua] += du;
                g[va] += dv;
                to_pixel(grid.point_at(g))
            };
            let points = alloc::vec![
                corner(-0.5, -0.5),
                corner(0.5, -0.5),
                corner(0.5, 0.5),
                corner(-0.5, 0.5),
            ];
            let depth = -grid.point_at(center).dot(view.view_dir);
            polygons.push(ScenePolygon {
                points,
                depth,
                fill,
                face: *face,
                patch_label: patch.label,
                label: None,
            });
        }
    }
    // Stable order: depth, then face identity, so ties are platform independent.
    polygons.sort_by(|a, b| a.depth.total_cmp(&b.depth).then(a.face.cmp(&b.face)));

    if opts.labeled {
        for patch in &decomp.patches {
            let Some(label) = patch.label else { continue };
            if !view.faces_viewer(patch.normal.normal()) {
                continue;
            }
            if let Some(last) = polygons.iter().rposition(|p| p.patch_label == Some(label)) {
                polygons[last].label = Some(SceneLabel {
                    text: label.to_string(),
                    anchor: to_pixel(patch.centroid_world),
                });
            }
        }
    }

    LabeledScene {
        width: opts.width,
        height: opts.height,
        view: view.clone(),
        polygons,
    }
}
