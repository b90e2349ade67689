//! Deterministic axonometric renders of a decomposition.
//!
//! Every exposed cell face is drawn as an orthographic quad using the
//! painter's algorithm; no depth buffer is needed because the quads are
//! axis-aligned and never interpenetrate. Only faces whose normal points
//! toward the camera are emitted.

pub mod font;
mod raster;
mod scene;
mod svg;

pub use raster::{rasterize, RgbImage, MAX_CANVAS};
pub use scene::{
    project, standard_views, AxonometricView, FillClass, LabeledScene, RenderOptions, SceneLabel,
    ScenePolygon, BACKGROUND, HALO, STROKE, TEXT,
};
pub use svg::render_svg;

#[derive(Debug, Clone, Copy, PartialEq, Eq, thiserror::Error)]
pub enum RenderError {
    #[error("canvas {width}x{height} exceeds the 4096x4096 limit")]
    CanvasTooLarge { width: u32, height: u32 },
    #[error("canvas has zero width or height")]
    EmptyCanvas,
    #[error("view direction and up vector must be non-zero and non-parallel")]
    InvalidView,
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::decompose::{decompose, Direction};
    use crate::geometry::{CellIndex, VoxelGrid};
    use crate::math::Vec3;
    use alloc::string::String;
    use alloc::vec::Vec;

    fn decomp(cells: &[[u32; 3]]) -> crate::decompose::Decomposition {
        let cells: Vec<CellIndex> = cells.iter().map(|&c| c.into()).collect();
        decompose(&VoxelGrid::from_cells(1.0, &cells).unwrap()).unwrap()
    }

    fn opts(w: u32, h: u32, labeled: bool) -> RenderOptions {
        RenderOptions {
            width: w,
            height: h,
            labeled,
            ..RenderOptions::default()
        }
    }

    #[test]
    fn cube_view_a_shows_three_faces() {
        let (a, _) = standard_views();
        let scene = project(&decomp(&[[0, 0, 0]]), &a, &opts(512, 512, true));
        assert_eq!(scene.polygons.len(), 3);
        let mut normals: Vec<Direction> = scene.polygons.iter().map(|p| p.face.dir).collect();
        normals.sort();
        assert_eq!(normals, [Direction::PosZ, Direction::PosX, Direction::PosY]);
        let labels: Vec<&str> = scene.labels().map(|l| l.text.as_str()).collect();
        assert!(labels.contains(&"1"), "+Z patch is label 1");
    }

    #[test]
    fn straight_down_view_shows_top_only() {
        let view = AxonometricView::new("top", Vec3::new(0.0, 0.0, -1.0), Vec3::new(0.0, 1.0, 0.0)).unwrap();
        let scene = project(&decomp(&[[0, 0, 0]]), &view, &opts(64, 64, true));
        assert_eq!(scene.polygons.len(), 1);
        assert_eq!(scene.polygons[0].face.dir, Direction::PosZ);
    }

    #[test]
    fn merged_patch_has_one_label() {
        let (a, _) = standard_views();
        let d = decomp(&[[0, 0, 0], [1, 0, 0]]);
        let scene = project(&d, &a, &opts(256, 256, true));
        let top: Vec<_> = scene.polygons.iter().filter(|p| p.face.dir == Direction::PosZ).collect();
        assert_eq!(top.len(), 2);
        assert_eq!(top.iter().filter(|p| p.label.is_some()).count(), 1);
    }

    #[test]
    fn parallel_view_rejected() {
        let v = Vec3::new(0.0, 0.0, 1.0);
        assert_eq!(AxonometricView::new("x", v, v), Err(RenderError::InvalidView));
    }

    #[test]
    fn standard_views_are_opposite_corners() {
        let (a, b) = standard_views();
        assert!(a.view_dir.x * b.view_dir.x + a.view_dir.y * b.view_dir.y < 0.0);
        assert_eq!(a.up, Vec3::new(0.0, 0.0, 1.0));
        assert_eq!(b.up, Vec3::new(0.0, 0.0, 1.0));
        for d in [Direction::PosX, Direction::NegX, Direction::PosY, Direction::NegY, Direction::PosZ] {
            assert!(a.faces_viewer(d.normal()) || b.faces_viewer(d.normal()), "{d}");
        }
    }

    #[test]
    fn empty_scene_svg() {
        let (a, _) = standard_views();
        let svg = String::from_utf8(render_svg(&LabeledScene::empty(10, 10, a))).unwrap();
        assert!(svg.contains("<rect"));
        assert!(!svg.contains("<polygon"));
        assert!(!svg.contains("<text"));
        assert!(svg.trim_end().ends_with("</svg>"));
    }

    #[test]
    fn single_cube_svg_counts_and_determinism() {
        let (a, _) = standard_views();
        let scene = project(&decomp(&[[0, 0, 0]]), &a, &opts(512, 512, true));
        let svg = render_svg(&scene);
        let text = String::from_utf8(svg.clone()).unwrap();
        assert_eq!(text.matches("<polygon").count(), 3);
        assert!(text.matches("<text").count() >= 1);
        assert_eq!(svg, render_svg(&scene));
    }

    #[test]
    fn raster_limits() {
        let (a, _) = standard_views();
        assert_eq!(
            rasterize(&LabeledScene::empty(5000, 10, a.clone())),
            Err(RenderError::CanvasTooLarge { width: 5000, height: 10 })
        );
        let img = rasterize(&LabeledScene::empty(1, 1, a)).unwrap();
        assert_eq!(img.pixels, BACKGROUND.to_vec());
    }
}
