mod common;

use std::collections::BTreeSet;

use panelkit_core::decompose::{CellFace, Direction};
use panelkit_core::math::Vec3;
use panelkit_core::render::font::{self, GLYPH_HEIGHT, GLYPH_WIDTH};
use panelkit_core::render::{
    project, rasterize, render_svg, standard_views, FillClass, LabeledScene, RenderOptions, SceneLabel, ScenePolygon,
    TEXT,
};

fn opts(w: u32, h: u32, labeled: bool) -> RenderOptions {
    RenderOptions {
        width: w,
        height: h,
        labeled,
        highlight: BTreeSet::new(),
    }
}

fn dot(a: [f64; 3], b: [f64; 3]) -> f64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

fn cross(a: [f64; 3], b: [f64; 3]) -> [f64; 3] {
    [a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0]]
}

fn unit(a: [f64; 3]) -> [f64; 3] {
    let n = dot(a, a).sqrt();
    [a[0] / n, a[1] / n, a[2] / n]
}

#[test]
fn cube_top_centroid_pixel_has_top_fill() {
    let d = panelkit_core::decompose(&common::grid(1.0, &[[0, 0, 0]])).unwrap();
    let (a, _) = standard_views();
    let scene = project(&d, &a, &opts(512, 512, false));
    let img = rasterize(&scene).unwrap();

    // Independent projection: frame the unit cube's 8 corners with an 8% margin.
    let dir = unit([-1.0, -1.0, -1.0]);
    let right = unit(cross(dir, [0.0, 0.0, 1.0]));
    let up = cross(right, dir);
    let corners: Vec<[f64; 2]> = (0..8)
        .map(|c| {
            let p = [(c & 1) as f64, ((c >> 1) & 1) as f64, ((c >> 2) & 1) as f64];
            [dot(p, right), dot(p, up)]
        })
        .collect();
    let lo = |k: usize| corners.iter().map(|c| c[k]).fold(f64::INFINITY, f64::min);
    let hi = |k: usize| corners.iter().map(|c| c[k]).fold(f64::NEG_INFINITY, f64::max);
    let scale = (512.0 * 0.84 / (hi(0) - lo(0))).min(512.0 * 0.84 / (hi(1) - lo(1)));
    let mid = [(lo(0) + hi(0)) / 2.0, (lo(1) + hi(1)) / 2.0];
    let top = [0.5, 0.5, 1.0];
    let px = 256.0 + scale * (dot(top, right) - mid[0]);
    let py = 256.0 - scale * (dot(top, up) - mid[1]);

    let quad = scene.polygons.iter().find(|p| p.face.dir == Direction::PosZ).unwrap();
    let cx = quad.points.iter().map(|p| p[0]).sum::<f64>() / 4.0;
    let cy = quad.points.iter().map(|p| p[1]).sum::<f64>() / 4.0;
    assert!((cx - px).abs() < 1e-9 && (cy - py).abs() < 1e-9);
    assert_eq!(img.get(px as u32, py as u32), FillClass::Face(Direction::PosZ).rgb());
}

#[test]
fn digit_glyphs_are_stamped_at_anchors() {
    let offscreen = |text: &str, anchor| ScenePolygon {
        points: vec![[-20.0, -20.0], [-19.0, -20.0], [-19.0, -19.0], [-20.0, -19.0]],
        depth: 0.0,
        fill: FillClass::Face(Direction::PosZ),
        face: CellFace::new([0, 0, 0].into(), Direction::PosZ),
        patch_label: Some(1),
        label: Some(SceneLabel {
            text: text.into(),
            anchor,
        }),
    };
    let (a, _) = standard_views();
    let mut scene = LabeledScene::empty(400, 400, a);
    let anchors = [("4", [100.0, 120.0]), ("6", [270.5, 300.25])];
    for (t, at) in anchors {
        scene.polygons.push(offscreen(t, at));
    }
    let img = rasterize(&scene).unwrap();
    let s = font::scale_for(400);
    assert_eq!(s, 2);
    for (t, at) in anchors {
        let rows = font::glyph(t.chars().next().unwrap()).unwrap();
        let (w, h) = (GLYPH_WIDTH * s, GLYPH_HEIGHT * s);
        let ox = (at[0] - w as f64 / 2.0).floor() as u32;
        let oy = (at[1] - h as f64 / 2.0).floor() as u32;
        for y in 0..h {
            for x in 0..w {
                let on = rows[y / s] & (1 << (GLYPH_WIDTH - 1 - x / s)) != 0;
                let got = img.get(ox + x as u32, oy + y as u32);
                if on {
                    assert_eq!(got, TEXT, "{t} at ({x},{y})");
                } else {
                    assert_eq!(got, [255, 255, 255], "{t} at ({x},{y})");
                }
            }
        }
    }
}

#[test]
fn every_label_visible_in_some_view() {
    let (a, b) = standard_views();
    for name in common::FIXTURES {
        let d = common::fixture(name);
        let mut seen = BTreeSet::new();
        for view in [&a, &b] {
            let scene = project(&d, view, &RenderOptions::default());
            let mut texts: Vec<&str> = scene.labels().map(|l| l.text.as_str()).collect();
            let n = texts.len();
            texts.sort();
            texts.dedup();
            assert_eq!(texts.len(), n, "{name}: a label drawn twice");
            seen.extend(texts.iter().map(|t| t.parse::<u32>().unwrap()));
            assert!(scene.polygons.windows(2).all(|w| w[0].depth <= w[1].depth));
            for p in &scene.polygons {
                assert!(view.faces_viewer(p.face.dir.normal()));
            }
        }
        let vertical: BTreeSet<u32> = d.labels().collect();
        let missing: Vec<u32> = vertical.difference(&seen).copied().collect();
        // Downward faces are never front-facing in either view.
        let downward: Vec<u32> =
            d.patches.iter().filter(|p| p.normal == Direction::NegZ).filter_map(|p| p.label).collect();
        assert!(missing.iter().all(|l| downward.contains(l)), "{name}: {missing:?}");
    }
}

#[test]
fn nearer_quads_are_painted_later() {
    // Two stacked cubes seen from above: the upper top face must win.
    let d = panelkit_core::decompose(&common::grid(1.0, &[[0, 0, 0], [0, 0, 1]])).unwrap();
    let (a, _) = standard_views();
    let scene = project(&d, &a, &opts(256, 256, false));
    let dir = Vec3::new(-1.0, -1.0, -1.0).normalized().unwrap();
    for w in scene.polygons.windows(2) {
        let c0 = w[0].face.center_grid();
        let c1 = w[1].face.center_grid();
        let d0 = -(c0[0] * dir.x + c0[1] * dir.y + c0[2] * dir.z);
        let d1 = -(c1[0] * dir.x + c1[1] * dir.y + c1[2] * dir.z);
        assert!(d0 <= d1 + 1e-12);
    }
}

#[test]
fn outputs_are_deterministic() {
    let d = common::fixture("lamp");
    let (a, b) = standard_views();
    for v in [&a, &b] {
        let s1 = project(&d, v, &RenderOptions::default());
        let s2 = project(&d, v, &RenderOptions::default());
        assert_eq!(render_svg(&s1), render_svg(&s2));
        assert_eq!(rasterize(&s1).unwrap(), rasterize(&s2).unwrap());
    }
}

#[test]
fn highlighted_labels_use_highlight_fill() {
    let d = common::fixture("chair");
    let (a, _) = standard_views();
    let o = RenderOptions {
        highlight: BTreeSet::from([1]),
        ..Default::default()
    };
    let scene = project(&d, &a, &o);
    for p in &scene.polygons {
        assert_eq!(p.fill == FillClass::Highlight, p.patch_label == Some(1));
    }
}
