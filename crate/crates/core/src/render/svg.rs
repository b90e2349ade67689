use alloc::string::String;
use alloc::vec::Vec;
use core::fmt::Write;

use super::scene::{FillClass, LabeledScene, BACKGROUND, HALO, STROKE, TEXT};

fn hex(rgb: [u8; 3]) -> String {
    alloc::format!("#{:02x}{:02x}{:02x}", rgb[0], rgb[1], rgb[2])
}

/// Fixed three-decimal formatting with negative zero folded to zero.
fn num(v: f64) -> String {
    let s = alloc::format!("{v:.3}");
    if s == "-0.000" {
        String::from("0.000")
    } else {
        s
    }
}

fn fill_name(f: FillClass) -> String {
    match f {
        FillClass::Face(d) => alloc::format!("face{}", d.as_str()),
        FillClass::Highlight => String::from("highlight"),
        FillClass::Omitted => String::from("omitted"),
    }
}

/// Standalone SVG 1.1 document. Polygons come first in scene order, then
/// labels, so text is never hidden.
pub fn render_svg(scene: &LabeledScene) -> Vec<u8> {
    let (w, h) = (scene.width, scene.height);
    let mut out = String::new();
    out.push_str("<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n");
    let _ = writeln!(
        out,
        "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"{w}\" height=\"{h}\" viewBox=\"0 0 {w} {h}\">"
    );
    let _ = writeln!(
        out,
        "<rect x=\"0\" y=\"0\" width=\"{w}\" height=\"{h}\" fill=\"{}\"/>",
        hex(BACKGROUND)
    );
    for p in &scene.polygons {
        let pts: Vec<String> = p
            .points
            .iter()
            .map(|q| alloc::format!("{},{}", num(q[0]), num(q[1])))
            .collect();
        let _ = write!(
            out,
            "<polygon points=\"{}\" fill=\"{}\" stroke=\"{}\" stroke-width=\"1.000\" data-fill=\"{}\"",
            pts.join(" "),
            hex(p.fill.rgb()),
            hex(STROKE),
            fill_name(p.fill)
        );
        if let Some(l) = p.patch_label {
            let _ = write!(out, " data-label=\"{l}\"");
        }
        out.push_str("/>\n");
    }
    let size = super::font::text_height_px(h);
    for label in scene.labels() {
        let _ = writeln!(
            out,
            "<text x=\"{}\" y=\"{}\" font-family=\"monospace\" font-weight=\"bold\" font-size=\"{}\" text-anchor=\"middle\" dominant-baseline=\"central\" fill=\"{}\" stroke=\"{}\" stroke-width=\"{}\" paint-order=\"stroke\">{}</text>",
            num(label.anchor[0]),
            num(label.anchor[1]),
            num(size),
            hex(TEXT),
            hex(HALO),
            num(size * 0.15),
            label.text
        );
    }
    out.push_str("</svg>\n");
    out.into_bytes()
}
