use alloc::vec;
use alloc::vec::Vec;

use super::font;
use super::scene::{LabeledScene, BACKGROUND, HALO, STROKE, TEXT};
use super::RenderError;

pub const MAX_CANVAS: u32 = 4096;

/// Packed 8-bit RGB image, row major.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RgbImage {
    pub width: u32,
    pub height: u32,
    pub pixels: Vec<u8>,
}

impl RgbImage {
    pub fn filled(width: u32, height: u32, rgb: [u8; 3]) -> Self {
        let mut pixels = vec![0u8; width as usize * height as usize * 3];
        for px in pixels.chunks_exact_mut(3) {
            px.copy_from_slice(&rgb);
        }
        Self {
            width,
            height,
            pixels,
        }
    }

    pub fn get(&self, x: u32, y: u32) -> [u8; 3] {
        let i = (y as usize * self.width as usize + x as usize) * 3;
        [self.pixels[i], self.pixels[i + 1], self.pixels[i + 2]]
    }

    fn put(&mut self, x: i64, y: i64, rgb: [u8; 3]) {
        if x < 0 || y < 0 || x >= self.width as i64 || y >= self.height as i64 {
            return;
        }
        let i = (y as usize * self.width as usize + x as usize) * 3;
        self.pixels[i..i + 3].copy_from_slice(&rgb);
    }

    /// Even-odd scanline fill sampling pixel centers.
    fn fill_polygon(&mut self, points: &[[f64; 2]], rgb: [u8; 3]) {
        if points.len() < 3 {
            return;
        }
        let ymin = points.iter().map(|p| p[1]).fold(f64::INFINITY, f64::min);
        let ymax = points.iter().map(|p| p[1]).fold(f64::NEG_INFINITY, f64::max);
        let y0 = libm::floor(ymin).max(0.0) as i64;
        let y1 = (libm::ceil(ymax) as i64).min(self.height as i64 - 1);
        let mut xs: Vec<f64> = Vec::new();
        for y in y0..=y1 {
            let sy = y as f64 + 0.5;
            xs.clear();
            for e in 0..points.len() {
                let a = points[e];
                let b = points[(e + 1) % points.len()];
                // Half-open in y so shared vertices are counted once.
                if (a[1] <= sy && b[1] > sy) || (b[1] <= sy && a[1] > sy) {
                    let t = (sy - a[1]) / (b[1] - a[1]);
                    xs.push(a[0] + t * (b[0] - a[0]));
                }
            }
            xs.sort_by(f64::total_cmp);
            for pair in xs.chunks_exact(2) {
                // Pixel x is covered when x0 <= x + 0.5 < x1.
                let start = libm::ceil(pair[0] - 0.5) as i64;
                let end = libm::ceil(pair[1] - 0.5) as i64;
                for x in start.max(0)..end.min(self.width as i64) {
                    self.put(x, y, rgb);
                }
            }
        }
    }

    fn stroke_polygon(&mut self, points: &[[f64; 2]], rgb: [u8; 3]) {
        for e in 0..points.len() {
            let a = points[e];
            let b = points[(e + 1) % points.len()];
            let steps = libm::ceil(libm::fmax(libm::fabs(b[0] - a[0]), libm::fabs(b[1] - a[1]))) as i64;
            let steps = steps.max(1);
            for s in 0..=steps {
                let t = s as f64 / steps as f64;
                let x = libm::floor(a[0] + t * (b[0] - a[0]));
                let y = libm::floor(a[1] + t * (b[1] - a[1]));
                self.put(x as i64, y as i64, rgb);
            }
        }
    }

    fn stamp_text(&mut self, text: &str, anchor: [f64; 2], scale: usize) {
        let glyphs: Vec<&[u8; font::GLYPH_HEIGHT]> = text.chars().filter_map(font::glyph).collect();
        let (w, h) = font::text_extent(glyphs.len(), scale);
        if w == 0 {
            return;
        }
        let (ox, oy) = font::text_origin(anchor, glyphs.len(), scale);
        let mut mask = vec![false; w * h];
        for (n, g) in glyphs.iter().enumerate() {
            let gx = n * (font::GLYPH_WIDTH + 1) * scale;
            for y in 0..font::GLYPH_HEIGHT {
                for x in 0..font::GLYPH_WIDTH {
                    if font::glyph_bit(g, x, y) {
                        for dy in 0..scale {
                            for dx in 0..scale {
                                mask[(y * scale + dy) * w + gx + x * scale + dx] = true;
                            }
                        }
                    }
                }
            }
        }
        // Halo: the mask dilated by one font cell.
        let r = scale as i64;
        for y in 0..h as i64 {
            for x in 0..w as i64 {
                if mask[y as usize * w + x as usize] {
                    for dy in -r..=r {
                        for dx in -r..=r {
                            let (px, py) = (ox + x + dx, oy + y + dy);
                            let inside = (0..w as i64).contains(&(x + dx)) && (0..h as i64).contains(&(y + dy));
                            if !(inside && mask[(y + dy) as usize * w + (x + dx) as usize]) {
                                self.put(px, py, HALO);
                            }
                        }
                    }
                }
            }
        }
        for y in 0..h {
            for x in 0..w {
                if mask[y * w + x] {
                    self.put(ox + x as i64, oy + y as i64, TEXT);
                }
            }
        }
    }
}

/// Paints a scene with the same geometry as its SVG form.
pub fn rasterize(scene: &LabeledScene) -> Result<RgbImage, RenderError> {
    if scene.width > MAX_CANVAS || scene.height > MAX_CANVAS {
        return Err(RenderError::CanvasTooLarge {
            width: scene.width,
            height: scene.height,
        });
    }
    if scene.width == 0 || scene.height == 0 {
        return Err(RenderError::EmptyCanvas);
    }
    let mut img = RgbImage::filled(scene.width, scene.height, BACKGROUND);
    for p in &scene.polygons {
        img.fill_polygon(&p.points, p.fill.rgb());
        img.stroke_polygon(&p.points, STROKE);
    }
    let scale = font::scale_for(scene.height);
    for label in scene.labels() {
        img.stamp_text(&label.text, label.anchor, scale);
    }
    Ok(img)
}
