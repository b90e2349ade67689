//! Embedded 7x9 bitmap digits. Bit 6 of each row is the leftmost column.

pub const GLYPH_WIDTH: usize = 7;
pub const GLYPH_HEIGHT: usize = 9;

const DIGITS: [[u8; GLYPH_HEIGHT]; 10] = [
    [0x3e, 0x63, 0x63, 0x63, 0x63, 0x63, 0x63, 0x63, 0x3e],
    [0x18, 0x38, 0x78, 0x18, 0x18, 0x18, 0x18, 0x18, 0x7e],
    [0x3e, 0x63, 0x03, 0x06, 0x0c, 0x18, 0x30, 0x60, 0x7f],
    [0x3e, 0x63, 0x03, 0x03, 0x1e, 0x03, 0x03, 0x63, 0x3e],
    [0x06, 0x0e, 0x1e, 0x36, 0x66, 0x7f, 0x06, 0x06, 0x06],
    [0x7f, 0x60, 0x60, 0x7e, 0x03, 0x03, 0x03, 0x63, 0x3e],
    [0x1e, 0x30, 0x60, 0x7e, 0x63, 0x63, 0x63, 0x63, 0x3e],
    [0x7f, 0x03, 0x06, 0x06, 0x0c, 0x0c, 0x18, 0x18, 0x18],
    [0x3e, 0x63, 0x63, 0x63, 0x3e, 0x63, 0x63, 0x63, 0x3e],
    [0x3e, 0x63, 0x63, 0x63, 0x3f, 0x03, 0x03, 0x06, 0x3c],
];

pub fn glyph(c: char) -> Option<&'static [u8; GLYPH_HEIGHT]> {
    c.to_digit(10).map(|d| &DIGITS[d as usize])
}

pub fn glyph_bit(rows: &[u8; GLYPH_HEIGHT], x: usize, y: usize) -> bool {
    rows[y] & (1 << (GLYPH_WIDTH - 1 - x)) != 0
}

/// Nominal text height: 4% of the canvas height.
pub fn text_height_px(canvas_height: u32) -> f64 {
    canvas_height as f64 * 0.04
}

/// Integer pixel scale of one font cell.
pub fn scale_for(canvas_height: u32) -> usize {
    let s = libm::round(text_height_px(canvas_height) / GLYPH_HEIGHT as f64) as usize;
    s.max(1)
}

/// Block size in pixels of `len` glyphs separated by one scaled column.
pub fn text_extent(len: usize, scale: usize) -> (usize, usize) {
    if len == 0 {
        return (0, 0);
    }
    ((len * GLYPH_WIDTH + (len - 1)) * scale, GLYPH_HEIGHT * scale)
}

/// Top-left pixel of a text block centered on `anchor`.
pub fn text_origin(anchor: [f64; 2], len: usize, scale: usize) -> (i64, i64) {
    let (w, h) = text_extent(len, scale);
    (
        libm::floor(anchor[0] - w as f64 / 2.0) as i64,
        libm::floor(anchor[1] - h as f64 / 2.0) as i64,
    )
}
