//! PNG encoding of rendered scenes.

use panelkit_core::render::{rasterize, LabeledScene, RgbImage};

use crate::error::ServiceError;

/// 8-bit RGB, non-interlaced. The encoder settings are fixed so identical
/// images give identical bytes.
pub fn encode_png(img: &RgbImage) -> Result<Vec<u8>, ServiceError> {
    let mut out = Vec::new();
    {
        let mut enc = png::Encoder::new(&mut out, img.width, img.height);
        enc.set_color(png::ColorType::Rgb);
        enc.set_depth(png::BitDepth::Eight);
        enc.set_compression(png::Compression::Balanced);
        let mut w = enc.write_header().map_err(|e| ServiceError::internal(format!("png: {e}")))?;
        w.write_image_data(&img.pixels)
            .map_err(|e| ServiceError::internal(format!("png: {e}")))?;
    }
    Ok(out)
}

pub fn render_png(scene: &LabeledScene) -> Result<Vec<u8>, ServiceError> {
    encode_png(&rasterize(scene)?)
}

/// Decodes a PNG produced by [`encode_png`].
pub fn decode_png(bytes: &[u8]) -> Result<RgbImage, ServiceError> {
    let dec = png::Decoder::new(std::io::Cursor::new(bytes));
    let mut reader = dec.read_info().map_err(|e| ServiceError::validation("png", e.to_string()))?;
    let mut buf = vec![0; reader.output_buffer_size().unwrap_or(0)];
    let info = reader
        .next_frame(&mut buf)
        .map_err(|e| ServiceError::validation("png", e.to_string()))?;
    if info.color_type != png::ColorType::Rgb || info.bit_depth != png::BitDepth::Eight {
        return Err(ServiceError::validation("png", "expected 8-bit RGB"));
    }
    buf.truncate(info.buffer_size());
    Ok(RgbImage {
        width: info.width,
        height: info.height,
        pixels: buf,
    })
}
