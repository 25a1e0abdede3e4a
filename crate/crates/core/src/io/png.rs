//! 8-bit PNG through the `png` crate. Palette, low-bit-depth and 16-bit
//! inputs are normalized to 8 bits; colour is reduced to luma and alpha is
//! dropped.

use std::io::{Cursor, Write};

use ndarray::Array2;

use crate::error::{parse_err, Result};
use crate::image::ImageGrid;

pub const SIGNATURE: &[u8] = &[0x89, b'P', b'N', b'G', b'\r', b'\n', 0x1a, b'\n'];

/// Decoder allocation ceiling.
const DECODE_LIMIT_BYTES: usize = 1 << 28;

pub fn decode_png_gray(bytes: &[u8]) -> Result<ImageGrid> {
    let mut decoder = png::Decoder::new_with_limits(Cursor::new(bytes), png::Limits { bytes: DECODE_LIMIT_BYTES });
    decoder.set_transformations(png::Transformations::normalize_to_color8());
    let mut reader = decoder.read_info().map_err(|e| parse_err(format!("png: {e}")))?;
    let size = reader.output_buffer_size().ok_or_else(|| parse_err("png: image too large"))?;
    let mut buf = vec![0u8; size];
    let info = reader.next_frame(&mut buf).map_err(|e| parse_err(format!("png: {e}")))?;
    let (h, w) = (info.height as usize, info.width as usize);
    let channels = match info.color_type {
        png::ColorType::Grayscale => 1,
        png::ColorType::GrayscaleAlpha => 2,
        png::ColorType::Rgb => 3,
        png::ColorType::Rgba => 4,
        png::ColorType::Indexed => return Err(parse_err("png: palette was not expanded")),
    };
    if info.bit_depth != png::BitDepth::Eight {
        return Err(parse_err("png: expected 8-bit output"));
    }
    let stride = info.line_size;
    if stride < w * channels || buf.len() < stride * h {
        return Err(parse_err("png: short frame"));
    }
    let data = Array2::from_shape_fn((h, w), |(r, c)| {
        let px = &buf[r * stride + c * channels..];
        if channels >= 3 {
            0.299 * f64::from(px[0]) + 0.587 * f64::from(px[1]) + 0.114 * f64::from(px[2])
        } else {
            f64::from(px[0])
        }
    });
    ImageGrid::new(data)
}

/// 8-bit grayscale PNG; values are rounded and clipped to `[0, 255]`.
pub fn write_png_gray(out: impl Write, image: &ImageGrid) -> Result<()> {
    let mut encoder = png::Encoder::new(out, image.width() as u32, image.height() as u32);
    encoder.set_color(png::ColorType::Grayscale);
    encoder.set_depth(png::BitDepth::Eight);
    let pixels: Vec<u8> = image.as_array().iter().map(|&v| v.round().clamp(0.0, 255.0) as u8).collect();
    let mut writer = encoder.write_header().map_err(|e| parse_err(format!("png: {e}")))?;
    writer.write_image_data(&pixels).map_err(|e| parse_err(format!("png: {e}")))?;
    writer.finish().map_err(|e| parse_err(format!("png: {e}")))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gray_round_trip() {
        let img = ImageGrid::from_fn(6, 9, |(r, c)| ((r * 31 + c * 7) % 256) as f64);
        let mut buf = Vec::new();
        write_png_gray(&mut buf, &img).unwrap();
        assert!(buf.starts_with(SIGNATURE));
        assert_eq!(decode_png_gray(&buf).unwrap(), img);
    }

    #[test]
    fn rgb_becomes_luma() {
        let mut buf = Vec::new();
        let mut enc = png::Encoder::new(&mut buf, 2, 1);
        enc.set_color(png::ColorType::Rgb);
        enc.set_depth(png::BitDepth::Eight);
        let mut w = enc.write_header().unwrap();
        w.write_image_data(&[255, 0, 0, 10, 10, 10]).unwrap();
        w.finish().unwrap();
        let g = decode_png_gray(&buf).unwrap();
        assert!((g.get(0, 0) - 0.299 * 255.0).abs() < 1e-9);
        assert!((g.get(0, 1) - 10.0).abs() < 1e-9);
    }

    #[test]
    fn garbage_is_an_error() {
        assert!(decode_png_gray(SIGNATURE).is_err());
        assert!(decode_png_gray(b"not a png").is_err());
    }
}
