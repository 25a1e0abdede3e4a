//! Netpbm P1-P6 reader; P4, P5 and P6 writers.
//!
//! Sample values are rescaled to `[0, 255]` from the file's maxval. In
//! bitmaps `true` means a set (black) pixel.

use std::io::Write;

use ndarray::Array2;

use crate::error::{parse_err, Result};
use crate::image::ImageGrid;

/// Largest raster accepted from a header, in pixels.
pub const MAX_PIXELS: usize = 1 << 28;

#[derive(Debug, Clone, PartialEq)]
pub enum Pnm {
    Bitmap(Array2<bool>),
    Gray(ImageGrid),
    Rgb([ImageGrid; 3]),
}

struct Cursor<'a> {
    bytes: &'a [u8],
    pos: usize,
}

impl<'a> Cursor<'a> {
    fn skip_space_and_comments(&mut self) {
        while let Some(&b) = self.bytes.get(self.pos) {
            if b == b'#' {
                while let Some(&b) = self.bytes.get(self.pos) {
                    self.pos += 1;
                    if b == b'\n' || b == b'\r' {
                        break;
                    }
                }
            } else if b.is_ascii_whitespace() {
                self.pos += 1;
            } else {
                break;
            }
        }
    }

    fn number(&mut self, what: &str) -> Result<usize> {
        self.skip_space_and_comments();
        let start = self.pos;
        while self.bytes.get(self.pos).is_some_and(u8::is_ascii_digit) {
            self.pos += 1;
        }
        if start == self.pos {
            return Err(parse_err(format!("expected {what} at byte {start}")));
        }
        std::str::from_utf8(&self.bytes[start..self.pos])
            .ok()
            .and_then(|s| s.parse().ok())
            .ok_or_else(|| parse_err(format!("{what} out of range")))
    }

    /// Plain-format bitmap digits may be packed without separators.
    fn bit(&mut self) -> Result<bool> {
        self.skip_space_and_comments();
        match self.bytes.get(self.pos) {
            Some(b'0') => {
                self.pos += 1;
                Ok(false)
            }
            Some(b'1') => {
                self.pos += 1;
                Ok(true)
            }
            _ => Err(parse_err(format!("expected bitmap digit at byte {}", self.pos))),
        }
    }

    /// Consumes the single whitespace byte that ends a binary header.
    fn raster_start(&mut self) -> Result<&'a [u8]> {
        match self.bytes.get(self.pos) {
            Some(b) if b.is_ascii_whitespace() => Ok(&self.bytes[self.pos + 1..]),
            _ => Err(parse_err("missing whitespace before raster")),
        }
    }
}

pub fn read_pnm(bytes: &[u8]) -> Result<Pnm> {
    if bytes.len() < 2 || bytes[0] != b'P' {
        return Err(parse_err("not a netpbm file"));
    }
    let kind = bytes[1];
    if !(b'1'..=b'6').contains(&kind) {
        return Err(parse_err(format!("unsupported netpbm type P{}", kind as char)));
    }
    let mut cur = Cursor { bytes, pos: 2 };
    let width = cur.number("width")?;
    let height = cur.number("height")?;
    if width == 0 || height == 0 {
        return Err(parse_err("zero image dimension"));
    }
    let pixels = width
        .checked_mul(height)
        .filter(|&p| p <= MAX_PIXELS)
        .ok_or_else(|| parse_err(format!("{width}x{height} raster is too large")))?;
    let bitmap = kind == b'1' || kind == b'4';
    let maxval = if bitmap { 1 } else { cur.number("maxval")? };
    if maxval == 0 || maxval > 65535 {
        return Err(parse_err(format!("maxval {maxval} outside 1..=65535")));
    }
    let channels = if kind == b'3' || kind == b'6' { 3 } else { 1 };
    let count = pixels * channels;

    let samples: Vec<u16> = match kind {
        b'1' => (0..count).map(|_| cur.bit().map(u16::from)).collect::<Result<_>>()?,
        b'2' | b'3' => (0..count)
            .map(|_| {
                let v = cur.number("sample")?;
                if v > maxval {
                    return Err(parse_err(format!("sample {v} exceeds maxval {maxval}")));
                }
                Ok(v as u16)
            })
            .collect::<Result<_>>()?,
        b'4' => {
            let raster = cur.raster_start()?;
            let stride = width.div_ceil(8);
            if raster.len() < stride * height {
                return Err(parse_err("truncated bitmap raster"));
            }
            let mut out = Vec::with_capacity(pixels);
            for r in 0..height {
                for c in 0..width {
                    let byte = raster[r * stride + c / 8];
                    out.push(u16::from(byte & (0x80 >> (c % 8)) != 0));
                }
            }
            out
        }
        _ => {
            let raster = cur.raster_start()?;
            let wide = maxval > 255;
            let need = count * if wide { 2 } else { 1 };
            if raster.len() < need {
                return Err(parse_err("truncated raster"));
            }
            let values: Vec<u16> = if wide {
                raster[..need].chunks_exact(2).map(|b| u16::from_be_bytes([b[0], b[1]])).collect()
            } else {
                raster[..need].iter().map(|&b| u16::from(b)).collect()
            };
            if let Some(v) = values.iter().find(|&&v| usize::from(v) > maxval) {
                return Err(parse_err(format!("sample {v} exceeds maxval {maxval}")));
            }
            values
        }
    };

    if bitmap {
        let cells = Array2::from_shape_vec((height, width), samples.into_iter().map(|v| v == 1).collect())
            .expect("length checked");
        return Ok(Pnm::Bitmap(cells));
    }
    let scale = 255.0 / maxval as f64;
    let plane = |ch: usize| {
        let data: Vec<f64> = samples.iter().skip(ch).step_by(channels).map(|&v| f64::from(v) * scale).collect();
        ImageGrid::from_array_unchecked(Array2::from_shape_vec((height, width), data).expect("length checked"))
    };
    Ok(if channels == 1 {
        Pnm::Gray(plane(0))
    } else {
        Pnm::Rgb([plane(0), plane(1), plane(2)])
    })
}

fn to_byte(v: f64) -> u8 {
    v.round().clamp(0.0, 255.0) as u8
}

/// Binary 8-bit PGM; values are rounded and clipped to `[0, 255]`.
pub fn write_pgm(out: &mut (impl Write + ?Sized), image: &ImageGrid) -> std::io::Result<()> {
    write!(out, "P5\n{} {}\n255\n", image.width(), image.height())?;
    out.write_all(&image.as_array().iter().map(|&v| to_byte(v)).collect::<Vec<_>>())
}

/// Binary 8-bit PPM from three planes of equal size.
pub fn write_ppm(out: &mut (impl Write + ?Sized), rgb: &[ImageGrid; 3]) -> std::io::Result<()> {
    let (h, w) = (rgb[0].height(), rgb[0].width());
    write!(out, "P6\n{w} {h}\n255\n")?;
    let mut buf = Vec::with_capacity(h * w * 3);
    for r in 0..h {
        for c in 0..w {
            for ch in rgb {
                buf.push(to_byte(ch.get(r, c)));
            }
        }
    }
    out.write_all(&buf)
}

/// Packed binary PBM; `true` cells are written as set bits.
pub fn write_pbm(out: &mut (impl Write + ?Sized), cells: &Array2<bool>) -> std::io::Result<()> {
    let (h, w) = cells.dim();
    write!(out, "P4\n{w} {h}\n")?;
    let stride = w.div_ceil(8);
    let mut buf = vec![0u8; stride * h];
    for ((r, c), &set) in cells.indexed_iter() {
        if set {
            buf[r * stride + c / 8] |= 0x80 >> (c % 8);
        }
    }
    out.write_all(&buf)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn plain_formats() {
        let gray = read_pnm(b"P2\n# comment\n3 2\n4\n0 1 2\n3 4 4\n").unwrap();
        let Pnm::Gray(g) = gray else { panic!("expected gray") };
        assert_eq!(g.get(0, 0), 0.0);
        assert_eq!(g.get(1, 1), 255.0);
        assert!((g.get(0, 1) - 63.75).abs() < 1e-12);

        let bits = read_pnm(b"P1 4 2\n0101\n1 1 0 0").unwrap();
        let Pnm::Bitmap(b) = bits else { panic!("expected bitmap") };
        assert_eq!(b.iter().filter(|&&x| x).count(), 4);
        assert!(b[[0, 1]] && !b[[0, 0]] && b[[1, 0]]);
    }

    #[test]
    fn binary_round_trips() {
        let img = ImageGrid::from_fn(5, 7, |(r, c)| (r * 40 + c * 3) as f64);
        let mut buf = Vec::new();
        write_pgm(&mut buf, &img).unwrap();
        assert_eq!(read_pnm(&buf).unwrap(), Pnm::Gray(img.clone()));

        let rgb = [img.clone(), ImageGrid::filled(5, 7, 9.0), ImageGrid::filled(5, 7, 200.0)];
        let mut buf = Vec::new();
        write_ppm(&mut buf, &rgb).unwrap();
        assert_eq!(read_pnm(&buf).unwrap(), Pnm::Rgb(rgb));

        let cells = Array2::from_shape_fn((3, 11), |(r, c)| (r + c) % 3 == 0);
        let mut buf = Vec::new();
        write_pbm(&mut buf, &cells).unwrap();
        assert_eq!(read_pnm(&buf).unwrap(), Pnm::Bitmap(cells));
    }

    #[test]
    fn sixteen_bit_samples_are_rescaled() {
        let mut bytes = b"P5 2 1 65535\n".to_vec();
        bytes.extend_from_slice(&[0xff, 0xff, 0x00, 0x00]);
        let Pnm::Gray(g) = read_pnm(&bytes).unwrap() else { panic!() };
        assert_eq!(g.get(0, 0), 255.0);
        assert_eq!(g.get(0, 1), 0.0);
    }

    #[test]
    fn malformed_inputs_are_errors() {
        for bad in [
            &b""[..],
            b"P7 1 1 255\n\0",
            b"P5 2 2 255\n\0\0",
            b"P5 0 2 255\n",
            b"P2 1 1 10\n11",
            b"P5 99999999 99999999 255\n",
            b"P5 1 1 0\n\0",
            b"P1 2 1\n02",
        ] {
            assert!(read_pnm(bad).is_err(), "{:?}", String::from_utf8_lossy(bad));
        }
    }
}
