//! File formats: netpbm and PNG rasters, CSV tables, the shape key=value
//! block and a raw little-endian float sidecar.

pub mod csv;
pub mod pnm;
pub mod png;
pub mod raw;
pub mod shape;

use std::fs;
use std::path::Path;

use crate::error::Result;
use crate::image::ImageGrid;

pub use self::pnm::{read_pnm, write_pbm, write_pgm, write_ppm, Pnm};
pub use self::raw::{read_raw, write_raw};
pub use self::shape::{format_shape, parse_shape};

/// Reads a grayscale image from a PGM/PBM/PPM or PNG file. Colour inputs are
/// converted to luma.
pub fn read_gray(path: &Path) -> Result<ImageGrid> {
    let bytes = fs::read(path)?;
    decode_gray(&bytes)
}

/// Decodes grayscale image bytes, choosing the format by signature.
pub fn decode_gray(bytes: &[u8]) -> Result<ImageGrid> {
    if bytes.starts_with(self::png::SIGNATURE) {
        return self::png::decode_png_gray(bytes);
    }
    Ok(match read_pnm(bytes)? {
        Pnm::Gray(g) => g,
        Pnm::Rgb(rgb) => luma(&rgb),
        Pnm::Bitmap(b) => ImageGrid::from_array_unchecked(b.mapv(|black| if black { 0.0 } else { 255.0 })),
    })
}

/// Rec. 601 luma of an RGB triple of planes.
pub fn luma(rgb: &[ImageGrid; 3]) -> ImageGrid {
    ImageGrid::from_array_unchecked(
        rgb[0].as_array() * 0.299 + rgb[1].as_array() * 0.587 + rgb[2].as_array() * 0.114,
    )
}
