//! Input decoding by content and atomic output writing.

use std::fs;
use std::io::{BufWriter, Write};
use std::path::Path;

use asbsr::apps::{OcclusionMask, SupportMask};
use asbsr::io::{self, pnm::Pnm};
use asbsr::masks::SpectrumMask;
use asbsr::{Error, ImageGrid, Result};
use ndarray::Array2;

/// Writes through a temporary file in the destination directory, then
/// renames it into place.
pub fn write_atomic(path: &Path, fill: impl FnOnce(&mut dyn Write) -> Result<()>) -> Result<()> {
    let dir = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p,
        _ => Path::new("."),
    };
    let tmp = tempfile::NamedTempFile::new_in(dir)?;
    {
        let mut out = BufWriter::new(tmp.as_file());
        fill(&mut out)?;
        out.flush()?;
    }
    tmp.as_file().sync_all()?;
    tmp.persist(path).map_err(|e| Error::Io(e.error))?;
    Ok(())
}

/// Reads a whole file, naming it in the error.
pub fn read_bytes(path: &Path) -> Result<Vec<u8>> {
    fs::read(path).map_err(|e| Error::Io(std::io::Error::new(e.kind(), format!("{}: {e}", path.display()))))
}

fn is_png(path: &Path) -> bool {
    path.extension().is_some_and(|e| e.eq_ignore_ascii_case("png"))
}

/// Grayscale image from PGM, PBM, PPM (as luma), PNG or a float sidecar.
pub fn read_image(path: &Path) -> Result<ImageGrid> {
    let bytes = read_bytes(path)?;
    if bytes.starts_with(io::raw::MAGIC) {
        return ImageGrid::new(io::read_raw(&bytes)?);
    }
    io::decode_gray(&bytes)
}

pub fn read_rgb(path: &Path) -> Result<[ImageGrid; 3]> {
    match io::read_pnm(&read_bytes(path)?)? {
        Pnm::Rgb(rgb) => Ok(rgb),
        Pnm::Gray(g) => Ok([g.clone(), g.clone(), g]),
        Pnm::Bitmap(_) => Err(Error::Parse("expected a colour or gray image, got a bitmap".into())),
    }
}

pub fn read_bitmap(path: &Path) -> Result<Array2<bool>> {
    match io::read_pnm(&read_bytes(path)?)? {
        Pnm::Bitmap(b) => Ok(b),
        _ => Err(Error::Parse(format!("{} is not a PBM bitmap", path.display()))),
    }
}

pub fn read_mask(path: &Path) -> Result<SpectrumMask> {
    SpectrumMask::new(read_bitmap(path)?)
}

/// Set bits in the bitmap mark opaque (occluded) pixels.
pub fn read_occlusion(path: &Path) -> Result<OcclusionMask> {
    OcclusionMask::new(read_bitmap(path)?.mapv(|opaque| !opaque))
}

pub fn read_support(path: &Path) -> Result<SupportMask> {
    SupportMask::new(read_bitmap(path)?)
}

/// PNG when the extension says so, binary PGM otherwise.
pub fn write_image(path: &Path, image: &ImageGrid) -> Result<()> {
    if is_png(path) {
        write_atomic(path, |w| io::png::write_png_gray(w, image))
    } else {
        write_atomic(path, |w| Ok(io::write_pgm(w, image)?))
    }
}

pub fn write_rgb(path: &Path, rgb: &[ImageGrid; 3]) -> Result<()> {
    write_atomic(path, |w| Ok(io::write_ppm(w, rgb)?))
}

pub fn write_bitmap(path: &Path, cells: &Array2<bool>) -> Result<()> {
    write_atomic(path, |w| Ok(io::write_pbm(w, cells)?))
}

pub fn write_raw(path: &Path, values: &Array2<f64>) -> Result<()> {
    write_atomic(path, |w| Ok(io::write_raw(w, values)?))
}

pub fn read_text(path: &Path) -> Result<String> {
    String::from_utf8(read_bytes(path)?).map_err(|_| Error::Parse(format!("{} is not UTF-8 text", path.display())))
}
