//! Lossless float sidecar: the magic `ASBF`, height and width as
//! little-endian `u32`, then row-major little-endian `f64` values.

use std::io::Write;

use ndarray::Array2;

use crate::error::{parse_err, Result};

pub const MAGIC: &[u8; 4] = b"ASBF";
const HEADER_LEN: usize = 12;

pub fn write_raw(out: &mut (impl Write + ?Sized), values: &Array2<f64>) -> std::io::Result<()> {
    let (h, w) = values.dim();
    let dims = |n: usize| u32::try_from(n).map_err(|_| std::io::Error::other("dimension exceeds u32"));
    out.write_all(MAGIC)?;
    out.write_all(&dims(h)?.to_le_bytes())?;
    out.write_all(&dims(w)?.to_le_bytes())?;
    let mut buf = Vec::with_capacity(h * w * 8);
    for v in values {
        buf.extend_from_slice(&v.to_le_bytes());
    }
    out.write_all(&buf)
}

pub fn read_raw(bytes: &[u8]) -> Result<Array2<f64>> {
    if bytes.len() < HEADER_LEN || &bytes[..4] != MAGIC {
        return Err(parse_err("not a float sidecar"));
    }
    let word = |i: usize| u32::from_le_bytes(bytes[i..i + 4].try_into().expect("4 bytes")) as usize;
    let (h, w) = (word(4), word(8));
    let body = &bytes[HEADER_LEN..];
    let expected = h.checked_mul(w).and_then(|n| n.checked_mul(8));
    if expected != Some(body.len()) {
        return Err(parse_err(format!("sidecar body of {} bytes does not hold {h}x{w} values", body.len())));
    }
    if h == 0 || w == 0 {
        return Err(parse_err("zero sidecar dimension"));
    }
    let data: Vec<f64> = body
        .chunks_exact(8)
        .map(|b| f64::from_le_bytes(b.try_into().expect("8 bytes")))
        .collect();
    if data.iter().any(|v| !v.is_finite()) {
        return Err(parse_err("sidecar holds non-finite values"));
    }
    Ok(Array2::from_shape_vec((h, w), data).expect("length checked"))
}
