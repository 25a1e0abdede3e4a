//! Deterministic synthetic test content: smooth gray and colour images,
//! rendered-text occlusion masks and a tomographic phantom.

use ndarray::Array2;
use rand::Rng;
use rand_distr::{Distribution, Normal};

use crate::image::ImageGrid;
use crate::seed;

/// A gray image in `[0, 255]` built from random Gaussian blobs, soft-edged
/// bars and a gentle gradient, so its spectrum spreads over a wide band.
pub fn smooth_image(height: usize, width: usize, seed: u64) -> ImageGrid {
    let mut rng = seed::stream(seed, "synthetic/smooth");
    let scale = height.min(width) as f64;
    let mut data = Array2::from_shape_fn((height, width), |(r, c)| {
        40.0 * (r as f64 / height as f64) + 25.0 * (c as f64 / width as f64)
    });

    let blobs = 12;
    for _ in 0..blobs {
        let cy = rng.random_range(0.0..height as f64);
        let cx = rng.random_range(0.0..width as f64);
        let sigma = rng.random_range(0.03..0.2) * scale;
        let amp = rng.random_range(-80.0..120.0);
        for ((r, c), v) in data.indexed_iter_mut() {
            let d2 = (r as f64 - cy).powi(2) + (c as f64 - cx).powi(2);
            *v += amp * (-d2 / (2.0 * sigma * sigma)).exp();
        }
    }

    let bars = 4;
    for _ in 0..bars {
        let theta: f64 = rng.random_range(0.0..std::f64::consts::PI);
        let offset = rng.random_range(-0.3..0.3) * scale;
        let half = rng.random_range(0.02..0.08) * scale;
        let amp = rng.random_range(-50.0..50.0);
        let (s, co) = theta.sin_cos();
        let (cy, cx) = (height as f64 / 2.0, width as f64 / 2.0);
        for ((r, c), v) in data.indexed_iter_mut() {
            let t = (c as f64 - cx) * co + (r as f64 - cy) * s - offset;
            // Logistic edges about one pixel wide.
            let edge = 1.0 / (1.0 + ((t.abs() - half) * 1.5).exp());
            *v += amp * edge;
        }
    }
    normalize_into(&mut data, 20.0, 235.0);
    ImageGrid::from_array_unchecked(data)
}

/// Three independently seeded smooth channels.
pub fn smooth_color_image(height: usize, width: usize, seed: u64) -> [ImageGrid; 3] {
    let base = smooth_image(height, width, seed::derive(seed, "colour/base"));
    let mut out = [0, 1, 2].map(|ch| {
        let own = smooth_image(height, width, seed::derive_indexed(seed, "colour/channel", ch));
        // Channels share structure, as natural colour images do.
        ImageGrid::from_array_unchecked(base.as_array() * 0.6 + own.as_array() * 0.4)
    });
    for ch in &mut out {
        ch.as_array_mut().mapv_inplace(|v| v.clamp(0.0, 255.0));
    }
    out
}

fn normalize_into(data: &mut Array2<f64>, lo: f64, hi: f64) {
    let (min, max) = data
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), &v| (a.min(v), b.max(v)));
    let span = (max - min).max(1e-12);
    data.mapv_inplace(|v| lo + (v - min) / span * (hi - lo));
}

/// Standard normal noise of deviation `sigma`.
pub fn gaussian_noise(len: usize, sigma: f64, seed: u64) -> Vec<f64> {
    let mut rng = seed::stream(seed, "synthetic/noise");
    let normal = Normal::new(0.0, sigma).expect("sigma must be finite and >= 0");
    (0..len).map(|_| normal.sample(&mut rng)).collect()
}

/// 5x7 glyphs, one byte per row, low five bits used, MSB of those leftmost.
fn glyph(ch: char) -> [u8; 7] {
    match ch.to_ascii_uppercase() {
        'A' => [0x0E, 0x11, 0x11, 0x1F, 0x11, 0x11, 0x11],
        'B' => [0x1E, 0x11, 0x11, 0x1E, 0x11, 0x11, 0x1E],
        'C' => [0x0E, 0x11, 0x10, 0x10, 0x10, 0x11, 0x0E],
        'D' => [0x1E, 0x11, 0x11, 0x11, 0x11, 0x11, 0x1E],
        'E' => [0x1F, 0x10, 0x10, 0x1E, 0x10, 0x10, 0x1F],
        'F' => [0x1F, 0x10, 0x10, 0x1E, 0x10, 0x10, 0x10],
        'G' => [0x0E, 0x11, 0x10, 0x17, 0x11, 0x11, 0x0F],
        'H' => [0x11, 0x11, 0x11, 0x1F, 0x11, 0x11, 0x11],
        'I' => [0x0E, 0x04, 0x04, 0x04, 0x04, 0x04, 0x0E],
        'J' => [0x07, 0x02, 0x02, 0x02, 0x02, 0x12, 0x0C],
        'K' => [0x11, 0x12, 0x14, 0x18, 0x14, 0x12, 0x11],
        'L' => [0x10, 0x10, 0x10, 0x10, 0x10, 0x10, 0x1F],
        'M' => [0x11, 0x1B, 0x15, 0x15, 0x11, 0x11, 0x11],
        'N' => [0x11, 0x11, 0x19, 0x15, 0x13, 0x11, 0x11],
        'O' => [0x0E, 0x11, 0x11, 0x11, 0x11, 0x11, 0x0E],
        'P' => [0x1E, 0x11, 0x11, 0x1E, 0x10, 0x10, 0x10],
        'Q' => [0x0E, 0x11, 0x11, 0x11, 0x15, 0x12, 0x0D],
        'R' => [0x1E, 0x11, 0x11, 0x1E, 0x14, 0x12, 0x11],
        'S' => [0x0F, 0x10, 0x10, 0x0E, 0x01, 0x01, 0x1E],
        'T' => [0x1F, 0x04, 0x04, 0x04, 0x04, 0x04, 0x04],
        'U' => [0x11, 0x11, 0x11, 0x11, 0x11, 0x11, 0x0E],
        'V' => [0x11, 0x11, 0x11, 0x11, 0x11, 0x0A, 0x04],
        'W' => [0x11, 0x11, 0x11, 0x15, 0x15, 0x15, 0x0A],
        'X' => [0x11, 0x11, 0x0A, 0x04, 0x0A, 0x11, 0x11],
        'Y' => [0x11, 0x11, 0x0A, 0x04, 0x04, 0x04, 0x04],
        'Z' => [0x1F, 0x01, 0x02, 0x04, 0x08, 0x10, 0x1F],
        '0' => [0x0E, 0x11, 0x13, 0x15, 0x19, 0x11, 0x0E],
        '1' => [0x04, 0x0C, 0x04, 0x04, 0x04, 0x04, 0x0E],
        '2' => [0x0E, 0x11, 0x01, 0x02, 0x04, 0x08, 0x1F],
        '3' => [0x1F, 0x02, 0x04, 0x02, 0x01, 0x11, 0x0E],
        '4' => [0x02, 0x06, 0x0A, 0x12, 0x1F, 0x02, 0x02],
        '5' => [0x1F, 0x10, 0x1E, 0x01, 0x01, 0x11, 0x0E],
        '6' => [0x06, 0x08, 0x10, 0x1E, 0x11, 0x11, 0x0E],
        '7' => [0x1F, 0x01, 0x02, 0x04, 0x08, 0x08, 0x08],
        '8' => [0x0E, 0x11, 0x11, 0x0E, 0x11, 0x11, 0x0E],
        '9' => [0x0E, 0x11, 0x11, 0x0F, 0x01, 0x02, 0x0C],
        _ => [0; 7],
    }
}

/// Boolean raster of `text` repeated along lines that fill the image:
/// `true` where a glyph stroke lands. Glyphs are 5x7 cells drawn at
/// `scale` pixels per cell, one blank cell between glyphs, `line_gap` blank
/// pixels between lines.
pub fn text_raster(height: usize, width: usize, text: &str, scale: usize, line_gap: usize) -> Array2<bool> {
    let scale = scale.max(1);
    let chars: Vec<char> = text.chars().collect();
    let mut out = Array2::from_elem((height, width), false);
    if chars.is_empty() {
        return out;
    }
    let advance = 6 * scale;
    let line_height = 7 * scale + line_gap;
    let per_line = (width / advance).max(1);
    let mut next = 0usize;
    let mut top = line_gap / 2;
    while top + 7 * scale <= height {
        for slot in 0..per_line {
            let g = glyph(chars[next % chars.len()]);
            next += 1;
            let left = slot * advance + scale / 2;
            for (gr, bits) in g.iter().enumerate() {
                for gc in 0..5 {
                    if bits & (0x10 >> gc) == 0 {
                        continue;
                    }
                    for dr in 0..scale {
                        for dc in 0..scale {
                            let (r, c) = (top + gr * scale + dr, left + gc * scale + dc);
                            if r < height && c < width {
                                out[[r, c]] = true;
                            }
                        }
                    }
                }
            }
        }
        top += line_height;
    }
    out
}

/// Randomly placed opaque `size x size` squares (`true` = opaque), added
/// until at least `fraction` of the pixels are covered.
pub fn square_raster(height: usize, width: usize, size: usize, fraction: f64, seed: u64) -> Array2<bool> {
    let mut rng = seed::stream(seed, "synthetic/squares");
    let mut out = Array2::from_elem((height, width), false);
    let target = (fraction.clamp(0.0, 1.0) * (height * width) as f64).ceil() as usize;
    let size = size.clamp(1, height.min(width));
    let mut covered = 0usize;
    while covered < target {
        let r0 = rng.random_range(0..=height - size);
        let c0 = rng.random_range(0..=width - size);
        for r in r0..r0 + size {
            for c in c0..c0 + size {
                if !std::mem::replace(&mut out[[r, c]], true) {
                    covered += 1;
                }
            }
        }
    }
    out
}

/// Radius, as a fraction of the side, of the centred disc covering `area`
/// of a square image.
pub fn disc_radius_for_area(area: f64) -> f64 {
    (area / std::f64::consts::PI).sqrt()
}

/// Shepp-Logan-style head phantom on an `n x n` grid, scaled so that it
/// fits inside the centred disc of radius `support_radius * n`. Values lie
/// in `[0, 255]`; edges are area-sampled.
pub fn tomo_phantom(n: usize, support_radius: f64) -> ImageGrid {
    // (intensity, semi-axis x, semi-axis y, centre x, centre y, angle deg)
    const ELLIPSES: [(f64, f64, f64, f64, f64, f64); 10] = [
        (1.0, 0.69, 0.92, 0.0, 0.0, 0.0),
        (-0.8, 0.6624, 0.874, 0.0, -0.0184, 0.0),
        (-0.2, 0.11, 0.31, 0.22, 0.0, -18.0),
        (-0.2, 0.16, 0.41, -0.22, 0.0, 18.0),
        (0.1, 0.21, 0.25, 0.0, 0.35, 0.0),
        (0.1, 0.046, 0.046, 0.0, 0.1, 0.0),
        (0.1, 0.046, 0.046, 0.0, -0.1, 0.0),
        (0.1, 0.046, 0.023, -0.08, -0.605, 0.0),
        (0.1, 0.023, 0.023, 0.0, -0.606, 0.0),
        (0.1, 0.023, 0.046, 0.06, -0.605, 0.0),
    ];
    const SUPERSAMPLE: usize = 4;
    let c = (n as f64 - 1.0) / 2.0;
    // The outer ellipse reaches 0.92 in phantom units.
    let units = 0.97 * support_radius * n as f64 / 0.92;
    let mut data = Array2::zeros((n, n));
    for ((r, col), v) in data.indexed_iter_mut() {
        let mut acc = 0.0;
        for i in 0..SUPERSAMPLE {
            for j in 0..SUPERSAMPLE {
                let y = -(r as f64 - c + (i as f64 + 0.5) / SUPERSAMPLE as f64 - 0.5) / units;
                let x = (col as f64 - c + (j as f64 + 0.5) / SUPERSAMPLE as f64 - 0.5) / units;
                for &(val, a, b, x0, y0, deg) in &ELLIPSES {
                    let (s, co) = deg.to_radians().sin_cos();
                    let (dx, dy) = (x - x0, y - y0);
                    let u = (dx * co + dy * s) / a;
                    let w = (-dx * s + dy * co) / b;
                    if u * u + w * w <= 1.0 {
                        acc += val;
                    }
                }
            }
        }
        *v = 255.0 * acc / (SUPERSAMPLE * SUPERSAMPLE) as f64;
    }
    ImageGrid::from_array_unchecked(data)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn smooth_image_range_and_determinism() {
        let a = smooth_image(40, 56, 3);
        let (lo, hi) = a.min_max();
        assert!((lo - 20.0).abs() < 1e-9 && (hi - 235.0).abs() < 1e-9);
        assert_eq!(a, smooth_image(40, 56, 3));
        assert_ne!(a, smooth_image(40, 56, 4));
    }

    #[test]
    fn text_raster_draws_known_glyph() {
        let t = text_raster(7, 6, "T", 1, 0);
        // Top bar of the T, then the stem in column 2.
        assert!((0..5).all(|c| t[[0, c]]));
        assert!((1..7).all(|r| t[[r, 2]] && !t[[r, 0]]));
    }

    #[test]
    fn squares_reach_the_requested_cover() {
        let s = square_raster(64, 64, 3, 0.2, 1);
        let frac = s.iter().filter(|&&b| b).count() as f64 / 4096.0;
        assert!((0.2..0.2 + 9.0 / 4096.0).contains(&frac));
    }

    #[test]
    fn phantom_stays_inside_its_support() {
        let n = 96;
        let radius = disc_radius_for_area(0.45);
        let p = tomo_phantom(n, radius);
        let c = (n as f64 - 1.0) / 2.0;
        let r = radius * n as f64;
        for ((i, j), &v) in p.as_array().indexed_iter() {
            if (i as f64 - c).hypot(j as f64 - c) > r {
                assert_eq!(v, 0.0);
            }
        }
        assert!(p.min_max().1 > 200.0);
    }
}
