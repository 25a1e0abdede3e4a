//! Sample-position grids, spectral pre-filtering and sample extraction.

use std::collections::HashSet;
use std::fmt;
use std::str::FromStr;

use rand::seq::SliceRandom;
use rand::Rng;

use crate::error::{ensure_dims, invalid, Error, Result};
use crate::image::ImageGrid;
use crate::masks::SpectrumMask;
use crate::seed;
use crate::transforms::{Dct2Plan, Direction};

pub type Position = (usize, usize);

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum GridKind {
    QuasiUniform,
    Jittered,
    Pseudorandom,
}

impl GridKind {
    pub const ALL: [GridKind; 3] = [GridKind::QuasiUniform, GridKind::Jittered, GridKind::Pseudorandom];

    pub fn as_str(self) -> &'static str {
        match self {
            GridKind::QuasiUniform => "quasi_uniform",
            GridKind::Jittered => "jittered",
            GridKind::Pseudorandom => "pseudorandom",
        }
    }
}

impl fmt::Display for GridKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for GridKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().replace('-', "_").as_str() {
            "quasi_uniform" | "quasiuniform" | "uniform" => Ok(GridKind::QuasiUniform),
            "jittered" | "jitter" => Ok(GridKind::Jittered),
            "pseudorandom" | "random" => Ok(GridKind::Pseudorandom),
            other => Err(invalid(format!("unknown grid kind '{other}'"))),
        }
    }
}

/// Values known at a set of distinct grid nodes.
#[derive(Debug, Clone, PartialEq)]
pub struct SampleSet {
    height: usize,
    width: usize,
    positions: Vec<Position>,
    values: Vec<f64>,
}

impl SampleSet {
    pub fn new(height: usize, width: usize, positions: Vec<Position>, values: Vec<f64>) -> Result<Self> {
        if height == 0 || width == 0 {
            return Err(invalid("sample grid must be at least 1x1"));
        }
        if positions.is_empty() {
            return Err(invalid("a sample set needs at least one sample"));
        }
        if positions.len() != values.len() {
            return Err(invalid(format!(
                "{} positions but {} values",
                positions.len(),
                values.len()
            )));
        }
        check_positions(height, width, &positions)?;
        if values.iter().any(|v| !v.is_finite()) {
            return Err(invalid("sample values must be finite"));
        }
        Ok(Self {
            height,
            width,
            positions,
            values,
        })
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn len(&self) -> usize {
        self.positions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.positions.is_empty()
    }

    pub fn positions(&self) -> &[Position] {
        &self.positions
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// Sampling rate `M / N`.
    pub fn rate(&self) -> f64 {
        self.len() as f64 / (self.height * self.width) as f64
    }

    /// Same positions, different values.
    pub fn with_values(&self, values: Vec<f64>) -> Result<Self> {
        Self::new(self.height, self.width, self.positions.clone(), values)
    }

    /// Flat row-major indices of the positions.
    pub fn flat_indices(&self) -> Vec<usize> {
        self.positions.iter().map(|&(r, c)| r * self.width + c).collect()
    }
}

fn check_positions(height: usize, width: usize, positions: &[Position]) -> Result<()> {
    let mut seen = HashSet::with_capacity(positions.len());
    for &(r, c) in positions {
        if r >= height || c >= width {
            return Err(invalid(format!("position ({r}, {c}) outside {height}x{width}")));
        }
        if !seen.insert((r, c)) {
            return Err(invalid(format!("duplicate position ({r}, {c})")));
        }
    }
    Ok(())
}

/// `m` distinct positions on a `height x width` grid, sorted row-major.
pub fn make_grid(kind: GridKind, height: usize, width: usize, m: usize, seed: u64) -> Result<Vec<Position>> {
    let total = height * width;
    if total == 0 {
        return Err(invalid("grid must be at least 1x1"));
    }
    if m == 0 || m > total {
        return Err(invalid(format!("sample count {m} outside 1..={total}")));
    }
    let mut out = match kind {
        GridKind::QuasiUniform => quasi_uniform(height, width, m),
        GridKind::Jittered => jittered(height, width, m, seed),
        GridKind::Pseudorandom => pseudorandom(height, width, m, seed),
    };
    out.sort_unstable();
    debug_assert_eq!(out.len(), m);
    Ok(out)
}

/// Rectangular target lattice with spacing `sqrt(N / m)`: `round(H / d)`
/// rows, each holding an even share of the `m` targets spread evenly across
/// the width. Targets snap to the nearest node; a taken node sends the target
/// to the nearest free one.
fn quasi_uniform(height: usize, width: usize, m: usize) -> Vec<Position> {
    let spacing = ((height * width) as f64 / m as f64).sqrt();
    let rows = ((height as f64 / spacing).round() as usize).clamp(1, m.min(height));
    let mut taken = vec![false; height * width];
    let mut out = Vec::with_capacity(m);
    for i in 0..rows {
        let in_row = (i + 1) * m / rows - i * m / rows;
        let y = (i as f64 + 0.5) * height as f64 / rows as f64 - 0.5;
        for j in 0..in_row {
            let x = (j as f64 + 0.5) * width as f64 / in_row as f64 - 0.5;
            let r = (y.round().max(0.0) as usize).min(height - 1);
            let c = (x.round().max(0.0) as usize).min(width - 1);
            let node = nearest_free(&taken, height, width, y, x, (r, c));
            taken[node.0 * width + node.1] = true;
            out.push(node);
        }
    }
    out
}

/// Nearest untaken node to `(y, x)` starting from the rounded node `start`.
/// Ties go to the smaller row-major index.
fn nearest_free(taken: &[bool], height: usize, width: usize, y: f64, x: f64, start: Position) -> Position {
    if !taken[start.0 * width + start.1] {
        return start;
    }
    let dist = |r: usize, c: usize| (r as f64 - y).powi(2) + (c as f64 - x).powi(2);
    let mut best: Option<(f64, usize)> = None;
    let limit = height.max(width);
    for ring in 1..=limit {
        let r0 = start.0.saturating_sub(ring);
        let r1 = (start.0 + ring).min(height - 1);
        let c0 = start.1.saturating_sub(ring);
        let c1 = (start.1 + ring).min(width - 1);
        for r in r0..=r1 {
            for c in c0..=c1 {
                let on_ring = r.abs_diff(start.0) == ring || c.abs_diff(start.1) == ring;
                if !on_ring || taken[r * width + c] {
                    continue;
                }
                let cand = (dist(r, c), r * width + c);
                if best.is_none_or(|b| cand.0 < b.0 || (cand.0 == b.0 && cand.1 < b.1)) {
                    best = Some(cand);
                }
            }
        }
        // Anything on a later ring is at least `ring + 1 - 0.5` away from the
        // target, which sits within half a cell of `start`.
        if let Some((d, idx)) = best {
            if (ring as f64 + 0.5).powi(2) >= d {
                return (idx / width, idx % width);
            }
        }
    }
    let (_, idx) = best.expect("m <= N guarantees a free node");
    (idx / width, idx % width)
}

/// One uniformly placed sample per tile of an `ny x nx` tiling. When the
/// tiling has more tiles than `m`, a seeded shuffle picks which tiles stay
/// empty.
fn jittered(height: usize, width: usize, m: usize, seed: u64) -> Vec<Position> {
    let (ny, nx) = jitter_tiling(height, width, m);
    let mut rng = seed::stream(seed, "grid/jittered");
    let mut tiles: Vec<(usize, usize)> = (0..ny).flat_map(|ty| (0..nx).map(move |tx| (ty, tx))).collect();
    if tiles.len() > m {
        tiles.shuffle(&mut rng);
        tiles.truncate(m);
        tiles.sort_unstable();
    }
    tiles
        .into_iter()
        .map(|(ty, tx)| {
            let (r0, r1) = (ty * height / ny, (ty + 1) * height / ny);
            let (c0, c1) = (tx * width / nx, (tx + 1) * width / nx);
            (rng.random_range(r0..r1), rng.random_range(c0..c1))
        })
        .collect()
}

/// Tile counts `(ny, nx)` with `ny * nx >= m`, tiles as square as the grid
/// allows, and no tile narrower than one node.
pub fn jitter_tiling(height: usize, width: usize, m: usize) -> (usize, usize) {
    let mut ny = ((m as f64 * height as f64 / width as f64).sqrt().round() as usize).clamp(1, height);
    let mut nx = m.div_ceil(ny);
    if nx > width {
        nx = width;
        ny = m.div_ceil(width);
    }
    (ny, nx)
}

fn pseudorandom(height: usize, width: usize, m: usize, seed: u64) -> Vec<Position> {
    let mut rng = seed::stream(seed, "grid/pseudorandom");
    rand::seq::index::sample(&mut rng, height * width, m)
        .into_iter()
        .map(|idx| (idx / width, idx % width))
        .collect()
}

/// Zeroes the DCT coefficients outside `mask`.
pub fn prefilter(image: &ImageGrid, mask: &SpectrumMask) -> Result<ImageGrid> {
    ensure_dims(image.dims(), mask.dims())?;
    let mut data = image.as_array().clone();
    let mut plan = Dct2Plan::new(image.height(), image.width());
    plan.process(&mut data, Direction::Forward);
    mask.apply(&mut data);
    plan.process(&mut data, Direction::Inverse);
    Ok(ImageGrid::from_array_unchecked(data))
}

pub fn take_samples(image: &ImageGrid, positions: &[Position]) -> Result<SampleSet> {
    check_positions(image.height(), image.width(), positions)?;
    let values = positions.iter().map(|&(r, c)| image.get(r, c)).collect();
    SampleSet::new(image.height(), image.width(), positions.to_vec(), values)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::masks::{make_shape_mask, ShapeSpec};

    fn distinct_in_bounds(p: &[Position], h: usize, w: usize) -> bool {
        let set: HashSet<_> = p.iter().collect();
        set.len() == p.len() && p.iter().all(|&(r, c)| r < h && c < w)
    }

    #[test]
    fn full_count_covers_every_node() {
        for kind in GridKind::ALL {
            let p = make_grid(kind, 9, 13, 9 * 13, 1).unwrap();
            assert_eq!(p.len(), 117);
            assert!(distinct_in_bounds(&p, 9, 13), "{kind}");
        }
    }

    #[test]
    fn cardinality_and_distinctness() {
        for kind in GridKind::ALL {
            for &(h, w, m) in &[(64, 64, 1), (64, 64, 1187), (37, 91, 1000), (5, 200, 999), (128, 128, 4751)] {
                let p = make_grid(kind, h, w, m, 42).unwrap();
                assert_eq!(p.len(), m, "{kind} {h}x{w} m={m}");
                assert!(distinct_in_bounds(&p, h, w), "{kind} {h}x{w} m={m}");
            }
        }
    }

    #[test]
    fn jittered_has_one_sample_per_16x16_cell() {
        let p = make_grid(GridKind::Jittered, 512, 512, 1024, 3).unwrap();
        let mut counts = vec![0u32; 1024];
        for &(r, c) in &p {
            counts[(r / 16) * 32 + c / 16] += 1;
        }
        assert!(counts.iter().all(|&n| n == 1));
    }

    #[test]
    fn deterministic_per_seed() {
        for kind in GridKind::ALL {
            let a = make_grid(kind, 50, 60, 700, 9).unwrap();
            let b = make_grid(kind, 50, 60, 700, 9).unwrap();
            assert_eq!(a, b);
        }
        let a = make_grid(GridKind::Pseudorandom, 50, 60, 700, 9).unwrap();
        let b = make_grid(GridKind::Pseudorandom, 50, 60, 700, 10).unwrap();
        assert_ne!(a, b);
    }

    #[test]
    fn rejects_bad_counts() {
        assert!(make_grid(GridKind::Jittered, 4, 4, 0, 0).is_err());
        assert!(make_grid(GridKind::Jittered, 4, 4, 17, 0).is_err());
    }

    #[test]
    fn quasi_uniform_quarter_density_is_every_other_node() {
        let p = make_grid(GridKind::QuasiUniform, 8, 8, 16, 0).unwrap();
        assert_eq!(p.len(), 16);
        assert!(p.iter().all(|&(r, c)| r % 2 == 1 && c % 2 == 1));
    }

    #[test]
    fn prefilter_full_mask_and_constant_image() {
        let img = ImageGrid::from_fn(16, 12, |(r, c)| (r * 7 + c * 3) as f64 % 11.0);
        let out = prefilter(&img, &SpectrumMask::full(16, 12)).unwrap();
        let dev = (out.as_array() - img.as_array()).iter().fold(0.0f64, |m, v| m.max(v.abs()));
        assert!(dev < 1e-9);

        let flat = ImageGrid::filled(16, 12, 77.0);
        let mask = make_shape_mask(&ShapeSpec::pie_sector(0.1), 16, 12).unwrap();
        let out = prefilter(&flat, &mask).unwrap();
        assert!(out.as_array().iter().all(|v| (v - 77.0).abs() < 1e-9));
    }

    #[test]
    fn take_samples_checks_positions() {
        let img = ImageGrid::from_fn(4, 4, |(r, c)| (r * 4 + c) as f64);
        assert!(take_samples(&img, &[]).is_err());
        assert!(take_samples(&img, &[(4, 0)]).is_err());
        assert!(take_samples(&img, &[(1, 1), (1, 1)]).is_err());
        let s = take_samples(&img, &[(0, 1), (3, 2)]).unwrap();
        assert_eq!(s.values(), &[1.0, 14.0]);
    }
}
