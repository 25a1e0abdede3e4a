//! Parametric spectral-zone masks in DCT index space.
//!
//! A shape is described by a gauge function `g(x, y)`, positively homogeneous
//! of degree one, evaluated at normalized cell centres
//! `x = (col + 0.5) / width`, `y = (row + 0.5) / height`. The shape at scale
//! `s` is `{ g <= s }`, so growing the scale only ever adds cells. Calibration
//! to an area fraction picks the scale (and, on exact ties, the row-major
//! order) that makes the mask hold exactly `round(fraction * N)` cells.

use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use ndarray::Array2;

use crate::error::{ensure_dims, invalid, Dims, Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ShapeKind {
    Rectangle,
    Triangle,
    PieSector,
    Ellipse,
    Superellipse,
}

impl ShapeKind {
    pub const ALL: [ShapeKind; 5] = [
        ShapeKind::Rectangle,
        ShapeKind::Triangle,
        ShapeKind::PieSector,
        ShapeKind::Ellipse,
        ShapeKind::Superellipse,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            ShapeKind::Rectangle => "rectangle",
            ShapeKind::Triangle => "triangle",
            ShapeKind::PieSector => "pie_sector",
            ShapeKind::Ellipse => "ellipse",
            ShapeKind::Superellipse => "superellipse",
        }
    }
}

impl fmt::Display for ShapeKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for ShapeKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().replace('-', "_").as_str() {
            "rectangle" | "rect" => Ok(ShapeKind::Rectangle),
            "triangle" => Ok(ShapeKind::Triangle),
            "pie_sector" | "pie" | "sector" => Ok(ShapeKind::PieSector),
            "ellipse" | "oval" => Ok(ShapeKind::Ellipse),
            "superellipse" | "super_ellipse" => Ok(ShapeKind::Superellipse),
            other => Err(invalid(format!("unknown shape kind '{other}'"))),
        }
    }
}

pub const DEFAULT_SUPERELLIPSE_EXPONENT: f64 = 3.0;
pub const DEFAULT_SECTOR_EXTENT_DEG: f64 = 90.0;

/// Parametric description of a spectral-zone shape.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ShapeSpec {
    pub kind: ShapeKind,
    /// Fraction of the baseband the calibrated mask occupies, in `(0, 1]`.
    pub area_fraction: f64,
    /// Vertical extent over horizontal extent, before rotation.
    pub aspect_ratio: f64,
    /// Counter-clockwise rotation about DC, degrees.
    pub orientation_deg: f64,
    /// Exponent `p` of `|x|^p + |y|^p <= 1`; superellipse only.
    pub superellipse_exponent: f64,
    /// Angular width of the pie sector, centred on the diagonal.
    pub sector_extent_deg: f64,
}

impl ShapeSpec {
    pub fn new(kind: ShapeKind, area_fraction: f64) -> Self {
        Self {
            kind,
            area_fraction,
            aspect_ratio: 1.0,
            orientation_deg: 0.0,
            superellipse_exponent: DEFAULT_SUPERELLIPSE_EXPONENT,
            sector_extent_deg: DEFAULT_SECTOR_EXTENT_DEG,
        }
    }

    /// The all-purpose quarter-disc sector.
    pub fn pie_sector(area_fraction: f64) -> Self {
        Self::new(ShapeKind::PieSector, area_fraction)
    }

    pub fn with_aspect_ratio(mut self, aspect_ratio: f64) -> Self {
        self.aspect_ratio = aspect_ratio;
        self
    }

    pub fn with_orientation(mut self, degrees: f64) -> Self {
        self.orientation_deg = degrees;
        self
    }

    pub fn with_area_fraction(mut self, area_fraction: f64) -> Self {
        self.area_fraction = area_fraction;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.area_fraction > 0.0 && self.area_fraction <= 1.0) {
            return Err(invalid(format!(
                "area_fraction must be in (0, 1], got {}",
                self.area_fraction
            )));
        }
        if !(self.aspect_ratio > 0.0 && self.aspect_ratio.is_finite()) {
            return Err(invalid("aspect_ratio must be positive and finite"));
        }
        if !self.orientation_deg.is_finite() {
            return Err(invalid("orientation_deg must be finite"));
        }
        if !(self.superellipse_exponent > 0.0 && self.superellipse_exponent.is_finite()) {
            return Err(invalid("superellipse_exponent must be positive and finite"));
        }
        if !(self.sector_extent_deg > 0.0 && self.sector_extent_deg <= 360.0) {
            return Err(invalid("sector_extent_deg must be in (0, 360]"));
        }
        Ok(())
    }

    /// Gauge value at normalized coordinates; `INFINITY` when the point can
    /// never be inside the shape.
    fn gauge(&self, x: f64, y: f64) -> f64 {
        let (s, c) = self.orientation_deg.to_radians().sin_cos();
        let u = x * c + y * s;
        let v = (-x * s + y * c) / self.aspect_ratio;
        match self.kind {
            ShapeKind::Rectangle => u.abs().max(v.abs()),
            ShapeKind::Triangle => u.abs() + v.abs(),
            ShapeKind::Ellipse => u.hypot(v),
            ShapeKind::Superellipse => {
                let p = self.superellipse_exponent;
                (u.abs().powf(p) + v.abs().powf(p)).powf(1.0 / p)
            }
            ShapeKind::PieSector => {
                let phi = v.atan2(u).to_degrees();
                let half = self.sector_extent_deg / 2.0;
                let mut off = (phi - 45.0).rem_euclid(360.0);
                if off > 180.0 {
                    off -= 360.0;
                }
                if off.abs() <= half + 1e-9 {
                    u.hypot(v)
                } else {
                    f64::INFINITY
                }
            }
        }
    }
}

/// Boolean membership field over the coefficient index grid.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SpectrumMask {
    cells: Array2<bool>,
}

impl SpectrumMask {
    pub fn new(cells: Array2<bool>) -> Result<Self> {
        if cells.nrows() == 0 || cells.ncols() == 0 {
            return Err(invalid("mask must be at least 1x1"));
        }
        Ok(Self { cells })
    }

    pub(crate) fn from_cells_unchecked(cells: Array2<bool>) -> Self {
        Self { cells }
    }

    pub fn full(height: usize, width: usize) -> Self {
        Self {
            cells: Array2::from_elem((height, width), true),
        }
    }

    pub fn empty(height: usize, width: usize) -> Self {
        Self {
            cells: Array2::from_elem((height, width), false),
        }
    }

    pub fn height(&self) -> usize {
        self.cells.nrows()
    }

    pub fn width(&self) -> usize {
        self.cells.ncols()
    }

    pub fn dims(&self) -> Dims {
        Dims::new(self.height(), self.width())
    }

    pub fn cells(&self) -> &Array2<bool> {
        &self.cells
    }

    pub fn get(&self, row: usize, col: usize) -> bool {
        self.cells[[row, col]]
    }

    pub fn count(&self) -> usize {
        self.cells.iter().filter(|&&b| b).count()
    }

    /// True-count over total cell count.
    pub fn fraction(&self) -> f64 {
        self.count() as f64 / self.cells.len() as f64
    }

    /// Row-major list of the true cells.
    pub fn indices(&self) -> Vec<(usize, usize)> {
        self.cells
            .indexed_iter()
            .filter(|(_, &b)| b)
            .map(|(i, _)| i)
            .collect()
    }

    pub fn from_indices(height: usize, width: usize, indices: &[(usize, usize)]) -> Result<Self> {
        let mut cells = Array2::from_elem((height, width), false);
        for &(r, c) in indices {
            if r >= height || c >= width {
                return Err(invalid(format!("index ({r}, {c}) outside {height}x{width}")));
            }
            cells[[r, c]] = true;
        }
        Self::new(cells)
    }

    /// Zeroes every coefficient outside the mask.
    pub fn apply(&self, coefficients: &mut Array2<f64>) {
        debug_assert_eq!(coefficients.dim(), self.cells.dim());
        ndarray::Zip::from(coefficients)
            .and(&self.cells)
            .for_each(|v, &keep| {
                if !keep {
                    *v = 0.0;
                }
            });
    }
}

/// Builds the mask of `spec` on a `height x width` coefficient grid.
///
/// The realized cell count is `round(area_fraction * height * width)`. DC is
/// always included. Fails with [`Error::DegenerateMask`] when that count is
/// one cell or less.
pub fn make_shape_mask(spec: &ShapeSpec, height: usize, width: usize) -> Result<SpectrumMask> {
    spec.validate()?;
    if height < 2 || width < 2 {
        return Err(invalid(format!(
            "shape masks need at least 2x2 cells, got {height}x{width}"
        )));
    }
    let total = height * width;
    let target = (spec.area_fraction * total as f64).round() as usize;
    if target <= 1 {
        return Err(Error::DegenerateMask(format!(
            "area fraction {} of {height}x{width} leaves only the DC cell",
            spec.area_fraction
        )));
    }
    let target = target.min(total);

    let mut order: Vec<(f64, usize)> = (0..total)
        .map(|idx| {
            if idx == 0 {
                return (f64::NEG_INFINITY, 0);
            }
            let (r, c) = (idx / width, idx % width);
            let x = (c as f64 + 0.5) / width as f64;
            let y = (r as f64 + 0.5) / height as f64;
            (spec.gauge(x, y), idx)
        })
        .collect();
    let admissible = order.iter().filter(|(g, _)| g.is_finite() || *g < 0.0).count();
    if admissible < target {
        return Err(Error::Infeasible(format!(
            "{} shape can cover at most {admissible} of {total} cells, {target} requested",
            spec.kind
        )));
    }
    order.select_nth_unstable_by(target - 1, |a, b| {
        a.0.partial_cmp(&b.0).unwrap_or(Ordering::Equal).then(a.1.cmp(&b.1))
    });

    let mut cells = Array2::from_elem((height, width), false);
    for &(_, idx) in &order[..target] {
        cells[[idx / width, idx % width]] = true;
    }
    Ok(SpectrumMask { cells })
}

/// Coverage diagnostics of `mask` against `reference`:
/// `(fraction of reference cells inside mask, fraction of mask cells outside reference)`.
pub fn mask_union_fraction(mask: &SpectrumMask, reference: &SpectrumMask) -> Result<(f64, f64)> {
    ensure_dims(reference.dims(), mask.dims())?;
    let mut both = 0usize;
    let mut mask_only = 0usize;
    ndarray::Zip::from(&mask.cells)
        .and(&reference.cells)
        .for_each(|&m, &r| match (m, r) {
            (true, true) => both += 1,
            (true, false) => mask_only += 1,
            _ => {}
        });
    let ref_count = reference.count();
    let mask_count = mask.count();
    let inside = if ref_count == 0 { 0.0 } else { both as f64 / ref_count as f64 };
    let outside = if mask_count == 0 { 0.0 } else { mask_only as f64 / mask_count as f64 };
    Ok((inside, outside))
}

/// Area of the approximating shape relative to the exact zone it stands in
/// for.
pub fn zone_redundancy(shape: &SpectrumMask, zone: &SpectrumMask) -> f64 {
    shape.fraction() / zone.fraction()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn count_inside(spec: &ShapeSpec, h: usize, w: usize, scale: f64) -> usize {
        let mut n = 0;
        for r in 0..h {
            for c in 0..w {
                let x = (c as f64 + 0.5) / w as f64;
                let y = (r as f64 + 0.5) / h as f64;
                if spec.gauge(x, y) <= scale {
                    n += 1;
                }
            }
        }
        n
    }

    #[test]
    fn full_rectangle_covers_everything() {
        let m = make_shape_mask(&ShapeSpec::new(ShapeKind::Rectangle, 1.0), 16, 12).unwrap();
        assert_eq!(m.count(), 16 * 12);
    }

    #[test]
    fn uncalibrated_quarter_disc_area() {
        // Cell-counting oracle: radius r quarter disc covers about pi r^2 / 4.
        let spec = ShapeSpec::pie_sector(0.5);
        let n = 512;
        for r in [0.3, 0.5, 0.8] {
            let frac = count_inside(&spec, n, n, r) as f64 / (n * n) as f64;
            let expected = std::f64::consts::PI * r * r / 4.0;
            assert!((frac - expected).abs() < 2e-3, "r={r}: {frac} vs {expected}");
        }
    }

    #[test]
    fn calibration_hits_the_requested_fraction() {
        let m = make_shape_mask(&ShapeSpec::pie_sector(0.3), 512, 512).unwrap();
        assert!((m.fraction() - 0.3).abs() <= 2.0 / (512.0 * 512.0));
    }

    #[test]
    fn calibrated_mask_is_a_level_set() {
        // Every cell inside must have gauge <= every cell outside (ties aside).
        let spec = ShapeSpec::new(ShapeKind::Ellipse, 0.2).with_aspect_ratio(0.45).with_orientation(20.0);
        let (h, w) = (40, 56);
        let m = make_shape_mask(&spec, h, w).unwrap();
        let g = |r: usize, c: usize| spec.gauge((c as f64 + 0.5) / w as f64, (r as f64 + 0.5) / h as f64);
        let max_in = m.indices().iter().filter(|&&i| i != (0, 0)).map(|&(r, c)| g(r, c)).fold(0.0, f64::max);
        let min_out = (0..h)
            .flat_map(|r| (0..w).map(move |c| (r, c)))
            .filter(|&(r, c)| !m.get(r, c))
            .map(|(r, c)| g(r, c))
            .fold(f64::INFINITY, f64::min);
        assert!(max_in <= min_out);
    }

    #[test]
    fn tiny_fraction_is_degenerate() {
        let err = make_shape_mask(&ShapeSpec::pie_sector(1e-6), 64, 64).unwrap_err();
        assert!(matches!(err, Error::DegenerateMask(_)));
    }

    #[test]
    fn bad_specs_are_rejected() {
        assert!(make_shape_mask(&ShapeSpec::pie_sector(0.0), 8, 8).is_err());
        assert!(make_shape_mask(&ShapeSpec::pie_sector(1.2), 8, 8).is_err());
        assert!(make_shape_mask(&ShapeSpec::pie_sector(0.5).with_aspect_ratio(0.0), 8, 8).is_err());
        assert!(make_shape_mask(&ShapeSpec::pie_sector(0.5), 1, 8).is_err());
    }

    #[test]
    fn narrow_sector_cannot_cover_everything() {
        let mut spec = ShapeSpec::pie_sector(0.9);
        spec.sector_extent_deg = 10.0;
        assert!(matches!(make_shape_mask(&spec, 32, 32), Err(Error::Infeasible(_))));
    }

    #[test]
    fn union_fraction_extremes() {
        let a = SpectrumMask::from_indices(4, 4, &[(0, 0), (0, 1)]).unwrap();
        let b = SpectrumMask::from_indices(4, 4, &[(3, 3)]).unwrap();
        assert_eq!(mask_union_fraction(&a, &a).unwrap(), (1.0, 0.0));
        assert_eq!(mask_union_fraction(&a, &b).unwrap(), (0.0, 1.0));
        assert!(mask_union_fraction(&a, &SpectrumMask::full(3, 4)).is_err());
    }

    #[test]
    fn redundancy_of_shape_vs_zone() {
        let n = 1000;
        let shape = SpectrumMask::from_indices(1, n, &(0..275).map(|c| (0, c)).collect::<Vec<_>>()).unwrap();
        let zone = SpectrumMask::from_indices(1, n, &(0..164).map(|c| (0, c)).collect::<Vec<_>>()).unwrap();
        assert!((zone_redundancy(&shape, &zone) - 1.67).abs() < 0.01);
    }

    #[test]
    fn kind_parsing() {
        for k in ShapeKind::ALL {
            assert_eq!(k.as_str().parse::<ShapeKind>().unwrap(), k);
        }
        assert!("hexagon".parse::<ShapeKind>().is_err());
    }
}
