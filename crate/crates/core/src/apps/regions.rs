use ndarray::Array2;

use crate::error::{invalid, Dims, Result};
use crate::image::ImageGrid;

fn check_cells(cells: &Array2<bool>, what: &str) -> Result<()> {
    if cells.is_empty() {
        return Err(invalid(format!("{what} must be at least 1x1")));
    }
    if !cells.iter().any(|&b| b) {
        return Err(invalid(format!("{what} has no true cell")));
    }
    Ok(())
}

fn disc_cells(height: usize, width: usize, radius_fraction: f64) -> Array2<bool> {
    let cy = (height as f64 - 1.0) / 2.0;
    let cx = (width as f64 - 1.0) / 2.0;
    let radius = radius_fraction * height.min(width) as f64;
    Array2::from_shape_fn((height, width), |(r, c)| {
        (r as f64 - cy).powi(2) + (c as f64 - cx).powi(2) <= radius * radius
    })
}

/// Pixels allowed to be nonzero.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SupportMask {
    cells: Array2<bool>,
}

impl SupportMask {
    pub fn new(cells: Array2<bool>) -> Result<Self> {
        check_cells(&cells, "support mask")?;
        Ok(Self { cells })
    }

    /// Centred disc of radius `radius_fraction * min(height, width)`.
    pub fn disc(height: usize, width: usize, radius_fraction: f64) -> Result<Self> {
        if !(radius_fraction > 0.0) {
            return Err(invalid(format!("disc radius must be > 0, got {radius_fraction}")));
        }
        Self::new(disc_cells(height, width, radius_fraction))
    }

    pub fn dims(&self) -> Dims {
        Dims::new(self.cells.nrows(), self.cells.ncols())
    }

    pub fn cells(&self) -> &Array2<bool> {
        &self.cells
    }

    pub fn count(&self) -> usize {
        self.cells.iter().filter(|&&b| b).count()
    }

    pub fn fraction(&self) -> f64 {
        self.count() as f64 / self.cells.len() as f64
    }

    pub fn apply(&self, data: &mut Array2<f64>) {
        ndarray::Zip::from(data).and(&self.cells).for_each(|v, &keep| {
            if !keep {
                *v = 0.0;
            }
        });
    }
}

/// Pixels seen through the occluder (`true` = observed).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OcclusionMask {
    cells: Array2<bool>,
}

impl OcclusionMask {
    pub fn new(cells: Array2<bool>) -> Result<Self> {
        check_cells(&cells, "occlusion mask")?;
        Ok(Self { cells })
    }

    pub fn unoccluded(height: usize, width: usize) -> Self {
        Self {
            cells: Array2::from_elem((height, width), true),
        }
    }

    /// Treats pixels at or below `threshold` as occluded, as for occluders
    /// rendered in black.
    pub fn from_dark_pixels(image: &ImageGrid, threshold: f64) -> Result<Self> {
        Self::new(image.as_array().mapv(|v| v > threshold))
    }

    pub fn dims(&self) -> Dims {
        Dims::new(self.cells.nrows(), self.cells.ncols())
    }

    pub fn cells(&self) -> &Array2<bool> {
        &self.cells
    }

    pub fn observed_count(&self) -> usize {
        self.cells.iter().filter(|&&b| b).count()
    }

    /// Fraction of observed pixels.
    pub fn transparent_fraction(&self) -> f64 {
        self.observed_count() as f64 / self.cells.len() as f64
    }

    pub fn observed_positions(&self) -> Vec<(usize, usize)> {
        self.cells
            .indexed_iter()
            .filter(|(_, &b)| b)
            .map(|(p, _)| p)
            .collect()
    }

    pub fn as_f64(&self) -> Array2<f64> {
        self.cells.mapv(|b| if b { 1.0 } else { 0.0 })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn disc_support_area() {
        let s = SupportMask::disc(256, 256, 0.35).unwrap();
        let expected = std::f64::consts::PI * 0.35 * 0.35;
        assert!((s.fraction() - expected).abs() < 5e-3);
    }

    #[test]
    fn empty_masks_rejected() {
        assert!(SupportMask::new(Array2::from_elem((3, 3), false)).is_err());
        assert!(OcclusionMask::new(Array2::from_elem((3, 3), false)).is_err());
    }

    #[test]
    fn dark_pixels_are_occluded() {
        let img = ImageGrid::from_fn(2, 2, |(r, c)| if r == c { 0.0 } else { 9.0 });
        let m = OcclusionMask::from_dark_pixels(&img, 0.0).unwrap();
        assert_eq!(m.observed_positions(), vec![(0, 1), (1, 0)]);
    }
}
