use std::f64::consts::PI;

use ndarray::Array2;

use crate::image::ImageGrid;

/// Inner flat radius of the apodization window, as a fraction of the
/// inscribed-circle radius.
pub const APODIZATION_FLAT_FRACTION: f64 = 0.7;

/// Circular raised-cosine window: 1 up to `0.7 R`, cosine taper to 0 at the
/// inscribed radius `R`, 0 beyond.
pub fn apodization_window(height: usize, width: usize) -> Array2<f64> {
    let cy = (height as f64 - 1.0) / 2.0;
    let cx = (width as f64 - 1.0) / 2.0;
    let outer = height.min(width) as f64 / 2.0;
    let inner = APODIZATION_FLAT_FRACTION * outer;
    Array2::from_shape_fn((height, width), |(r, c)| {
        let rho = ((r as f64 - cy).powi(2) + (c as f64 - cx).powi(2)).sqrt();
        if rho <= inner {
            1.0
        } else if rho >= outer {
            0.0
        } else {
            0.5 * (1.0 + (PI * (rho - inner) / (outer - inner)).cos())
        }
    })
}

/// Multiplies the image by [`apodization_window`].
pub fn apodize(image: &ImageGrid) -> ImageGrid {
    let w = apodization_window(image.height(), image.width());
    ImageGrid::from_array_unchecked(image.as_array() * &w)
}
