//! Pixel-domain and coefficient-domain containers.
//!
//! Every field is a dense row-major `ndarray::Array2`. Rows are the vertical
//! axis; index `(0, 0)` is the top-left pixel, or the DC coefficient for the
//! cosine spectrum.

use ndarray::Array2;
use num_complex::Complex64;

use crate::error::{invalid, Dims, Result};

/// A real gray-level image. Nominal range is `[0, 255]` but any finite
/// value is allowed.
#[derive(Debug, Clone, PartialEq)]
pub struct ImageGrid {
    data: Array2<f64>,
}

impl ImageGrid {
    pub fn new(data: Array2<f64>) -> Result<Self> {
        check_nonempty(data.dim())?;
        if data.iter().any(|v| !v.is_finite()) {
            return Err(invalid("image contains non-finite values"));
        }
        Ok(Self { data })
    }

    pub fn zeros(height: usize, width: usize) -> Self {
        assert!(height > 0 && width > 0, "image dimensions must be positive");
        Self {
            data: Array2::zeros((height, width)),
        }
    }

    pub fn filled(height: usize, width: usize, value: f64) -> Self {
        assert!(height > 0 && width > 0, "image dimensions must be positive");
        Self {
            data: Array2::from_elem((height, width), value),
        }
    }

    pub fn from_fn(height: usize, width: usize, f: impl FnMut((usize, usize)) -> f64) -> Self {
        assert!(height > 0 && width > 0, "image dimensions must be positive");
        Self {
            data: Array2::from_shape_fn((height, width), f),
        }
    }

    /// Wraps data that the caller guarantees is finite and non-empty.
    pub(crate) fn from_array_unchecked(data: Array2<f64>) -> Self {
        debug_assert!(data.nrows() > 0 && data.ncols() > 0);
        Self { data }
    }

    pub fn height(&self) -> usize {
        self.data.nrows()
    }

    pub fn width(&self) -> usize {
        self.data.ncols()
    }

    pub fn dims(&self) -> Dims {
        Dims::new(self.height(), self.width())
    }

    pub fn len(&self) -> usize {
        self.data.len()
    }

    pub fn is_empty(&self) -> bool {
        self.data.is_empty()
    }

    pub fn get(&self, row: usize, col: usize) -> f64 {
        self.data[[row, col]]
    }

    pub fn as_array(&self) -> &Array2<f64> {
        &self.data
    }

    pub fn as_array_mut(&mut self) -> &mut Array2<f64> {
        &mut self.data
    }

    pub fn into_array(self) -> Array2<f64> {
        self.data
    }

    pub fn energy(&self) -> f64 {
        self.data.iter().map(|v| v * v).sum()
    }

    pub fn sum(&self) -> f64 {
        self.data.sum()
    }

    pub fn min_max(&self) -> (f64, f64) {
        self.data
            .iter()
            .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &v| {
                (lo.min(v), hi.max(v))
            })
    }

    /// Values rounded and clamped to 8 bits, row-major.
    pub fn to_u8(&self) -> Vec<u8> {
        self.data
            .iter()
            .map(|v| v.round().clamp(0.0, 255.0) as u8)
            .collect()
    }
}

/// Orthonormal 2D cosine-transform coefficients of an [`ImageGrid`], DC at
/// `(0, 0)`.
#[derive(Debug, Clone, PartialEq)]
pub struct RealSpectrum {
    coefficients: Array2<f64>,
}

impl RealSpectrum {
    pub fn new(coefficients: Array2<f64>) -> Result<Self> {
        check_nonempty(coefficients.dim())?;
        if coefficients.iter().any(|v| !v.is_finite()) {
            return Err(invalid("spectrum contains non-finite values"));
        }
        Ok(Self { coefficients })
    }

    pub(crate) fn from_array_unchecked(coefficients: Array2<f64>) -> Self {
        Self { coefficients }
    }

    pub fn height(&self) -> usize {
        self.coefficients.nrows()
    }

    pub fn width(&self) -> usize {
        self.coefficients.ncols()
    }

    pub fn dims(&self) -> Dims {
        Dims::new(self.height(), self.width())
    }

    pub fn as_array(&self) -> &Array2<f64> {
        &self.coefficients
    }

    pub fn as_array_mut(&mut self) -> &mut Array2<f64> {
        &mut self.coefficients
    }

    pub fn into_array(self) -> Array2<f64> {
        self.coefficients
    }

    pub fn energy(&self) -> f64 {
        self.coefficients.iter().map(|v| v * v).sum()
    }
}

/// Unitary 2D Fourier coefficients in natural (unshifted) order.
#[derive(Debug, Clone, PartialEq)]
pub struct ComplexSpectrum {
    coefficients: Array2<Complex64>,
}

impl ComplexSpectrum {
    pub fn new(coefficients: Array2<Complex64>) -> Result<Self> {
        check_nonempty(coefficients.dim())?;
        if coefficients
            .iter()
            .any(|v| !v.re.is_finite() || !v.im.is_finite())
        {
            return Err(invalid("spectrum contains non-finite values"));
        }
        Ok(Self { coefficients })
    }

    pub(crate) fn from_array_unchecked(coefficients: Array2<Complex64>) -> Self {
        Self { coefficients }
    }

    pub fn height(&self) -> usize {
        self.coefficients.nrows()
    }

    pub fn width(&self) -> usize {
        self.coefficients.ncols()
    }

    pub fn dims(&self) -> Dims {
        Dims::new(self.height(), self.width())
    }

    pub fn as_array(&self) -> &Array2<Complex64> {
        &self.coefficients
    }

    pub fn as_array_mut(&mut self) -> &mut Array2<Complex64> {
        &mut self.coefficients
    }

    pub fn into_array(self) -> Array2<Complex64> {
        self.coefficients
    }

    pub fn energy(&self) -> f64 {
        self.coefficients.iter().map(|v| v.norm_sqr()).sum()
    }

    /// Element-wise modulus.
    pub fn modulus(&self) -> Array2<f64> {
        self.coefficients.mapv(|v| v.norm())
    }

    /// Copy with the DC term moved to the centre, for display.
    pub fn centered(&self) -> Array2<Complex64> {
        let (h, w) = self.coefficients.dim();
        Array2::from_shape_fn((h, w), |(r, c)| {
            self.coefficients[[(r + h - h / 2) % h, (c + w - w / 2) % w]]
        })
    }
}

fn check_nonempty((h, w): (usize, usize)) -> Result<()> {
    if h == 0 || w == 0 {
        Err(invalid(format!("dimensions must be at least 1x1, got {h}x{w}")))
    } else {
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_non_finite() {
        let mut a = Array2::zeros((2, 2));
        a[[1, 0]] = f64::NAN;
        assert!(ImageGrid::new(a).is_err());
    }

    #[test]
    fn rejects_empty() {
        assert!(ImageGrid::new(Array2::zeros((0, 3))).is_err());
    }

    #[test]
    fn centered_moves_dc() {
        let mut a = Array2::from_elem((4, 4), Complex64::new(0.0, 0.0));
        a[[0, 0]] = Complex64::new(1.0, 0.0);
        let s = ComplexSpectrum::new(a).unwrap();
        assert_eq!(s.centered()[[2, 2]].re, 1.0);
    }

    #[test]
    fn to_u8_clamps() {
        let img = ImageGrid::new(Array2::from_shape_vec((1, 3), vec![-4.0, 127.6, 300.0]).unwrap())
            .unwrap();
        assert_eq!(img.to_u8(), vec![0, 128, 255]);
    }
}
