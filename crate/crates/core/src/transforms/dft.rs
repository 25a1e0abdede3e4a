//! Unitary 2D discrete Fourier transform, natural (unshifted) order.

use std::sync::Arc;

use ndarray::{Array2, Axis};
use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

use super::Direction;
use crate::error::{invalid, Result};
use crate::image::{ComplexSpectrum, ImageGrid};

/// Reusable FFT plans for one `height x width` shape.
pub struct Dft2Plan {
    height: usize,
    width: usize,
    row_fwd: Arc<dyn Fft<f64>>,
    row_inv: Arc<dyn Fft<f64>>,
    col_fwd: Arc<dyn Fft<f64>>,
    col_inv: Arc<dyn Fft<f64>>,
    line: Vec<Complex64>,
    scratch: Vec<Complex64>,
    scale: f64,
}

impl Dft2Plan {
    pub fn new(height: usize, width: usize) -> Self {
        assert!(height > 0 && width > 0, "DFT dimensions must be positive");
        let mut planner = FftPlanner::new();
        let row_fwd = planner.plan_fft_forward(width);
        let row_inv = planner.plan_fft_inverse(width);
        let col_fwd = planner.plan_fft_forward(height);
        let col_inv = planner.plan_fft_inverse(height);
        let scratch_len = [&row_fwd, &row_inv, &col_fwd, &col_inv]
            .iter()
            .map(|p| p.get_inplace_scratch_len())
            .max()
            .unwrap_or(0);
        Self {
            height,
            width,
            row_fwd,
            row_inv,
            col_fwd,
            col_inv,
            line: vec![Complex64::default(); height.max(width)],
            scratch: vec![Complex64::default(); scratch_len],
            scale: 1.0 / ((height * width) as f64).sqrt(),
        }
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn process(&mut self, data: &mut Array2<Complex64>, direction: Direction) {
        assert_eq!(data.dim(), (self.height, self.width), "array shape does not match the plan");
        for axis in [Axis(1), Axis(0)] {
            let plan = match (axis == Axis(1), direction) {
                (true, Direction::Forward) => &self.row_fwd,
                (true, Direction::Inverse) => &self.row_inv,
                (false, Direction::Forward) => &self.col_fwd,
                (false, Direction::Inverse) => &self.col_inv,
            };
            let n = plan.len();
            let line = &mut self.line[..n];
            for mut lane in data.lanes_mut(axis) {
                for (dst, src) in line.iter_mut().zip(lane.iter()) {
                    *dst = *src;
                }
                plan.process_with_scratch(line, &mut self.scratch);
                for (dst, src) in lane.iter_mut().zip(line.iter()) {
                    *dst = *src;
                }
            }
        }
        let s = self.scale;
        data.mapv_inplace(|v| v * s);
    }

    pub fn forward_real(&mut self, image: &Array2<f64>) -> Array2<Complex64> {
        let mut out = image.mapv(|v| Complex64::new(v, 0.0));
        self.process(&mut out, Direction::Forward);
        out
    }
}

/// Unitary 2D DFT of a complex array.
pub fn dft2(data: &Array2<Complex64>, direction: Direction) -> Result<Array2<Complex64>> {
    let (h, w) = data.dim();
    if h == 0 || w == 0 {
        return Err(invalid("DFT input must be at least 1x1"));
    }
    if data.iter().any(|v| !v.re.is_finite() || !v.im.is_finite()) {
        return Err(invalid("DFT input contains non-finite values"));
    }
    let mut out = data.clone();
    Dft2Plan::new(h, w).process(&mut out, direction);
    Ok(out)
}

pub fn forward_dft(image: &ImageGrid) -> ComplexSpectrum {
    let out = Dft2Plan::new(image.height(), image.width()).forward_real(image.as_array());
    ComplexSpectrum::from_array_unchecked(out)
}

/// Inverse transform, keeping the real part.
pub fn inverse_dft(spectrum: &ComplexSpectrum) -> ImageGrid {
    let mut out = spectrum.as_array().clone();
    Dft2Plan::new(spectrum.height(), spectrum.width()).process(&mut out, Direction::Inverse);
    ImageGrid::from_array_unchecked(out.mapv(|v| v.re))
}
