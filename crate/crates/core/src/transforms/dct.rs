//! Orthonormal DCT-II / DCT-III, in one and two dimensions.
//!
//! Forward is the type-II transform scaled so that the basis is orthonormal:
//!
//! ```text
//! X[k] = s(k) * sum_n x[n] cos(pi (2n + 1) k / 2N),  s(0) = sqrt(1/N), s(k) = sqrt(2/N)
//! ```
//!
//! and inverse is its transpose (type III with the same scaling). Energy is
//! preserved exactly up to rounding.

use std::sync::Arc;

use ndarray::{Array2, Axis};
use rustdct::{DctPlanner, TransformType2And3};

use super::Direction;
use crate::error::{invalid, Result};
use crate::image::{ImageGrid, RealSpectrum};

/// A planned orthonormal 1D DCT of fixed length.
#[derive(Clone)]
pub struct Dct1Plan {
    len: usize,
    plan: Arc<dyn TransformType2And3<f64>>,
    dc_scale: f64,
    ac_scale: f64,
}

impl Dct1Plan {
    pub fn new(len: usize) -> Self {
        assert!(len > 0, "DCT length must be positive");
        let plan = DctPlanner::new().plan_dct2(len);
        let n = len as f64;
        Self {
            len,
            plan,
            dc_scale: (1.0 / n).sqrt(),
            ac_scale: (2.0 / n).sqrt(),
        }
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn scratch_len(&self) -> usize {
        self.plan.get_scratch_len()
    }

    pub fn forward_with_scratch(&self, buf: &mut [f64], scratch: &mut [f64]) {
        debug_assert_eq!(buf.len(), self.len);
        self.plan.process_dct2_with_scratch(buf, scratch);
        buf[0] *= self.dc_scale;
        for v in &mut buf[1..] {
            *v *= self.ac_scale;
        }
    }

    pub fn inverse_with_scratch(&self, buf: &mut [f64], scratch: &mut [f64]) {
        debug_assert_eq!(buf.len(), self.len);
        // The unnormalized DCT-III halves its first input.
        buf[0] *= 2.0 * self.dc_scale;
        for v in &mut buf[1..] {
            *v *= self.ac_scale;
        }
        self.plan.process_dct3_with_scratch(buf, scratch);
    }

    pub fn forward(&self, buf: &mut [f64]) {
        let mut scratch = vec![0.0; self.scratch_len()];
        self.forward_with_scratch(buf, &mut scratch);
    }

    pub fn inverse(&self, buf: &mut [f64]) {
        let mut scratch = vec![0.0; self.scratch_len()];
        self.inverse_with_scratch(buf, &mut scratch);
    }

    pub fn apply(&self, buf: &mut [f64], direction: Direction) {
        match direction {
            Direction::Forward => self.forward(buf),
            Direction::Inverse => self.inverse(buf),
        }
    }
}

/// A planned separable 2D DCT for one `height x width` shape.
///
/// Plans and scratch buffers are reused across calls, which matters inside
/// iterative reconstruction loops.
pub struct Dct2Plan {
    rows: Dct1Plan,
    cols: Dct1Plan,
    line: Vec<f64>,
    scratch: Vec<f64>,
}

impl Dct2Plan {
    pub fn new(height: usize, width: usize) -> Self {
        let rows = Dct1Plan::new(width);
        let cols = Dct1Plan::new(height);
        let scratch = vec![0.0; rows.scratch_len().max(cols.scratch_len())];
        Self {
            rows,
            cols,
            line: vec![0.0; height.max(width)],
            scratch,
        }
    }

    pub fn height(&self) -> usize {
        self.cols.len()
    }

    pub fn width(&self) -> usize {
        self.rows.len()
    }

    /// Transforms `data` in place.
    pub fn process(&mut self, data: &mut Array2<f64>, direction: Direction) {
        assert_eq!(
            data.dim(),
            (self.height(), self.width()),
            "array shape does not match the plan"
        );
        let forward = matches!(direction, Direction::Forward);
        for axis in [Axis(1), Axis(0)] {
            let plan = if axis == Axis(1) { &self.rows } else { &self.cols };
            let n = plan.len();
            let line = &mut self.line[..n];
            for mut lane in data.lanes_mut(axis) {
                for (dst, src) in line.iter_mut().zip(lane.iter()) {
                    *dst = *src;
                }
                if forward {
                    plan.forward_with_scratch(line, &mut self.scratch);
                } else {
                    plan.inverse_with_scratch(line, &mut self.scratch);
                }
                for (dst, src) in lane.iter_mut().zip(line.iter()) {
                    *dst = *src;
                }
            }
        }
    }
}

/// Orthonormal 2D DCT of a raw array.
pub fn dct2(data: &Array2<f64>, direction: Direction) -> Result<Array2<f64>> {
    let (h, w) = data.dim();
    if h == 0 || w == 0 {
        return Err(invalid("DCT input must be at least 1x1"));
    }
    if data.iter().any(|v| !v.is_finite()) {
        return Err(invalid("DCT input contains non-finite values"));
    }
    let mut out = data.clone();
    Dct2Plan::new(h, w).process(&mut out, direction);
    Ok(out)
}

/// Orthonormal 1D DCT.
pub fn dct1(signal: &[f64], direction: Direction) -> Result<Vec<f64>> {
    if signal.is_empty() {
        return Err(invalid("DCT input must have length >= 1"));
    }
    if signal.iter().any(|v| !v.is_finite()) {
        return Err(invalid("DCT input contains non-finite values"));
    }
    let mut out = signal.to_vec();
    Dct1Plan::new(signal.len()).apply(&mut out, direction);
    Ok(out)
}

pub fn forward_dct(image: &ImageGrid) -> RealSpectrum {
    let mut out = image.as_array().clone();
    Dct2Plan::new(image.height(), image.width()).process(&mut out, Direction::Forward);
    RealSpectrum::from_array_unchecked(out)
}

pub fn inverse_dct(spectrum: &RealSpectrum) -> ImageGrid {
    let mut out = spectrum.as_array().clone();
    Dct2Plan::new(spectrum.height(), spectrum.width()).process(&mut out, Direction::Inverse);
    ImageGrid::from_array_unchecked(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;
    use std::f64::consts::PI;

    /// Direct O(N^2) orthonormal DCT-II, used as an oracle.
    fn naive_dct(x: &[f64]) -> Vec<f64> {
        let n = x.len();
        (0..n)
            .map(|k| {
                let s = if k == 0 { (1.0 / n as f64).sqrt() } else { (2.0 / n as f64).sqrt() };
                s * x
                    .iter()
                    .enumerate()
                    .map(|(i, v)| v * (PI * (2 * i + 1) as f64 * k as f64 / (2 * n) as f64).cos())
                    .sum::<f64>()
            })
            .collect()
    }

    fn random_array(h: usize, w: usize, seed: u64) -> Array2<f64> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        Array2::from_shape_fn((h, w), |_| rng.random_range(0.0..255.0))
    }

    #[test]
    fn constant_image_has_single_dc_coefficient() {
        let img = Array2::from_elem((8, 8), 255.0);
        let spec = dct2(&img, Direction::Forward).unwrap();
        assert!((spec[[0, 0]] - 2040.0).abs() < 1e-9);
        let rest: f64 = spec.iter().skip(1).map(|v| v.abs()).sum();
        assert!(rest < 1e-9);
    }

    #[test]
    fn constant_vector_dc_is_sqrt_n() {
        let out = dct1(&[1.0; 256], Direction::Forward).unwrap();
        assert!((out[0] - 16.0).abs() < 1e-12);
        assert!(out[1..].iter().all(|v| v.abs() < 1e-12));
    }

    #[test]
    fn matches_naive_dct() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for n in [1usize, 2, 5, 8, 17, 64] {
            let x: Vec<f64> = (0..n).map(|_| rng.random_range(-1.0..1.0)).collect();
            let fast = dct1(&x, Direction::Forward).unwrap();
            let slow = naive_dct(&x);
            for (a, b) in fast.iter().zip(&slow) {
                assert!((a - b).abs() < 1e-10, "n={n}: {a} vs {b}");
            }
        }
    }

    #[test]
    fn basis_vector_has_one_dominant_coefficient() {
        let n = 64;
        let k = 11;
        let x: Vec<f64> = (0..n)
            .map(|i| (PI * (2 * i + 1) as f64 * k as f64 / (2 * n) as f64).cos())
            .collect();
        let c = dct1(&x, Direction::Forward).unwrap();
        let (arg, peak) = c
            .iter()
            .enumerate()
            .max_by(|a, b| a.1.abs().total_cmp(&b.1.abs()))
            .unwrap();
        assert_eq!(arg, k);
        let others: f64 = c.iter().enumerate().filter(|(i, _)| *i != k).map(|(_, v)| v * v).sum();
        assert!(others < 1e-20 * peak * peak + 1e-20);
    }

    #[test]
    fn round_trip_and_parseval_on_assorted_shapes() {
        for (i, &(h, w)) in [(8, 8), (32, 32), (128, 128), (256, 256), (32, 8), (7, 128)]
            .iter()
            .enumerate()
        {
            let x = random_array(h, w, i as u64);
            let spec = dct2(&x, Direction::Forward).unwrap();
            let back = dct2(&spec, Direction::Inverse).unwrap();
            let max_dev = (&back - &x).iter().fold(0.0f64, |m, v| m.max(v.abs()));
            assert!(max_dev < 1e-9, "{h}x{w}: {max_dev}");
            // Direct summation on both sides.
            let e_pix: f64 = x.iter().map(|v| v * v).sum();
            let e_coef: f64 = spec.iter().map(|v| v * v).sum();
            assert!(((e_pix - e_coef) / e_pix).abs() < 1e-10);
        }
    }

    #[test]
    fn rejects_non_finite() {
        let mut x = Array2::zeros((2, 2));
        x[[0, 1]] = f64::INFINITY;
        assert!(dct2(&x, Direction::Forward).is_err());
        assert!(dct1(&[f64::NAN], Direction::Forward).is_err());
        assert!(dct1(&[], Direction::Forward).is_err());
    }
}
