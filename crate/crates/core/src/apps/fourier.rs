use ndarray::Array2;
use num_complex::Complex64;

use crate::error::{ensure_dims, invalid, Dims, Result};
use crate::image::{ComplexSpectrum, ImageGrid};
use crate::masks::SpectrumMask;
use crate::recon::{rms, ReconOptions, ReconReport, Tracker};
use crate::spectrum::error_metrics;
use crate::transforms::{Dft2Plan, Direction};

use super::regions::SupportMask;

/// Known DFT coefficients at distinct positions (natural, unshifted order).
#[derive(Debug, Clone, PartialEq)]
pub struct SparseSpectrum {
    height: usize,
    width: usize,
    positions: Vec<(usize, usize)>,
    values: Vec<Complex64>,
}

impl SparseSpectrum {
    pub fn new(height: usize, width: usize, positions: Vec<(usize, usize)>, values: Vec<Complex64>) -> Result<Self> {
        if positions.is_empty() || positions.len() != values.len() {
            return Err(invalid(format!(
                "need matching, non-empty positions and values, got {} and {}",
                positions.len(),
                values.len()
            )));
        }
        let mut seen = Array2::from_elem((height, width), false);
        for &(r, c) in &positions {
            if r >= height || c >= width {
                return Err(invalid(format!("position ({r}, {c}) outside {height}x{width}")));
            }
            if std::mem::replace(&mut seen[[r, c]], true) {
                return Err(invalid(format!("duplicate position ({r}, {c})")));
            }
        }
        if values.iter().any(|v| !v.re.is_finite() || !v.im.is_finite()) {
            return Err(invalid("spectral samples must be finite"));
        }
        Ok(Self {
            height,
            width,
            positions,
            values,
        })
    }

    /// Samples `spectrum` at `positions`.
    pub fn take(spectrum: &ComplexSpectrum, positions: &[(usize, usize)]) -> Result<Self> {
        let a = spectrum.as_array();
        let values = positions.iter().map(|&(r, c)| a[[r, c]]).collect();
        Self::new(spectrum.height(), spectrum.width(), positions.to_vec(), values)
    }

    pub fn dims(&self) -> Dims {
        Dims::new(self.height, self.width)
    }

    pub fn positions(&self) -> &[(usize, usize)] {
        &self.positions
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.positions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.positions.is_empty()
    }
}

/// Disc of DFT frequencies with `|f| <= radius`, in cycles per sample, laid
/// out in natural order. `radius = 0.5` is the disc inscribed in the
/// baseband.
pub fn dft_disc_mask(height: usize, width: usize, radius: f64) -> Result<SpectrumMask> {
    if !(radius > 0.0) {
        return Err(invalid(format!("radius must be > 0, got {radius}")));
    }
    let freq = |i: usize, n: usize| {
        let k = if i <= n / 2 { i as f64 } else { i as f64 - n as f64 };
        k / n as f64
    };
    SpectrumMask::new(Array2::from_shape_fn((height, width), |(r, c)| {
        freq(r, height).hypot(freq(c, width)) <= radius + 1e-12
    }))
}

#[derive(Debug, Clone)]
pub struct SpectrumRecovery {
    pub image: ImageGrid,
    /// Spectrum after the last restoration and spectral bounding.
    pub spectrum: ComplexSpectrum,
    pub report: ReconReport,
}

/// Reconstructs a support-limited image from sparse DFT samples.
///
/// Starting from the bounded sparse spectrum, each iteration inverse
/// transforms, keeps the real part inside `support`, transforms back,
/// restores the known samples and zeroes everything outside `spectral_mask`.
pub fn reconstruct_from_sparse_spectrum(
    known: &SparseSpectrum,
    support: &SupportMask,
    spectral_mask: &SpectrumMask,
    reference: Option<&ImageGrid>,
    opts: &ReconOptions,
) -> Result<SpectrumRecovery> {
    opts.validate()?;
    let dims = known.dims();
    ensure_dims(dims, support.dims())?;
    ensure_dims(dims, spectral_mask.dims())?;
    if let Some(r) = reference {
        ensure_dims(dims, r.dims())?;
    }
    if let Some(&(r, c)) = known.positions().iter().find(|&&(r, c)| !spectral_mask.get(r, c)) {
        return Err(invalid(format!("known sample ({r}, {c}) lies outside the spectral mask")));
    }

    let (h, w) = (dims.height, dims.width);
    let mut plan = Dft2Plan::new(h, w);
    let mut spec = Array2::from_elem((h, w), Complex64::default());
    for (&(r, c), &v) in known.positions().iter().zip(known.values()) {
        spec[[r, c]] = v;
    }
    let scale = rms(known.values().iter().map(|v| v.norm()));
    let mut tracker = Tracker::new(*opts, scale);
    loop {
        let mut field = spec.clone();
        plan.process(&mut field, Direction::Inverse);
        let mut image = field.mapv(|v| v.re);
        support.apply(&mut image);

        let img = ImageGrid::from_array_unchecked(image);
        let metrics = reference.map(|r| {
            let m = error_metrics(r, &img).expect("dims checked");
            (m.rmse_all, m.rmse_90)
        });
        let mut next = plan.forward_real(img.as_array());
        let residual = rms(known
            .positions()
            .iter()
            .zip(known.values())
            .map(|(&(r, c), v)| (next[[r, c]] - v).norm()));
        for (&(r, c), &v) in known.positions().iter().zip(known.values()) {
            next[[r, c]] = v;
        }
        ndarray::Zip::from(&mut next).and(spectral_mask.cells()).for_each(|v, &keep| {
            if !keep {
                *v = Complex64::default();
            }
        });
        spec = next;
        if let Some(reason) = tracker.record(metrics, residual) {
            return Ok(SpectrumRecovery {
                image: img,
                spectrum: ComplexSpectrum::from_array_unchecked(spec),
                report: tracker.finish(reason),
            });
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::transforms::forward_dft;

    #[test]
    fn full_spectrum_recovers_exactly() {
        let support = SupportMask::disc(32, 32, 0.35).unwrap();
        let mut a = Array2::from_shape_fn((32, 32), |(r, c)| 50.0 + ((r * 3 + c * 5) % 23) as f64);
        support.apply(&mut a);
        let img = ImageGrid::new(a).unwrap();
        let spec = forward_dft(&img);
        let all: Vec<_> = (0..32).flat_map(|r| (0..32).map(move |c| (r, c))).collect();
        let known = SparseSpectrum::take(&spec, &all).unwrap();
        let out = reconstruct_from_sparse_spectrum(
            &known,
            &support,
            &SpectrumMask::full(32, 32),
            Some(&img),
            &ReconOptions::fixed(2),
        )
        .unwrap();
        assert!(out.report.rmse_all_trace[0] < 1e-9);
        assert!(error_metrics(&img, &out.image).unwrap().rmse_all < 1e-9);
    }

    #[test]
    fn samples_outside_mask_rejected() {
        let mask = dft_disc_mask(16, 16, 0.25).unwrap();
        assert!(!mask.get(8, 8));
        let known = SparseSpectrum::new(16, 16, vec![(8, 8)], vec![Complex64::new(1.0, 0.0)]).unwrap();
        let support = SupportMask::disc(16, 16, 0.3).unwrap();
        assert!(reconstruct_from_sparse_spectrum(&known, &support, &mask, None, &ReconOptions::fixed(1)).is_err());
    }

    #[test]
    fn inscribed_disc_area() {
        let m = dft_disc_mask(128, 128, 0.5).unwrap();
        assert!((m.fraction() - std::f64::consts::FRAC_PI_4).abs() < 0.01);
        assert!(m.get(0, 0) && m.get(0, 127) && m.get(127, 0));
    }
}
