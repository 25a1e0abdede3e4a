use ndarray::Array2;
use num_complex::Complex64;

use crate::error::{ensure_dims, invalid, Dims, Result};
use crate::image::ImageGrid;
use crate::masks::ShapeSpec;
use crate::recon::{rms, ReconOptions, ReconReport, Tracker};
use crate::spectrum::error_metrics;
use crate::transforms::{Dft2Plan, Direction};

use super::inpaint::{check_feasible, inpaint};
use super::regions::OcclusionMask;

/// Starting phase for the modulus iterations.
#[derive(Debug, Clone, PartialEq)]
pub enum PhaseInit {
    /// Phase of the DFT of the occlusion mask itself.
    OcclusionMask,
    /// Explicit phase, radians, natural DFT order.
    Given(Array2<f64>),
}

#[derive(Debug, Clone)]
pub struct PhaseRetrieval {
    /// Stage 1: the occluded object recovered from the modulus.
    pub occluded: ImageGrid,
    /// Stage 2: the occlusions filled by bounded-spectrum reconstruction.
    pub image: ImageGrid,
    /// Stage-1 traces; the residual is the RMS modulus mismatch and the
    /// errors, when a reference is given, are against the occluded
    /// reference.
    pub stage1: ReconReport,
    pub stage2: ReconReport,
    /// Iteration (1-based) whose iterate stage 1 returned.
    pub best_iteration: usize,
}

/// Recovers a real nonnegative object seen through a known binary occluder
/// from the DFT modulus of the occluded object, then inpaints the occlusions.
///
/// Stage 1 alternates between the measured modulus (keeping the current
/// phase) and the object-domain constraints (real, nonnegative, zero where
/// occluded), and returns the iterate with the smallest modulus mismatch.
/// Stage 2 is [`inpaint`] with `shape`.
#[allow(clippy::too_many_arguments)]
pub fn phase_retrieve(
    modulus: &Array2<f64>,
    occlusion: &OcclusionMask,
    shape: &ShapeSpec,
    init: &PhaseInit,
    stage1: &ReconOptions,
    stage2: &ReconOptions,
    reference: Option<&ImageGrid>,
) -> Result<PhaseRetrieval> {
    stage1.validate()?;
    let (h, w) = modulus.dim();
    let dims = Dims::new(h, w);
    ensure_dims(dims, occlusion.dims())?;
    if modulus.iter().any(|&v| !(v >= 0.0) || !v.is_finite()) {
        return Err(invalid("modulus must be finite and nonnegative"));
    }
    if let Some(r) = reference {
        ensure_dims(dims, r.dims())?;
    }
    shape.validate()?;
    check_feasible(occlusion, shape)?;

    let mut plan = Dft2Plan::new(h, w);
    let transparency = occlusion.as_f64();
    let mut phase = match init {
        PhaseInit::OcclusionMask => plan.forward_real(&transparency).mapv(|v| v.arg()),
        PhaseInit::Given(p) => {
            ensure_dims(dims, Dims::new(p.nrows(), p.ncols()))?;
            p.clone()
        }
    };
    let occluded_reference = reference.map(|r| ImageGrid::from_array_unchecked(r.as_array() * &transparency));

    let scale = rms(modulus.iter().copied());
    let mut tracker = Tracker::new(*stage1, scale);
    let mut best: Option<(f64, usize, Array2<f64>)> = None;
    let mut iteration = 0usize;
    let reason = loop {
        iteration += 1;
        let mut field = ndarray::Zip::from(modulus)
            .and(&phase)
            .map_collect(|&m, &p| Complex64::from_polar(m, p));
        plan.process(&mut field, Direction::Inverse);
        let estimate = ndarray::Zip::from(&field)
            .and(&transparency)
            .map_collect(|v, &t| (v.re * t).max(0.0));

        let spectrum = plan.forward_real(&estimate);
        let residual = rms(spectrum.iter().zip(modulus.iter()).map(|(s, m)| s.norm() - m));
        phase = spectrum.mapv(|v| v.arg());

        if best.as_ref().is_none_or(|b| residual < b.0) {
            best = Some((residual, iteration, estimate.clone()));
        }
        let metrics = occluded_reference.as_ref().map(|r| {
            let m = error_metrics(r, &ImageGrid::from_array_unchecked(estimate)).expect("dims checked");
            (m.rmse_all, m.rmse_90)
        });
        if let Some(reason) = tracker.record(metrics, residual) {
            break reason;
        }
    };
    let report1 = tracker.finish(reason);
    let (_, best_iteration, best_image) = best.expect("at least one iteration");
    let occluded = ImageGrid::from_array_unchecked(best_image);
    let (image, report2) = inpaint(&occluded, occlusion, shape, stage2, reference)?;
    Ok(PhaseRetrieval {
        occluded,
        image,
        stage1: report1,
        stage2: report2,
        best_iteration,
    })
}
