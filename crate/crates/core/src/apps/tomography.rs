use ndarray::Array2;

use crate::error::{ensure_dims, invalid, Dims, Result};
use crate::image::ImageGrid;
use crate::recon::{rms, ReconOptions, ReconReport, Tracker};
use crate::spectrum::metrics_from_errors;
use crate::transforms::{RadonPlan, Sinogram};

use super::regions::SupportMask;

#[derive(Debug, Clone)]
pub struct ProjectionRecovery {
    /// Projections after the last restoration of the known cells.
    pub sinogram: Sinogram,
    /// Support-limited image of the last iteration.
    pub image: ImageGrid,
    /// Sinogram-domain error traces.
    pub report: ReconReport,
}

/// Recovers unknown sinogram cells of an object known to vanish outside
/// `support`.
///
/// Each iteration back-projects the current sinogram, zeroes the image
/// outside the support, projects it again and puts the known cells back.
pub fn recover_projections(
    sino: &Sinogram,
    known: &Array2<bool>,
    support: &SupportMask,
    reference: Option<&Sinogram>,
    opts: &ReconOptions,
) -> Result<ProjectionRecovery> {
    opts.validate()?;
    let shape = sino.values().dim();
    ensure_dims(Dims::new(shape.0, shape.1), Dims::new(known.nrows(), known.ncols()))?;
    let n = sino.image_size();
    ensure_dims(Dims::new(n, n), support.dims())?;
    if let Some(r) = reference {
        ensure_dims(Dims::new(shape.0, shape.1), Dims::new(r.values().nrows(), r.values().ncols()))?;
        if r.angles() != sino.angles() {
            return Err(invalid("reference sinogram has different angles"));
        }
    }
    if !known.iter().any(|&b| b) {
        return Err(invalid("no known sinogram cell"));
    }

    let plan = RadonPlan::new(n, sino.bins(), sino.angles())?;
    let measured = sino.values();
    let mut current = measured.clone();
    let known_values: Vec<f64> = measured.iter().zip(known.iter()).filter(|(_, &k)| k).map(|(&v, _)| v).collect();
    let mut tracker = Tracker::new(*opts, rms(known_values.iter().copied()));
    loop {
        let mut image = plan.back_project_filtered(&current);
        support.apply(&mut image);
        let mut projected = plan.project(&image);

        let residual = rms(projected
            .iter()
            .zip(measured.iter())
            .zip(known.iter())
            .filter(|(_, &k)| k)
            .map(|((p, m), _)| p - m));
        ndarray::Zip::from(&mut projected)
            .and(measured)
            .and(known)
            .for_each(|p, &m, &k| {
                if k {
                    *p = m;
                }
            });
        let metrics = reference.map(|r| {
            let m = metrics_from_errors(projected.iter().zip(r.values().iter()).map(|(a, b)| a - b));
            (m.rmse_all, m.rmse_90)
        });
        current = projected;
        if let Some(reason) = tracker.record(metrics, residual) {
            return Ok(ProjectionRecovery {
                sinogram: sino.with_values(current),
                image: ImageGrid::from_array_unchecked(image),
                report: tracker.finish(reason),
            });
        }
    }
}

/// Support estimate: pixels whose filtered back-projection magnitude
/// reaches `epsilon` times the largest magnitude.
pub fn support_from_backprojection(sino: &Sinogram, epsilon: f64) -> Result<SupportMask> {
    if !(epsilon >= 0.0) {
        return Err(invalid(format!("epsilon must be >= 0, got {epsilon}")));
    }
    let image = crate::transforms::radon_inverse(sino)?;
    let peak = image.as_array().iter().fold(0.0f64, |m, v| m.max(v.abs()));
    SupportMask::new(image.as_array().mapv(|v| v.abs() >= epsilon * peak && peak > 0.0))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::transforms::{radon_forward, uniform_angles};

    #[test]
    fn fully_known_sinogram_is_returned_unchanged() {
        let img = ImageGrid::from_fn(24, 24, |(r, c)| if (8..16).contains(&r) && (6..14).contains(&c) { 50.0 } else { 0.0 });
        let sino = radon_forward(&img, &uniform_angles(18)).unwrap();
        let known = Array2::from_elem(sino.values().dim(), true);
        let support = SupportMask::disc(24, 24, 0.45).unwrap();
        let out = recover_projections(&sino, &known, &support, Some(&sino), &ReconOptions::fixed(3)).unwrap();
        assert_eq!(out.sinogram.values(), sino.values());
        assert!(out.report.rmse_all_trace.iter().all(|&v| v == 0.0));
    }

    #[test]
    fn nothing_known_is_rejected() {
        let sino = radon_forward(&ImageGrid::filled(8, 8, 1.0), &uniform_angles(4)).unwrap();
        let known = Array2::from_elem(sino.values().dim(), false);
        let support = SupportMask::disc(8, 8, 0.4).unwrap();
        assert!(recover_projections(&sino, &known, &support, None, &ReconOptions::fixed(1)).is_err());
    }

    #[test]
    fn thresholded_support_covers_the_object() {
        let img = ImageGrid::from_fn(32, 32, |(r, c)| {
            if (r as f64 - 15.5).hypot(c as f64 - 15.5) < 7.0 { 80.0 } else { 0.0 }
        });
        let sino = radon_forward(&img, &uniform_angles(90)).unwrap();
        let s = support_from_backprojection(&sino, 0.2).unwrap();
        assert!(s.cells()[[16, 16]]);
        assert!(!s.cells()[[0, 0]]);
    }
}
