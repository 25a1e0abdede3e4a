use crate::error::{ensure_dims, Error, Result};
use crate::image::ImageGrid;
use crate::masks::{make_shape_mask, ShapeSpec};
use crate::recon::{reconstruct_bs, ReconOptions, ReconReport};
use crate::sampling::take_samples;

use super::regions::OcclusionMask;

/// Fails unless the observed share of pixels reaches the zone's area
/// fraction, the least sampling rate the reconstruction can work with.
pub fn check_feasible(occlusion: &OcclusionMask, shape: &ShapeSpec) -> Result<()> {
    let total = occlusion.cells().len();
    let needed = (shape.area_fraction * total as f64).round() as usize;
    let have = occlusion.observed_count();
    if have < needed {
        return Err(Error::Infeasible(format!(
            "{have} observed pixels of {total}, the zone needs at least {needed}"
        )));
    }
    Ok(())
}

/// Fills occluded pixels by bounded-spectrum reconstruction from the
/// observed ones.
pub fn inpaint(
    image: &ImageGrid,
    occlusion: &OcclusionMask,
    shape: &ShapeSpec,
    opts: &ReconOptions,
    reference: Option<&ImageGrid>,
) -> Result<(ImageGrid, ReconReport)> {
    ensure_dims(image.dims(), occlusion.dims())?;
    shape.validate()?;
    check_feasible(occlusion, shape)?;
    let mask = make_shape_mask(shape, image.height(), image.width())?;
    let samples = take_samples(image, &occlusion.observed_positions())?;
    reconstruct_bs(&samples, &mask, reference, opts)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sampling::prefilter;
    use crate::spectrum::error_metrics;
    use ndarray::Array2;

    #[test]
    fn unoccluded_band_limited_image_is_unchanged() {
        let shape = ShapeSpec::pie_sector(0.3);
        let mask = make_shape_mask(&shape, 24, 24).unwrap();
        let raw = ImageGrid::from_fn(24, 24, |(r, c)| ((r * 13 + c * 7) % 17) as f64 * 10.0);
        let img = prefilter(&raw, &mask).unwrap();
        let (out, _) = inpaint(&img, &OcclusionMask::unoccluded(24, 24), &shape, &ReconOptions::default(), None).unwrap();
        assert!(error_metrics(&img, &out).unwrap().rmse_all < 1e-9);
    }

    #[test]
    fn heavy_occlusion_is_infeasible() {
        let mut cells = Array2::from_elem((10, 10), false);
        cells.row_mut(0).fill(true);
        let occ = OcclusionMask::new(cells).unwrap();
        let err = inpaint(&ImageGrid::zeros(10, 10), &occ, &ShapeSpec::pie_sector(0.3), &ReconOptions::default(), None)
            .unwrap_err();
        assert!(matches!(err, Error::Infeasible(_)));
    }
}
