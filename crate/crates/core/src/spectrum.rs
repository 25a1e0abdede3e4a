//! Spectrum sparsity, K-largest zones and reconstruction error metrics.

use std::cmp::Ordering;

use ndarray::Array2;

use crate::error::{ensure_dims, invalid, Result};
use crate::image::ImageGrid;
use crate::masks::SpectrumMask;
use crate::transforms::forward_dct;

/// Peak value used for PSNR.
pub const PSNR_PEAK: f64 = 255.0;

/// PSNR reported for a perfect match instead of infinity.
pub const PSNR_CAP_DB: f64 = 999.0;

/// Share of the smallest absolute errors entering `rmse_90`.
pub const RMSE_90_SHARE: f64 = 0.9;

#[derive(Debug, Clone, PartialEq)]
pub struct SparsityReport {
    pub k: usize,
    pub n: usize,
    pub sparsity: f64,
    pub achieved_rmse: f64,
    pub target_rmse: f64,
    pub ec_mask: SpectrumMask,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ErrorMetrics {
    pub rmse_all: f64,
    pub rmse_90: f64,
    pub psnr_db: f64,
}

/// Flat indices ordered by decreasing magnitude, ties by ascending index.
pub fn magnitude_order(values: &[f64]) -> Vec<usize> {
    let mut order: Vec<usize> = (0..values.len()).collect();
    order.sort_by(|&a, &b| {
        values[b]
            .abs()
            .partial_cmp(&values[a].abs())
            .unwrap_or(Ordering::Equal)
            .then(a.cmp(&b))
    });
    order
}

/// Mask of the `k` largest-magnitude entries of `coefficients`.
pub fn k_largest_mask(coefficients: &Array2<f64>, k: usize) -> SpectrumMask {
    let (h, w) = coefficients.dim();
    let flat: Vec<f64> = coefficients.iter().copied().collect();
    let mut cells = Array2::from_elem((h, w), false);
    for &idx in magnitude_order(&flat).iter().take(k) {
        cells[[idx / w, idx % w]] = true;
    }
    SpectrumMask::from_cells_unchecked(cells)
}

/// Smallest set of largest DCT coefficients that reconstructs `image` to
/// within `target_rmse`.
pub fn sparse_spectrum(image: &ImageGrid, target_rmse: f64) -> Result<SparsityReport> {
    if !(target_rmse >= 0.0) || !target_rmse.is_finite() {
        return Err(invalid(format!("target RMSE must be finite and >= 0, got {target_rmse}")));
    }
    let spec = forward_dct(image);
    let coeffs = spec.as_array();
    let (h, w) = coeffs.dim();
    let n = h * w;
    let flat: Vec<f64> = coeffs.iter().copied().collect();
    let order = magnitude_order(&flat);

    // tail[k] = energy of everything after the first k coefficients, summed
    // from the small end to keep rounding small.
    let mut tail = vec![0.0; n + 1];
    for i in (0..n).rev() {
        tail[i] = tail[i + 1] + flat[order[i]] * flat[order[i]];
    }
    let budget = n as f64 * target_rmse * target_rmse;
    let k = (0..=n).find(|&k| tail[k] <= budget).unwrap_or(n);

    let mut cells = Array2::from_elem((h, w), false);
    for &idx in &order[..k] {
        cells[[idx / w, idx % w]] = true;
    }
    Ok(SparsityReport {
        k,
        n,
        sparsity: k as f64 / n as f64,
        achieved_rmse: (tail[k] / n as f64).sqrt(),
        target_rmse,
        ec_mask: SpectrumMask::from_cells_unchecked(cells),
    })
}

pub fn psnr_db(rmse: f64) -> f64 {
    if rmse > 0.0 {
        20.0 * (PSNR_PEAK / rmse).log10()
    } else {
        PSNR_CAP_DB
    }
}

pub fn error_metrics(reference: &ImageGrid, candidate: &ImageGrid) -> Result<ErrorMetrics> {
    ensure_dims(reference.dims(), candidate.dims())?;
    Ok(metrics_from_errors(
        reference
            .as_array()
            .iter()
            .zip(candidate.as_array().iter())
            .map(|(a, b)| b - a),
    ))
}

/// Metrics over raw error values.
pub fn metrics_from_errors(errors: impl IntoIterator<Item = f64>) -> ErrorMetrics {
    let mut sq: Vec<f64> = errors.into_iter().map(|e| e * e).collect();
    let n = sq.len();
    if n == 0 {
        return ErrorMetrics {
            rmse_all: 0.0,
            rmse_90: 0.0,
            psnr_db: PSNR_CAP_DB,
        };
    }
    let rmse_all = (sq.iter().sum::<f64>() / n as f64).sqrt();
    let keep = (RMSE_90_SHARE * n as f64).floor() as usize;
    let rmse_90 = if keep == 0 {
        0.0
    } else {
        sq.select_nth_unstable_by(keep - 1, |a, b| a.total_cmp(b));
        (sq[..keep].iter().sum::<f64>() / keep as f64).sqrt().min(rmse_all)
    };
    ErrorMetrics {
        rmse_all,
        rmse_90,
        psnr_db: psnr_db(rmse_all),
    }
}
