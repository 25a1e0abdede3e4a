//! Iterative bounded-spectrum reconstruction from samples.
//!
//! Each iteration transforms the current estimate, zeroes the coefficients
//! outside the allowed zone, transforms back, and writes the known sample
//! values over the result. The image returned is the iterate right after the
//! spectral step, so its spectrum is exactly zero outside the zone.

use std::fmt;

use ndarray::Array2;

use crate::error::{ensure_dims, invalid, Result};
use crate::image::ImageGrid;
use crate::masks::SpectrumMask;
use crate::sampling::SampleSet;
use crate::spectrum::{error_metrics, magnitude_order, metrics_from_errors};
use crate::transforms::{Dct1Plan, Dct2Plan, Direction};

/// Number of nearest samples blended by [`init_interpolate`].
pub const INIT_NEIGHBOURS: usize = 3;

pub const DEFAULT_PLATEAU_WINDOW: usize = 50;
pub const DEFAULT_PLATEAU_EPSILON: f64 = 1e-4;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ReconOptions {
    pub max_iterations: usize,
    /// Stop once `rmse_all` against the reference reaches this level.
    pub stop_rmse: Option<f64>,
    pub plateau_window: usize,
    /// Stop when the tracked error improved by less than this relative amount
    /// over the last `plateau_window` iterations. Zero or less disables the
    /// rule.
    pub plateau_epsilon: f64,
}

impl Default for ReconOptions {
    fn default() -> Self {
        Self {
            max_iterations: 500,
            stop_rmse: None,
            plateau_window: DEFAULT_PLATEAU_WINDOW,
            plateau_epsilon: DEFAULT_PLATEAU_EPSILON,
        }
    }
}

impl ReconOptions {
    /// Exactly `iterations` iterations, no early stopping.
    pub fn fixed(iterations: usize) -> Self {
        Self {
            max_iterations: iterations,
            stop_rmse: None,
            plateau_window: DEFAULT_PLATEAU_WINDOW,
            plateau_epsilon: 0.0,
        }
    }

    pub fn with_max_iterations(mut self, iterations: usize) -> Self {
        self.max_iterations = iterations;
        self
    }

    pub fn with_stop_rmse(mut self, rmse: f64) -> Self {
        self.stop_rmse = Some(rmse);
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.max_iterations == 0 {
            return Err(invalid("max_iterations must be >= 1"));
        }
        if self.plateau_window == 0 {
            return Err(invalid("plateau_window must be >= 1"));
        }
        if let Some(t) = self.stop_rmse {
            if !(t >= 0.0) {
                return Err(invalid(format!("stop_rmse must be >= 0, got {t}")));
            }
        }
        if self.plateau_epsilon.is_nan() {
            return Err(invalid("plateau_epsilon is NaN"));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StopReason {
    MaxIter,
    TargetRmse,
    Plateau,
}

impl StopReason {
    pub fn as_str(self) -> &'static str {
        match self {
            StopReason::MaxIter => "max_iter",
            StopReason::TargetRmse => "target_rmse",
            StopReason::Plateau => "plateau",
        }
    }
}

impl fmt::Display for StopReason {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ReconReport {
    pub iterations_run: usize,
    /// Error against the reference after each iteration; empty without one.
    pub rmse_all_trace: Vec<f64>,
    pub rmse_90_trace: Vec<f64>,
    /// RMS mismatch between the spectrally bounded iterate and the known
    /// samples, per iteration.
    pub residual_trace: Vec<f64>,
    pub converged: bool,
    pub stop_reason: StopReason,
}

impl ReconReport {
    pub fn final_rmse(&self) -> Option<f64> {
        self.rmse_all_trace.last().copied()
    }
}

/// Tracks traces and decides when to stop.
pub(crate) struct Tracker {
    opts: ReconOptions,
    fixed_point_tol: f64,
    rmse_all: Vec<f64>,
    rmse_90: Vec<f64>,
    residual: Vec<f64>,
}

impl Tracker {
    /// `scale` is the RMS of the known data; a residual below `1e-12` of it
    /// means the iteration has reached a fixed point.
    pub(crate) fn new(opts: ReconOptions, scale: f64) -> Self {
        Self {
            opts,
            fixed_point_tol: 1e-12 * scale.max(f64::MIN_POSITIVE),
            rmse_all: Vec::new(),
            rmse_90: Vec::new(),
            residual: Vec::new(),
        }
    }

    /// Records one iteration; returns the reason to stop, if any.
    pub(crate) fn record(&mut self, metrics: Option<(f64, f64)>, residual: f64) -> Option<StopReason> {
        if let Some((all, r90)) = metrics {
            self.rmse_all.push(all);
            self.rmse_90.push(r90);
        }
        self.residual.push(residual);
        let it = self.residual.len();

        if let (Some(target), Some(&last)) = (self.opts.stop_rmse, self.rmse_all.last()) {
            if last <= target {
                return Some(StopReason::TargetRmse);
            }
        }
        if self.opts.plateau_epsilon > 0.0 {
            if residual <= self.fixed_point_tol {
                return Some(StopReason::Plateau);
            }
            let watched = if self.rmse_all.is_empty() { &self.residual } else { &self.rmse_all };
            let now = watched[it - 1];
            let w = self.opts.plateau_window;
            if it > w {
                let before = watched[it - 1 - w];
                if (before - now) / before < self.opts.plateau_epsilon {
                    return Some(StopReason::Plateau);
                }
            }
        }
        if it >= self.opts.max_iterations {
            return Some(StopReason::MaxIter);
        }
        None
    }

    pub(crate) fn finish(self, reason: StopReason) -> ReconReport {
        ReconReport {
            iterations_run: self.residual.len(),
            rmse_all_trace: self.rmse_all,
            rmse_90_trace: self.rmse_90,
            residual_trace: self.residual,
            converged: reason != StopReason::MaxIter,
            stop_reason: reason,
        }
    }
}

/// Inverse-distance weighted fill from the nearest samples.
///
/// Sampled pixels keep their values. Every other pixel is the mean of its
/// [`INIT_NEIGHBOURS`] nearest samples weighted by `1 / distance`, ties in
/// distance going to the smaller row-major index. With fewer samples than
/// that, all of them are used.
pub fn init_interpolate(samples: &SampleSet) -> ImageGrid {
    let (h, w) = (samples.height(), samples.width());
    let mut value_at = Array2::from_elem((h, w), f64::NAN);
    for (&(r, c), &v) in samples.positions().iter().zip(samples.values()) {
        value_at[[r, c]] = v;
    }
    let all: Vec<((usize, usize), f64)> =
        samples.positions().iter().copied().zip(samples.values().iter().copied()).collect();

    let mut out = Array2::zeros((h, w));
    let mut near: Vec<(f64, usize, f64)> = Vec::with_capacity(32);
    for r in 0..h {
        for c in 0..w {
            let known = value_at[[r, c]];
            if !known.is_nan() {
                out[[r, c]] = known;
                continue;
            }
            near.clear();
            if all.len() <= INIT_NEIGHBOURS {
                for &((sr, sc), v) in &all {
                    near.push((dist(r, c, sr, sc), sr * w + sc, v));
                }
            } else {
                ring_search(&value_at, r, c, &mut near);
            }
            out[[r, c]] = idw(&near);
        }
    }
    ImageGrid::from_array_unchecked(out)
}

fn dist(r: usize, c: usize, sr: usize, sc: usize) -> f64 {
    let dr = r as f64 - sr as f64;
    let dc = c as f64 - sc as f64;
    (dr * dr + dc * dc).sqrt()
}

/// Collects the [`INIT_NEIGHBOURS`] nearest samples around `(r, c)` by
/// scanning square rings of growing radius.
fn ring_search(value_at: &Array2<f64>, r: usize, c: usize, near: &mut Vec<(f64, usize, f64)>) {
    let (h, w) = value_at.dim();
    let max_ring = h.max(w);
    for ring in 1..=max_ring {
        let r0 = r.saturating_sub(ring);
        let r1 = (r + ring).min(h - 1);
        let c0 = c.saturating_sub(ring);
        let c1 = (c + ring).min(w - 1);
        for sr in r0..=r1 {
            let edge_row = sr.abs_diff(r) == ring;
            let step = if edge_row { 1 } else { (c1 - c0).max(1) };
            let mut sc = c0;
            loop {
                if edge_row || sc.abs_diff(c) == ring {
                    let v = value_at[[sr, sc]];
                    if !v.is_nan() {
                        near.push((dist(r, c, sr, sc), sr * w + sc, v));
                    }
                }
                if sc >= c1 {
                    break;
                }
                sc = (sc + step).min(c1);
            }
        }
        if near.len() >= INIT_NEIGHBOURS {
            near.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
            // Samples on later rings are at least `ring + 1` away.
            if near[INIT_NEIGHBOURS - 1].0 <= (ring + 1) as f64 {
                near.truncate(INIT_NEIGHBOURS);
                return;
            }
        }
    }
    near.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
    near.truncate(INIT_NEIGHBOURS);
}

fn idw(near: &[(f64, usize, f64)]) -> f64 {
    let mut num = 0.0;
    let mut den = 0.0;
    for &(d, _, v) in near {
        num += v / d;
        den += 1.0 / d;
    }
    num / den
}

/// Bounded-spectrum reconstruction of a 2D image from samples.
pub fn reconstruct_bs(
    samples: &SampleSet,
    mask: &SpectrumMask,
    reference: Option<&ImageGrid>,
    opts: &ReconOptions,
) -> Result<(ImageGrid, ReconReport)> {
    opts.validate()?;
    let dims = crate::error::Dims::new(samples.height(), samples.width());
    ensure_dims(dims, mask.dims())?;
    if let Some(r) = reference {
        ensure_dims(dims, r.dims())?;
    }
    let start = init_interpolate(samples);
    Ok(iterate_bs(start.into_array(), samples, mask, reference, opts))
}

/// The iteration of [`reconstruct_bs`] from an arbitrary starting image.
pub(crate) fn iterate_bs(
    mut x: Array2<f64>,
    samples: &SampleSet,
    mask: &SpectrumMask,
    reference: Option<&ImageGrid>,
    opts: &ReconOptions,
) -> (ImageGrid, ReconReport) {
    let (h, w) = x.dim();
    let mut plan = Dct2Plan::new(h, w);
    let positions = samples.positions();
    let values = samples.values();
    let mut tracker = Tracker::new(*opts, rms(values.iter().copied()));
    loop {
        plan.process(&mut x, Direction::Forward);
        mask.apply(&mut x);
        plan.process(&mut x, Direction::Inverse);

        let metrics = reference.map(|r| {
            let m = error_metrics(r, &ImageGrid::from_array_unchecked(x.clone())).expect("dims checked");
            (m.rmse_all, m.rmse_90)
        });
        let residual = rms(positions.iter().zip(values).map(|(&(r, c), &v)| x[[r, c]] - v));
        if let Some(reason) = tracker.record(metrics, residual) {
            return (ImageGrid::from_array_unchecked(x), tracker.finish(reason));
        }
        for (&(r, c), &v) in positions.iter().zip(values) {
            x[[r, c]] = v;
        }
    }
}

pub(crate) fn rms(values: impl Iterator<Item = f64>) -> f64 {
    let (sum, n) = values.fold((0.0, 0usize), |(s, n), v| (s + v * v, n + 1));
    if n == 0 {
        0.0
    } else {
        (sum / n as f64).sqrt()
    }
}

/// 1D reconstruction of a `k`-sparse DCT signal of length `samples.width()`
/// from samples on a `1 x n` grid.
///
/// Starts from the zero-filled signal and, every iteration, keeps only the
/// `k` largest DCT coefficients (re-detected each time) before restoring the
/// samples.
pub fn reconstruct_klargest_1d(
    samples: &SampleSet,
    k: usize,
    reference: Option<&[f64]>,
    opts: &ReconOptions,
) -> Result<(Vec<f64>, ReconReport)> {
    opts.validate()?;
    if samples.height() != 1 {
        return Err(invalid(format!(
            "1D samples must lie on a 1 x n grid, got height {}",
            samples.height()
        )));
    }
    let n = samples.width();
    let m = samples.len();
    if k == 0 || k > m {
        return Err(invalid(format!("need 1 <= k <= m, got k = {k}, m = {m}")));
    }
    if let Some(r) = reference {
        if r.len() != n {
            return Err(invalid(format!("reference has length {}, expected {n}", r.len())));
        }
    }
    let plan = Dct1Plan::new(n);
    let mut scratch = vec![0.0; plan.scratch_len()];
    let mut x = vec![0.0; n];
    for (&(_, c), &v) in samples.positions().iter().zip(samples.values()) {
        x[c] = v;
    }
    let mut keep = vec![false; n];
    let mut tracker = Tracker::new(*opts, rms(samples.values().iter().copied()));
    loop {
        plan.forward_with_scratch(&mut x, &mut scratch);
        keep.iter_mut().for_each(|b| *b = false);
        for &i in magnitude_order(&x).iter().take(k) {
            keep[i] = true;
        }
        for (v, &kp) in x.iter_mut().zip(&keep) {
            if !kp {
                *v = 0.0;
            }
        }
        plan.inverse_with_scratch(&mut x, &mut scratch);

        let metrics = reference.map(|r| {
            let m = metrics_from_errors(x.iter().zip(r).map(|(a, b)| a - b));
            (m.rmse_all, m.rmse_90)
        });
        let residual = rms(samples.positions().iter().zip(samples.values()).map(|(&(_, c), &v)| x[c] - v));
        if let Some(reason) = tracker.record(metrics, residual) {
            return Ok((x, tracker.finish(reason)));
        }
        for (&(_, c), &v) in samples.positions().iter().zip(samples.values()) {
            x[c] = v;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sampling::take_samples;

    #[test]
    fn init_with_every_pixel_is_identity() {
        let img = ImageGrid::from_fn(6, 7, |(r, c)| (r * 7 + c) as f64);
        let all: Vec<_> = (0..6).flat_map(|r| (0..7).map(move |c| (r, c))).collect();
        let s = take_samples(&img, &all).unwrap();
        assert_eq!(init_interpolate(&s), img);
    }

    #[test]
    fn init_single_sample_is_constant() {
        let s = SampleSet::new(5, 9, vec![(2, 3)], vec![42.0]).unwrap();
        assert!(init_interpolate(&s).as_array().iter().all(|&v| (v - 42.0).abs() < 1e-12));
    }

    #[test]
    fn init_matches_hand_computed_weights() {
        let s = SampleSet::new(8, 8, vec![(0, 0), (0, 4), (4, 0), (7, 7)], vec![10.0, 20.0, 30.0, 90.0]).unwrap();
        let img = init_interpolate(&s);
        // (1, 1): nearest are (0,0) at sqrt2, (0,4) at sqrt10, (4,0) at sqrt10.
        let (a, b) = (1.0 / 2f64.sqrt(), 1.0 / 10f64.sqrt());
        let expected = (10.0 * a + 20.0 * b + 30.0 * b) / (a + 2.0 * b);
        assert!((img.get(1, 1) - expected).abs() < 1e-12);
        // (6, 6): (7,7) at sqrt2, then (4,0) at sqrt40 and (0,4) at sqrt40.
        let (a, b) = (1.0 / 2f64.sqrt(), 1.0 / 40f64.sqrt());
        let expected = (90.0 * a + 30.0 * b + 20.0 * b) / (a + 2.0 * b);
        assert!((img.get(6, 6) - expected).abs() < 1e-12);
    }

    #[test]
    fn band_limited_full_sampling_is_exact_at_first_iteration() {
        let img = ImageGrid::from_fn(16, 16, |(r, c)| 100.0 + (r as f64 * 0.3).cos() * 20.0 + c as f64);
        let mask = SpectrumMask::full(16, 16);
        let all: Vec<_> = (0..16).flat_map(|r| (0..16).map(move |c| (r, c))).collect();
        let s = take_samples(&img, &all).unwrap();
        let (out, rep) = reconstruct_bs(&s, &mask, Some(&img), &ReconOptions::default()).unwrap();
        assert_eq!(rep.iterations_run, 1);
        assert!(rep.rmse_all_trace[0] < 1e-9);
        assert_eq!(rep.stop_reason, StopReason::Plateau);
        assert!(error_metrics(&img, &out).unwrap().rmse_all < 1e-9);
    }

    #[test]
    fn traces_have_iteration_length() {
        let img = ImageGrid::from_fn(8, 8, |(r, c)| (r + c) as f64);
        let s = take_samples(&img, &[(0, 0), (3, 5), (7, 2), (5, 5)]).unwrap();
        let (_, rep) = reconstruct_bs(&s, &SpectrumMask::full(8, 8), Some(&img), &ReconOptions::fixed(17)).unwrap();
        assert_eq!(rep.iterations_run, 17);
        assert_eq!(rep.rmse_all_trace.len(), 17);
        assert_eq!(rep.rmse_90_trace.len(), 17);
        assert_eq!(rep.stop_reason, StopReason::MaxIter);
        assert!(!rep.converged);
        let (_, blind) = reconstruct_bs(&s, &SpectrumMask::full(8, 8), None, &ReconOptions::fixed(5)).unwrap();
        assert!(blind.rmse_all_trace.is_empty());
        assert_eq!(blind.residual_trace.len(), 5);
    }

    #[test]
    fn one_d_rejects_k_above_m() {
        let s = SampleSet::new(1, 16, vec![(0, 1), (0, 5)], vec![1.0, 2.0]).unwrap();
        assert!(reconstruct_klargest_1d(&s, 3, None, &ReconOptions::default()).is_err());
        let s2 = SampleSet::new(2, 8, vec![(0, 1)], vec![1.0]).unwrap();
        assert!(reconstruct_klargest_1d(&s2, 1, None, &ReconOptions::default()).is_err());
    }

    #[test]
    fn one_d_full_sampling_of_sparse_signal_is_exact() {
        let n = 64;
        let mut c = vec![0.0; n];
        c[3] = 1.0;
        c[20] = -0.5;
        let plan = Dct1Plan::new(n);
        plan.inverse(&mut c);
        let pos: Vec<_> = (0..n).map(|i| (0, i)).collect();
        let s = SampleSet::new(1, n, pos, c.clone()).unwrap();
        let (x, rep) = reconstruct_klargest_1d(&s, 2, Some(&c), &ReconOptions::fixed(1)).unwrap();
        assert!(rep.rmse_all_trace[0] < 1e-12);
        assert!(x.iter().zip(&c).all(|(a, b)| (a - b).abs() < 1e-12));
    }
}
