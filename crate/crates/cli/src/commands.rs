//! Command implementations. Each returns the summary line.

use std::fmt;
use std::io::Cursor;
use std::path::Path;

use asbsr::apps::{self, Arrangement, OcclusionMask, PhaseInit, SparseSpectrum, SupportMask};
use asbsr::cs_model::{freq_error_probability, redundancy_curve, McExperiment};
use asbsr::io::csv::{self as tables, McRow};
use asbsr::masks::make_shape_mask;
use asbsr::recon::{reconstruct_bs, ReconOptions, ReconReport};
use asbsr::sampling::{make_grid, prefilter, take_samples, GridKind};
use asbsr::spectrum::{error_metrics, sparse_spectrum};
use asbsr::synthetic::square_raster;
use asbsr::transforms::{default_bins, forward_dft, radon_forward, uniform_angles, Sinogram};
use asbsr::{Error, ImageGrid};
use ndarray::Array2;

use crate::files::{self, write_atomic};
use crate::{resolve_shape, Command};

#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Lib(Error),
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        CliError::Lib(e)
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Usage(msg) => write!(f, "usage: {msg}"),
            CliError::Lib(e) => write!(f, "{e}"),
        }
    }
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Usage(_) | CliError::Lib(Error::InvalidInput(_)) => 2,
            CliError::Lib(Error::Io(_) | Error::Parse(_)) => 3,
            CliError::Lib(Error::Infeasible(_) | Error::DegenerateMask(_) | Error::DimensionMismatch { .. }) => 4,
            CliError::Lib(Error::Numerical(_)) => 5,
        }
    }
}

type Result<T> = std::result::Result<T, CliError>;

/// Ordered `key=value` pairs.
#[derive(Default)]
pub struct Summary(Vec<(String, String)>);

impl Summary {
    fn new(command: &str) -> Self {
        Summary(vec![("command".to_string(), command.to_string())])
    }

    fn put(&mut self, key: impl Into<String>, value: impl ToString) -> &mut Self {
        self.0.push((key.into(), value.to_string()));
        self
    }

    fn report(&mut self, prefix: &str, report: &ReconReport) -> &mut Self {
        let key = |k: &str| format!("{prefix}{k}");
        self.put(key("iterations"), report.iterations_run);
        self.put(key("stop"), report.stop_reason);
        if let Some(r) = report.final_rmse() {
            self.put(key("rmse_all"), r);
        }
        if let Some(r) = report.residual_trace.last() {
            self.put(key("residual"), r);
        }
        self
    }
}

impl fmt::Display for Summary {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let line: Vec<String> = self.0.iter().map(|(k, v)| format!("{k}={v}")).collect();
        f.write_str(&line.join(" "))
    }
}

fn open(path: &Path) -> Result<Cursor<Vec<u8>>> {
    Ok(Cursor::new(files::read_bytes(path)?))
}

fn need_seed(seed: Option<u64>, why: &str) -> Result<u64> {
    seed.ok_or_else(|| CliError::Usage(format!("--seed is required {why}")))
}

fn write_trace(path: Option<&Path>, report: &ReconReport) -> Result<()> {
    if let Some(p) = path {
        write_atomic(p, |w| tables::write_trace(w, report))?;
    }
    Ok(())
}

fn write_outputs(out: &Path, raw: Option<&Path>, image: &ImageGrid) -> Result<()> {
    files::write_image(out, image)?;
    if let Some(p) = raw {
        files::write_raw(p, image.as_array())?;
    }
    Ok(())
}

pub fn run(command: Command) -> Result<Summary> {
    match command {
        Command::Analyze(a) => {
            let image = files::read_image(&a.input)?;
            let report = sparse_spectrum(&image, a.target_rmse)?;
            write_atomic(&a.out, |w| tables::write_sparsity_report(w, &report))?;
            if let Some(p) = &a.mask_out {
                files::write_bitmap(p, report.ec_mask.cells())?;
            }
            let mut s = Summary::new("analyze");
            s.put("k", report.k)
                .put("n", report.n)
                .put("sparsity", report.sparsity)
                .put("achieved_rmse", report.achieved_rmse);
            Ok(s)
        }
        Command::Mask(a) => {
            let spec = resolve_shape(&a.shape, None)?;
            let mask = make_shape_mask(&spec, a.height, a.width)?;
            files::write_bitmap(&a.out, mask.cells())?;
            if let Some(p) = &a.indices_out {
                write_atomic(p, |w| tables::write_mask_indices(w, &mask))?;
            }
            if let Some(p) = &a.spec_out {
                let text = asbsr::io::format_shape(&spec);
                write_atomic(p, |w| Ok(w.write_all(text.as_bytes())?))?;
            }
            let mut s = Summary::new("mask");
            s.put("shape", spec.kind).put("count", mask.count()).put("fraction", mask.fraction());
            Ok(s)
        }
        Command::Sample(a) => {
            let mut image = files::read_image(&a.input)?;
            if let Some(p) = &a.mask {
                image = prefilter(&image, &files::read_mask(p)?)?;
            }
            let n = image.len();
            let m = match (a.count, a.rate) {
                (Some(m), _) => m,
                (None, Some(rate)) if rate > 0.0 && rate <= 1.0 => (rate * n as f64).round() as usize,
                (None, Some(rate)) => return Err(CliError::Usage(format!("--rate must be in (0, 1], got {rate}"))),
                (None, None) => unreachable!("clap requires one of them"),
            };
            let positions = make_grid(a.grid, image.height(), image.width(), m, a.seed)?;
            let samples = take_samples(&image, &positions)?;
            write_atomic(&a.out, |w| tables::write_samples(w, &samples))?;
            if let Some(p) = &a.sampled_out {
                files::write_raw(p, image.as_array())?;
            }
            let mut s = Summary::new("sample");
            s.put("grid", a.grid).put("m", samples.len()).put("rate", samples.rate());
            Ok(s)
        }
        Command::Reconstruct(a) => {
            let mask = files::read_mask(&a.mask)?;
            let samples = tables::read_samples(open(&a.input)?, mask.height(), mask.width())?;
            let reference = a.reference.as_deref().map(files::read_image).transpose()?;
            let (image, report) = reconstruct_bs(&samples, &mask, reference.as_ref(), &a.recon.options())?;
            write_outputs(&a.out, a.raw_out.as_deref(), &image)?;
            write_trace(a.trace.as_deref(), &report)?;
            let mut s = Summary::new("reconstruct");
            s.put("m", samples.len()).put("rate", samples.rate()).report("", &report);
            if let Some(r) = &reference {
                let metrics = error_metrics(r, &image)?;
                s.put("rmse_90", metrics.rmse_90).put("psnr_db", metrics.psnr_db);
            }
            Ok(s)
        }
        Command::Demosaic(a) => {
            let rgb = files::read_rgb(&a.input)?;
            let seed = match a.arrangement {
                Arrangement::SemiRandom => need_seed(a.seed, "for the semi-random arrangement")?,
                Arrangement::RegularBayer => a.seed.unwrap_or(0),
            };
            let shape = resolve_shape(&a.shape, Some(0.25))?;
            let m = apps::mosaic(&rgb, a.arrangement, seed)?;
            let bilinear = apps::demosaic_bilinear(&m);
            let (bs, reports) = apps::demosaic_bs(&m, &shape, &a.recon.options(), None)?;
            files::write_rgb(&a.out, &bs)?;
            if let Some(p) = &a.bilinear_out {
                files::write_rgb(p, &bilinear)?;
            }
            let total = |out: &[ImageGrid; 3]| -> Result<f64> {
                let mut sum = 0.0;
                for (r, o) in rgb.iter().zip(out) {
                    sum += error_metrics(r, o)?.rmse_all;
                }
                Ok(sum / 3.0)
            };
            let mut s = Summary::new("demosaic");
            s.put("arrangement", a.arrangement)
                .put("iterations", reports.iter().map(|r| r.iterations_run).max().unwrap_or(0))
                .put("rmse_bs", total(&bs)?)
                .put("rmse_bilinear", total(&bilinear)?);
            Ok(s)
        }
        Command::Inpaint(a) => {
            let image = files::read_image(&a.input)?;
            let occlusion = match (&a.occlusion, a.dark_threshold) {
                (Some(p), _) => files::read_occlusion(p)?,
                (None, Some(t)) => OcclusionMask::from_dark_pixels(&image, t)?,
                (None, None) => unreachable!("clap requires one of them"),
            };
            let shape = resolve_shape(&a.shape, None)?;
            let reference = a.reference.as_deref().map(files::read_image).transpose()?;
            let (out, report) = apps::inpaint(&image, &occlusion, &shape, &a.recon.options(), reference.as_ref())?;
            write_outputs(&a.out, a.raw_out.as_deref(), &out)?;
            write_trace(a.trace.as_deref(), &report)?;
            let mut s = Summary::new("inpaint");
            s.put("observed_fraction", occlusion.transparent_fraction()).report("", &report);
            Ok(s)
        }
        Command::RadonRecover(a) => radon_recover(a),
        Command::FourierRecover(a) => fourier_recover(a),
        Command::PhaseRetrieve(a) => phase_retrieve(a),
        Command::CsCurve(a) => {
            let curve = redundancy_curve(a.sparsity_min, a.sparsity_max, a.steps, a.base)?;
            write_atomic(&a.out, |w| tables::write_redundancy_curve(w, &curve))?;
            let mut s = Summary::new("cs-curve");
            s.put("base", a.base).put("rows", curve.len());
            Ok(s)
        }
        Command::CsMc(a) => {
            let mut rows = Vec::new();
            for &n in &a.n {
                for &rate in &a.rates {
                    let e = McExperiment { n, k: a.k, rate, trials: a.trials, seed: a.seed };
                    rows.push(McRow { n, k: a.k, rate, probability: freq_error_probability(&e)? });
                }
            }
            write_atomic(&a.out, |w| tables::write_mc_table(w, &rows))?;
            let mut s = Summary::new("cs-mc");
            s.put("rows", rows.len()).put("trials", a.trials);
            Ok(s)
        }
    }
}

fn support_for(
    path: Option<&Path>,
    radius: Option<f64>,
    side: (usize, usize),
) -> Result<Option<SupportMask>> {
    Ok(match (path, radius) {
        (Some(p), _) => {
            let support = files::read_support(p)?;
            let d = support.dims();
            if (d.height, d.width) != side {
                return Err(Error::DimensionMismatch {
                    expected: asbsr::error::Dims::new(side.0, side.1),
                    actual: d,
                }
                .into());
            }
            Some(support)
        }
        (None, Some(r)) => Some(SupportMask::disc(side.0, side.1, r)?),
        (None, None) => None,
    })
}

fn radon_recover(a: crate::RadonArgs) -> Result<Summary> {
    let angles = uniform_angles(a.angles);
    let (size, observed, known, reference) = if let Some(p) = &a.image {
        let image = files::read_image(p)?;
        if image.height() != image.width() {
            return Err(CliError::Usage("radon-recover needs a square image".into()));
        }
        let full = radon_forward(&image, &angles)?;
        let (h, w) = full.values().dim();
        let known = match (a.keep_fraction, a.decimate) {
            (Some(f), _) => {
                if !(f > 0.0 && f <= 1.0) {
                    return Err(CliError::Usage(format!("--keep-fraction must be in (0, 1], got {f}")));
                }
                let seed = need_seed(a.seed, "with --keep-fraction")?;
                let m = ((f * (h * w) as f64).round() as usize).max(1);
                let mut known = Array2::from_elem((h, w), false);
                for (r, c) in make_grid(GridKind::Pseudorandom, h, w, m, seed)? {
                    known[[r, c]] = true;
                }
                known
            }
            (None, Some(k)) if k >= 1 => Array2::from_shape_fn((h, w), |(r, _)| r % k == 0),
            (None, Some(_)) => return Err(CliError::Usage("--decimate must be at least 1".into())),
            (None, None) => return Err(CliError::Usage("--keep-fraction or --decimate is required with --image".into())),
        };
        let mut values = full.values().clone();
        ndarray::Zip::from(&mut values).and(&known).for_each(|v, &k| {
            if !k {
                *v = 0.0;
            }
        });
        (image.height(), values, known, Some(full))
    } else {
        let size = a.size.expect("clap requires --size");
        let bins = default_bins(size);
        let mut values = Array2::zeros((a.angles, bins));
        let mut known = Array2::from_elem((a.angles, bins), false);
        let path = a.sinogram.as_deref().expect("clap requires --sinogram");
        for cell in tables::read_sinogram_cells(open(path)?)? {
            let row = angles
                .iter()
                .position(|&t| (t - cell.angle).abs() < 1e-6)
                .ok_or_else(|| Error::Parse(format!("angle {} is not one of {} uniform angles", cell.angle, a.angles)))?;
            if cell.bin >= bins {
                return Err(Error::Parse(format!("bin {} outside {bins} detector bins", cell.bin)).into());
            }
            values[[row, cell.bin]] = cell.value;
            known[[row, cell.bin]] = true;
        }
        (size, values, known, None)
    };
    let sino = Sinogram::new(angles.clone(), observed, size)?;
    let support = match support_for(a.support.as_deref(), a.support_radius, (size, size))? {
        Some(s) => s,
        None => {
            let eps = a.support_eps.ok_or_else(|| {
                CliError::Usage("one of --support, --support-radius or --support-eps is required".into())
            })?;
            apps::support_from_backprojection(&sino, eps)?
        }
    };
    let out = apps::recover_projections(&sino, &known, &support, reference.as_ref(), &a.recon.options())?;
    write_atomic(&a.out, |w| tables::write_sinogram(w, out.sinogram.angles(), out.sinogram.values()))?;
    if let Some(p) = &a.image_out {
        files::write_image(p, &out.image)?;
    }
    write_trace(a.trace.as_deref(), &out.report)?;
    let known_fraction = known.iter().filter(|&&k| k).count() as f64 / known.len() as f64;
    let mut s = Summary::new("radon-recover");
    s.put("known_fraction", known_fraction).put("support_fraction", support.fraction()).report("", &out.report);
    if let (Some(first), Some(last)) = (out.report.rmse_all_trace.first(), out.report.final_rmse()) {
        s.put("rmse_first", first).put("reduction", first / last);
    }
    Ok(s)
}

fn fourier_recover(a: crate::FourierArgs) -> Result<Summary> {
    let reference = a.input.as_deref().map(files::read_image).transpose()?;
    let (h, w) = match (&reference, a.size) {
        (Some(r), _) => (r.height(), r.width()),
        (None, Some(n)) => (n, n),
        (None, None) => match &a.support {
            Some(p) => {
                let d = files::read_support(p)?.dims();
                (d.height, d.width)
            }
            None => return Err(CliError::Usage("--size is required with --spectrum and --support-radius".into())),
        },
    };
    let support = support_for(a.support.as_deref(), a.support_radius, (h, w))?.expect("clap requires a support");
    let spectral_mask = apps::dft_disc_mask(h, w, a.disc_radius)?;
    let known = match (&reference, &a.spectrum) {
        (Some(image), _) => {
            let seed = need_seed(a.seed, "to sample the spectrum")?;
            let rate = a.rate.unwrap_or_else(|| support.fraction());
            if !(rate > 0.0 && rate <= 1.0) {
                return Err(CliError::Usage(format!("--rate must be in (0, 1], got {rate}")));
            }
            let m = ((rate * (h * w) as f64).round() as usize).max(1);
            let positions: Vec<_> = make_grid(GridKind::Pseudorandom, h, w, m, seed)?
                .into_iter()
                .filter(|&(r, c)| spectral_mask.get(r, c))
                .collect();
            SparseSpectrum::take(&forward_dft(image), &positions)?
        }
        (None, Some(p)) => tables::read_sparse_spectrum(open(p)?, h, w)?,
        (None, None) => unreachable!("clap requires one of them"),
    };
    if let Some(p) = &a.spectrum_out {
        write_atomic(p, |wr| tables::write_sparse_spectrum(wr, &known))?;
    }
    let out =
        apps::reconstruct_from_sparse_spectrum(&known, &support, &spectral_mask, reference.as_ref(), &a.recon.options())?;
    write_outputs(&a.out, a.raw_out.as_deref(), &out.image)?;
    write_trace(a.trace.as_deref(), &out.report)?;
    let mut s = Summary::new("fourier-recover");
    s.put("known", known.len())
        .put("rate", known.len() as f64 / (h * w) as f64)
        .report("", &out.report);
    Ok(s)
}

fn phase_retrieve(a: crate::PhaseArgs) -> Result<Summary> {
    let reference = a.input.as_deref().map(files::read_image).transpose()?;
    let modulus_in = a.modulus.as_deref().map(|p| -> Result<Array2<f64>> {
        Ok(asbsr::io::read_raw(&files::read_bytes(p)?)?)
    });
    let modulus_in = modulus_in.transpose()?;
    let (h, w) = match (&reference, &modulus_in) {
        (Some(r), _) => (r.height(), r.width()),
        (None, Some(m)) => m.dim(),
        (None, None) => unreachable!("clap requires one of them"),
    };
    let occlusion = match (&a.occlusion, a.occlusion_fraction) {
        (Some(p), _) => files::read_occlusion(p)?,
        (None, Some(f)) => {
            if !(0.0..1.0).contains(&f) {
                return Err(CliError::Usage(format!("--occlusion-fraction must be in [0, 1), got {f}")));
            }
            let seed = need_seed(a.seed, "with --occlusion-fraction")?;
            OcclusionMask::new(square_raster(h, w, a.square, f, seed).mapv(|opaque| !opaque))?
        }
        (None, None) => unreachable!("clap requires one of them"),
    };
    let modulus = match (&reference, modulus_in) {
        (Some(image), _) => {
            let dims = occlusion.dims();
            if (dims.height, dims.width) != (h, w) {
                return Err(Error::DimensionMismatch { expected: image.dims(), actual: dims }.into());
            }
            let occluded = ImageGrid::new(image.as_array() * &occlusion.as_f64())?;
            forward_dft(&occluded).modulus()
        }
        (None, Some(m)) => m,
        (None, None) => unreachable!("checked above"),
    };
    let shape = resolve_shape(&a.shape, None)?;
    let out = apps::phase_retrieve(
        &modulus,
        &occlusion,
        &shape,
        &PhaseInit::OcclusionMask,
        &ReconOptions::fixed(a.iters),
        &ReconOptions::fixed(a.stage2_iters),
        reference.as_ref(),
    )?;
    write_outputs(&a.out, a.raw_out.as_deref(), &out.image)?;
    if let Some(p) = &a.occluded_out {
        files::write_image(p, &out.occluded)?;
    }
    if let Some(p) = &a.occlusion_out {
        files::write_bitmap(p, &occlusion.cells().mapv(|seen| !seen))?;
    }
    let mut s = Summary::new("phase-retrieve");
    s.put("transparent_fraction", occlusion.transparent_fraction())
        .put("best_iteration", out.best_iteration)
        .report("stage1_", &out.stage1)
        .report("stage2_", &out.stage2);
    Ok(s)
}
