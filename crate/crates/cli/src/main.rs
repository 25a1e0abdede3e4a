//! `asbsr` command-line front end.
//!
//! Every command prints one `key=value` summary line on success. Exit codes:
//! 0 success, 2 usage, 3 I/O or malformed input, 4 infeasible parameters or
//! dimension mismatch, 5 numerical failure.

mod commands;
mod files;

use std::path::PathBuf;
use std::process::ExitCode;

use asbsr::apps::Arrangement;
use asbsr::cs_model::LogBase;
use asbsr::masks::{ShapeKind, ShapeSpec, DEFAULT_SECTOR_EXTENT_DEG, DEFAULT_SUPERELLIPSE_EXPONENT};
use asbsr::recon::{ReconOptions, DEFAULT_PLATEAU_EPSILON, DEFAULT_PLATEAU_WINDOW};
use asbsr::sampling::GridKind;
use clap::{Args, Parser, Subcommand};

#[derive(Parser)]
#[command(name = "asbsr", version, about = "Arbitrary sampling and bounded-spectrum image reconstruction")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Sparsity of an image's DCT spectrum at a target RMSE.
    Analyze(AnalyzeArgs),
    /// Calibrated spectral-zone mask as PBM.
    Mask(MaskArgs),
    /// Sample an image on a grid, optionally after prefiltering to a mask.
    Sample(SampleArgs),
    /// Bounded-spectrum reconstruction from a sample table.
    Reconstruct(ReconstructArgs),
    /// Simulate a colour filter array and demosaic it.
    Demosaic(DemosaicArgs),
    /// Fill occluded pixels.
    Inpaint(InpaintArgs),
    /// Recover missing sinogram samples.
    RadonRecover(RadonArgs),
    /// Reconstruct a support-limited image from sparse DFT samples.
    FourierRecover(FourierArgs),
    /// Reconstruct an occluded image from its Fourier modulus.
    PhaseRetrieve(PhaseArgs),
    /// Minimum redundancy against sparsity for the compressed-sensing bound.
    CsCurve(CsCurveArgs),
    /// Monte-Carlo frequency-detection error probability.
    CsMc(CsMcArgs),
}

#[derive(Args, Clone)]
struct ReconArgs {
    /// Iteration budget.
    #[arg(long, default_value_t = 500)]
    iters: usize,
    /// Stop once the RMSE against the reference reaches this value.
    #[arg(long)]
    stop_rmse: Option<f64>,
    #[arg(long, default_value_t = DEFAULT_PLATEAU_WINDOW)]
    plateau_window: usize,
    /// Relative plateau threshold; 0 disables the plateau stop.
    #[arg(long, default_value_t = DEFAULT_PLATEAU_EPSILON)]
    plateau_eps: f64,
}

impl ReconArgs {
    fn options(&self) -> ReconOptions {
        ReconOptions {
            max_iterations: self.iters,
            stop_rmse: self.stop_rmse,
            plateau_window: self.plateau_window,
            plateau_epsilon: self.plateau_eps,
        }
    }
}

#[derive(Args, Clone)]
struct ShapeArgs {
    /// Shape kind: rectangle, triangle, pie_sector, ellipse, superellipse.
    #[arg(long, default_value = "pie_sector")]
    shape: ShapeKind,
    /// Area fraction of the zone.
    #[arg(long)]
    fraction: Option<f64>,
    #[arg(long, default_value_t = 1.0)]
    aspect: f64,
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    orientation: f64,
    #[arg(long, default_value_t = DEFAULT_SUPERELLIPSE_EXPONENT)]
    exponent: f64,
    #[arg(long, default_value_t = DEFAULT_SECTOR_EXTENT_DEG)]
    extent: f64,
    /// key=value shape file; replaces the other shape flags.
    #[arg(long)]
    shape_file: Option<PathBuf>,
}

#[derive(Args)]
struct AnalyzeArgs {
    #[arg(long = "in")]
    input: PathBuf,
    #[arg(long)]
    target_rmse: f64,
    /// CSV with k, n, sparsity, achieved_rmse.
    #[arg(long)]
    out: PathBuf,
    /// Energy-compaction zone as PBM.
    #[arg(long)]
    mask_out: Option<PathBuf>,
}

#[derive(Args)]
struct MaskArgs {
    #[command(flatten)]
    shape: ShapeArgs,
    #[arg(long)]
    height: usize,
    #[arg(long)]
    width: usize,
    #[arg(long)]
    out: PathBuf,
    /// Also write the mask as a row,col index list.
    #[arg(long)]
    indices_out: Option<PathBuf>,
    /// Also write the resolved shape as key=value text.
    #[arg(long)]
    spec_out: Option<PathBuf>,
}

#[derive(Args)]
struct SampleArgs {
    #[arg(long = "in")]
    input: PathBuf,
    /// quasi_uniform, jittered or pseudorandom.
    #[arg(long)]
    grid: GridKind,
    /// Sampling rate; the count is round(rate * N).
    #[arg(long, conflicts_with = "count", required_unless_present = "count")]
    rate: Option<f64>,
    #[arg(long)]
    count: Option<usize>,
    #[arg(long)]
    seed: u64,
    /// Prefilter the image to this mask before sampling.
    #[arg(long)]
    mask: Option<PathBuf>,
    /// Samples as row,col,value CSV.
    #[arg(long)]
    out: PathBuf,
    /// Float sidecar of the image actually sampled.
    #[arg(long)]
    sampled_out: Option<PathBuf>,
}

#[derive(Args)]
struct ReconstructArgs {
    /// Samples as row,col,value CSV.
    #[arg(long = "in")]
    input: PathBuf,
    /// Spectral zone as PBM; fixes the image size.
    #[arg(long)]
    mask: PathBuf,
    /// Reference image for error traces.
    #[arg(long = "ref")]
    reference: Option<PathBuf>,
    #[command(flatten)]
    recon: ReconArgs,
    #[arg(long)]
    out: PathBuf,
    /// Lossless float sidecar of the result.
    #[arg(long)]
    raw_out: Option<PathBuf>,
    /// Per-iteration trace CSV.
    #[arg(long)]
    trace: Option<PathBuf>,
}

#[derive(Args)]
struct DemosaicArgs {
    /// Full-colour PPM; its mosaic is simulated and it serves as reference.
    #[arg(long = "in")]
    input: PathBuf,
    /// bayer or semi_random.
    #[arg(long, default_value = "bayer")]
    arrangement: Arrangement,
    /// Required for the semi-random arrangement.
    #[arg(long)]
    seed: Option<u64>,
    #[command(flatten)]
    shape: ShapeArgs,
    #[command(flatten)]
    recon: ReconArgs,
    #[arg(long)]
    out: PathBuf,
    #[arg(long)]
    bilinear_out: Option<PathBuf>,
}

#[derive(Args)]
struct InpaintArgs {
    #[arg(long = "in")]
    input: PathBuf,
    /// PBM whose set bits mark occluded pixels.
    #[arg(long, conflicts_with = "dark_threshold", required_unless_present = "dark_threshold")]
    occlusion: Option<PathBuf>,
    /// Treat pixels at or below this level as occluded.
    #[arg(long)]
    dark_threshold: Option<f64>,
    #[command(flatten)]
    shape: ShapeArgs,
    #[command(flatten)]
    recon: ReconArgs,
    #[arg(long = "ref")]
    reference: Option<PathBuf>,
    #[arg(long)]
    out: PathBuf,
    #[arg(long)]
    raw_out: Option<PathBuf>,
    #[arg(long)]
    trace: Option<PathBuf>,
}

#[derive(Args)]
struct RadonArgs {
    /// Square image to project; its full sinogram is the reference.
    #[arg(long, conflicts_with = "sinogram", required_unless_present = "sinogram")]
    image: Option<PathBuf>,
    /// Known cells as angle,bin,value CSV; angles must be uniform.
    #[arg(long)]
    sinogram: Option<PathBuf>,
    /// Image side for --sinogram input.
    #[arg(long, required_unless_present = "image")]
    size: Option<usize>,
    /// Number of uniformly spaced angles over [0, 180).
    #[arg(long, default_value_t = 180)]
    angles: usize,
    /// Fraction of cells kept at random with --image.
    #[arg(long, conflicts_with = "decimate")]
    keep_fraction: Option<f64>,
    /// Keep every k-th angle with --image.
    #[arg(long)]
    decimate: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    /// Support as PBM.
    #[arg(long, conflicts_with_all = ["support_radius", "support_eps"])]
    support: Option<PathBuf>,
    /// Disc support radius as a fraction of the image side.
    #[arg(long, conflicts_with = "support_eps")]
    support_radius: Option<f64>,
    /// Support from thresholding the back projection at eps * peak.
    #[arg(long)]
    support_eps: Option<f64>,
    #[command(flatten)]
    recon: ReconArgs,
    /// Recovered sinogram CSV.
    #[arg(long)]
    out: PathBuf,
    #[arg(long)]
    image_out: Option<PathBuf>,
    #[arg(long)]
    trace: Option<PathBuf>,
}

#[derive(Args)]
struct FourierArgs {
    /// Image whose spectrum is sampled; it serves as reference.
    #[arg(long = "in", conflicts_with = "spectrum", required_unless_present = "spectrum")]
    input: Option<PathBuf>,
    /// Known coefficients as row,col,re,im CSV.
    #[arg(long)]
    spectrum: Option<PathBuf>,
    #[arg(long, conflicts_with = "support_radius", required_unless_present = "support_radius")]
    support: Option<PathBuf>,
    /// Disc support radius as a fraction of the smaller side.
    #[arg(long)]
    support_radius: Option<f64>,
    /// Image size for --spectrum with --support-radius.
    #[arg(long)]
    size: Option<usize>,
    /// Spectral disc radius in cycles per sample.
    #[arg(long, default_value_t = 0.5)]
    disc_radius: f64,
    /// Spectral sampling rate with --in.
    #[arg(long)]
    rate: Option<f64>,
    #[arg(long)]
    seed: Option<u64>,
    #[command(flatten)]
    recon: ReconArgs,
    #[arg(long)]
    out: PathBuf,
    #[arg(long)]
    raw_out: Option<PathBuf>,
    #[arg(long)]
    spectrum_out: Option<PathBuf>,
    #[arg(long)]
    trace: Option<PathBuf>,
}

#[derive(Args)]
struct PhaseArgs {
    /// Image to occlude and measure; it serves as reference.
    #[arg(long = "in", conflicts_with = "modulus", required_unless_present = "modulus")]
    input: Option<PathBuf>,
    /// Measured modulus as a float sidecar.
    #[arg(long)]
    modulus: Option<PathBuf>,
    /// PBM whose set bits mark opaque pixels.
    #[arg(long, conflicts_with = "occlusion_fraction", required_unless_present = "occlusion_fraction")]
    occlusion: Option<PathBuf>,
    /// Random opaque squares covering about this fraction.
    #[arg(long)]
    occlusion_fraction: Option<f64>,
    #[arg(long, default_value_t = 3)]
    square: usize,
    #[arg(long)]
    seed: Option<u64>,
    #[command(flatten)]
    shape: ShapeArgs,
    /// Stage-1 iterations.
    #[arg(long, default_value_t = 5000)]
    iters: usize,
    /// Stage-2 iterations.
    #[arg(long, default_value_t = 1000)]
    stage2_iters: usize,
    #[arg(long)]
    out: PathBuf,
    #[arg(long)]
    occluded_out: Option<PathBuf>,
    #[arg(long)]
    raw_out: Option<PathBuf>,
    #[arg(long)]
    occlusion_out: Option<PathBuf>,
}

#[derive(Args)]
struct CsCurveArgs {
    /// natural, 10 or 2.
    #[arg(long, default_value = "natural")]
    base: LogBase,
    #[arg(long, default_value_t = 1e-3)]
    sparsity_min: f64,
    #[arg(long, default_value_t = 0.5)]
    sparsity_max: f64,
    #[arg(long, default_value_t = 50)]
    steps: usize,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct CsMcArgs {
    /// Signal lengths, comma separated.
    #[arg(long, value_delimiter = ',', default_value = "128,256,512")]
    n: Vec<usize>,
    #[arg(long, default_value_t = 1)]
    k: usize,
    /// Sampling rates, comma separated.
    #[arg(long, value_delimiter = ',', required = true)]
    rates: Vec<f64>,
    #[arg(long, default_value_t = 1000)]
    trials: usize,
    #[arg(long)]
    seed: u64,
    #[arg(long)]
    out: PathBuf,
}

fn resolve_shape(args: &ShapeArgs, fraction: Option<f64>) -> Result<ShapeSpec, commands::CliError> {
    if let Some(path) = &args.shape_file {
        return Ok(asbsr::io::parse_shape(&files::read_text(path)?)?);
    }
    let fraction = args
        .fraction
        .or(fraction)
        .ok_or_else(|| commands::CliError::Usage("--fraction or --shape-file is required".into()))?;
    let spec = ShapeSpec {
        kind: args.shape,
        area_fraction: fraction,
        aspect_ratio: args.aspect,
        orientation_deg: args.orientation,
        superellipse_exponent: args.exponent,
        sector_extent_deg: args.extent,
    };
    spec.validate().map_err(|e| commands::CliError::Usage(e.to_string()))?;
    Ok(spec)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match commands::run(cli.command) {
        Ok(summary) => {
            println!("{summary}");
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("asbsr: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
