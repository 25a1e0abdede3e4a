//! Inverse-problem pipelines built on the bounded-spectrum iteration:
//! demosaicing, inpainting, projection recovery, reconstruction from a
//! sparsely sampled Fourier spectrum, and phase retrieval.

mod demosaic;
mod fourier;
mod inpaint;
mod phase;
mod regions;
mod tomography;

pub use demosaic::{demosaic_bilinear, demosaic_bs, mosaic, Arrangement, Channel, MosaicImage};
pub use fourier::{dft_disc_mask, reconstruct_from_sparse_spectrum, SparseSpectrum, SpectrumRecovery};
pub use inpaint::{check_feasible, inpaint};
pub use phase::{phase_retrieve, PhaseInit, PhaseRetrieval};
pub use regions::{OcclusionMask, SupportMask};
pub use tomography::{recover_projections, support_from_backprojection, ProjectionRecovery};
