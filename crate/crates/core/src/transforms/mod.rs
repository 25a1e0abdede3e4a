//! Orthonormal transforms used throughout the crate.

mod dct;
mod dft;
mod radon;
mod window;

pub use dct::{dct1, dct2, forward_dct, inverse_dct, Dct1Plan, Dct2Plan};
pub use dft::{dft2, forward_dft, inverse_dft, Dft2Plan};
pub use radon::{
    default_bins, radon_forward, radon_forward_with_bins, radon_inverse, uniform_angles, RadonPlan,
    Sinogram,
};
pub use window::{apodization_window, apodize, APODIZATION_FLAT_FRACTION};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Direction {
    Forward,
    Inverse,
}
