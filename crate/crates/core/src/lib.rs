// `!(x > 0.0)` style checks are used on purpose so that NaN is rejected.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod apps;
pub mod cs_model;
pub mod error;
pub mod image;
pub mod io;
pub mod masks;
pub mod recon;
pub mod sampling;
pub mod seed;
pub mod spectrum;
pub mod synthetic;
pub mod transforms;

pub use error::{Error, Result};
pub use image::{ComplexSpectrum, ImageGrid, RealSpectrum};
