//! Periodic rectangular simulation box with Fourier-spectral operators.
//!
//! Everything downstream builds on this module: the [`Grid`], complex
//! [`ScalarField`]/[`VectorField`] containers, spectral derivatives, inner
//! products and dealiased pointwise products. Operations are pure and
//! deterministic; fields on different grids never combine silently.

mod fft;
mod field;
mod grid;
mod spectral;

pub use field::{ScalarField, VectorField};
pub use grid::Grid;
pub use spectral::{
    curl, curl_curl, divergence, gradient, plain_inner, weighted_divergence, weighted_inner,
    PaddedWeight,
};

pub(crate) use fft::{fft3, ifft3};
pub(crate) use spectral::{pad_spectrum, truncate_spectrum};
