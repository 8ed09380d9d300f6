//! Spectral toolkit for electromagnetic normal modes of periodic dielectric
//! media with disorder.
//!
//! The crate computes generalized-transverse normal modes of the curl-curl
//! operator on a periodic box, mode-sum Green kernels and their identities,
//! both formulations of the Lippmann-Schwinger/Born iteration for perturbed
//! modes, the gauge transformation that restores the vanishing-static-potential
//! gauge for non-normal-mode expansions, and the analytic local-field
//! fixed-point relations.
//!
//! All differential operators are Fourier-spectral on the periodic grid and
//! every pointwise product with a dielectric weight is dealiased by 3/2
//! zero padding, so divergence-type identities hold to machine rounding for
//! band-limited profiles. Natural units are used throughout (c = 1, eps0 = 1);
//! fields are spatial mode profiles.

extern crate blas_src;

pub mod born;
pub mod cli;
pub mod dielectric;
pub mod error;
pub mod gauge;
pub mod geometry;
pub mod green;
pub mod localfield;
pub mod modes;

pub use error::{EpsError, Result};
