//! Crate-wide error type.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum EpsError {
    #[error("grid mismatch: {0}")]
    GridMismatch(String),

    #[error("band limit violation: {0}")]
    BandLimit(String),

    #[error("invalid dielectric profile: {0}")]
    InvalidProfile(String),

    #[error("disorder spec unrealizable: {0}")]
    Disorder(String),

    #[error("eigensolver failure: {0}")]
    Eigensolver(String),

    #[error("probe frequency {omega} resonant with mode {label} (omega_mode = {omega_mode}, eta = 0)")]
    Resonance {
        omega: f64,
        label: usize,
        omega_mode: f64,
    },

    #[error("iterative solver did not converge: {0}")]
    NonConvergence(String),

    #[error("ill-conditioned basis: {0}")]
    IllConditioned(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("configuration error: {0}")]
    Config(String),

    #[error("cache format error: {0}")]
    Cache(String),

    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),

    #[error("linear algebra backend error: {0}")]
    Linalg(#[from] ndarray_linalg::error::LinalgError),
}

pub type Result<T> = std::result::Result<T, EpsError>;
