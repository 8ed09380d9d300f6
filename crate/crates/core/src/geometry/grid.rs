//! Periodic rectangular grid and its reciprocal vectors.

use std::sync::Arc;

use crate::error::{EpsError, Result};

/// Periodic box discretized on a rectangular grid.
///
/// Wave vectors along each axis are the integer multiples `2*pi*m/L` with the
/// usual FFT index folding; a degenerate axis (`N = 1`) carries the single
/// wave number zero, so derivatives along it vanish identically.
#[derive(Debug, Clone, PartialEq)]
pub struct Grid {
    dims: [usize; 3],
    lengths: [f64; 3],
    wave_numbers: [Vec<f64>; 3],
}

impl Grid {
    pub fn new(dims: [usize; 3], lengths: [f64; 3]) -> Result<Arc<Self>> {
        if dims.iter().any(|&n| n < 1) {
            return Err(EpsError::InvalidArgument(format!(
                "grid dims must all be >= 1, got {dims:?}"
            )));
        }
        if lengths.iter().any(|&l| !(l > 0.0) || !l.is_finite()) {
            return Err(EpsError::InvalidArgument(format!(
                "grid lengths must all be positive and finite, got {lengths:?}"
            )));
        }
        let wave_numbers = [0, 1, 2].map(|axis| {
            let n = dims[axis];
            (0..n)
                .map(|i| 2.0 * std::f64::consts::PI * signed_index(i, n) as f64 / lengths[axis])
                .collect()
        });
        Ok(Arc::new(Self {
            dims,
            lengths,
            wave_numbers,
        }))
    }

    pub fn dims(&self) -> [usize; 3] {
        self.dims
    }

    pub fn lengths(&self) -> [f64; 3] {
        self.lengths
    }

    pub fn n_total(&self) -> usize {
        self.dims[0] * self.dims[1] * self.dims[2]
    }

    pub fn volume(&self) -> f64 {
        self.lengths[0] * self.lengths[1] * self.lengths[2]
    }

    pub fn cell_volume(&self) -> f64 {
        self.volume() / self.n_total() as f64
    }

    /// Grid coordinate of point `(ix, iy, iz)`.
    pub fn position(&self, idx: [usize; 3]) -> [f64; 3] {
        [0, 1, 2].map(|a| self.lengths[a] * idx[a] as f64 / self.dims[a] as f64)
    }

    /// Signed Fourier index along `axis` for FFT slot `i`.
    pub fn signed_index(&self, axis: usize, i: usize) -> i64 {
        signed_index(i, self.dims[axis])
    }

    /// Wave number along `axis` for FFT slot `i`.
    pub fn wave_number(&self, axis: usize, i: usize) -> f64 {
        self.wave_numbers[axis][i]
    }

    /// Wave vector at FFT slot `(ix, iy, iz)`.
    pub fn wave_vector(&self, idx: [usize; 3]) -> [f64; 3] {
        [0, 1, 2].map(|a| self.wave_numbers[a][idx[a]])
    }

    /// Largest admissible Fourier band limit for dielectric profiles (N/3 rule).
    pub fn max_band_limit(&self) -> [usize; 3] {
        self.dims.map(|n| n / 3)
    }

    /// Dims of the 3/2 zero-padded grid used for dealiased products.
    /// Degenerate axes stay unpadded.
    pub fn padded_dims(&self) -> [usize; 3] {
        self.dims.map(|n| if n == 1 { 1 } else { (3 * n).div_ceil(2) })
    }

    /// Row-major flat index of `(ix, iy, iz)`.
    pub fn flat(&self, idx: [usize; 3]) -> usize {
        (idx[0] * self.dims[1] + idx[1]) * self.dims[2] + idx[2]
    }

    /// Inverse of [`Grid::flat`].
    pub fn unflat(&self, flat: usize) -> [usize; 3] {
        let iz = flat % self.dims[2];
        let iy = (flat / self.dims[2]) % self.dims[1];
        let ix = flat / (self.dims[1] * self.dims[2]);
        [ix, iy, iz]
    }

    pub fn same_as(&self, other: &Grid) -> bool {
        self.dims == other.dims && self.lengths == other.lengths
    }

    pub(crate) fn check_same(&self, other: &Grid, what: &str) -> Result<()> {
        if self.same_as(other) {
            Ok(())
        } else {
            Err(EpsError::GridMismatch(format!(
                "{what}: {:?}/{:?} vs {:?}/{:?}",
                self.dims, self.lengths, other.dims, other.lengths
            )))
        }
    }
}

fn signed_index(i: usize, n: usize) -> i64 {
    if i < n.div_ceil(2) {
        i as i64
    } else {
        i as i64 - n as i64
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn signed_indices_fold_like_fft() {
        assert_eq!(
            (0..8).map(|i| signed_index(i, 8)).collect::<Vec<_>>(),
            vec![0, 1, 2, 3, -4, -3, -2, -1]
        );
        assert_eq!(
            (0..5).map(|i| signed_index(i, 5)).collect::<Vec<_>>(),
            vec![0, 1, 2, -2, -1]
        );
        assert_eq!(signed_index(0, 1), 0);
    }

    #[test]
    fn cell_volume_and_padding() {
        let g = Grid::new([4, 1, 16], [2.0, 1.0, 8.0]).unwrap();
        assert!((g.cell_volume() - 16.0 / 64.0).abs() < 1e-15);
        assert_eq!(g.padded_dims(), [6, 1, 24]);
        assert_eq!(g.max_band_limit(), [1, 0, 5]);
    }

    #[test]
    fn rejects_degenerate_input() {
        assert!(Grid::new([0, 1, 1], [1.0; 3]).is_err());
        assert!(Grid::new([2, 2, 2], [1.0, 0.0, 1.0]).is_err());
    }
}
