//! Complex scalar and 3-component vector fields on a shared grid.

use std::sync::Arc;

use ndarray::{Array1, Array3};
use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;

use super::fft::{fft3, ifft3};
use super::grid::Grid;
use crate::error::Result;

/// Complex scalar field sampled on the grid.
#[derive(Debug, Clone)]
pub struct ScalarField {
    grid: Arc<Grid>,
    data: Array3<Complex64>,
}

impl ScalarField {
    pub fn zeros(grid: &Arc<Grid>) -> Self {
        let [nx, ny, nz] = grid.dims();
        Self {
            grid: grid.clone(),
            data: Array3::zeros((nx, ny, nz)),
        }
    }

    pub fn from_data(grid: &Arc<Grid>, data: Array3<Complex64>) -> Self {
        assert_eq!(data.shape(), grid.dims().as_slice(), "scalar field shape");
        Self {
            grid: grid.clone(),
            data,
        }
    }

    pub fn from_fn(grid: &Arc<Grid>, mut f: impl FnMut([f64; 3]) -> Complex64) -> Self {
        let [nx, ny, nz] = grid.dims();
        let data = Array3::from_shape_fn((nx, ny, nz), |(ix, iy, iz)| {
            f(grid.position([ix, iy, iz]))
        });
        Self {
            grid: grid.clone(),
            data,
        }
    }

    pub fn grid(&self) -> &Arc<Grid> {
        &self.grid
    }

    pub fn data(&self) -> &Array3<Complex64> {
        &self.data
    }

    pub fn data_mut(&mut self) -> &mut Array3<Complex64> {
        &mut self.data
    }

    pub fn to_coefficients(&self) -> Array3<Complex64> {
        fft3(self.data.clone())
    }

    pub fn from_coefficients(grid: &Arc<Grid>, coef: Array3<Complex64>) -> Self {
        Self::from_data(grid, ifft3(coef))
    }

    /// L2 norm `sqrt(dV * sum |s|^2)`.
    pub fn norm(&self) -> f64 {
        let s: f64 = self.data.iter().map(|z| z.norm_sqr()).sum();
        (self.grid.cell_volume() * s).sqrt()
    }

    /// Subtracts the mean so the k = 0 coefficient vanishes.
    pub fn remove_mean(&mut self) {
        let mean = self.data.iter().sum::<Complex64>() / self.data.len() as f64;
        self.data.mapv_inplace(|z| z - mean);
    }
}

/// Complex 3-component vector field sampled on the grid.
///
/// Components are stored per Cartesian direction, each in row-major
/// `(ix, iy, iz)` order with `iz` fastest.
#[derive(Debug, Clone)]
pub struct VectorField {
    grid: Arc<Grid>,
    comps: [Array3<Complex64>; 3],
}

impl VectorField {
    pub fn zeros(grid: &Arc<Grid>) -> Self {
        let [nx, ny, nz] = grid.dims();
        Self {
            grid: grid.clone(),
            comps: [0, 1, 2].map(|_| Array3::zeros((nx, ny, nz))),
        }
    }

    pub fn from_components(grid: &Arc<Grid>, comps: [Array3<Complex64>; 3]) -> Self {
        for c in &comps {
            assert_eq!(c.shape(), grid.dims().as_slice(), "vector field shape");
        }
        Self {
            grid: grid.clone(),
            comps,
        }
    }

    pub fn from_fn(grid: &Arc<Grid>, mut f: impl FnMut([f64; 3]) -> [Complex64; 3]) -> Self {
        let [nx, ny, nz] = grid.dims();
        let mut comps = [0, 1, 2].map(|_| Array3::<Complex64>::zeros((nx, ny, nz)));
        for ix in 0..nx {
            for iy in 0..ny {
                for iz in 0..nz {
                    let v = f(grid.position([ix, iy, iz]));
                    for c in 0..3 {
                        comps[c][[ix, iy, iz]] = v[c];
                    }
                }
            }
        }
        Self {
            grid: grid.clone(),
            comps,
        }
    }

    /// Plane wave `e exp(i k.r)` for the grid-commensurate wave vector with
    /// integer indices `m` and (complex) polarization `e`.
    pub fn plane_wave(grid: &Arc<Grid>, m: [i64; 3], e: [Complex64; 3]) -> Self {
        let k = [0, 1, 2].map(|a| 2.0 * std::f64::consts::PI * m[a] as f64 / grid.lengths()[a]);
        Self::from_fn(grid, |r| {
            let phase = Complex64::new(0.0, k[0] * r[0] + k[1] * r[1] + k[2] * r[2]).exp();
            [e[0] * phase, e[1] * phase, e[2] * phase]
        })
    }

    /// Field with iid standard-normal real and imaginary parts per component.
    pub fn random_normal(grid: &Arc<Grid>, rng: &mut impl Rng) -> Self {
        let [nx, ny, nz] = grid.dims();
        let mut comps = [0, 1, 2].map(|_| Array3::<Complex64>::zeros((nx, ny, nz)));
        for comp in &mut comps {
            for v in comp.iter_mut() {
                let re: f64 = rng.sample(StandardNormal);
                let im: f64 = rng.sample(StandardNormal);
                *v = Complex64::new(re, im);
            }
        }
        Self {
            grid: grid.clone(),
            comps,
        }
    }

    pub fn grid(&self) -> &Arc<Grid> {
        &self.grid
    }

    pub fn comp(&self, c: usize) -> &Array3<Complex64> {
        &self.comps[c]
    }

    pub fn comp_mut(&mut self, c: usize) -> &mut Array3<Complex64> {
        &mut self.comps[c]
    }

    pub fn components(&self) -> &[Array3<Complex64>; 3] {
        &self.comps
    }

    pub fn check_compatible(&self, other: &VectorField, what: &str) -> Result<()> {
        self.grid.check_same(&other.grid, what)
    }

    pub fn to_coefficients(&self) -> [Array3<Complex64>; 3] {
        [0, 1, 2].map(|c| fft3(self.comps[c].clone()))
    }

    pub fn from_coefficients(grid: &Arc<Grid>, coef: [Array3<Complex64>; 3]) -> Self {
        Self::from_components(grid, coef.map(ifft3))
    }

    /// Flattens to a length `3 N` vector ordered component-major.
    pub fn to_flat(&self) -> Array1<Complex64> {
        let n = self.grid.n_total();
        let mut out = Array1::zeros(3 * n);
        for c in 0..3 {
            for (i, v) in self.comps[c].iter().enumerate() {
                out[c * n + i] = *v;
            }
        }
        out
    }

    pub fn from_flat(grid: &Arc<Grid>, flat: &Array1<Complex64>) -> Self {
        let n = grid.n_total();
        assert_eq!(flat.len(), 3 * n, "flat vector length");
        let [nx, ny, nz] = grid.dims();
        let comps = [0, 1, 2].map(|c| {
            Array3::from_shape_fn((nx, ny, nz), |(ix, iy, iz)| {
                flat[c * n + (ix * ny + iy) * nz + iz]
            })
        });
        Self::from_components(grid, comps)
    }

    pub fn scale(&mut self, alpha: Complex64) {
        for c in &mut self.comps {
            c.mapv_inplace(|z| z * alpha);
        }
    }

    pub fn scaled(&self, alpha: Complex64) -> Self {
        let mut out = self.clone();
        out.scale(alpha);
        out
    }

    /// `self += alpha * other`.
    pub fn add_scaled(&mut self, alpha: Complex64, other: &VectorField) {
        for c in 0..3 {
            ndarray::Zip::from(&mut self.comps[c])
                .and(&other.comps[c])
                .for_each(|a, &b| *a += alpha * b);
        }
    }

    pub fn add(&self, other: &VectorField) -> Self {
        let mut out = self.clone();
        out.add_scaled(Complex64::new(1.0, 0.0), other);
        out
    }

    pub fn sub(&self, other: &VectorField) -> Self {
        let mut out = self.clone();
        out.add_scaled(Complex64::new(-1.0, 0.0), other);
        out
    }

    /// L2 norm `sqrt(dV * sum |v|^2)`.
    pub fn norm(&self) -> f64 {
        let s: f64 = self
            .comps
            .iter()
            .map(|c| c.iter().map(|z| z.norm_sqr()).sum::<f64>())
            .sum();
        (self.grid.cell_volume() * s).sqrt()
    }

    pub fn is_finite(&self) -> bool {
        self.comps
            .iter()
            .all(|c| c.iter().all(|z| z.re.is_finite() && z.im.is_finite()))
    }

    /// Largest pointwise component magnitude difference to `other`.
    pub fn max_abs_diff(&self, other: &VectorField) -> f64 {
        let mut m = 0.0f64;
        for c in 0..3 {
            for (a, b) in self.comps[c].iter().zip(other.comps[c].iter()) {
                m = m.max((a - b).norm());
            }
        }
        m
    }
}
