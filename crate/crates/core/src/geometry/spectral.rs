//! Spectral differential operators, inner products and dealiased products.
//!
//! Derivatives multiply Fourier coefficients by `i k`, so `div(curl f)` and
//! `curl(grad s)` vanish to machine rounding. Pointwise products with a real
//! weight are evaluated on the 3/2 zero-padded grid and truncated back; for a
//! weight band-limited to N/3 per axis the truncated product is exact, which
//! makes the multiply-by-weight operator Hermitian positive definite and all
//! weighted-transversality identities hold to rounding.

use std::sync::Arc;

use ndarray::Array3;
use num_complex::Complex64;

use super::fft::{fft3, ifft3};
use super::field::{ScalarField, VectorField};
use super::grid::Grid;
use crate::error::Result;

/// Spectral gradient of a scalar field.
pub fn gradient(s: &ScalarField) -> VectorField {
    let grid = s.grid();
    let coef = s.to_coefficients();
    let comps = [0, 1, 2].map(|axis| {
        let mut c = coef.clone();
        apply_ik(grid, &mut c, axis);
        ifft3(c)
    });
    VectorField::from_components(grid, comps)
}

/// Plain spectral divergence.
pub fn divergence(v: &VectorField) -> ScalarField {
    let grid = v.grid();
    let mut acc = Array3::<Complex64>::zeros(v.comp(0).raw_dim());
    for axis in 0..3 {
        let mut c = fft3(v.comp(axis).clone());
        apply_ik(grid, &mut c, axis);
        acc += &c;
    }
    ScalarField::from_data(grid, ifft3(acc))
}

/// Divergence of the (dealiased) weighted field `w * v`, or of `v` itself
/// when no weight is supplied.
pub fn weighted_divergence(v: &VectorField, weight: Option<&PaddedWeight>) -> Result<ScalarField> {
    match weight {
        None => Ok(divergence(v)),
        Some(w) => {
            v.grid().check_same(&w.grid, "weighted_divergence")?;
            Ok(divergence(&w.multiply(v)))
        }
    }
}

/// Spectral curl.
pub fn curl(v: &VectorField) -> VectorField {
    let grid = v.grid();
    let coef = v.to_coefficients();
    // (curl f)_a = i (k_b f_c - k_c f_b) for cyclic (a, b, c)
    let mut out = [0, 1, 2].map(|_| Array3::<Complex64>::zeros(v.comp(0).raw_dim()));
    for (a, b, c) in [(0usize, 1usize, 2usize), (1, 2, 0), (2, 0, 1)] {
        let mut term1 = coef[c].clone();
        apply_ik(grid, &mut term1, b);
        let mut term2 = coef[b].clone();
        apply_ik(grid, &mut term2, c);
        out[a] = ifft3(term1 - term2);
    }
    VectorField::from_components(grid, out)
}

/// `curl(curl v)`, applied in one spectral pass.
pub fn curl_curl(v: &VectorField) -> VectorField {
    let grid = v.grid();
    let coef = v.to_coefficients();
    let [nx, ny, nz] = grid.dims();
    let mut out = [0, 1, 2].map(|_| Array3::<Complex64>::zeros((nx, ny, nz)));
    for ix in 0..nx {
        for iy in 0..ny {
            for iz in 0..nz {
                let k = grid.wave_vector([ix, iy, iz]);
                let k2 = k[0] * k[0] + k[1] * k[1] + k[2] * k[2];
                let f = [0, 1, 2].map(|c| coef[c][[ix, iy, iz]]);
                let kdotf = k[0] * f[0] + k[1] * f[1] + k[2] * f[2];
                for c in 0..3 {
                    out[c][[ix, iy, iz]] = k2 * f[c] - k[c] * kdotf;
                }
            }
        }
    }
    VectorField::from_components(grid, out.map(ifft3))
}

/// Plain inner product `dV * sum conj(a).b`, conjugate-linear in `a`.
pub fn plain_inner(a: &VectorField, b: &VectorField) -> Result<Complex64> {
    a.check_compatible(b, "plain_inner")?;
    let mut acc = Complex64::ZERO;
    for c in 0..3 {
        for (x, y) in a.comp(c).iter().zip(b.comp(c).iter()) {
            acc += x.conj() * y;
        }
    }
    Ok(acc * a.grid().cell_volume())
}

/// Weighted inner product `dV * sum w conj(a).b`, evaluated alias-free.
pub fn weighted_inner(a: &VectorField, b: &VectorField, w: &PaddedWeight) -> Result<Complex64> {
    a.grid().check_same(&w.grid, "weighted_inner")?;
    plain_inner(a, &w.multiply(b))
}

fn apply_ik(grid: &Grid, coef: &mut Array3<Complex64>, axis: usize) {
    let dims = grid.dims();
    for ix in 0..dims[0] {
        for iy in 0..dims[1] {
            for iz in 0..dims[2] {
                let k = grid.wave_number(axis, [ix, iy, iz][axis]);
                let v = coef[[ix, iy, iz]];
                coef[[ix, iy, iz]] = Complex64::new(-k * v.im, k * v.re);
            }
        }
    }
}

/// Real weight prepared on the 3/2 zero-padded grid for alias-free products.
#[derive(Debug, Clone)]
pub struct PaddedWeight {
    grid: Arc<Grid>,
    padded_dims: [usize; 3],
    /// Weight samples on the padded grid (band-limited interpolation).
    padded: Array3<f64>,
}

impl PaddedWeight {
    pub fn new(grid: &Arc<Grid>, values: &Array3<f64>) -> Self {
        assert_eq!(values.shape(), grid.dims().as_slice(), "weight shape");
        let pdims = grid.padded_dims();
        let coef = fft3(values.mapv(|v| Complex64::new(v, 0.0)));
        let padded = ifft3(pad_spectrum(grid, &coef, pdims)).mapv(|z| z.re);
        Self {
            grid: grid.clone(),
            padded_dims: pdims,
            padded,
        }
    }

    pub fn grid(&self) -> &Arc<Grid> {
        &self.grid
    }

    /// Minimum of the band-limited weight over the padded grid.
    pub fn padded_min(&self) -> f64 {
        self.padded.iter().cloned().fold(f64::INFINITY, f64::min)
    }

    /// Dealiased pointwise product `w * v`.
    pub fn multiply(&self, v: &VectorField) -> VectorField {
        let comps = [0, 1, 2].map(|c| self.multiply_component(v.comp(c)));
        VectorField::from_components(v.grid(), comps)
    }

    /// Dealiased pointwise product `w * s` for a scalar field.
    pub fn multiply_scalar(&self, s: &ScalarField) -> ScalarField {
        ScalarField::from_data(s.grid(), self.multiply_component(s.data()))
    }

    fn multiply_component(&self, values: &Array3<Complex64>) -> Array3<Complex64> {
        let coef = fft3(values.clone());
        let mut big = ifft3(pad_spectrum(&self.grid, &coef, self.padded_dims));
        ndarray::Zip::from(&mut big)
            .and(&self.padded)
            .for_each(|z, &w| *z *= w);
        ifft3(truncate_spectrum(&self.grid, &fft3(big)))
    }
}

/// Places coefficients of the base grid at their signed indices on a larger grid.
pub(crate) fn pad_spectrum(
    grid: &Grid,
    coef: &Array3<Complex64>,
    pdims: [usize; 3],
) -> Array3<Complex64> {
    let dims = grid.dims();
    let mut out = Array3::zeros((pdims[0], pdims[1], pdims[2]));
    for ix in 0..dims[0] {
        let px = pos_index(grid.signed_index(0, ix), pdims[0]);
        for iy in 0..dims[1] {
            let py = pos_index(grid.signed_index(1, iy), pdims[1]);
            for iz in 0..dims[2] {
                let pz = pos_index(grid.signed_index(2, iz), pdims[2]);
                out[[px, py, pz]] = coef[[ix, iy, iz]];
            }
        }
    }
    out
}

/// Keeps only the coefficients representable on the base grid.
pub(crate) fn truncate_spectrum(grid: &Grid, coef: &Array3<Complex64>) -> Array3<Complex64> {
    let dims = grid.dims();
    let pdims = [coef.shape()[0], coef.shape()[1], coef.shape()[2]];
    let mut out = Array3::zeros((dims[0], dims[1], dims[2]));
    for ix in 0..dims[0] {
        let px = pos_index(grid.signed_index(0, ix), pdims[0]);
        for iy in 0..dims[1] {
            let py = pos_index(grid.signed_index(1, iy), pdims[1]);
            for iz in 0..dims[2] {
                let pz = pos_index(grid.signed_index(2, iz), pdims[2]);
                out[[ix, iy, iz]] = coef[[px, py, pz]];
            }
        }
    }
    out
}

fn pos_index(m: i64, n: usize) -> usize {
    if m >= 0 {
        m as usize
    } else {
        (m + n as i64) as usize
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::Grid;
    use num_complex::Complex64;
    use std::f64::consts::TAU;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn divergence_of_plane_wave_matches_analytic() {
        // field = zhat * e^{iz} on a box with Lz = 2*pi  =>  div = i e^{iz}
        let grid = Grid::new([4, 1, 16], [TAU, TAU, TAU]).unwrap();
        let f = VectorField::from_fn(&grid, |r| [c(0.0, 0.0), c(0.0, 0.0), c(0.0, r[2]).exp()]);
        let d = weighted_divergence(&f, None).unwrap();
        for (i, v) in d.data().indexed_iter() {
            let r = grid.position([i.0, i.1, i.2]);
            let expect = c(0.0, 1.0) * c(0.0, r[2]).exp();
            assert!((v - expect).norm() < 1e-12);
        }
    }

    #[test]
    fn x_component_with_z_dependence_has_zero_divergence() {
        let grid = Grid::new([4, 1, 16], [TAU, TAU, TAU]).unwrap();
        let f = VectorField::from_fn(&grid, |r| [c(r[2].sin(), 0.0), c(0.0, 0.0), c(0.0, 0.0)]);
        let d = weighted_divergence(&f, None).unwrap();
        assert!(d.norm() < 1e-13);
    }

    #[test]
    fn curl_of_gradient_vanishes() {
        let grid = Grid::new([4, 4, 8], [TAU, TAU, TAU]).unwrap();
        let phi = ScalarField::from_fn(&grid, |r| c(r[2].cos() + r[0].sin(), 0.3 * r[1].cos()));
        let g = gradient(&phi);
        assert!(curl(&g).norm() < 1e-13 * g.norm().max(1.0));
    }

    #[test]
    fn divergence_of_curl_vanishes() {
        let grid = Grid::new([4, 4, 8], [TAU, TAU, TAU]).unwrap();
        let f = VectorField::from_fn(&grid, |r| {
            [
                c(r[1].sin(), 0.0),
                c(r[2].cos(), 0.2),
                c(0.0, (r[0] + r[2]).cos()),
            ]
        });
        let d = divergence(&curl(&f));
        assert!(d.norm() < 1e-12 * f.norm());
    }

    #[test]
    fn curl_of_transverse_plane_wave_matches_analytic() {
        // field = xhat e^{iz}  =>  curl = -yhat i e^{iz}
        let grid = Grid::new([2, 1, 16], [TAU, TAU, TAU]).unwrap();
        let f = VectorField::plane_wave(&grid, [0, 0, 1], [c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0)]);
        let cf = curl(&f);
        let expect =
            VectorField::plane_wave(&grid, [0, 0, 1], [c(0.0, 0.0), c(0.0, -1.0), c(0.0, 0.0)]);
        assert!(cf.sub(&expect).norm() < 1e-12);
    }

    #[test]
    fn curl_curl_on_transverse_plane_wave_is_k2() {
        let grid = Grid::new([4, 4, 4], [TAU, TAU, TAU]).unwrap();
        // k = (1, 0, 1), e = (1, 0, -1)/sqrt(2) with k.e = 0, |k|^2 = 2
        let s = 0.5f64.sqrt();
        let f = VectorField::plane_wave(&grid, [1, 0, 1], [c(s, 0.0), c(0.0, 0.0), c(-s, 0.0)]);
        let cc = curl_curl(&f);
        assert!(cc.sub(&f.scaled(c(2.0, 0.0))).norm() < 1e-12 * f.norm());
    }

    #[test]
    fn dealiased_product_identity_weight() {
        let grid = Grid::new([4, 1, 12], [1.0, 1.0, 2.0]).unwrap();
        let w = PaddedWeight::new(&grid, &Array3::from_elem((4, 1, 12), 1.0));
        let f = VectorField::from_fn(&grid, |r| [c(r[0], 0.1), c(0.0, r[2]), c(1.0, 0.0)]);
        assert!(w.multiply(&f).sub(&f).norm() < 1e-13 * f.norm().max(1.0));
    }

    #[test]
    fn dealiased_product_formula() {
        // cos(z) * cos(z) = (1 + cos 2z)/2 without aliasing error
        let grid = Grid::new([1, 1, 12], [1.0, 1.0, TAU]).unwrap();
        let w = Array3::from_shape_fn((1, 1, 12), |(_, _, iz)| {
            (TAU * iz as f64 / 12.0).cos()
        });
        let pw = PaddedWeight::new(&grid, &w);
        let f = VectorField::from_fn(&grid, |r| [c(r[2].cos(), 0.0), c(0.0, 0.0), c(0.0, 0.0)]);
        let prod = pw.multiply(&f);
        let expect = VectorField::from_fn(&grid, |r| {
            [c(0.5 * (1.0 + (2.0 * r[2]).cos()), 0.0), c(0.0, 0.0), c(0.0, 0.0)]
        });
        assert!(prod.sub(&expect).norm() < 1e-13);
    }

    #[test]
    fn parseval_on_coefficients() {
        let grid = Grid::new([4, 3, 8], [1.0, 2.0, 3.0]).unwrap();
        let mut rng = <rand_chacha::ChaCha8Rng as rand::SeedableRng>::seed_from_u64(11);
        let f = VectorField::random_normal(&grid, &mut rng);
        let real_space = f.norm().powi(2);
        let coef = f.to_coefficients();
        let fourier: f64 = coef
            .iter()
            .map(|c| c.iter().map(|z| z.norm_sqr()).sum::<f64>())
            .sum();
        let fourier = fourier * grid.volume();
        assert!((real_space - fourier).abs() < 1e-12 * real_space);
    }

    #[test]
    fn inner_product_hermitian_symmetry() {
        let grid = Grid::new([4, 1, 8], [1.0, 1.0, 1.0]).unwrap();
        let mut rng = <rand_chacha::ChaCha8Rng as rand::SeedableRng>::seed_from_u64(3);
        let a = VectorField::random_normal(&grid, &mut rng);
        let b = VectorField::random_normal(&grid, &mut rng);
        let w = PaddedWeight::new(
            &grid,
            &Array3::from_shape_fn((4, 1, 8), |(ix, _, iz)| 1.5 + 0.1 * ((ix + iz) % 3) as f64),
        );
        // weight with content beyond the band limit is fine for symmetry checks
        let ab = weighted_inner(&a, &b, &w).unwrap();
        let ba = weighted_inner(&b, &a, &w).unwrap();
        assert!((ab - ba.conj()).norm() < 1e-12 * ab.norm().max(1.0));
    }

    #[test]
    fn grid_mismatch_is_an_error() {
        let g1 = Grid::new([4, 1, 8], [1.0, 1.0, 1.0]).unwrap();
        let g2 = Grid::new([4, 1, 8], [1.0, 1.0, 2.0]).unwrap();
        let a = VectorField::zeros(&g1);
        let b = VectorField::zeros(&g2);
        assert!(plain_inner(&a, &b).is_err());
    }

    #[test]
    fn constant_field_weighted_norm_is_volume_normalized() {
        // a = b = xhat on the unit box with weight 1 -> 1.0
        let grid = Grid::new([4, 2, 4], [1.0, 1.0, 1.0]).unwrap();
        let a = VectorField::from_fn(&grid, |_| [c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0)]);
        let w = PaddedWeight::new(&grid, &Array3::from_elem((4, 2, 4), 1.0));
        let ip = weighted_inner(&a, &a, &w).unwrap();
        assert!((ip - c(1.0, 0.0)).norm() < 1e-13);
    }
}
