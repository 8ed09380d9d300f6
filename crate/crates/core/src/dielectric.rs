//! Dielectric profiles: ideal structures, seeded disorder realizations and
//! the perturbation potential.
//!
//! Profiles are strictly positive, real and band-limited to at most N/3 per
//! axis so that every pointwise product with a field is exactly dealiased by
//! the 3/2 rule. Multiplication by a profile is then a Hermitian
//! positive-definite operator on the grid; [`DielectricProfile::divide`]
//! applies its exact inverse, which is what keeps divergence identities at
//! machine precision after divisions like `eps_I f / eps_II`.
//!
//! The disorder model (filtered Gaussian noise with a seeded generator) is a
//! stand-in: the physics only requires *some* smooth perturbation, so the
//! statistical model is fixed here and exposed through seed, rms and
//! correlation lengths.

use std::sync::{Arc, OnceLock};

use ndarray::{Array1, Array2, Array3};
use ndarray_linalg::{Cholesky, Diag, Inverse, SolveTriangular, UPLO};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::error::{EpsError, Result};
use crate::geometry::{fft3, ifft3, Grid, PaddedWeight, VectorField};

/// Strictly positive real scalar field with declared band limit.
#[derive(Debug, Clone)]
pub struct DielectricProfile {
    grid: Arc<Grid>,
    values: Array3<f64>,
    eps_min: f64,
    band_limit: [usize; 3],
    weight: OnceLock<PaddedWeight>,
    galerkin: OnceLock<Galerkin>,
}

/// Construction options shared by all profile kinds.
#[derive(Debug, Clone)]
pub struct ProfileOptions {
    pub eps_min: f64,
    /// Per-axis Fourier band limit; defaults to the N/3 maximum.
    pub band_limit: Option<[usize; 3]>,
}

impl Default for ProfileOptions {
    fn default() -> Self {
        Self {
            eps_min: 0.05,
            band_limit: None,
        }
    }
}

/// Ideal profile description.
#[derive(Debug, Clone)]
pub enum ProfileSpec {
    Homogeneous {
        value: f64,
    },
    /// Layered along `axis`: layer `i` fills `[boundaries[i], boundaries[i+1])`
    /// (cyclically) with `values[i]`; interfaces are tanh ramps of width `width`.
    Layered {
        axis: usize,
        boundaries: Vec<f64>,
        values: Vec<f64>,
        width: f64,
    },
    /// Explicit samples, low-passed to the band limit.
    Samples { values: Array3<f64> },
}

/// Seeded disorder realization parameters.
#[derive(Debug, Clone)]
pub struct DisorderSpec {
    pub seed: u64,
    pub rms_amplitude: f64,
    pub correlation_length: [f64; 3],
    pub region: Option<RegionMask>,
}

/// Axis-aligned box mask with smooth edges.
#[derive(Debug, Clone)]
pub struct RegionMask {
    pub lo: [f64; 3],
    pub hi: [f64; 3],
    pub edge_width: f64,
}

/// Isotropic perturbation potential `V(r, omega) = -delta_eps(r) omega^2 I`.
#[derive(Debug)]
pub struct PerturbationPotential {
    grid: Arc<Grid>,
    delta_eps: Array3<f64>,
    omega: f64,
    padded: PaddedWeight,
}

#[derive(Debug, Clone)]
struct Galerkin {
    chol_lower: Array2<Complex64>,
    inverse: OnceLock<Array2<Complex64>>,
}

impl DielectricProfile {
    /// Builds a profile from a spec, low-passes it to the band limit and
    /// validates the positivity floor.
    pub fn build(grid: &Arc<Grid>, spec: &ProfileSpec, opts: &ProfileOptions) -> Result<Self> {
        let band_limit = resolve_band_limit(grid, opts)?;
        let raw = match spec {
            ProfileSpec::Homogeneous { value } => {
                let [nx, ny, nz] = grid.dims();
                Array3::from_elem((nx, ny, nz), *value)
            }
            ProfileSpec::Layered {
                axis,
                boundaries,
                values,
                width,
            } => layered_samples(grid, *axis, boundaries, values, *width)?,
            ProfileSpec::Samples { values } => {
                if values.shape() != grid.dims().as_slice() {
                    return Err(EpsError::GridMismatch(
                        "sample array shape does not match grid".into(),
                    ));
                }
                values.clone()
            }
        };
        let values = low_pass(grid, &raw, band_limit);
        Self::from_filtered(grid.clone(), values, opts.eps_min, band_limit)
    }

    fn from_filtered(
        grid: Arc<Grid>,
        values: Array3<f64>,
        eps_min: f64,
        band_limit: [usize; 3],
    ) -> Result<Self> {
        let min = values.iter().cloned().fold(f64::INFINITY, f64::min);
        if !(min >= eps_min) {
            return Err(EpsError::InvalidProfile(format!(
                "minimum value {min:.6} fell below eps_min = {eps_min} after band-limiting"
            )));
        }
        let profile = Self {
            grid,
            values,
            eps_min,
            band_limit,
            weight: OnceLock::new(),
            galerkin: OnceLock::new(),
        };
        let padded_min = profile.weight().padded_min();
        if !(padded_min > 0.0) {
            return Err(EpsError::BandLimit(format!(
                "band-limited profile dips to {padded_min:.3e} on the refined grid; \
                 multiplication operator would not be positive definite"
            )));
        }
        Ok(profile)
    }

    pub fn grid(&self) -> &Arc<Grid> {
        &self.grid
    }

    pub fn values(&self) -> &Array3<f64> {
        &self.values
    }

    pub fn eps_min(&self) -> f64 {
        self.eps_min
    }

    pub fn band_limit(&self) -> [usize; 3] {
        self.band_limit
    }

    pub fn min_value(&self) -> f64 {
        self.values.iter().cloned().fold(f64::INFINITY, f64::min)
    }

    pub fn max_value(&self) -> f64 {
        self.values.iter().cloned().fold(f64::NEG_INFINITY, f64::max)
    }

    /// Pointwise difference `self - other` (the disorder term when called as
    /// `eps_ii.delta(&eps_i)`).
    pub fn delta(&self, other: &DielectricProfile) -> Result<Array3<f64>> {
        self.grid.check_same(&other.grid, "profile delta")?;
        Ok(&self.values - &other.values)
    }

    /// Padded-weight view for dealiased products.
    pub fn weight(&self) -> &PaddedWeight {
        self.weight
            .get_or_init(|| PaddedWeight::new(&self.grid, &self.values))
    }

    /// Dealiased product `eps * f`.
    pub fn multiply(&self, f: &VectorField) -> Result<VectorField> {
        self.grid.check_same(f.grid(), "profile multiply")?;
        Ok(self.weight().multiply(f))
    }

    /// Exact inverse of [`DielectricProfile::multiply`]: solves
    /// `eps * x = f` in the dealiased sense.
    pub fn divide(&self, f: &VectorField) -> Result<VectorField> {
        self.grid.check_same(f.grid(), "profile divide")?;
        let gal = self.galerkin()?;
        let n = self.grid.n_total();
        let coef = f.to_coefficients();
        let mut out = [0, 1, 2].map(|_| Array3::zeros(coef[0].raw_dim()));
        for c in 0..3 {
            let b = Array1::from_iter(coef[c].iter().cloned());
            let y = gal
                .chol_lower
                .solve_triangular(UPLO::Lower, Diag::NonUnit, &b)?;
            let upper = conj_t(&gal.chol_lower);
            let x = upper.solve_triangular(UPLO::Upper, Diag::NonUnit, &y)?;
            out[c] = Array3::from_shape_vec(coef[c].raw_dim(), x.to_vec())
                .expect("shape preserved");
            let _ = n;
        }
        Ok(VectorField::from_coefficients(&self.grid, out))
    }

    /// Dense matrix of the dealiased multiplication operator in the Fourier
    /// coefficient basis (scalar block; the vector operator is this matrix
    /// acting on each Cartesian component).
    pub fn mult_matrix(&self) -> Array2<Complex64> {
        let n = self.grid.n_total();
        let eps_hat = fft3(self.values.mapv(|v| Complex64::new(v, 0.0)));
        let dims = self.grid.dims();
        let signed: Vec<[i64; 3]> = (0..n)
            .map(|flat| {
                let idx = self.grid.unflat(flat);
                [0, 1, 2].map(|a| self.grid.signed_index(a, idx[a]))
            })
            .collect();
        let bl = self.band_limit.map(|b| b as i64);
        let mut m = Array2::zeros((n, n));
        for i in 0..n {
            for j in 0..n {
                let d = [0, 1, 2].map(|a| signed[i][a] - signed[j][a]);
                if d.iter().zip(bl.iter()).any(|(x, b)| x.abs() > *b) {
                    continue;
                }
                let slot = [0, 1, 2].map(|a| {
                    let m = d[a];
                    if m >= 0 {
                        m as usize
                    } else {
                        (m + dims[a] as i64) as usize
                    }
                });
                m[[i, j]] = eps_hat[[slot[0], slot[1], slot[2]]];
            }
        }
        m
    }

    /// Inverse of [`DielectricProfile::mult_matrix`], cached.
    pub fn inverse_matrix(&self) -> Result<&Array2<Complex64>> {
        let gal = self.galerkin()?;
        if let Some(inv) = gal.inverse.get() {
            return Ok(inv);
        }
        let inv = self.mult_matrix().inv()?;
        let _ = gal.inverse.set(inv);
        Ok(gal.inverse.get().expect("just set"))
    }

    fn galerkin(&self) -> Result<&Galerkin> {
        if let Some(g) = self.galerkin.get() {
            return Ok(g);
        }
        let m = self.mult_matrix();
        let chol = m.cholesky(UPLO::Lower).map_err(|e| {
            EpsError::Eigensolver(format!(
                "multiplication operator not positive definite (band-limit violation?): {e}"
            ))
        })?;
        let _ = self.galerkin.set(Galerkin {
            chol_lower: chol,
            inverse: OnceLock::new(),
        });
        Ok(self.galerkin.get().expect("just set"))
    }
}

pub(crate) fn conj_t(m: &Array2<Complex64>) -> Array2<Complex64> {
    m.t().mapv(|z| z.conj())
}

fn resolve_band_limit(grid: &Grid, opts: &ProfileOptions) -> Result<[usize; 3]> {
    let max = grid.max_band_limit();
    match opts.band_limit {
        None => Ok(max),
        Some(bl) => {
            for a in 0..3 {
                if bl[a] > max[a] {
                    return Err(EpsError::BandLimit(format!(
                        "requested band limit {} exceeds N/3 = {} along axis {a}",
                        bl[a], max[a]
                    )));
                }
            }
            Ok(bl)
        }
    }
}

/// Hard low-pass to the band limit.
fn low_pass(grid: &Grid, values: &Array3<f64>, band_limit: [usize; 3]) -> Array3<f64> {
    let mut coef = fft3(values.mapv(|v| Complex64::new(v, 0.0)));
    let dims = grid.dims();
    for ix in 0..dims[0] {
        for iy in 0..dims[1] {
            for iz in 0..dims[2] {
                let m = [
                    grid.signed_index(0, ix),
                    grid.signed_index(1, iy),
                    grid.signed_index(2, iz),
                ];
                let outside = (0..3).any(|a| m[a].unsigned_abs() as usize > band_limit[a]);
                if outside {
                    coef[[ix, iy, iz]] = Complex64::ZERO;
                }
            }
        }
    }
    ifft3(coef).mapv(|z| z.re)
}

fn layered_samples(
    grid: &Grid,
    axis: usize,
    boundaries: &[f64],
    values: &[f64],
    width: f64,
) -> Result<Array3<f64>> {
    if axis > 2 {
        return Err(EpsError::InvalidArgument("layer axis must be 0..=2".into()));
    }
    if boundaries.len() != values.len() || values.is_empty() {
        return Err(EpsError::InvalidArgument(
            "layered profile needs equally many boundaries and values".into(),
        ));
    }
    if !(width > 0.0) {
        return Err(EpsError::InvalidArgument(
            "interface width must be positive".into(),
        ));
    }
    let length = grid.lengths()[axis];
    let mut sorted = boundaries.to_vec();
    if !sorted.windows(2).all(|w| w[0] < w[1]) {
        return Err(EpsError::InvalidArgument(
            "layer boundaries must be strictly ascending".into(),
        ));
    }
    if sorted.iter().any(|&b| b < 0.0 || b >= length) {
        return Err(EpsError::InvalidArgument(format!(
            "layer boundaries must lie in [0, {length})"
        )));
    }
    let k = sorted.len();
    // layer i spans [b_i, b_{i+1}) cyclically; bump functions built from a
    // tanh pair around the layer midpoint so the partition sums to one at
    // every interface
    let wrap = |u: f64| {
        let mut v = u % length;
        if v < -length / 2.0 {
            v += length;
        }
        if v >= length / 2.0 {
            v -= length;
        }
        v
    };
    let [nx, ny, nz] = grid.dims();
    let mut out = Array3::zeros((nx, ny, nz));
    for ix in 0..nx {
        for iy in 0..ny {
            for iz in 0..nz {
                let z = grid.position([ix, iy, iz])[axis];
                let mut acc = 0.0;
                for i in 0..k {
                    let a = sorted[i];
                    let b = if i + 1 < k {
                        sorted[i + 1]
                    } else {
                        sorted[0] + length
                    };
                    let center = 0.5 * (a + b);
                    let half = 0.5 * (b - a);
                    let u = wrap(z - center);
                    let chi =
                        0.5 * (((u + half) / width).tanh() - ((u - half) / width).tanh());
                    acc += values[i] * chi;
                }
                out[[ix, iy, iz]] = acc;
            }
        }
    }
    let _ = k;
    Ok(out)
}

/// Adds a seeded, filtered, rescaled Gaussian disorder realization to `base`.
///
/// The realization is a pure function of `(base, spec)`: the same seed gives
/// a bit-identical profile.
pub fn generate_disorder(base: &DielectricProfile, spec: &DisorderSpec) -> Result<DielectricProfile> {
    if spec.rms_amplitude < 0.0 {
        return Err(EpsError::InvalidArgument("rms amplitude must be >= 0".into()));
    }
    if spec.rms_amplitude == 0.0 {
        return Ok(base.clone());
    }
    if spec.correlation_length.iter().any(|&l| !(l > 0.0)) {
        return Err(EpsError::InvalidArgument(
            "correlation lengths must be positive".into(),
        ));
    }
    let grid = base.grid().clone();
    let [nx, ny, nz] = grid.dims();

    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let mut noise = Array3::zeros((nx, ny, nz));
    for v in noise.iter_mut() {
        let x: f64 = rng.sample(StandardNormal);
        *v = Complex64::new(x, 0.0);
    }

    // Gaussian spectral filter plus hard band-limit truncation.
    let mut coef = fft3(noise);
    for ix in 0..nx {
        for iy in 0..ny {
            for iz in 0..nz {
                let m = [
                    grid.signed_index(0, ix),
                    grid.signed_index(1, iy),
                    grid.signed_index(2, iz),
                ];
                let outside =
                    (0..3).any(|a| m[a].unsigned_abs() as usize > base.band_limit()[a]);
                if outside {
                    coef[[ix, iy, iz]] = Complex64::ZERO;
                    continue;
                }
                let k = grid.wave_vector([ix, iy, iz]);
                let arg: f64 = (0..3)
                    .map(|a| (k[a] * spec.correlation_length[a]).powi(2))
                    .sum();
                coef[[ix, iy, iz]] *= (-0.5 * arg).exp();
            }
        }
    }
    let mut delta = ifft3(coef).mapv(|z| z.re);

    let in_region: Array3<bool> = match &spec.region {
        None => Array3::from_elem((nx, ny, nz), true),
        Some(mask) => {
            let m = region_mask(&grid, mask);
            // mask multiplication leaves the band, so re-truncate
            delta = low_pass(&grid, &(&delta * &m), base.band_limit());
            m.mapv(|v| v >= 0.5)
        }
    };

    let scaled = rescale_to_rms(&delta, &in_region, spec.rms_amplitude)?;
    let candidate = &base.values().clone() + &scaled;

    let min = candidate.iter().cloned().fold(f64::INFINITY, f64::min);
    let final_values = if min >= base.eps_min() {
        candidate
    } else {
        // clip, re-filter, rescale: one relaxation pass
        let clipped = candidate.mapv(|v| v.max(base.eps_min()));
        let refiltered = low_pass(&grid, &(&clipped - base.values()), base.band_limit());
        let rescaled = rescale_to_rms(&refiltered, &in_region, spec.rms_amplitude)?;
        let relaxed = &base.values().clone() + &rescaled;
        let relaxed_min = relaxed.iter().cloned().fold(f64::INFINITY, f64::min);
        if relaxed_min < base.eps_min() {
            return Err(EpsError::Disorder(format!(
                "rms {} forces the profile below eps_min = {} even after one \
                 clip-and-relax pass (min {relaxed_min:.4})",
                spec.rms_amplitude,
                base.eps_min()
            )));
        }
        relaxed
    };

    let achieved = masked_rms(&(&final_values - base.values()), &in_region);
    if (achieved - spec.rms_amplitude).abs() > 0.2 * spec.rms_amplitude {
        return Err(EpsError::Disorder(format!(
            "achieved rms {achieved:.4} deviates more than 20% from requested {}",
            spec.rms_amplitude
        )));
    }

    DielectricProfile::from_filtered(grid, final_values, base.eps_min(), base.band_limit())
}

fn region_mask(grid: &Grid, mask: &RegionMask) -> Array3<f64> {
    let [nx, ny, nz] = grid.dims();
    let w = mask.edge_width.max(1e-12);
    Array3::from_shape_fn((nx, ny, nz), |(ix, iy, iz)| {
        let r = grid.position([ix, iy, iz]);
        let mut v = 1.0;
        for a in 0..3 {
            let lo = ((r[a] - mask.lo[a]) / w).tanh();
            let hi = ((mask.hi[a] - r[a]) / w).tanh();
            v *= 0.25 * (1.0 + lo) * (1.0 + hi);
        }
        v
    })
}

fn masked_rms(delta: &Array3<f64>, in_region: &Array3<bool>) -> f64 {
    let mut sum = 0.0;
    let mut count = 0usize;
    for (d, &m) in delta.iter().zip(in_region.iter()) {
        if m {
            sum += d * d;
            count += 1;
        }
    }
    if count == 0 {
        0.0
    } else {
        (sum / count as f64).sqrt()
    }
}

fn rescale_to_rms(
    delta: &Array3<f64>,
    in_region: &Array3<bool>,
    target: f64,
) -> Result<Array3<f64>> {
    let current = masked_rms(delta, in_region);
    if current == 0.0 {
        return Err(EpsError::Disorder(
            "disorder realization vanished in the masked region; cannot rescale".into(),
        ));
    }
    Ok(delta.mapv(|v| v * target / current))
}

impl PerturbationPotential {
    /// `V(r, omega) = -(eps_ii - eps_i) omega^2 I`.
    pub fn new(
        eps_i: &DielectricProfile,
        eps_ii: &DielectricProfile,
        omega: f64,
    ) -> Result<Self> {
        eps_i.grid().check_same(eps_ii.grid(), "perturbation potential")?;
        if !(omega >= 0.0) {
            return Err(EpsError::InvalidArgument(
                "probe frequency must be >= 0".into(),
            ));
        }
        let delta_eps = eps_ii.delta(eps_i)?;
        let padded = PaddedWeight::new(eps_i.grid(), &delta_eps);
        Ok(Self {
            grid: eps_i.grid().clone(),
            delta_eps,
            omega,
            padded,
        })
    }

    pub fn omega(&self) -> f64 {
        self.omega
    }

    pub fn grid(&self) -> &Arc<Grid> {
        &self.grid
    }

    pub fn delta_eps(&self) -> &Array3<f64> {
        &self.delta_eps
    }

    /// Scalar diagonal of the potential, `-delta_eps * omega^2`.
    pub fn scalar_values(&self) -> Array3<f64> {
        self.delta_eps.mapv(|d| -d * self.omega * self.omega)
    }

    /// Applies the potential: `-omega^2 * (delta_eps * f)`, dealiased.
    pub fn apply(&self, f: &VectorField) -> Result<VectorField> {
        self.grid.check_same(f.grid(), "potential apply")?;
        let mut out = self.padded.multiply(f);
        out.scale(Complex64::new(-self.omega * self.omega, 0.0));
        Ok(out)
    }

    /// Same potential evaluated at a different probe frequency.
    pub fn at_omega(&self, omega: f64) -> Self {
        Self {
            grid: self.grid.clone(),
            delta_eps: self.delta_eps.clone(),
            omega,
            padded: self.padded.clone(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{plain_inner, Grid};
    use std::f64::consts::TAU;

    fn grid_1d(nz: usize) -> Arc<Grid> {
        Grid::new([1, 1, nz], [TAU, TAU, TAU]).unwrap()
    }

    #[test]
    fn homogeneous_profile_is_constant() {
        let grid = grid_1d(16);
        let p = DielectricProfile::build(
            &grid,
            &ProfileSpec::Homogeneous { value: 2.0 },
            &ProfileOptions::default(),
        )
        .unwrap();
        for v in p.values() {
            assert!((v - 2.0).abs() < 1e-14);
        }
    }

    #[test]
    fn layered_midpoint_is_mean_of_adjacent_values() {
        let grid = grid_1d(64);
        let lz = TAU;
        let p = DielectricProfile::build(
            &grid,
            &ProfileSpec::Layered {
                axis: 2,
                boundaries: vec![0.0, lz / 2.0],
                values: vec![1.0, 4.0],
                width: lz / 16.0,
            },
            &ProfileOptions::default(),
        )
        .unwrap();
        // interface center at z = Lz/2 sits exactly on a grid point (index 32)
        let mid = p.values()[[0, 0, 32]];
        assert!(
            (mid - 2.5).abs() < 0.03,
            "midpoint {mid} should be close to 2.5"
        );
    }

    #[test]
    fn layered_slope_matches_tanh_oracle() {
        // analytic max slope of a tanh ramp: delta_eps / (2 w)
        let grid = grid_1d(64);
        let lz = TAU;
        let w = lz / 8.0;
        let p = DielectricProfile::build(
            &grid,
            &ProfileSpec::Layered {
                axis: 2,
                boundaries: vec![0.0, lz / 2.0],
                values: vec![1.0, 4.0],
                width: w,
            },
            &ProfileOptions::default(),
        )
        .unwrap();
        let coef = fft3(p.values().mapv(|v| Complex64::new(v, 0.0)));
        let mut dcoef = coef.clone();
        for iz in 0..64 {
            let k = grid.wave_number(2, iz);
            let v = dcoef[[0, 0, iz]];
            dcoef[[0, 0, iz]] = Complex64::new(-k * v.im, k * v.re);
        }
        let deriv = ifft3(dcoef);
        let max_slope = deriv.iter().map(|z| z.re.abs()).fold(0.0, f64::max);
        let oracle = 3.0 / (2.0 * w);
        assert!(
            (max_slope / oracle - 1.0).abs() < 0.1,
            "max slope {max_slope} vs tanh oracle {oracle}"
        );
    }

    #[test]
    fn band_limit_above_n_over_3_rejected() {
        let grid = grid_1d(16);
        let err = DielectricProfile::build(
            &grid,
            &ProfileSpec::Homogeneous { value: 1.0 },
            &ProfileOptions {
                eps_min: 0.05,
                band_limit: Some([0, 0, 6]),
            },
        );
        assert!(matches!(err, Err(EpsError::BandLimit(_))));
    }

    #[test]
    fn floor_violation_rejected() {
        let grid = grid_1d(16);
        let err = DielectricProfile::build(
            &grid,
            &ProfileSpec::Homogeneous { value: 0.01 },
            &ProfileOptions::default(),
        );
        assert!(matches!(err, Err(EpsError::InvalidProfile(_))));
    }

    #[test]
    fn zero_rms_disorder_returns_base_exactly() {
        let grid = grid_1d(32);
        let base = DielectricProfile::build(
            &grid,
            &ProfileSpec::Homogeneous { value: 2.0 },
            &ProfileOptions::default(),
        )
        .unwrap();
        let spec = DisorderSpec {
            seed: 1,
            rms_amplitude: 0.0,
            correlation_length: [0.5; 3],
            region: None,
        };
        let out = generate_disorder(&base, &spec).unwrap();
        assert_eq!(out.values(), base.values());
    }

    #[test]
    fn same_seed_is_bit_identical() {
        let grid = Grid::new([4, 1, 32], [TAU; 3]).unwrap();
        let base = DielectricProfile::build(
            &grid,
            &ProfileSpec::Homogeneous { value: 2.0 },
            &ProfileOptions::default(),
        )
        .unwrap();
        let spec = DisorderSpec {
            seed: 42,
            rms_amplitude: 0.05,
            correlation_length: [0.7, 0.7, 0.7],
            region: None,
        };
        let a = generate_disorder(&base, &spec).unwrap();
        let b = generate_disorder(&base, &spec).unwrap();
        assert_eq!(a.values(), b.values());
    }

    #[test]
    fn achieved_rms_within_window() {
        let grid = grid_1d(64);
        let base = DielectricProfile::build(
            &grid,
            &ProfileSpec::Homogeneous { value: 2.0 },
            &ProfileOptions::default(),
        )
        .unwrap();
        let spec = DisorderSpec {
            seed: 7,
            rms_amplitude: 0.05,
            correlation_length: [0.5; 3],
            region: None,
        };
        let eps_ii = generate_disorder(&base, &spec).unwrap();
        let delta = eps_ii.delta(&base).unwrap();
        let rms = (delta.iter().map(|d| d * d).sum::<f64>() / delta.len() as f64).sqrt();
        assert!(rms > 0.045 && rms < 0.055, "achieved rms {rms}");
    }

    #[test]
    fn potential_values_and_scaling() {
        let grid = grid_1d(16);
        let opts = ProfileOptions::default();
        let e1 = DielectricProfile::build(&grid, &ProfileSpec::Homogeneous { value: 1.0 }, &opts)
            .unwrap();
        let e2 = DielectricProfile::build(&grid, &ProfileSpec::Homogeneous { value: 1.1 }, &opts)
            .unwrap();
        // identical profiles -> zero potential
        let v0 = PerturbationPotential::new(&e1, &e1, 3.0).unwrap();
        assert!(v0.scalar_values().iter().all(|v| v.abs() < 1e-14));
        // delta = 0.1, omega = 2 -> -0.4
        let v = PerturbationPotential::new(&e1, &e2, 2.0).unwrap();
        for s in v.scalar_values().iter() {
            assert!((s + 0.4).abs() < 1e-12);
        }
        // delta = -0.25, omega = 1 -> +0.25 (sign check)
        let e075 = DielectricProfile::build(
            &grid,
            &ProfileSpec::Homogeneous { value: 0.75 },
            &opts,
        )
        .unwrap();
        let v2 = PerturbationPotential::new(&e1, &e075, 1.0).unwrap();
        for s in v2.scalar_values().iter() {
            assert!((s - 0.25).abs() < 1e-12);
        }
        // quadratic in omega: V(2 omega) = 4 V(omega) applied to a field
        let grid2 = grid_1d(16);
        let f = VectorField::plane_wave(
            &grid2,
            [0, 0, 1],
            [Complex64::new(1.0, 0.0), Complex64::ZERO, Complex64::ZERO],
        );
        let a = v.at_omega(1.0).apply(&f).unwrap();
        let b = v.at_omega(2.0).apply(&f).unwrap();
        assert!(b.sub(&a.scaled(Complex64::new(4.0, 0.0))).norm() < 1e-12 * b.norm());
    }

    #[test]
    fn divide_is_exact_inverse_of_multiply() {
        let grid = Grid::new([2, 1, 16], [TAU; 3]).unwrap();
        let base = DielectricProfile::build(
            &grid,
            &ProfileSpec::Layered {
                axis: 2,
                boundaries: vec![0.0, TAU / 2.0],
                values: vec![1.0, 2.25],
                width: TAU / 16.0,
            },
            &ProfileOptions::default(),
        )
        .unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let f = VectorField::random_normal(&grid, &mut rng);
        let g = base.divide(&f).unwrap();
        let back = base.multiply(&g).unwrap();
        assert!(back.sub(&f).norm() < 1e-11 * f.norm());
        // and multiply-then-divide
        let h = base.divide(&base.multiply(&f).unwrap()).unwrap();
        assert!(h.sub(&f).norm() < 1e-11 * f.norm());
        let _ = plain_inner(&f, &h).unwrap();
    }

    #[test]
    fn eps_ii_minus_delta_recovers_eps_i() {
        let grid = grid_1d(32);
        let base = DielectricProfile::build(
            &grid,
            &ProfileSpec::Homogeneous { value: 1.5 },
            &ProfileOptions::default(),
        )
        .unwrap();
        let spec = DisorderSpec {
            seed: 3,
            rms_amplitude: 0.03,
            correlation_length: [0.6; 3],
            region: None,
        };
        let eps_ii = generate_disorder(&base, &spec).unwrap();
        let delta = eps_ii.delta(&base).unwrap();
        let recon = &eps_ii.values().clone() - &delta;
        for (a, b) in recon.iter().zip(base.values().iter()) {
            assert!((a - b).abs() < 1e-14);
        }
    }
}
