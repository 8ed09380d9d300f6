//! Generalized-transverse normal modes of the curl-curl operator.
//!
//! Solves `curl curl f = omega^2 eps f` on the periodic grid as a dense
//! Hermitian-definite eigenproblem. Rather than solving on the full 3N space
//! and discarding the N+2 dimensional curl-free null space afterwards, the
//! problem is reduced exactly onto the transverse plane-wave subspace via the
//! substitution `h = eps f`: any eigenfield with omega > 0 has `h`
//! divergence-free and mean-free, so `h = Q y` with Q the transverse
//! plane-wave basis. The pencil becomes
//!
//! ```text
//! (Q^H E^-1 A E^-1 Q) y = omega^2 (Q^H E^-1 Q) y
//! ```
//!
//! with `A` the curl-curl operator and `E` the dealiased multiplication by
//! eps. Both reduced matrices are Hermitian and the right one is positive
//! definite. The recovered modes `f = E^-1 Q y` satisfy the generalized
//! Coulomb gauge condition `div(eps f) = 0` to machine rounding by
//! construction, independent of eigensolver residuals, and the returned set
//! has exactly `2 N - 2` members.

use std::sync::Arc;

use ndarray::{Array1, Array2, Array3};
use ndarray_linalg::{Cholesky, Diag, Eigh, SolveTriangular, UPLO};
use num_complex::Complex64;

use crate::dielectric::{conj_t, DielectricProfile};
use crate::error::{EpsError, Result};
use crate::geometry::{curl_curl, weighted_divergence, weighted_inner, Grid, VectorField};

/// Ordered set of eigenfrequency/eigenfield pairs, eps-weighted orthonormal.
#[derive(Debug, Clone)]
pub struct ModeSet {
    eps: Arc<DielectricProfile>,
    omegas: Vec<f64>,
    fields: Vec<VectorField>,
    degeneracy_tol: f64,
}

/// Eigensolver options.
#[derive(Debug, Clone)]
pub struct SolverOptions {
    /// Number of lowest modes to keep; `None` keeps the full spectrum.
    pub count: Option<usize>,
    /// Relative frequency window treated as degenerate.
    pub degeneracy_tol: f64,
    /// Frequencies below `omega_tol_factor * 2 pi / max L` are rejected as
    /// null-space leakage.
    pub omega_tol_factor: f64,
}

impl Default for SolverOptions {
    fn default() -> Self {
        Self {
            count: None,
            degeneracy_tol: 1e-6,
            omega_tol_factor: 1e-6,
        }
    }
}

/// One transverse plane wave `e exp(i k.r)` of the grid.
#[derive(Debug, Clone)]
pub struct TransverseWave {
    /// Flat FFT slot of the wave vector.
    pub flat: usize,
    pub m: [i64; 3],
    pub k: [f64; 3],
    pub e: [f64; 3],
    /// Polarization slot (0 or 1) in the deterministic basis.
    pub sigma: usize,
}

/// Deterministic polarization pair perpendicular to `k`:
/// `e1` along `zhat x k` when that is nonzero, else `xhat`; `e2 = khat x e1`.
pub fn polarization_basis(k: [f64; 3]) -> ([f64; 3], [f64; 3]) {
    let knorm = (k[0] * k[0] + k[1] * k[1] + k[2] * k[2]).sqrt();
    let zxk = [-k[1], k[0], 0.0];
    let zxk_norm = (zxk[0] * zxk[0] + zxk[1] * zxk[1]).sqrt();
    let e1 = if zxk_norm > 1e-12 * knorm {
        [zxk[0] / zxk_norm, zxk[1] / zxk_norm, 0.0]
    } else {
        [1.0, 0.0, 0.0]
    };
    let kh = [k[0] / knorm, k[1] / knorm, k[2] / knorm];
    let e2 = [
        kh[1] * e1[2] - kh[2] * e1[1],
        kh[2] * e1[0] - kh[0] * e1[2],
        kh[0] * e1[1] - kh[1] * e1[0],
    ];
    (e1, e2)
}

/// All transverse plane waves of the grid in deterministic order
/// (ascending flat wave-vector slot, then polarization).
pub fn transverse_basis(grid: &Grid) -> Vec<TransverseWave> {
    let mut out = Vec::with_capacity(2 * grid.n_total() - 2);
    for flat in 0..grid.n_total() {
        let idx = grid.unflat(flat);
        let m = [0, 1, 2].map(|a| grid.signed_index(a, idx[a]));
        if m == [0, 0, 0] {
            continue;
        }
        let k = grid.wave_vector(idx);
        let (e1, e2) = polarization_basis(k);
        for (sigma, e) in [e1, e2].into_iter().enumerate() {
            out.push(TransverseWave {
                flat,
                m,
                k,
                e,
                sigma,
            });
        }
    }
    out
}

/// Solves the generalized eigenproblem for the eps-transverse normal modes.
pub fn solve_modes(eps: &Arc<DielectricProfile>, opts: &SolverOptions) -> Result<ModeSet> {
    let grid = eps.grid().clone();
    let n = grid.n_total();
    let t_dim = 2 * n - 2;
    if n < 2 {
        return Err(EpsError::InvalidArgument(
            "grid has no transverse modes (need at least 2 points)".into(),
        ));
    }
    if let Some(c) = opts.count {
        if c > t_dim {
            return Err(EpsError::InvalidArgument(format!(
                "requested {c} modes but the transverse subspace has dimension {t_dim}"
            )));
        }
    }

    let basis = transverse_basis(&grid);
    debug_assert_eq!(basis.len(), t_dim);
    let g = eps.inverse_matrix()?; // E^-1, scalar block

    // |k|^2 per FFT slot
    let k2: Vec<f64> = (0..n)
        .map(|flat| {
            let k = grid.wave_vector(grid.unflat(flat));
            k[0] * k[0] + k[1] * k[1] + k[2] * k[2]
        })
        .collect();

    // M1 = G^H diag(|k|^2) G
    let mut dg = g.clone();
    for (q, mut row) in dg.outer_iter_mut().enumerate() {
        let s = k2[q];
        row.mapv_inplace(|z| z * s);
    }
    let gh = conj_t(g);
    let m1 = gh.dot(&dg);

    // V[q, j] = (k_q . e_j) G[q, c_j]
    let mut v = Array2::<Complex64>::zeros((n, t_dim));
    for (j, w) in basis.iter().enumerate() {
        for q in 0..n {
            let kq = grid.wave_vector(grid.unflat(q));
            let kdote = kq[0] * w.e[0] + kq[1] * w.e[1] + kq[2] * w.e[2];
            v[[q, j]] = g[[q, w.flat]] * kdote;
        }
    }
    let m2 = conj_t(&v).dot(&v);

    // reduced pencil
    let mut a_red = Array2::<Complex64>::zeros((t_dim, t_dim));
    let mut w_red = Array2::<Complex64>::zeros((t_dim, t_dim));
    for i in 0..t_dim {
        let wi = &basis[i];
        for j in 0..t_dim {
            let wj = &basis[j];
            let edot = wi.e[0] * wj.e[0] + wi.e[1] * wj.e[1] + wi.e[2] * wj.e[2];
            a_red[[i, j]] = edot * m1[[wi.flat, wj.flat]] - m2[[i, j]];
            w_red[[i, j]] = edot * g[[wi.flat, wj.flat]];
        }
    }
    hermitize(&mut a_red);
    hermitize(&mut w_red);

    // reduce to a standard Hermitian problem via Cholesky of W
    let l = w_red.cholesky(UPLO::Lower).map_err(|e| {
        EpsError::Eigensolver(format!(
            "reduced mass matrix not positive definite (aliasing or band-limit violation): {e}"
        ))
    })?;
    let x = l.solve_triangular(UPLO::Lower, Diag::NonUnit, &a_red)?;
    let xh = conj_t(&x);
    let ch = l.solve_triangular(UPLO::Lower, Diag::NonUnit, &xh)?;
    let mut c = conj_t(&ch);
    hermitize(&mut c);
    let (vals, z) = c.eigh(UPLO::Lower)?;
    let lh = conj_t(&l);
    let y = lh.solve_triangular(UPLO::Upper, Diag::NonUnit, &z)?;

    let omega_tol = opts.omega_tol_factor * 2.0 * std::f64::consts::PI
        / grid.lengths().iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    if let Some(&low) = vals.iter().find(|&&v| v <= omega_tol * omega_tol) {
        return Err(EpsError::Eigensolver(format!(
            "eigenvalue {low:.3e} at or below the null-space threshold {:.3e}",
            omega_tol * omega_tol
        )));
    }

    // mode coefficients: fhat_j = E^-1 Q y_j / sqrt(V)
    let mut zb = Array2::<Complex64>::zeros((3 * n, t_dim));
    for (j, w) in basis.iter().enumerate() {
        for q in 0..n {
            let gq = g[[q, w.flat]];
            for comp in 0..3 {
                zb[[comp * n + q, j]] = gq * w.e[comp];
            }
        }
    }
    let f_coef = zb.dot(&y);
    let scale = 1.0 / grid.volume().sqrt();

    let mut modes: Vec<(f64, VectorField, (usize, usize))> = Vec::with_capacity(t_dim);
    let [nx, ny, nz] = grid.dims();
    for j in 0..t_dim {
        let mut comps = [0, 1, 2].map(|_| Array3::<Complex64>::zeros((nx, ny, nz)));
        for comp in 0..3 {
            for q in 0..n {
                let idx = grid.unflat(q);
                comps[comp][[idx[0], idx[1], idx[2]]] = f_coef[[comp * n + q, j]] * scale;
            }
        }
        let (dominant, phase) = dominant_and_phase(&comps);
        for c in comps.iter_mut() {
            c.mapv_inplace(|z| z * phase);
        }
        let mut field = VectorField::from_coefficients(&grid, comps);
        // polish the normalization (the reduced solve leaves ~1e-14 slack)
        let nrm = weighted_inner(&field, &field, eps.weight())?.re.sqrt();
        field.scale(Complex64::new(1.0 / nrm, 0.0));
        modes.push((vals[j].sqrt(), field, dominant));
    }

    // ascending in omega with a deterministic tie-break inside degenerate
    // clusters: lexicographic dominant Fourier slot, then component
    modes.sort_by(|a, b| {
        a.0.partial_cmp(&b.0)
            .unwrap_or(std::cmp::Ordering::Equal)
            .then(a.2.cmp(&b.2))
    });
    let mut i = 0;
    while i < modes.len() {
        let mut j = i + 1;
        while j < modes.len()
            && (modes[j].0 - modes[i].0) <= opts.degeneracy_tol * 0.5 * (modes[i].0 + modes[j].0)
        {
            j += 1;
        }
        modes[i..j].sort_by(|a, b| a.2.cmp(&b.2));
        i = j;
    }

    if let Some(c) = opts.count {
        modes.truncate(c);
    }
    let (omegas, fields): (Vec<f64>, Vec<VectorField>) = modes
        .into_iter()
        .map(|(omega, field, _)| (omega, field))
        .unzip();

    Ok(ModeSet {
        eps: eps.clone(),
        omegas,
        fields,
        degeneracy_tol: opts.degeneracy_tol,
    })
}

fn hermitize(m: &mut Array2<Complex64>) {
    let mh = conj_t(m);
    *m += &mh;
    m.mapv_inplace(|z| 0.5 * z);
}

fn dominant_and_phase(comps: &[Array3<Complex64>; 3]) -> ((usize, usize), Complex64) {
    let mut best = (0usize, 0usize);
    let mut best_mag = -1.0f64;
    for comp in 0..3 {
        for (flat, z) in comps[comp].iter().enumerate() {
            let mag = z.norm();
            if mag > best_mag * (1.0 + 1e-12) {
                best_mag = mag;
                best = (flat, comp);
            }
        }
    }
    let c = comps[best.1].as_slice().expect("standard layout")[best.0];
    let phase = if c.norm() > 0.0 {
        c.conj() / c.norm()
    } else {
        Complex64::new(1.0, 0.0)
    };
    (best, phase)
}

impl ModeSet {
    pub fn grid(&self) -> &Arc<Grid> {
        self.eps.grid()
    }

    pub fn eps(&self) -> &Arc<DielectricProfile> {
        &self.eps
    }

    pub fn len(&self) -> usize {
        self.omegas.len()
    }

    pub fn is_empty(&self) -> bool {
        self.omegas.is_empty()
    }

    pub fn omega(&self, i: usize) -> f64 {
        self.omegas[i]
    }

    pub fn omegas(&self) -> &[f64] {
        &self.omegas
    }

    pub fn field(&self, i: usize) -> &VectorField {
        &self.fields[i]
    }

    pub fn degeneracy_tol(&self) -> f64 {
        self.degeneracy_tol
    }

    pub fn iter(&self) -> impl Iterator<Item = (f64, &VectorField)> {
        self.omegas.iter().cloned().zip(self.fields.iter())
    }

    /// Largest deviation of the eps-weighted Gram matrix from the identity.
    pub fn gram_max_deviation(&self) -> Result<f64> {
        let mut worst = 0.0f64;
        for i in 0..self.len() {
            for j in i..self.len() {
                let ip = weighted_inner(&self.fields[i], &self.fields[j], self.eps.weight())?;
                let target = if i == j { 1.0 } else { 0.0 };
                worst = worst.max((ip - Complex64::new(target, 0.0)).norm());
            }
        }
        Ok(worst)
    }

    /// Largest relative eigen-residual `|curl curl f - omega^2 eps f| / |eps f|`.
    pub fn max_eigen_residual(&self) -> Result<f64> {
        let mut worst = 0.0f64;
        for (omega, f) in self.iter() {
            let lhs = curl_curl(f);
            let rhs = self.eps.multiply(f)?.scaled(Complex64::new(omega * omega, 0.0));
            worst = worst.max(lhs.sub(&rhs).norm() / rhs.norm());
        }
        Ok(worst)
    }

    /// Indices of the `n` lowest modes taking one representative per
    /// degenerate cluster.
    pub fn nondegenerate_representatives(&self, n: usize) -> Vec<usize> {
        let mut out = Vec::with_capacity(n);
        let mut i = 0;
        while i < self.len() && out.len() < n {
            out.push(i);
            let mut j = i + 1;
            while j < self.len()
                && (self.omegas[j] - self.omegas[i])
                    <= self.degeneracy_tol * 0.5 * (self.omegas[i] + self.omegas[j])
            {
                j += 1;
            }
            i = j;
        }
        out
    }

    /// Mode indices whose frequency lies within the relative window of `omega`.
    pub fn cluster_near(&self, omega: f64, rel_tol: f64) -> Vec<usize> {
        (0..self.len())
            .filter(|&i| (self.omegas[i] - omega).abs() <= rel_tol * omega.max(1e-300))
            .collect()
    }
}

/// Relative residual of the generalized gauge condition,
/// `|div(eps f)| / |f|` (reference frequency 1).
pub fn transversality_residual(f: &VectorField, eps: &DielectricProfile) -> Result<f64> {
    let nf = f.norm();
    if nf == 0.0 {
        return Err(EpsError::InvalidArgument(
            "transversality residual of the zero field".into(),
        ));
    }
    let d = weighted_divergence(f, Some(eps.weight()))?;
    Ok(d.norm() / nf)
}

/// One matched candidate mode.
#[derive(Debug, Clone)]
pub struct MatchEntry {
    pub candidate: usize,
    pub reference: usize,
    pub overlap: f64,
}

/// Label assignment between two mode sets.
#[derive(Debug, Clone)]
pub struct ModeMatching {
    /// One entry per candidate mode, sorted by candidate index.
    pub entries: Vec<MatchEntry>,
    pub min_overlap: f64,
    /// True when the assignment is the identity permutation.
    pub is_identity: bool,
}

/// Assigns medium-II candidate modes to medium-I reference labels by greedy
/// descent on the eps_II-weighted overlap magnitudes.
pub fn match_modes(reference: &ModeSet, candidate: &ModeSet) -> Result<ModeMatching> {
    reference
        .grid()
        .check_same(candidate.grid(), "match_modes")?;
    if reference.len() != candidate.len() {
        return Err(EpsError::InvalidArgument(format!(
            "mode count mismatch: reference {} vs candidate {}",
            reference.len(),
            candidate.len()
        )));
    }
    let n = reference.len();
    let weight = candidate.eps().weight();
    let mut overlaps = Vec::with_capacity(n * n);
    for mu in 0..n {
        // one dealiased product per candidate, reused over all references
        let wc = weight.multiply(candidate.field(mu));
        for lambda in 0..n {
            let o = crate::geometry::plain_inner(reference.field(lambda), &wc)?;
            overlaps.push((mu, lambda, o.norm()));
        }
    }
    overlaps.sort_by(|a, b| {
        b.2.partial_cmp(&a.2)
            .unwrap_or(std::cmp::Ordering::Equal)
            .then((a.0, a.1).cmp(&(b.0, b.1)))
    });
    let mut cand_used = vec![false; n];
    let mut ref_used = vec![false; n];
    let mut entries = Vec::with_capacity(n);
    for (mu, lambda, o) in overlaps {
        if cand_used[mu] || ref_used[lambda] {
            continue;
        }
        cand_used[mu] = true;
        ref_used[lambda] = true;
        entries.push(MatchEntry {
            candidate: mu,
            reference: lambda,
            overlap: o,
        });
    }
    entries.sort_by_key(|e| e.candidate);
    let min_overlap = entries
        .iter()
        .map(|e| e.overlap)
        .fold(f64::INFINITY, f64::min);
    let is_identity = entries.iter().all(|e| e.candidate == e.reference);
    Ok(ModeMatching {
        entries,
        min_overlap,
        is_identity,
    })
}
