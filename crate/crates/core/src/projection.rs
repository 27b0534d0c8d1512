// SPDX-License-Identifier: MIT OR Apache-2.0

//! Projection vectors and the spectral matrix functions they need.

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use rand::Rng;
use rand_distr::StandardNormal;

use crate::{Error, Result};

const SYMMETRY_TOL: f64 = 1e-10;
const RELATIVE_EIGEN_TOL: f64 = 1e-12;

/// How a projection vector was obtained.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Provenance {
    Oracle,
    PreOracle,
    QuasiOracle,
    ScaledSearch,
    RandomUnit,
    ScaledRandom,
    MisscaledOracle,
    Custom,
}

/// A search direction `p`. Only its direction matters to the statistics.
#[derive(Debug, Clone, PartialEq)]
pub struct Projection {
    vector: Vec<f64>,
    provenance: Provenance,
}

impl Projection {
    pub fn new(vector: Vec<f64>, provenance: Provenance) -> Result<Self> {
        if vector.is_empty() {
            return Err(Error::InvalidParameter("projection has no entries".into()));
        }
        if vector.iter().any(|x| !x.is_finite()) {
            return Err(Error::NonFinite("projection"));
        }
        if vector.iter().all(|&x| x == 0.0) {
            return Err(Error::InvalidParameter("projection vector is zero".into()));
        }
        Ok(Projection { vector, provenance })
    }

    pub fn custom(vector: Vec<f64>) -> Result<Self> {
        Self::new(vector, Provenance::Custom)
    }

    pub fn vector(&self) -> &[f64] {
        &self.vector
    }

    pub fn provenance(&self) -> Provenance {
        self.provenance
    }

    pub fn dim(&self) -> usize {
        self.vector.len()
    }

    pub fn to_dvector(&self) -> DVector<f64> {
        DVector::from_column_slice(&self.vector)
    }

    /// `c * p` with the same provenance.
    pub fn scaled(&self, c: f64) -> Result<Self> {
        Self::new(self.vector.iter().map(|x| c * x).collect(), self.provenance)
    }
}

fn check_square_symmetric(m: &DMatrix<f64>) -> Result<()> {
    if !m.is_square() {
        return Err(Error::DimensionMismatch { expected: m.nrows(), found: m.ncols() });
    }
    if m.iter().any(|x| !x.is_finite()) {
        return Err(Error::NonFinite("matrix"));
    }
    let scale = m.amax().max(1.0);
    let asym = (m - m.transpose()).amax();
    if asym > SYMMETRY_TOL * scale {
        return Err(Error::NotSymmetric(asym));
    }
    Ok(())
}

/// Eigen-decomposition of a symmetric positive-definite matrix. Eigenvalues
/// at or below `1e-12` times the largest are treated as zero.
fn spd_eigen(m: &DMatrix<f64>) -> Result<SymmetricEigen<f64, nalgebra::Dyn>> {
    check_square_symmetric(m)?;
    let sym = (m + m.transpose()) * 0.5;
    let eig = sym.symmetric_eigen();
    let max = eig.eigenvalues.max();
    let min = eig.eigenvalues.min();
    if max <= 0.0 || min <= RELATIVE_EIGEN_TOL * max {
        return Err(Error::NotPositiveDefinite { min_eigenvalue: min });
    }
    Ok(eig)
}

fn spectral_map(eig: &SymmetricEigen<f64, nalgebra::Dyn>, f: impl Fn(f64) -> f64) -> DMatrix<f64> {
    let v = &eig.eigenvectors;
    let mut scaled = v.clone();
    for (j, &l) in eig.eigenvalues.iter().enumerate() {
        let fl = f(l);
        scaled.column_mut(j).iter_mut().for_each(|x| *x *= fl);
    }
    let r = scaled * v.transpose();
    (&r + r.transpose()) * 0.5
}

/// `M^{-1/2}` via the spectral decomposition of a symmetric positive-definite `M`.
pub fn inverse_sqrt(m: &DMatrix<f64>) -> Result<DMatrix<f64>> {
    let eig = spd_eigen(m)?;
    Ok(spectral_map(&eig, |l| 1.0 / l.sqrt()))
}

/// `M^{1/2}` for a symmetric positive-definite `M`.
pub fn sqrt_spd(m: &DMatrix<f64>) -> Result<DMatrix<f64>> {
    let eig = spd_eigen(m)?;
    Ok(spectral_map(&eig, f64::sqrt))
}

/// Solves `M x = b` for symmetric positive-definite `M` without forming `M^{-1}`.
pub fn spd_solve(m: &DMatrix<f64>, b: &[f64]) -> Result<DVector<f64>> {
    if b.len() != m.nrows() {
        return Err(Error::DimensionMismatch { expected: m.nrows(), found: b.len() });
    }
    let eig = spd_eigen(m)?;
    let rhs = DVector::from_column_slice(b);
    match m.clone().cholesky() {
        Some(chol) => Ok(chol.solve(&rhs)),
        None => {
            // positive definite up to rounding: fall back to the spectral solve
            let vt_b = eig.eigenvectors.transpose() * rhs;
            let scaled = vt_b.component_div(&eig.eigenvalues);
            Ok(&eig.eigenvectors * scaled)
        }
    }
}

fn nonzero_change(delta: &[f64]) -> Result<()> {
    if delta.iter().any(|x| !x.is_finite()) {
        return Err(Error::NonFinite("change"));
    }
    if delta.iter().all(|&x| x == 0.0) {
        return Err(Error::ZeroChange);
    }
    Ok(())
}

/// `Sigma^{-1} Delta`, the efficiency-maximising direction.
pub fn oracle(sigma: &DMatrix<f64>, delta: &[f64]) -> Result<Projection> {
    nonzero_change(delta)?;
    let o = spd_solve(sigma, delta)?;
    Projection::new(o.as_slice().to_vec(), Provenance::Oracle)
}

/// The change itself as direction (identity covariance assumed).
pub fn pre_oracle(delta: &[f64]) -> Result<Projection> {
    nonzero_change(delta)?;
    Projection::new(delta.to_vec(), Provenance::PreOracle)
}

/// `diag(sigma^2)^{-1} Delta`: the oracle under an assumed diagonal covariance.
pub fn quasi_oracle(variances: &[f64], delta: &[f64]) -> Result<Projection> {
    nonzero_change(delta)?;
    if variances.len() != delta.len() {
        return Err(Error::DimensionMismatch { expected: delta.len(), found: variances.len() });
    }
    if let Some(index) = variances.iter().position(|&v| !(v > 0.0)) {
        return Err(Error::NonPositiveVariance { index, value: variances[index] });
    }
    let q = delta.iter().zip(variances).map(|(d, v)| d / v).collect();
    Projection::new(q, Provenance::QuasiOracle)
}

/// `M^{-1} Delta` for an assumed (possibly wrong) covariance `M`.
pub fn misscaled_oracle(m: &DMatrix<f64>, delta: &[f64]) -> Result<Projection> {
    nonzero_change(delta)?;
    let o = spd_solve(m, delta)?;
    Projection::new(o.as_slice().to_vec(), Provenance::MisscaledOracle)
}

/// Uniform direction on the unit sphere (normalised Gaussian vector).
pub fn random_unit<R: Rng + ?Sized>(d: usize, rng: &mut R) -> Result<Projection> {
    if d == 0 {
        return Err(Error::InvalidParameter("dimension must be at least 1".into()));
    }
    loop {
        let mut v: Vec<f64> = (0..d).map(|_| rng.sample(StandardNormal)).collect();
        let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        if norm > 0.0 {
            v.iter_mut().for_each(|x| *x /= norm);
            return Projection::new(v, Provenance::RandomUnit);
        }
    }
}

/// `M^{-1/2} r` for a uniform unit vector `r`. With `M = Sigma` this is the
/// correctly scaled random projection, otherwise the misscaled one.
pub fn scaled_random<R: Rng + ?Sized>(m: &DMatrix<f64>, rng: &mut R) -> Result<Projection> {
    let root = inverse_sqrt(m)?;
    let r = random_unit(m.nrows(), rng)?;
    let v = root * r.to_dvector();
    Projection::new(v.as_slice().to_vec(), Provenance::ScaledRandom)
}

/// `M^{-1} s` for a search direction `s`.
pub fn scaled_search(m: &DMatrix<f64>, s: &[f64]) -> Result<Projection> {
    nonzero_change(s)?;
    let v = spd_solve(m, s)?;
    Projection::new(v.as_slice().to_vec(), Provenance::ScaledSearch)
}

fn norm(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

/// A fixed unit vector orthogonal to `reference`, obtained by Gram-Schmidt
/// from the alternating-sign vector, falling back to the coordinate axes.
pub fn orthogonal_complement(reference: &[f64]) -> Result<Vec<f64>> {
    let d = reference.len();
    if d < 2 {
        return Err(Error::InvalidParameter("orthogonal complement needs d >= 2".into()));
    }
    let rn = norm(reference);
    if rn == 0.0 {
        return Err(Error::ZeroChange);
    }
    let unit: Vec<f64> = reference.iter().map(|x| x / rn).collect();
    let alternating = (0..d).map(|i| if i % 2 == 0 { 1.0 } else { -1.0 }).collect::<Vec<_>>();
    let candidates = std::iter::once(alternating).chain((0..d).map(|k| {
        let mut e = vec![0.0; d];
        e[k] = 1.0;
        e
    }));
    for mut c in candidates {
        let dot: f64 = c.iter().zip(&unit).map(|(a, b)| a * b).sum();
        c.iter_mut().zip(&unit).for_each(|(a, b)| *a -= dot * b);
        let n = norm(&c);
        if n > 1e-8 * (d as f64).sqrt() {
            c.iter_mut().for_each(|a| *a /= n);
            return Ok(c);
        }
    }
    unreachable!("some coordinate axis is never parallel to a vector in d >= 2")
}

/// Unit vector at `angle` radians from `reference`, rotated within the plane
/// spanned by `reference` and [`orthogonal_complement`].
pub fn direction_at_angle(reference: &[f64], angle: f64) -> Result<Vec<f64>> {
    let ortho = orthogonal_complement(reference)?;
    let rn = norm(reference);
    let (s, c) = angle.sin_cos();
    Ok(reference
        .iter()
        .zip(&ortho)
        .map(|(r, o)| c * r / rn + s * o)
        .collect())
}
