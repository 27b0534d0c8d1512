// SPDX-License-Identifier: MIT OR Apache-2.0

//! Closed-form high-dimensional efficiencies.
//!
//! A test has efficiency `E(Delta)` when its power tends to one exactly when
//! `sqrt(T) E(Delta) -> infinity`. Larger is better; the values below are the
//! canonical representatives of their rate classes.

use nalgebra::DMatrix;

use crate::model::{ErrorStructure, Loadings};
use crate::projection::{inverse_sqrt, spd_solve, Projection};
use crate::stats::tau;
use crate::{Error, Result};

const PROPORTIONAL_TOL: f64 = 1e-10;
const ZERO_DEPENDENCE_TOL: f64 = 1e-14;

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

fn check_variances(v: &[f64]) -> Result<()> {
    match v.iter().position(|&x| !(x > 0.0) || !x.is_finite()) {
        Some(index) => Err(Error::NonPositiveVariance { index, value: v[index] }),
        None => Ok(()),
    }
}

fn check_dim(expected: usize, found: usize) -> Result<()> {
    if expected == found {
        Ok(())
    } else {
        Err(Error::DimensionMismatch { expected, found })
    }
}

/// Projection efficiency `|<Delta, p>| / tau(p)`.
pub fn eff_projection(delta: &[f64], p: &Projection, sigma: &DMatrix<f64>) -> Result<f64> {
    check_dim(p.dim(), delta.len())?;
    Ok(dot(delta, p.vector()).abs() / tau(p, sigma)?)
}

/// Oracle efficiency `||Sigma^{-1/2} Delta||`, the maximum over all projections.
pub fn eff_oracle(delta: &[f64], sigma: &DMatrix<f64>) -> Result<f64> {
    let x = spd_solve(sigma, delta)?;
    Ok(dot(delta, x.as_slice()).max(0.0).sqrt())
}

/// Cosine of the angle between `Sigma^{-1/2} Delta` and `Sigma^{1/2} p`. The
/// projection efficiency equals the oracle efficiency times its absolute value.
pub fn projection_cosine(delta: &[f64], p: &Projection, sigma: &DMatrix<f64>) -> Result<f64> {
    check_dim(p.dim(), delta.len())?;
    let root_inv = inverse_sqrt(sigma)?;
    let a = &root_inv * nalgebra::DVector::from_column_slice(delta);
    let root = sigma * &root_inv;
    let b = root * p.to_dvector();
    let denom = a.norm() * b.norm();
    if denom == 0.0 {
        return Err(Error::ZeroChange);
    }
    Ok(a.dot(&b) / denom)
}

/// Oracle efficiency under `Sigma = diag(s^2) + Phi Phi^T` when `Delta` is a
/// multiple of `Phi`.
pub fn eff_mixed_oracle(delta: &[f64], s: &[f64], phi: &[f64]) -> Result<f64> {
    check_dim(delta.len(), s.len())?;
    check_dim(delta.len(), phi.len())?;
    let s2: Vec<f64> = s.iter().map(|x| x * x).collect();
    check_variances(&s2)?;
    let (nd, np) = (norm(delta), norm(phi));
    if nd == 0.0 {
        return Err(Error::ZeroChange);
    }
    let cos = if np == 0.0 { 0.0 } else { dot(delta, phi) / (nd * np) };
    if cos.abs() < 1.0 - PROPORTIONAL_TOL {
        return Err(Error::NotProportional(cos));
    }
    let contamination: f64 = phi.iter().zip(&s2).map(|(f, v)| f * f / v).sum();
    let scaled: f64 = delta.iter().zip(&s2).map(|(x, v)| x * x / v).sum();
    Ok(nd / (1.0 + contamination).sqrt() * (scaled / (nd * nd)).sqrt())
}

/// Panel efficiency `d^{-1/4} ||diag(sigma^2)^{-1/2} Delta||` for independent components.
pub fn eff_panel(delta: &[f64], variances: &[f64]) -> Result<f64> {
    check_dim(delta.len(), variances.len())?;
    check_variances(variances)?;
    let d = delta.len() as f64;
    let q: f64 = delta.iter().zip(variances).map(|(x, v)| x * x / v).sum();
    Ok(d.powf(-0.25) * q.sqrt())
}

/// `A_d = sum Phi_i^2 / (s_i^2 + Phi_i^2)`, the aggregate contamination of the
/// common factor in the panel statistic.
pub fn aggregate_contamination(s: &[f64], phi: &[f64]) -> Result<f64> {
    check_dim(s.len(), phi.len())?;
    let var: Vec<f64> = s.iter().zip(phi).map(|(s, f)| s * s + f * f).collect();
    check_variances(&var)?;
    Ok(phi.iter().zip(&var).map(|(f, v)| f * f / v).sum())
}

/// Efficiency `(e3, A_d)` of the panel statistic under a common factor it ignores.
pub fn eff_panel_misspecified(delta: &[f64], s: &[f64], phi: &[f64]) -> Result<(f64, f64)> {
    check_dim(delta.len(), s.len())?;
    let s2: Vec<f64> = s.iter().map(|x| x * x).collect();
    check_variances(&s2)?;
    let a_d = aggregate_contamination(s, phi)?;
    if a_d <= ZERO_DEPENDENCE_TOL {
        return Err(Error::ZeroDependence(a_d));
    }
    let q: f64 = delta
        .iter()
        .zip(s2.iter().zip(phi))
        .map(|(x, (v, f))| x * x / (v + f * f))
        .sum();
    Ok(((q / a_d).sqrt(), a_d))
}

/// Half-angle of the cone of change directions, measured between
/// `Sigma^{1/2} p` and `Sigma^{-1/2} Delta`, inside which a projection beats
/// the panel statistic: `arccos(d^{-1/4})`.
pub fn detection_cone(d: usize) -> Result<f64> {
    if d == 0 {
        return Err(Error::InvalidParameter("dimension must be at least 1".into()));
    }
    Ok((d as f64).powf(-0.25).acos())
}

/// `||M^{-1/2} Delta||^2 / tr(M^{-1/2} Sigma M^{-1/2})`, the scale of the
/// squared efficiency of the random projection `M^{-1/2} r`.
pub fn eff_random_scale(delta: &[f64], sigma: &DMatrix<f64>, m: &DMatrix<f64>) -> Result<f64> {
    check_dim(m.nrows(), delta.len())?;
    check_dim(m.nrows(), sigma.nrows())?;
    let num = dot(delta, spd_solve(m, delta)?.as_slice());
    let root_inv = inverse_sqrt(m)?;
    let trace = (&root_inv * sigma * &root_inv).trace();
    if !(trace > 0.0) {
        return Err(Error::DegenerateProjection(trace));
    }
    Ok(num / trace)
}

/// Efficiencies of the main procedures for one change and covariance.
#[derive(Debug, Clone, PartialEq)]
pub struct EfficiencyReport {
    pub e1: Option<f64>,
    pub e_oracle: f64,
    pub e2: f64,
    pub e3: Option<f64>,
    pub a_d: Option<f64>,
    pub cone_halfangle: f64,
}

impl EfficiencyReport {
    /// `key=value` lines in a fixed order; undefined entries print as `NA`.
    pub fn to_key_values(&self) -> String {
        let opt = |v: Option<f64>| v.map_or_else(|| "NA".to_string(), |x| x.to_string());
        format!(
            "e1={}\ne_oracle={}\ne2={}\ne3={}\nA_d={}\ncone_halfangle={}\n",
            opt(self.e1),
            self.e_oracle,
            self.e2,
            opt(self.e3),
            opt(self.a_d),
            self.cone_halfangle
        )
    }
}

/// Report for an explicit covariance. `mixed = Some((s, phi))` adds the
/// misspecified panel efficiency; it stays `None` when the factor is absent.
pub fn report(
    delta: &[f64],
    sigma: &DMatrix<f64>,
    p: Option<&Projection>,
    mixed: Option<(&[f64], &[f64])>,
) -> Result<EfficiencyReport> {
    let d = delta.len();
    check_dim(sigma.nrows(), d)?;
    let e1 = p.map(|p| eff_projection(delta, p, sigma)).transpose()?;
    let e_oracle = eff_oracle(delta, sigma)?;
    let variances: Vec<f64> = sigma.diagonal().iter().copied().collect();
    let e2 = eff_panel(delta, &variances)?;
    let (e3, a_d) = match mixed {
        Some((s, phi)) => match eff_panel_misspecified(delta, s, phi) {
            Ok((e3, a)) => (Some(e3), Some(a)),
            Err(Error::ZeroDependence(a)) => (None, Some(a)),
            Err(e) => return Err(e),
        },
        None => (None, None),
    };
    Ok(EfficiencyReport { e1, e_oracle, e2, e3, a_d, cone_halfangle: detection_cone(d)? })
}

/// Report for a factor-model error structure.
pub fn report_for(delta: &[f64], structure: &ErrorStructure, p: Option<&Projection>) -> Result<EfficiencyReport> {
    let sigma = structure.covariance();
    match structure.loadings() {
        Loadings::Mixed { s, phi } => report(delta, &sigma, p, Some((s, phi))),
        _ => report(delta, &sigma, p, None),
    }
}
