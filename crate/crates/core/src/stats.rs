// SPDX-License-Identifier: MIT OR Apache-2.0

//! CUSUM processes, variance estimators and test statistics.
//!
//! All processes are stored on the grid `k / T`, `k = 1..=T`, at index `k - 1`.
//! Every max/sum over the AMOC range skips `k = T`, where the process vanishes
//! and a weight with `beta > 0` is infinite.

use nalgebra::DMatrix;

use crate::model::PanelSeries;
use crate::projection::Projection;
use crate::{Error, Result};

const ZERO_VARIANCE_TOL: f64 = 1e-14;
const DEGENERATE_TOL: f64 = 1e-14;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CusumKind {
    Projected,
    ComponentZ,
}

/// Trajectory of a centered partial-sum process together with its normalizer.
#[derive(Debug, Clone, PartialEq)]
pub struct CusumProcess {
    values: Vec<f64>,
    normalizer: f64,
    kind: CusumKind,
}

impl CusumProcess {
    /// CUSUM of a univariate series, `U(k/T) = T^{-1/2} (S_k - (k/T) S_T)`.
    /// The normalizer starts at 1 until [`CusumProcess::with_normalizer`] is called.
    pub fn from_series(y: &[f64], kind: CusumKind) -> Result<Self> {
        let t = y.len();
        if t < 2 {
            return Err(Error::TooShort { needed: 2, found: t });
        }
        if y.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite("series"));
        }
        let total: f64 = y.iter().sum();
        let tf = t as f64;
        let scale = tf.sqrt();
        let mut values = Vec::with_capacity(t);
        let mut acc = 0.0;
        for (k, v) in y.iter().enumerate() {
            acc += v;
            values.push((acc - (k + 1) as f64 / tf * total) / scale);
        }
        values[t - 1] = 0.0;
        Ok(CusumProcess { values, normalizer: 1.0, kind })
    }

    /// Wraps precomputed values, e.g. for tests.
    pub fn from_values(values: Vec<f64>, normalizer: f64, kind: CusumKind) -> Result<Self> {
        if values.len() < 2 {
            return Err(Error::TooShort { needed: 2, found: values.len() });
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite("CUSUM values"));
        }
        let mut p = CusumProcess { values, normalizer: 1.0, kind };
        p = p.with_normalizer(normalizer)?;
        Ok(p)
    }

    pub fn with_normalizer(mut self, normalizer: f64) -> Result<Self> {
        if !(normalizer > 0.0) || !normalizer.is_finite() {
            return Err(Error::ZeroVariance(normalizer));
        }
        self.normalizer = normalizer;
        Ok(self)
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn normalizer(&self) -> f64 {
        self.normalizer
    }

    pub fn kind(&self) -> CusumKind {
        self.kind
    }

    /// Time length `T`.
    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }
}

/// `w(t) = (t (1 - t))^{-beta}` with `0 <= beta < 1/2`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WeightFunction {
    beta: f64,
}

impl Default for WeightFunction {
    fn default() -> Self {
        WeightFunction { beta: 0.0 }
    }
}

impl WeightFunction {
    pub fn new(beta: f64) -> Result<Self> {
        if !(0.0..0.5).contains(&beta) {
            return Err(Error::InvalidParameter(format!("weight exponent {beta} not in [0, 1/2)")));
        }
        Ok(WeightFunction { beta })
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }

    pub fn eval(&self, t: f64) -> f64 {
        if self.beta == 0.0 {
            1.0
        } else {
            (t * (1.0 - t)).powf(-self.beta)
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum AmocMode {
    /// `max_k w(k/T) |U(k/T)| / tau`.
    Max,
    /// `T^{-1} sum_k w(k/T) |U(k/T)| / tau`.
    Sum,
    /// `T^{-1} sum_k w(k/T)^2 U(k/T)^2 / tau^2`, the Cramer-von Mises type form.
    SumSquared,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum EpidemicMode {
    Max,
    Sum,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum PanelMode {
    Max,
    Int,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum VarianceMethod {
    /// Global centered second moment.
    Naive,
    /// Second moments around the two segment means left and right of the
    /// CUSUM argmax.
    SplitAtArgmax,
}

/// Outcome of a single test.
#[derive(Debug, Clone, PartialEq)]
pub struct TestResult {
    pub statistic: f64,
    pub critical_value: f64,
    pub p_value: f64,
    pub reject: bool,
    pub estimated_changepoint: Option<f64>,
}

/// The projected series `<X_t, p>`, `t = 1..=T`.
pub fn project(x: &PanelSeries, p: &Projection) -> Result<Vec<f64>> {
    if p.dim() != x.dim() {
        return Err(Error::DimensionMismatch { expected: x.dim(), found: p.dim() });
    }
    let pv = p.to_dvector();
    Ok(x.data().tr_mul(&pv).as_slice().to_vec())
}

/// `U(k/T) = <Z_T(k/T), p>`; the normalizer is left at 1.
pub fn projected_cusum(x: &PanelSeries, p: &Projection) -> Result<CusumProcess> {
    CusumProcess::from_series(&project(x, p)?, CusumKind::Projected)
}

/// Componentwise CUSUM `Z_{T,i}`.
pub fn component_cusum(x: &PanelSeries, i: usize) -> Result<CusumProcess> {
    if i >= x.dim() {
        return Err(Error::DimensionMismatch { expected: x.dim(), found: i + 1 });
    }
    CusumProcess::from_series(&x.row(i), CusumKind::ComponentZ)
}

/// `tau(p) = sqrt(p' Sigma p)`.
pub fn tau(p: &Projection, sigma: &DMatrix<f64>) -> Result<f64> {
    if sigma.nrows() != p.dim() || sigma.ncols() != p.dim() {
        return Err(Error::DimensionMismatch { expected: p.dim(), found: sigma.nrows() });
    }
    let v = p.to_dvector();
    let q = (v.transpose() * sigma * &v)[(0, 0)];
    let scale = v.norm_squared() * sigma.amax().max(f64::MIN_POSITIVE);
    if !(q > DEGENERATE_TOL * scale) {
        return Err(Error::DegenerateProjection(q));
    }
    Ok(q.sqrt())
}

fn centered_ss(y: &[f64]) -> f64 {
    if y.is_empty() {
        return 0.0;
    }
    let mean = y.iter().sum::<f64>() / y.len() as f64;
    y.iter().map(|v| (v - mean) * (v - mean)).sum()
}

fn checked_sqrt_variance(var: f64, y: &[f64]) -> Result<f64> {
    let mean_sq = y.iter().map(|v| v * v).sum::<f64>() / y.len() as f64;
    if !(var > ZERO_VARIANCE_TOL * mean_sq.max(1.0)) {
        return Err(Error::ZeroVariance(var));
    }
    Ok(var.sqrt())
}

fn check_len(y: &[f64]) -> Result<()> {
    if y.len() < 3 {
        return Err(Error::TooShort { needed: 3, found: y.len() });
    }
    Ok(())
}

/// Square root of the global centered second moment `T^{-1} sum (y_t - mean)^2`.
pub fn tau_hat1(y: &[f64]) -> Result<f64> {
    check_len(y)?;
    checked_sqrt_variance(centered_ss(y) / y.len() as f64, y)
}

/// Square root of the pooled second moment around the two segment means,
/// split at `argmax_k |U(k/T)|` (smallest index on ties).
pub fn tau_hat2(y: &[f64], u: &CusumProcess) -> Result<f64> {
    check_len(y)?;
    if u.len() != y.len() {
        return Err(Error::DimensionMismatch { expected: y.len(), found: u.len() });
    }
    let k = argmax_by(u.values(), 0, y.len(), |v| v.abs()) + 1;
    let pooled = (centered_ss(&y[..k]) + centered_ss(&y[k..])) / y.len() as f64;
    checked_sqrt_variance(pooled, y)
}

/// Index of the first maximum of `f(values[i])` over `lo..hi`.
fn argmax_by(values: &[f64], lo: usize, hi: usize, f: impl Fn(f64) -> f64) -> usize {
    let mut best = lo;
    let mut best_val = f64::NEG_INFINITY;
    for (i, &v) in values.iter().enumerate().take(hi).skip(lo) {
        let fv = f(v);
        if fv > best_val {
            best_val = fv;
            best = i;
        }
    }
    best
}

/// Estimates `tau` from the projected series.
pub fn estimate_tau(y: &[f64], u: &CusumProcess, method: VarianceMethod) -> Result<f64> {
    match method {
        VarianceMethod::Naive => tau_hat1(y),
        VarianceMethod::SplitAtArgmax => tau_hat2(y, u),
    }
}

pub fn amoc_statistic(u: &CusumProcess, w: &WeightFunction, mode: AmocMode) -> Result<f64> {
    let tau = u.normalizer();
    if !(tau > 0.0) {
        return Err(Error::ZeroVariance(tau));
    }
    let t = u.len();
    let tf = t as f64;
    let weighted = u.values()[..t - 1]
        .iter()
        .enumerate()
        .map(|(k, v)| w.eval((k + 1) as f64 / tf) * v.abs() / tau);
    Ok(match mode {
        AmocMode::Max => weighted.fold(0.0, f64::max),
        AmocMode::Sum => weighted.sum::<f64>() / tf,
        AmocMode::SumSquared => weighted.map(|v| v * v).sum::<f64>() / tf,
    })
}

/// `sum_{i<j} |x_j - x_i|` in `O(n log n)` via the sorted order.
pub(crate) fn pairwise_abs_diff_sum(values: &[f64]) -> f64 {
    let mut sorted = values.to_vec();
    sorted.sort_by(f64::total_cmp);
    let n = sorted.len() as f64;
    sorted
        .iter()
        .enumerate()
        .map(|(i, v)| (2.0 * i as f64 - n + 1.0) * v)
        .sum()
}

/// Epidemic-change statistics over `1 <= k1 < k2 <= T`.
pub fn epidemic_statistic(u: &CusumProcess, mode: EpidemicMode) -> Result<f64> {
    let tau = u.normalizer();
    if !(tau > 0.0) {
        return Err(Error::ZeroVariance(tau));
    }
    let vals = u.values();
    Ok(match mode {
        EpidemicMode::Max => {
            let (lo, hi) = vals
                .iter()
                .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &v| (lo.min(v), hi.max(v)));
            (hi - lo) / tau
        }
        EpidemicMode::Sum => {
            let tf = vals.len() as f64;
            pairwise_abs_diff_sum(vals) / (tf * tf * tau)
        }
    })
}

/// `argmax_k w^2(k/T) U^2(k/T)` over `lo <= k <= hi` (1-based, smallest on ties).
pub fn changepoint_index_in(u: &CusumProcess, w: &WeightFunction, lo: usize, hi: usize) -> Result<usize> {
    let t = u.len();
    if lo < 1 || hi > t - 1 || lo > hi {
        return Err(Error::InvalidParameter(format!("search range {lo}..={hi} invalid for T = {t}")));
    }
    let tf = t as f64;
    let mut best = 0;
    let mut best_val = 0.0;
    for k in lo..=hi {
        let wk = w.eval(k as f64 / tf);
        let v = wk * wk * u.values()[k - 1] * u.values()[k - 1];
        if v > best_val {
            best_val = v;
            best = k;
        }
    }
    if best == 0 {
        return Err(Error::AllZero);
    }
    Ok(best)
}

/// Estimated change location in rescaled time, `k_hat / T`.
pub fn changepoint_estimate(u: &CusumProcess, w: &WeightFunction) -> Result<f64> {
    let k = changepoint_index_in(u, w, 1, u.len() - 1)?;
    Ok(k as f64 / u.len() as f64)
}

/// Panel process `V(k/T) = d^{-1/2} sum_i (Z_i^2(k/T) / sigma_i^2 - k (T - k) / T^2)`.
pub fn panel_cusum(x: &PanelSeries, variances: &[f64]) -> Result<Vec<f64>> {
    let d = x.dim();
    if variances.len() != d {
        return Err(Error::DimensionMismatch { expected: d, found: variances.len() });
    }
    if let Some(index) = variances.iter().position(|&v| !(v > 0.0) || !v.is_finite()) {
        return Err(Error::NonPositiveVariance { index, value: variances[index] });
    }
    let t = x.len();
    let tf = t as f64;
    let data = x.data();
    let mut acc = vec![0.0; t];
    let mut z = vec![0.0; t];
    for (i, &var) in variances.iter().enumerate() {
        let row = data.row(i);
        let total: f64 = row.iter().sum();
        let mut s = 0.0;
        for k in 0..t {
            s += row[k];
            z[k] = (s - (k + 1) as f64 / tf * total) / tf.sqrt();
        }
        for k in 0..t {
            acc[k] += z[k] * z[k] / var;
        }
    }
    let root_d = (d as f64).sqrt();
    let mut v: Vec<f64> = acc
        .iter()
        .enumerate()
        .map(|(k, a)| {
            let kk = (k + 1) as f64;
            (a - d as f64 * kk * (tf - kk) / (tf * tf)) / root_d
        })
        .collect();
    v[t - 1] = 0.0;
    Ok(v)
}

/// Max or Riemann integral of the panel process over `k = 1..T-1`.
pub fn panel_statistic(v: &[f64], mode: PanelMode) -> f64 {
    if v.len() < 2 {
        return 0.0;
    }
    let interior = &v[..v.len() - 1];
    match mode {
        PanelMode::Max => interior.iter().copied().fold(f64::NEG_INFINITY, f64::max),
        PanelMode::Int => interior.iter().sum::<f64>() / v.len() as f64,
    }
}

/// Per-component variance estimates.
pub fn component_variances(x: &PanelSeries, method: VarianceMethod) -> Result<Vec<f64>> {
    (0..x.dim())
        .map(|i| {
            let y = x.row(i);
            let tau = match method {
                VarianceMethod::Naive => tau_hat1(&y)?,
                VarianceMethod::SplitAtArgmax => {
                    let u = CusumProcess::from_series(&y, CusumKind::ComponentZ)?;
                    tau_hat2(&y, &u)?
                }
            };
            Ok(tau * tau)
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn cusum(y: &[f64]) -> CusumProcess {
        CusumProcess::from_series(y, CusumKind::Projected).unwrap()
    }

    fn assert_slice_eq(a: &[f64], b: &[f64], eps: f64) {
        assert_eq!(a.len(), b.len());
        for (x, y) in a.iter().zip(b) {
            assert_abs_diff_eq!(x, y, epsilon = eps);
        }
    }

    #[test]
    fn projected_cusum_by_hand() {
        let x = PanelSeries::univariate(&[0.0, 0.0, 1.0, 1.0]).unwrap();
        let p = Projection::custom(vec![1.0]).unwrap();
        let u = projected_cusum(&x, &p).unwrap();
        assert_slice_eq(u.values(), &[-0.25, -0.5, -0.25, 0.0], 1e-15);
        assert_eq!(u.values()[3], 0.0);

        let c = cusum(&[3.0; 7]);
        assert!(c.values().iter().all(|v| v.abs() < 1e-14));

        let shifted = cusum(&[5.0, 5.0, 6.0, 6.0]);
        assert_slice_eq(shifted.values(), u.values(), 1e-14);
    }

    #[test]
    fn projected_cusum_dimension_check() {
        let x = PanelSeries::from_rows(&[vec![1.0, 2.0], vec![3.0, 4.0]]).unwrap();
        let p = Projection::custom(vec![1.0]).unwrap();
        assert!(matches!(projected_cusum(&x, &p), Err(Error::DimensionMismatch { .. })));
    }

    #[test]
    fn tau_examples() {
        let i = DMatrix::identity(2, 2);
        assert_abs_diff_eq!(tau(&Projection::custom(vec![1.0, 0.0]).unwrap(), &i).unwrap(), 1.0);
        let s = DMatrix::from_row_slice(2, 2, &[1.0, 0.5, 0.5, 1.0]);
        let p = Projection::custom(vec![1.0, 1.0]).unwrap();
        assert_abs_diff_eq!(tau(&p, &s).unwrap(), 3f64.sqrt(), epsilon = 1e-14);
        assert_abs_diff_eq!(
            tau(&p.scaled(-2.5).unwrap(), &s).unwrap(),
            2.5 * 3f64.sqrt(),
            epsilon = 1e-13
        );
        let rank_one = DMatrix::from_row_slice(2, 2, &[1.0, 1.0, 1.0, 1.0]);
        let orth = Projection::custom(vec![1.0, -1.0]).unwrap();
        assert!(matches!(tau(&orth, &rank_one), Err(Error::DegenerateProjection(_))));
    }

    #[test]
    fn variance_estimators() {
        let y = [1.0, -1.0, 1.0, -1.0];
        assert_abs_diff_eq!(tau_hat1(&y).unwrap(), 1.0, epsilon = 1e-15);
        let y = [0.0, 0.0, 1.0, 1.0];
        assert_abs_diff_eq!(tau_hat1(&y).unwrap().powi(2), 0.25, epsilon = 1e-15);
        assert!(matches!(tau_hat2(&y, &cusum(&y)), Err(Error::ZeroVariance(_))));
        let c = [2.0; 5];
        assert!(matches!(tau_hat1(&c), Err(Error::ZeroVariance(_))));
        assert!(matches!(tau_hat2(&c, &cusum(&c)), Err(Error::ZeroVariance(_))));
        assert!(matches!(tau_hat1(&[1.0, 2.0]), Err(Error::TooShort { .. })));
    }

    #[test]
    fn tau_hat2_removes_one_mean_shift() {
        let y = [0.0, 1.0, 0.0, 1.0, 5.0, 6.0, 5.0, 6.0];
        let t2 = tau_hat2(&y, &cusum(&y)).unwrap();
        assert_abs_diff_eq!(t2 * t2, 0.25, epsilon = 1e-14);
        assert!(tau_hat1(&y).unwrap() > 2.0);
    }

    #[test]
    fn amoc_examples() {
        let u = CusumProcess::from_values(vec![-0.25, -0.5, -0.25, 0.0], 1.0, CusumKind::Projected)
            .unwrap();
        let flat = WeightFunction::default();
        assert_abs_diff_eq!(amoc_statistic(&u, &flat, AmocMode::Max).unwrap(), 0.5);
        assert_abs_diff_eq!(amoc_statistic(&u, &flat, AmocMode::Sum).unwrap(), 0.25, epsilon = 1e-15);
        assert_abs_diff_eq!(
            amoc_statistic(&u, &flat, AmocMode::SumSquared).unwrap(),
            (0.0625 + 0.25 + 0.0625) / 4.0,
            epsilon = 1e-15
        );
        let w = WeightFunction::new(0.25).unwrap();
        assert_abs_diff_eq!(w.eval(0.5), 2f64.sqrt(), epsilon = 1e-12);
        assert!(WeightFunction::new(0.5).is_err());
        let u2 = u.clone().with_normalizer(2.0).unwrap();
        assert_abs_diff_eq!(amoc_statistic(&u2, &flat, AmocMode::Max).unwrap(), 0.25);
    }

    #[test]
    fn epidemic_examples() {
        let u = cusum(&[0.0, 1.0, 1.0, 0.0]);
        assert_slice_eq(u.values(), &[-0.25, 0.0, 0.25, 0.0], 1e-15);
        assert_abs_diff_eq!(epidemic_statistic(&u, EpidemicMode::Max).unwrap(), 0.5, epsilon = 1e-15);
        let c = cusum(&[1.0; 6]);
        assert_abs_diff_eq!(epidemic_statistic(&c, EpidemicMode::Max).unwrap(), 0.0, epsilon = 1e-14);
        assert_abs_diff_eq!(epidemic_statistic(&c, EpidemicMode::Sum).unwrap(), 0.0, epsilon = 1e-14);
        let vals = vec![0.3, -0.2, 0.9, 0.1, 0.0];
        let shifted: Vec<f64> = vals.iter().map(|v| v + 7.0).collect();
        for mode in [EpidemicMode::Max, EpidemicMode::Sum] {
            let a = CusumProcess::from_values(vals.clone(), 1.0, CusumKind::Projected).unwrap();
            let b = CusumProcess::from_values(shifted.clone(), 1.0, CusumKind::Projected).unwrap();
            assert_abs_diff_eq!(
                epidemic_statistic(&a, mode).unwrap(),
                epidemic_statistic(&b, mode).unwrap(),
                epsilon = 1e-12
            );
        }
    }

    #[test]
    fn epidemic_sum_matches_brute_force() {
        let vals: [f64; 7] = [0.4, -1.3, 2.2, 0.0, 0.7, -0.1, 0.0];
        let mut brute = 0.0_f64;
        for i in 0..vals.len() {
            for j in (i + 1)..vals.len() {
                brute += (vals[j] - vals[i]).abs();
            }
        }
        let u = CusumProcess::from_values(vals.to_vec(), 1.0, CusumKind::Projected).unwrap();
        assert_abs_diff_eq!(
            epidemic_statistic(&u, EpidemicMode::Sum).unwrap(),
            brute / 49.0,
            epsilon = 1e-12
        );
    }

    #[test]
    fn changepoint_examples() {
        let u = cusum(&[0.0, 0.0, 1.0, 1.0]);
        let flat = WeightFunction::default();
        assert_abs_diff_eq!(changepoint_estimate(&u, &flat).unwrap(), 0.5);

        let t = 1000;
        let y: Vec<f64> = (1..=t).map(|k| if k as f64 / t as f64 > 0.3 { 1.0 } else { 0.0 }).collect();
        let est = changepoint_estimate(&cusum(&y), &flat).unwrap();
        assert!((est - 0.3).abs() <= 1.0 / t as f64);

        let two_peak =
            CusumProcess::from_values(vec![0.5, 0.0, -0.5, 0.0, 0.0], 1.0, CusumKind::Projected)
                .unwrap();
        assert_abs_diff_eq!(changepoint_estimate(&two_peak, &flat).unwrap(), 0.2);

        let zero = CusumProcess::from_values(vec![0.0; 4], 1.0, CusumKind::Projected).unwrap();
        assert_eq!(changepoint_estimate(&zero, &flat), Err(Error::AllZero));
    }

    #[test]
    fn panel_examples() {
        let x = PanelSeries::univariate(&[1.0, -1.0]).unwrap();
        let v = panel_cusum(&x, &[1.0]).unwrap();
        assert_abs_diff_eq!(v[0], 0.25, epsilon = 1e-15);
        assert_eq!(v[1], 0.0);
        assert_abs_diff_eq!(panel_statistic(&v, PanelMode::Max), 0.25, epsilon = 1e-15);

        let rows = vec![vec![0.3, -1.0, 2.0, 0.5, 1.1], vec![1.0, 0.0, -0.4, 0.2, 0.9]];
        let x = PanelSeries::from_rows(&rows).unwrap();
        let v1 = panel_cusum(&x, &[1.0, 2.0]).unwrap();
        let doubled: Vec<Vec<f64>> = rows.iter().map(|r| r.iter().map(|v| 2.0 * v).collect()).collect();
        let v2 = panel_cusum(&PanelSeries::from_rows(&doubled).unwrap(), &[4.0, 8.0]).unwrap();
        assert_slice_eq(&v1, &v2, 1e-12);
        assert_eq!(*v1.last().unwrap(), 0.0);

        assert_eq!(panel_statistic(&[0.0; 5], PanelMode::Max), 0.0);
        assert_eq!(panel_statistic(&[0.0; 5], PanelMode::Int), 0.0);
        assert_abs_diff_eq!(panel_statistic(&[1.0, 1.0, 1.0, 0.0], PanelMode::Int), 0.75);
        assert!(matches!(
            panel_cusum(&x, &[1.0, 0.0]),
            Err(Error::NonPositiveVariance { index: 1, .. })
        ));
    }

    #[test]
    fn component_variance_examples() {
        let x = PanelSeries::from_rows(&[vec![1.0, -1.0, 1.0, -1.0], vec![0.0, 0.0, 1.0, 1.0]]).unwrap();
        let naive = component_variances(&x, VarianceMethod::Naive).unwrap();
        assert_slice_eq(&naive, &[1.0, 0.25], 1e-15);
        assert!(matches!(
            component_variances(&x, VarianceMethod::SplitAtArgmax),
            Err(Error::ZeroVariance(_))
        ));
        let c = PanelSeries::univariate(&[4.0; 6]).unwrap();
        assert!(component_variances(&c, VarianceMethod::Naive).is_err());
    }
}
