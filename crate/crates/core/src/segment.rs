// SPDX-License-Identifier: MIT OR Apache-2.0

//! Binary segmentation for multiple changes and the log-squared-return
//! transform used for volatility changes in price data.

use crate::detector::Detector;
use crate::limits::NullDistribution;
use crate::model::PanelSeries;
use crate::{Error, Result};

/// Default perturbation factor of [`fuller_transform`].
pub const DEFAULT_FULLER_TAU: f64 = 0.02;
pub const MIN_SEGMENT: usize = 5;

/// Modified log squared returns `y_t = log(r_t^2 + c) - c / (r_t^2 + c)` with
/// `r_t = log(P_t / P_{t-1})` and `c = tau_f s^2`, `s^2` the sample variance of
/// the returns. Returns `T - 1` values; all zeros when the returns are constant.
pub fn fuller_transform(prices: &[f64], tau_f: f64) -> Result<Vec<f64>> {
    if prices.len() < 3 {
        return Err(Error::TooShort { needed: 3, found: prices.len() });
    }
    if let Some(index) = prices.iter().position(|&p| !(p > 0.0) || !p.is_finite()) {
        return Err(Error::NonPositivePrice { index, value: prices[index] });
    }
    if !(tau_f > 0.0) || !tau_f.is_finite() {
        return Err(Error::InvalidParameter(format!("perturbation factor {tau_f} must be positive")));
    }
    let r: Vec<f64> = prices.windows(2).map(|w| (w[1] / w[0]).ln()).collect();
    let n = r.len() as f64;
    let mean = r.iter().sum::<f64>() / n;
    let s2 = r.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0);
    let c = tau_f * s2;
    if c == 0.0 {
        return Ok(vec![0.0; r.len()]);
    }
    Ok(r.iter()
        .map(|v| {
            let a = v * v + c;
            a.ln() - c / a
        })
        .collect())
}

/// [`fuller_transform`] applied to every component of a price panel.
pub fn fuller_transform_panel(prices: &PanelSeries, tau_f: f64) -> Result<PanelSeries> {
    let rows = (0..prices.dim())
        .map(|i| fuller_transform(&prices.row(i), tau_f))
        .collect::<Result<Vec<_>>>()?;
    PanelSeries::from_rows(&rows)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SegmentationConfig {
    pub level: f64,
    pub min_segment: usize,
}

impl Default for SegmentationConfig {
    fn default() -> Self {
        SegmentationConfig { level: 0.05, min_segment: 10 }
    }
}

impl SegmentationConfig {
    pub fn new(level: f64, min_segment: usize) -> Result<Self> {
        if !(level > 0.0 && level < 1.0) {
            return Err(Error::InvalidParameter(format!("level {level} not in (0, 1)")));
        }
        if min_segment < MIN_SEGMENT {
            return Err(Error::InvalidParameter(format!("min_segment {min_segment} below {MIN_SEGMENT}")));
        }
        Ok(SegmentationConfig { level, min_segment })
    }
}

/// One accepted split. The first `location` observations lie before the change.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DetectedChange {
    pub location: usize,
    pub statistic: f64,
    pub p_value: f64,
    /// Recursion depth, 0 for the split of the full sample.
    pub depth: usize,
    /// Detection order, 0 for the first split found.
    pub order: usize,
}

/// Changes sorted by location.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct SegmentationResult {
    pub changes: Vec<DetectedChange>,
}

impl SegmentationResult {
    pub fn locations(&self) -> Vec<usize> {
        self.changes.iter().map(|c| c.location).collect()
    }

    pub fn is_empty(&self) -> bool {
        self.changes.is_empty()
    }

    pub fn len(&self) -> usize {
        self.changes.len()
    }
}

/// Recursively tests `[start, end)` segments, splitting at the estimated change
/// restricted to leave `min_segment` points on both sides. Segments shorter than
/// `2 min_segment` are not tested. A segment whose variance estimate degenerates
/// counts as accepted.
pub fn binary_segmentation(
    x: &PanelSeries,
    detector: &Detector,
    null: &NullDistribution,
    config: SegmentationConfig,
) -> Result<SegmentationResult> {
    let config = SegmentationConfig::new(config.level, config.min_segment)?;
    let m = config.min_segment;
    let mut changes = Vec::new();
    let mut stack = vec![(0usize, x.len(), 0usize)];
    while let Some((start, end, depth)) = stack.pop() {
        let n = end - start;
        if n < 2 * m {
            continue;
        }
        let segment = x.slice(start, end)?;
        let eval = match detector.evaluate(&segment) {
            Ok(e) => e,
            Err(Error::ZeroVariance(_)) | Err(Error::AllZero) => continue,
            Err(e) => return Err(e),
        };
        let p_value = null.p_value(eval.statistic);
        if !(p_value <= config.level) {
            continue;
        }
        let Some(k) = eval.changepoint_in(m, n - m) else {
            continue;
        };
        changes.push(DetectedChange { location: start + k, statistic: eval.statistic, p_value, depth, order: changes.len() });
        stack.push((start + k, end, depth + 1));
        stack.push((start, start + k, depth + 1));
    }
    changes.sort_by_key(|c| c.location);
    Ok(SegmentationResult { changes })
}
