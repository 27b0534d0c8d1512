// SPDX-License-Identifier: MIT OR Apache-2.0

//! Ready-to-run tests: a statistic, its variance policy and its null law.

use nalgebra::DMatrix;

use crate::limits::{LimitLaw, NullDistribution};
use crate::model::PanelSeries;
use crate::projection::Projection;
use crate::stats::{
    self, amoc_statistic, component_variances, epidemic_statistic, estimate_tau, panel_cusum, panel_statistic,
    project, AmocMode, CusumKind, CusumProcess, EpidemicMode, PanelMode, TestResult, VarianceMethod,
    WeightFunction,
};
use crate::Result;

/// How the long-run scale of the projected series is obtained.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum TauPolicy {
    Known(f64),
    Estimated(VarianceMethod),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ProjectionStatistic {
    Amoc(AmocMode),
    Epidemic(EpidemicMode),
}

/// Projection CUSUM test along a fixed direction.
#[derive(Debug, Clone, PartialEq)]
pub struct ProjectionDetector {
    pub projection: Projection,
    pub tau: TauPolicy,
    pub weight: WeightFunction,
    pub statistic: ProjectionStatistic,
}

impl ProjectionDetector {
    /// AMOC max-type test with `beta = 0` and the given variance policy.
    pub fn new(projection: Projection, tau: TauPolicy) -> Self {
        ProjectionDetector {
            projection,
            tau,
            weight: WeightFunction::default(),
            statistic: ProjectionStatistic::Amoc(AmocMode::Max),
        }
    }

    /// Known-variance test with `tau = sqrt(p' Sigma p)`.
    pub fn with_known_covariance(projection: Projection, sigma: &DMatrix<f64>) -> Result<Self> {
        let t = stats::tau(&projection, sigma)?;
        Ok(Self::new(projection, TauPolicy::Known(t)))
    }

    pub fn with_weight(mut self, weight: WeightFunction) -> Self {
        self.weight = weight;
        self
    }

    pub fn with_statistic(mut self, statistic: ProjectionStatistic) -> Self {
        self.statistic = statistic;
        self
    }

    pub fn null_law(&self) -> LimitLaw {
        let beta = self.weight.beta();
        match self.statistic {
            ProjectionStatistic::Amoc(AmocMode::Max) => LimitLaw::BridgeSup { beta },
            ProjectionStatistic::Amoc(AmocMode::Sum) => LimitLaw::BridgeAbsInt { beta },
            ProjectionStatistic::Amoc(AmocMode::SumSquared) => LimitLaw::BridgeInt { beta },
            ProjectionStatistic::Epidemic(EpidemicMode::Max) => LimitLaw::EpidemicSup,
            ProjectionStatistic::Epidemic(EpidemicMode::Sum) => LimitLaw::EpidemicInt,
        }
    }

    /// Normalised CUSUM process of `x` along the direction.
    pub fn cusum(&self, x: &PanelSeries) -> Result<CusumProcess> {
        let y = project(x, &self.projection)?;
        let u = CusumProcess::from_series(&y, CusumKind::Projected)?;
        let tau = match self.tau {
            TauPolicy::Known(t) => t,
            TauPolicy::Estimated(method) => estimate_tau(&y, &u, method)?,
        };
        u.with_normalizer(tau)
    }

    pub fn evaluate(&self, x: &PanelSeries) -> Result<Evaluation> {
        let u = self.cusum(x)?;
        let statistic = match self.statistic {
            ProjectionStatistic::Amoc(mode) => amoc_statistic(&u, &self.weight, mode)?,
            ProjectionStatistic::Epidemic(mode) => epidemic_statistic(&u, mode)?,
        };
        let t = u.len() as f64;
        let profile = u
            .values()
            .iter()
            .enumerate()
            .map(|(k, v)| {
                let w = self.weight.eval((k + 1) as f64 / t);
                if k + 1 == u.len() {
                    0.0
                } else {
                    (w * v / u.normalizer()).powi(2)
                }
            })
            .collect();
        Ok(Evaluation { statistic, profile })
    }
}

/// How component variances of the panel statistic are obtained.
#[derive(Debug, Clone, PartialEq)]
pub enum PanelVariance {
    Known(Vec<f64>),
    Estimated(VarianceMethod),
}

/// Panel CUSUM test assuming independent components.
#[derive(Debug, Clone, PartialEq)]
pub struct PanelDetector {
    pub variances: PanelVariance,
    pub mode: PanelMode,
}

impl PanelDetector {
    pub fn new(variances: PanelVariance) -> Self {
        PanelDetector { variances, mode: PanelMode::Max }
    }

    pub fn with_mode(mut self, mode: PanelMode) -> Self {
        self.mode = mode;
        self
    }

    pub fn null_law(&self) -> LimitLaw {
        match self.mode {
            PanelMode::Max => LimitLaw::PanelSup,
            PanelMode::Int => LimitLaw::PanelInt,
        }
    }

    pub fn evaluate(&self, x: &PanelSeries) -> Result<Evaluation> {
        let v = match &self.variances {
            PanelVariance::Known(s2) => panel_cusum(x, s2)?,
            PanelVariance::Estimated(method) => panel_cusum(x, &component_variances(x, *method)?)?,
        };
        let statistic = panel_statistic(&v, self.mode);
        Ok(Evaluation { statistic, profile: v })
    }
}

/// Any of the supported tests.
#[derive(Debug, Clone, PartialEq)]
pub enum Detector {
    Projection(ProjectionDetector),
    Panel(PanelDetector),
}

impl From<ProjectionDetector> for Detector {
    fn from(d: ProjectionDetector) -> Self {
        Detector::Projection(d)
    }
}

impl From<PanelDetector> for Detector {
    fn from(d: PanelDetector) -> Self {
        Detector::Panel(d)
    }
}

impl Detector {
    pub fn null_law(&self) -> LimitLaw {
        match self {
            Detector::Projection(d) => d.null_law(),
            Detector::Panel(d) => d.null_law(),
        }
    }

    pub fn evaluate(&self, x: &PanelSeries) -> Result<Evaluation> {
        match self {
            Detector::Projection(d) => d.evaluate(x),
            Detector::Panel(d) => d.evaluate(x),
        }
    }

    /// Evaluates `x` and compares against `null` at level `alpha`. Rejects iff
    /// the Monte-Carlo p-value is at most `alpha`.
    pub fn test(&self, x: &PanelSeries, null: &NullDistribution, alpha: f64) -> Result<TestResult> {
        let eval = self.evaluate(x)?;
        let critical_value = null.quantile(alpha)?;
        let p_value = null.p_value(eval.statistic);
        let t = x.len();
        let estimated_changepoint = eval.changepoint_in(1, t - 1).map(|k| k as f64 / t as f64);
        Ok(TestResult {
            statistic: eval.statistic,
            critical_value,
            p_value,
            reject: p_value <= alpha,
            estimated_changepoint,
        })
    }
}

/// Value of a statistic together with its change-point criterion
/// `profile[k - 1]`, `k = 1..=T`, whose argmax estimates the change.
#[derive(Debug, Clone, PartialEq)]
pub struct Evaluation {
    pub statistic: f64,
    pub profile: Vec<f64>,
}

impl Evaluation {
    /// Smallest `k` in `lo..=hi` maximising the profile, or `None` if the
    /// profile is flat there.
    pub fn changepoint_in(&self, lo: usize, hi: usize) -> Option<usize> {
        if lo < 1 || hi < lo || hi > self.profile.len() {
            return None;
        }
        let window = &self.profile[lo - 1..hi];
        let (mut best, mut best_val, mut min_val) = (lo, f64::NEG_INFINITY, f64::INFINITY);
        for (i, &v) in window.iter().enumerate() {
            if v > best_val {
                best_val = v;
                best = lo + i;
            }
            min_val = min_val.min(v);
        }
        (best_val > min_val).then_some(best)
    }
}
