// SPDX-License-Identifier: MIT OR Apache-2.0

//! Size and power simulation studies.
//!
//! Every experiment is a list of scenarios (one per sweep value). A scenario
//! fixes the error structure, the change and the competing methods. Replicate
//! `r` draws its data from `stream(seed, ALT_DATA, r)` and, for the random
//! projection, its direction from `stream(seed, ALT_DIRECTION, r)`; size
//! correction uses the `NULL_*` domains the same way. The same streams are
//! reused across sweep values, so curves use common random numbers.

use std::collections::HashMap;
use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, FRAC_PI_8, PI};
use std::fmt;
use std::path::{Path, PathBuf};

use nalgebra::DMatrix;
use rayon::prelude::*;

use crate::detector::{PanelDetector, PanelVariance, ProjectionDetector, TauPolicy};
use crate::limits::{order_index, LimitLaw, NullDistribution, Resolution, SimSettings, DEFAULT_GRID};
use crate::model::{generate_with, ChangeSpec, ErrorStructure, SignalShape};
use crate::projection::{direction_at_angle, oracle, pre_oracle, quasi_oracle, random_unit, Projection};
use crate::rng::{self, domain};
use crate::stats::{self, VarianceMethod};
use crate::{Error, Result};

pub const DEFAULT_THETA: f64 = 0.5;
pub const DEFAULT_CALIBRATION_REPS: usize = 100_000;
/// Change norm of the reference configuration, `0.05 sqrt(200)`.
pub const REFERENCE_CHANGE_NORM: f64 = 0.707_106_781_186_547_6;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Method {
    Oracle,
    QuasiOracle,
    PreOracle,
    RandomProjection,
    /// Fixed search direction at a given angle from the change.
    Search,
    PanelKnownVar,
    PanelEstVar,
}

impl Method {
    pub fn label(&self) -> &'static str {
        match self {
            Method::Oracle => "oracle",
            Method::QuasiOracle => "quasi_oracle",
            Method::PreOracle => "pre_oracle",
            Method::RandomProjection => "random",
            Method::Search => "search",
            Method::PanelKnownVar => "panel_known_var",
            Method::PanelEstVar => "panel_est_var",
        }
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

/// Variance policy of the projection statistics.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum VarianceMode {
    Known,
    Naive,
    Split,
}

impl VarianceMode {
    fn tau_policy(self, known: f64) -> TauPolicy {
        match self {
            VarianceMode::Known => TauPolicy::Known(known),
            VarianceMode::Naive => TauPolicy::Estimated(VarianceMethod::Naive),
            VarianceMode::Split => TauPolicy::Estimated(VarianceMethod::SplitAtArgmax),
        }
    }

    /// Estimator used by the estimated-variance panel statistic.
    fn panel_estimator(self) -> VarianceMethod {
        match self {
            VarianceMode::Split => VarianceMethod::SplitAtArgmax,
            _ => VarianceMethod::Naive,
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            VarianceMode::Known => "known",
            VarianceMode::Naive => "naive",
            VarianceMode::Split => "split",
        }
    }
}

/// Norm of the change as a function of the dimension.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ChangeNorm {
    Fixed(f64),
    /// `c sqrt(d)`.
    PerSqrtD(f64),
}

impl ChangeNorm {
    pub fn norm(&self, d: usize) -> f64 {
        match *self {
            ChangeNorm::Fixed(v) => v,
            ChangeNorm::PerSqrtD(c) => c * (d as f64).sqrt(),
        }
    }
}

impl fmt::Display for ChangeNorm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ChangeNorm::Fixed(v) => write!(f, "fixed:{v}"),
            ChangeNorm::PerSqrtD(c) => write!(f, "per-sqrt-d:{c}"),
        }
    }
}

/// Source of the critical values of a curve.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Calibration {
    /// Simulated null limit law.
    Asymptotic { grid: usize, reps: usize, resolution: Resolution },
    /// Empirical null quantile of each method's own statistic.
    SizeCorrected { null_reps: usize },
}

impl fmt::Display for Calibration {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Calibration::Asymptotic { grid, reps, resolution } => {
                write!(f, "asymptotic:grid={grid}:reps={reps}:resolution={resolution}")
            }
            Calibration::SizeCorrected { null_reps } => write!(f, "size-corrected:{null_reps}"),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub d: usize,
    pub t: usize,
    pub reps: usize,
    /// Null replications used for size correction.
    pub null_reps: usize,
    pub level: f64,
    pub seed: u64,
    pub change_norm: ChangeNorm,
    pub theta: f64,
    /// Variance policy of the projection statistics.
    pub variance: VarianceMode,
    pub sweep: Vec<f64>,
    /// Limit-law simulation behind the size experiment's critical values.
    pub calibration_grid: usize,
    pub calibration_reps: usize,
    pub calibration_resolution: Resolution,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        ExperimentConfig {
            d: 200,
            t: 100,
            reps: 1000,
            null_reps: 1000,
            level: 0.05,
            seed: 0,
            change_norm: ChangeNorm::Fixed(REFERENCE_CHANGE_NORM),
            theta: DEFAULT_THETA,
            variance: VarianceMode::Known,
            sweep: Vec::new(),
            calibration_grid: DEFAULT_GRID,
            calibration_reps: DEFAULT_CALIBRATION_REPS,
            calibration_resolution: Resolution::Grid,
        }
    }
}

impl ExperimentConfig {
    /// Reference configuration of figure `id` (1 to 5).
    pub fn figure(id: u8) -> Result<Self> {
        let base = ExperimentConfig::default();
        let sweep = match id {
            1 | 4 => vec![0.0, 0.25, 0.5, 0.75, 1.0],
            2 => (0..=8).map(|i| i as f64 * FRAC_PI_2 / 8.0).collect(),
            3 => vec![25.0, 50.0, 100.0, 200.0, 400.0],
            5 => (0..=8).map(|i| i as f64 * 0.01).collect(),
            _ => return Err(Error::InvalidParameter(format!("unknown figure {id}"))),
        };
        Ok(ExperimentConfig { sweep, ..base })
    }

    pub fn validate(&self) -> Result<()> {
        if self.reps < 100 {
            return Err(Error::InvalidParameter(format!("reps {} below 100", self.reps)));
        }
        if !(self.level > 0.0 && self.level < 1.0) {
            return Err(Error::InvalidParameter(format!("level {} not in (0, 1)", self.level)));
        }
        if self.d < 2 {
            return Err(Error::InvalidParameter("d must be at least 2".into()));
        }
        if self.t < 10 {
            return Err(Error::TooShort { needed: 10, found: self.t });
        }
        if !(self.theta > 0.0 && self.theta < 1.0) {
            return Err(Error::InvalidParameter(format!("theta {} not in (0, 1)", self.theta)));
        }
        if self.sweep.is_empty() {
            return Err(Error::InvalidParameter("empty sweep".into()));
        }
        Ok(())
    }

    fn size_corrected(&self) -> Result<Calibration> {
        if self.null_reps < 500 {
            return Err(Error::InvalidParameter(format!("null_reps {} below 500", self.null_reps)));
        }
        Ok(Calibration::SizeCorrected { null_reps: self.null_reps })
    }

    fn echo(&self) -> Vec<(String, String)> {
        vec![
            ("d".into(), self.d.to_string()),
            ("T".into(), self.t.to_string()),
            ("reps".into(), self.reps.to_string()),
            ("level".into(), self.level.to_string()),
            ("theta".into(), self.theta.to_string()),
            ("change_norm".into(), self.change_norm.to_string()),
            ("variance".into(), self.variance.label().into()),
        ]
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PowerPoint {
    pub sweep_value: f64,
    pub method: String,
    pub rejection_rate: f64,
    pub mc_se: f64,
    pub reps: usize,
    pub critical_value: f64,
}

/// Rejection rates of several methods along a sweep.
#[derive(Debug, Clone, PartialEq)]
pub struct PowerCurve {
    pub name: String,
    pub sweep_label: String,
    pub seed: u64,
    pub calibration: Calibration,
    pub config: Vec<(String, String)>,
    pub points: Vec<PowerPoint>,
}

impl PowerCurve {
    pub fn methods(&self) -> Vec<String> {
        let mut out: Vec<String> = Vec::new();
        for p in &self.points {
            if !out.contains(&p.method) {
                out.push(p.method.clone());
            }
        }
        out
    }

    pub fn point(&self, method: &str, sweep_value: f64) -> Option<&PowerPoint> {
        self.points
            .iter()
            .find(|p| p.method == method && (p.sweep_value - sweep_value).abs() < 1e-12)
    }

    pub fn rate(&self, method: &str, sweep_value: f64) -> Option<f64> {
        self.point(method, sweep_value).map(|p| p.rejection_rate)
    }

    /// `(sweep_value, rate, mc_se)` of one method in sweep order.
    pub fn series(&self, method: &str) -> Vec<(f64, f64, f64)> {
        self.points
            .iter()
            .filter(|p| p.method == method)
            .map(|p| (p.sweep_value, p.rejection_rate, p.mc_se))
            .collect()
    }

    pub fn to_csv(&self) -> String {
        let mut out = format!("# experiment={}\n# sweep={}\n# calibration={}\n", self.name, self.sweep_label, self.calibration);
        for (k, v) in &self.config {
            out.push_str(&format!("# {k}={v}\n"));
        }
        out.push_str("sweep_value,method,rejection_rate,mc_se,reps,seed\n");
        for p in &self.points {
            out.push_str(&format!(
                "{},{},{},{},{},{}\n",
                p.sweep_value, p.method, p.rejection_rate, p.mc_se, p.reps, self.seed
            ));
        }
        out
    }

    /// Writes `<dir>/<name>.csv`.
    pub fn write(&self, dir: &Path) -> Result<PathBuf> {
        std::fs::create_dir_all(dir)?;
        let path = dir.join(format!("{}.csv", self.name));
        std::fs::write(&path, self.to_csv())?;
        Ok(path)
    }
}

#[derive(Debug, Clone)]
enum Direction {
    Fixed { projection: Projection, tau: f64 },
    Random,
}

#[derive(Debug, Clone)]
enum Kind {
    Projection { direction: Direction, variance: VarianceMode },
    Panel { variance: PanelVariance },
}

#[derive(Debug, Clone)]
struct MethodInstance {
    label: String,
    kind: Kind,
}

impl MethodInstance {
    fn projection(method: Method, p: Projection, sigma: &DMatrix<f64>, variance: VarianceMode) -> Result<Self> {
        let tau = stats::tau(&p, sigma)?;
        Ok(MethodInstance {
            label: method.label().into(),
            kind: Kind::Projection { direction: Direction::Fixed { projection: p, tau }, variance },
        })
    }

    fn random(variance: VarianceMode) -> Self {
        MethodInstance {
            label: Method::RandomProjection.label().into(),
            kind: Kind::Projection { direction: Direction::Random, variance },
        }
    }

    fn panel_known(structure: &ErrorStructure) -> Self {
        MethodInstance {
            label: Method::PanelKnownVar.label().into(),
            kind: Kind::Panel { variance: PanelVariance::Known(structure.variances()) },
        }
    }

    fn panel_estimated(variance: VarianceMode) -> Self {
        MethodInstance {
            label: Method::PanelEstVar.label().into(),
            kind: Kind::Panel { variance: PanelVariance::Estimated(variance.panel_estimator()) },
        }
    }

    fn null_law(&self) -> LimitLaw {
        match self.kind {
            Kind::Projection { .. } => LimitLaw::BridgeSup { beta: 0.0 },
            Kind::Panel { .. } => LimitLaw::PanelSup,
        }
    }
}

#[derive(Debug, Clone)]
struct Scenario {
    sweep_value: f64,
    structure: ErrorStructure,
    sigma: DMatrix<f64>,
    delta: Vec<f64>,
    methods: Vec<MethodInstance>,
}

impl Scenario {
    fn new(sweep_value: f64, structure: ErrorStructure, delta: Vec<f64>) -> Self {
        let sigma = structure.covariance();
        Scenario { sweep_value, structure, sigma, delta, methods: Vec::new() }
    }

    fn push(&mut self, m: MethodInstance) {
        self.methods.push(m);
    }

    /// Oracle, quasi-oracle and pre-oracle directions for `reference`.
    fn push_oracles(&mut self, reference: &[f64], variance: VarianceMode) -> Result<()> {
        let o = oracle(&self.sigma, reference)?;
        let q = quasi_oracle(&self.structure.variances(), reference)?;
        let p = pre_oracle(reference)?;
        let sigma = self.sigma.clone();
        self.push(MethodInstance::projection(Method::Oracle, o, &sigma, variance)?);
        self.push(MethodInstance::projection(Method::QuasiOracle, q, &sigma, variance)?);
        self.push(MethodInstance::projection(Method::PreOracle, p, &sigma, variance)?);
        Ok(())
    }

    /// Statistics of every method on one replicate.
    fn replicate(&self, t: usize, theta: f64, seed: u64, index: u64, null: bool) -> Result<Vec<f64>> {
        let (data_domain, dir_domain) =
            if null { (domain::NULL_DATA, domain::NULL_DIRECTION) } else { (domain::ALT_DATA, domain::ALT_DIRECTION) };
        let d = self.structure.dim();
        let delta = if null { vec![0.0; d] } else { self.delta.clone() };
        let spec = ChangeSpec::new(vec![0.0; d], delta, SignalShape::amoc(theta)?)?;
        let mut data_rng = rng::stream(seed, data_domain, index);
        let x = generate_with(&spec, &self.structure, t, &mut data_rng)?;
        let needs_random =
            self.methods.iter().any(|m| matches!(m.kind, Kind::Projection { direction: Direction::Random, .. }));
        let random = if needs_random {
            let r = random_unit(d, &mut rng::stream(seed, dir_domain, index))?;
            let tau = stats::tau(&r, &self.sigma)?;
            Some((r, tau))
        } else {
            None
        };
        self.methods
            .iter()
            .map(|m| match &m.kind {
                Kind::Projection { direction, variance } => {
                    let (p, tau) = match direction {
                        Direction::Fixed { projection, tau } => (projection, *tau),
                        Direction::Random => {
                            let (r, tau) = random.as_ref().expect("random direction drawn above");
                            (r, *tau)
                        }
                    };
                    let det = ProjectionDetector::new(p.clone(), variance.tau_policy(tau));
                    Ok(det.evaluate(&x)?.statistic)
                }
                Kind::Panel { variance } => Ok(PanelDetector::new(variance.clone()).evaluate(&x)?.statistic),
            })
            .collect()
    }

    fn statistics(&self, t: usize, theta: f64, seed: u64, reps: usize, null: bool) -> Result<Vec<Vec<f64>>> {
        (0..reps as u64)
            .into_par_iter()
            .map(|r| self.replicate(t, theta, seed, r, null))
            .collect()
    }
}

/// Empirical `(1 - level)` quantile of simulated null statistics.
pub fn empirical_size_correct(null_statistics: &[f64], level: f64) -> Result<f64> {
    if null_statistics.is_empty() {
        return Err(Error::InvalidParameter("no null statistics".into()));
    }
    if null_statistics.iter().any(|v| v.is_nan()) {
        return Err(Error::NonFinite("null statistics"));
    }
    let mut sorted = null_statistics.to_vec();
    sorted.sort_by(f64::total_cmp);
    Ok(sorted[order_index(level, sorted.len())?])
}

/// Size-corrected critical value of `method` under `structure`, with oracle
/// directions built from `reference`.
pub fn size_corrected_critical_value(
    method: Method,
    variance: VarianceMode,
    structure: &ErrorStructure,
    reference: &[f64],
    cfg: &ExperimentConfig,
) -> Result<f64> {
    cfg.size_corrected()?;
    let mut scn = Scenario::new(0.0, structure.clone(), reference.to_vec());
    let sigma = scn.sigma.clone();
    let m = match method {
        Method::Oracle => MethodInstance::projection(method, oracle(&sigma, reference)?, &sigma, variance)?,
        Method::QuasiOracle => {
            MethodInstance::projection(method, quasi_oracle(&structure.variances(), reference)?, &sigma, variance)?
        }
        Method::PreOracle | Method::Search => MethodInstance::projection(method, pre_oracle(reference)?, &sigma, variance)?,
        Method::RandomProjection => MethodInstance::random(variance),
        Method::PanelKnownVar => MethodInstance::panel_known(structure),
        Method::PanelEstVar => MethodInstance::panel_estimated(variance),
    };
    scn.push(m);
    let stats: Vec<f64> =
        scn.statistics(cfg.t, cfg.theta, cfg.seed, cfg.null_reps, true)?.into_iter().map(|v| v[0]).collect();
    empirical_size_correct(&stats, cfg.level)
}

struct Runner<'a> {
    cfg: &'a ExperimentConfig,
    calibration: Calibration,
    laws: HashMap<String, f64>,
}

impl<'a> Runner<'a> {
    fn new(cfg: &'a ExperimentConfig, calibration: Calibration) -> Self {
        Runner { cfg, calibration, laws: HashMap::new() }
    }

    fn asymptotic_value(&mut self, law: LimitLaw, settings: SimSettings) -> Result<f64> {
        let key = law.to_string();
        if let Some(&v) = self.laws.get(&key) {
            return Ok(v);
        }
        let v = NullDistribution::simulate(law, settings)?.quantile(self.cfg.level)?;
        self.laws.insert(key, v);
        Ok(v)
    }

    fn run(&mut self, scn: &Scenario) -> Result<Vec<PowerPoint>> {
        let cfg = self.cfg;
        let critical: Vec<f64> = match self.calibration {
            Calibration::Asymptotic { grid, reps, resolution } => {
                let settings = SimSettings::new(grid, reps, cfg.seed)?.with_resolution(resolution);
                scn.methods
                    .iter()
                    .map(|m| self.asymptotic_value(m.null_law(), settings))
                    .collect::<Result<_>>()?
            }
            Calibration::SizeCorrected { null_reps } => {
                let null = scn.statistics(cfg.t, cfg.theta, cfg.seed, null_reps, true)?;
                (0..scn.methods.len())
                    .map(|j| empirical_size_correct(&null.iter().map(|row| row[j]).collect::<Vec<_>>(), cfg.level))
                    .collect::<Result<_>>()?
            }
        };
        let alt = scn.statistics(cfg.t, cfg.theta, cfg.seed, cfg.reps, false)?;
        Ok(scn
            .methods
            .iter()
            .enumerate()
            .map(|(j, m)| {
                let rejections = alt.iter().filter(|row| row[j] > critical[j]).count();
                let rate = rejections as f64 / cfg.reps as f64;
                PowerPoint {
                    sweep_value: scn.sweep_value,
                    method: m.label.clone(),
                    rejection_rate: rate,
                    mc_se: (rate * (1.0 - rate) / cfg.reps as f64).sqrt(),
                    reps: cfg.reps,
                    critical_value: critical[j],
                }
            })
            .collect())
    }

    fn curve(&self, name: String, sweep_label: &str, extra: Vec<(String, String)>, points: Vec<PowerPoint>) -> PowerCurve {
        let mut config = self.cfg.echo();
        if let Calibration::SizeCorrected { null_reps } = self.calibration {
            config.push(("null_reps".into(), null_reps.to_string()));
        }
        config.extend(extra);
        PowerCurve {
            name,
            sweep_label: sweep_label.into(),
            seed: self.cfg.seed,
            calibration: self.calibration,
            config,
            points,
        }
    }
}

fn ones(d: usize) -> Vec<f64> {
    vec![1.0; d]
}

fn scaled(v: &[f64], norm: f64) -> Vec<f64> {
    let n = v.iter().map(|x| x * x).sum::<f64>().sqrt();
    v.iter().map(|x| x * norm / n).collect()
}

fn angle_name(a: f64) -> String {
    for (value, name) in [(0.0, "0"), (FRAC_PI_8, "pi_8"), (FRAC_PI_4, "pi_4"), (FRAC_PI_2, "pi_2"), (PI, "pi")] {
        if (a - value).abs() < 1e-12 {
            return name.into();
        }
    }
    format!("{a:.4}")
}

/// Null rejection rates at simulated limit-law critical values as the
/// common-factor loading `phi` (the sweep) grows, under `s_j = 1`,
/// `Phi_j = phi`. Returns one curve per variance policy (known, naive, split).
/// Oracle directions target `Delta_ref`, the unit vector at angle `pi/4` from
/// `1_d`.
pub fn size_experiment(cfg: &ExperimentConfig) -> Result<Vec<PowerCurve>> {
    cfg.validate()?;
    let d = cfg.d;
    let reference = direction_at_angle(&ones(d), FRAC_PI_4)?;
    let calibration = Calibration::Asymptotic {
        grid: cfg.calibration_grid,
        reps: cfg.calibration_reps,
        resolution: cfg.calibration_resolution,
    };
    let mut runner = Runner::new(cfg, calibration);
    let modes = [VarianceMode::Known, VarianceMode::Naive, VarianceMode::Split];
    let mut points: Vec<Vec<PowerPoint>> = vec![Vec::new(); modes.len()];
    for &phi in &cfg.sweep {
        let structure = ErrorStructure::mixed(vec![1.0; d], vec![phi; d])?;
        let mut scn = Scenario::new(phi, structure.clone(), vec![0.0; d]);
        for &mode in &modes {
            scn.push_oracles(&reference, mode)?;
            scn.push(MethodInstance::random(mode));
            scn.push(match mode {
                VarianceMode::Known => MethodInstance::panel_known(&structure),
                _ => MethodInstance::panel_estimated(mode),
            });
        }
        let per_mode = scn.methods.len() / modes.len();
        for (i, p) in runner.run(&scn)?.into_iter().enumerate() {
            points[i / per_mode].push(p);
        }
    }
    Ok(modes
        .iter()
        .zip(points)
        .map(|(mode, pts)| {
            let extra = vec![
                ("structure".into(), "mixed s=1 Phi=phi".into()),
                ("projection_variance".into(), mode.label().into()),
                ("reference_direction".into(), "angle pi/4 from 1_d".into()),
            ];
            runner.curve(format!("fig1_{}", mode.label()), "phi", extra, pts)
        })
        .collect())
}

/// Size-corrected power of a search direction at angle `a` (the sweep) from
/// the change, under `Sigma = I` and `Delta` proportional to `1_d`, with random
/// projection and panel references.
pub fn power_vs_angle(cfg: &ExperimentConfig) -> Result<PowerCurve> {
    cfg.validate()?;
    let d = cfg.d;
    let mut runner = Runner::new(cfg, cfg.size_corrected()?);
    let structure = ErrorStructure::independent(vec![1.0; d])?;
    let delta = scaled(&ones(d), cfg.change_norm.norm(d));
    let mut points = Vec::new();
    for &angle in &cfg.sweep {
        let mut scn = Scenario::new(angle, structure.clone(), delta.clone());
        let search = Projection::new(direction_at_angle(&delta, angle)?, crate::Provenance::ScaledSearch)?;
        let sigma = scn.sigma.clone();
        scn.push(MethodInstance::projection(Method::Search, search, &sigma, cfg.variance)?);
        scn.push(MethodInstance::random(cfg.variance));
        scn.push(MethodInstance::panel_known(&structure));
        scn.push(MethodInstance::panel_estimated(cfg.variance));
        points.extend(runner.run(&scn)?);
    }
    let extra = vec![("structure".into(), "independent s=1".into())];
    Ok(runner.curve("fig2".into(), "angle", extra, points))
}

/// Size-corrected power as the dimension (the sweep) grows at fixed change norm
/// under `Sigma = I`.
pub fn power_vs_dimension(cfg: &ExperimentConfig) -> Result<PowerCurve> {
    cfg.validate()?;
    let mut runner = Runner::new(cfg, cfg.size_corrected()?);
    let mut points = Vec::new();
    for &dv in &cfg.sweep {
        if dv.fract() != 0.0 || dv < 2.0 {
            return Err(Error::InvalidParameter(format!("dimension sweep value {dv} is not an integer >= 2")));
        }
        let d = dv as usize;
        let structure = ErrorStructure::independent(vec![1.0; d])?;
        let delta = scaled(&ones(d), cfg.change_norm.norm(d));
        let mut scn = Scenario::new(dv, structure.clone(), delta.clone());
        let sigma = scn.sigma.clone();
        scn.push(MethodInstance::projection(Method::Oracle, oracle(&sigma, &delta)?, &sigma, cfg.variance)?);
        scn.push(MethodInstance::random(cfg.variance));
        scn.push(MethodInstance::panel_known(&structure));
        scn.push(MethodInstance::panel_estimated(cfg.variance));
        points.extend(runner.run(&scn)?);
    }
    let extra = vec![("structure".into(), "independent s=1".into())];
    Ok(runner.curve("fig3".into(), "d", extra, points))
}

/// Size-corrected power as the common-factor loading `phi` (the sweep) grows,
/// `s_j = 1`, `Phi_j = phi`, with the change at each of `angles` from `1_d`.
/// One curve per angle.
pub fn power_vs_phi(cfg: &ExperimentConfig, angles: &[f64]) -> Result<Vec<PowerCurve>> {
    cfg.validate()?;
    let d = cfg.d;
    let mut runner = Runner::new(cfg, cfg.size_corrected()?);
    let mut curves = Vec::new();
    for &angle in angles {
        let delta = scaled(&direction_at_angle(&ones(d), angle)?, cfg.change_norm.norm(d));
        let mut points = Vec::new();
        for &phi in &cfg.sweep {
            let structure = ErrorStructure::mixed(vec![1.0; d], vec![phi; d])?;
            let mut scn = Scenario::new(phi, structure.clone(), delta.clone());
            scn.push_oracles(&delta, cfg.variance)?;
            scn.push(MethodInstance::random(cfg.variance));
            scn.push(MethodInstance::panel_known(&structure));
            scn.push(MethodInstance::panel_estimated(cfg.variance));
            points.extend(runner.run(&scn)?);
        }
        let extra = vec![
            ("structure".into(), "mixed s=1 Phi=phi".into()),
            ("angle_delta_phi".into(), angle.to_string()),
        ];
        curves.push(runner.curve(format!("fig4_angle_{}", angle_name(angle)), "phi", extra, points));
    }
    Ok(curves)
}

/// Size-corrected power as the change grows, `||Delta|| = c sqrt(d)` with `c`
/// the sweep, under `s_i = 0.5 + i/d`, `Phi_i = phi` and the change at angle
/// `pi/4` from `1_d`. One curve per `phi` in `phis`.
pub fn power_vs_changesize(cfg: &ExperimentConfig, phis: &[f64]) -> Result<Vec<PowerCurve>> {
    cfg.validate()?;
    let d = cfg.d;
    let mut runner = Runner::new(cfg, cfg.size_corrected()?);
    let s: Vec<f64> = (1..=d).map(|i| 0.5 + i as f64 / d as f64).collect();
    let direction = direction_at_angle(&ones(d), FRAC_PI_4)?;
    let mut curves = Vec::new();
    for &phi in phis {
        let structure = ErrorStructure::mixed(s.clone(), vec![phi; d])?;
        let mut points = Vec::new();
        for &c in &cfg.sweep {
            let delta = scaled(&direction, c * (d as f64).sqrt());
            let mut scn = Scenario::new(c, structure.clone(), delta);
            scn.push_oracles(&direction, cfg.variance)?;
            scn.push(MethodInstance::random(cfg.variance));
            scn.push(MethodInstance::panel_known(&structure));
            scn.push(MethodInstance::panel_estimated(cfg.variance));
            points.extend(runner.run(&scn)?);
        }
        let extra = vec![
            ("structure".into(), "mixed s_i=0.5+i/d Phi=phi".into()),
            ("phi".into(), phi.to_string()),
            ("angle_delta_phi".into(), "pi/4".into()),
        ];
        curves.push(runner.curve(format!("fig5_phi_{phi}"), "change_size_per_sqrt_d", extra, points));
    }
    Ok(curves)
}

pub const FIGURE4_ANGLES: [f64; 4] = [0.0, FRAC_PI_8, FRAC_PI_4, FRAC_PI_2];
pub const FIGURE5_PHIS: [f64; 3] = [0.0, 0.5, 1.0];

/// Runs figure `id` with its reference panels.
pub fn run_figure(id: u8, cfg: &ExperimentConfig) -> Result<Vec<PowerCurve>> {
    match id {
        1 => size_experiment(cfg),
        2 => Ok(vec![power_vs_angle(cfg)?]),
        3 => Ok(vec![power_vs_dimension(cfg)?]),
        4 => power_vs_phi(cfg, &FIGURE4_ANGLES),
        5 => power_vs_changesize(cfg, &FIGURE5_PHIS),
        _ => Err(Error::InvalidParameter(format!("unknown figure {id}"))),
    }
}
