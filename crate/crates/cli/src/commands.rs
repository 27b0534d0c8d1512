// SPDX-License-Identifier: MIT OR Apache-2.0

use std::io::Write;
use std::path::{Path, PathBuf};

use anyhow::{bail, ensure, Context, Result};
use hdcp::detector::{Detector, PanelDetector, PanelVariance, ProjectionDetector, ProjectionStatistic, TauPolicy};
use hdcp::efficiency;
use hdcp::harness::{self, ChangeNorm, ExperimentConfig, VarianceMode, FIGURE4_ANGLES, FIGURE5_PHIS};
use hdcp::limits::{NullDistribution, QuantileTable, SimSettings, DEFAULT_ALPHAS, TABLE_DIR_ENV};
use hdcp::model::{ErrorStructure, PanelSeries};
use hdcp::projection::{oracle, pre_oracle, quasi_oracle};
use hdcp::segment::{binary_segmentation, fuller_transform_panel, SegmentationConfig};
use hdcp::stats::{self, AmocMode, EpidemicMode, PanelMode, VarianceMethod, WeightFunction};
use hdcp::Projection;
use nalgebra::DMatrix;

use crate::args::{
    CritvalArgs, DetectorArgs, DirectionArgs, EfficiencyArgs, FiguresArgs, MethodArg, NullArgs, PresetArg,
    ProjectionVarianceArg, SegmentArgs, StatisticArg, TestArgs, VarianceArg,
};
use crate::input::{read_panel, read_square, read_vector};
use crate::{EXIT_ACCEPT, EXIT_REJECT};

fn check_level(name: &str, alpha: f64) -> Result<()> {
    ensure!(alpha > 0.0 && alpha < 1.0, "{name} {alpha} not in (0, 1)");
    Ok(())
}

fn read_sigma(path: &Path) -> Result<DMatrix<f64>> {
    let (d, values) = read_square(path)?;
    Ok(DMatrix::from_row_slice(d, d, &values))
}

/// Direction and covariance inputs read from disk.
struct Inputs {
    delta: Option<Vec<f64>>,
    variances: Option<Vec<f64>>,
    sigma: Option<DMatrix<f64>>,
}

impl Inputs {
    fn read(a: &DirectionArgs) -> Result<Self> {
        Ok(Inputs {
            delta: a.delta.as_deref().map(read_vector).transpose()?,
            variances: a.variances.as_deref().map(read_vector).transpose()?,
            sigma: a.sigma.as_deref().map(read_sigma).transpose()?,
        })
    }

    fn direction(&self, a: &DirectionArgs) -> Result<Option<Projection>> {
        if let Some(path) = &a.direction {
            return Ok(Some(Projection::custom(read_vector(path)?)?));
        }
        let Some(preset) = a.preset else {
            return Ok(None);
        };
        let delta = self.delta.as_deref().context("presets need --delta")?;
        Ok(Some(match preset {
            PresetArg::Oracle => oracle(self.sigma.as_ref().context("the oracle preset needs --sigma")?, delta)?,
            PresetArg::PreOracle => pre_oracle(delta)?,
            PresetArg::Quasi => quasi_oracle(self.variances.as_deref().context("the quasi preset needs --variances")?, delta)?,
        }))
    }
}

fn estimator(v: VarianceArg) -> Option<VarianceMethod> {
    match v {
        VarianceArg::Known => None,
        VarianceArg::Naive => Some(VarianceMethod::Naive),
        VarianceArg::Split => Some(VarianceMethod::SplitAtArgmax),
    }
}

fn build_detector(a: &DetectorArgs) -> Result<Detector> {
    let inputs = Inputs::read(&a.direction)?;
    match a.method {
        MethodArg::Projection => {
            let p = inputs.direction(&a.direction)?.context("projection tests need --direction or --preset")?;
            let tau = match estimator(a.variance) {
                Some(m) => TauPolicy::Estimated(m),
                None => match (a.tau, &inputs.sigma) {
                    (Some(t), _) => {
                        ensure!(t > 0.0 && t.is_finite(), "tau {t} must be positive");
                        TauPolicy::Known(t)
                    }
                    (None, Some(sigma)) => TauPolicy::Known(stats::tau(&p, sigma)?),
                    (None, None) => bail!("known variance needs --tau or --sigma"),
                },
            };
            let statistic = match a.statistic {
                StatisticArg::Max => ProjectionStatistic::Amoc(AmocMode::Max),
                StatisticArg::Sum => ProjectionStatistic::Amoc(AmocMode::Sum),
                StatisticArg::SumSquared => ProjectionStatistic::Amoc(AmocMode::SumSquared),
                StatisticArg::EpidemicMax => ProjectionStatistic::Epidemic(EpidemicMode::Max),
                StatisticArg::EpidemicSum => ProjectionStatistic::Epidemic(EpidemicMode::Sum),
                StatisticArg::Int => bail!("statistic int applies to the panel method only"),
            };
            Ok(ProjectionDetector::new(p, tau)
                .with_weight(WeightFunction::new(a.beta)?)
                .with_statistic(statistic)
                .into())
        }
        MethodArg::Panel => {
            ensure!(a.beta == 0.0, "--beta applies to projection tests only");
            let variances = match estimator(a.variance) {
                Some(m) => PanelVariance::Estimated(m),
                None => match (inputs.variances, &inputs.sigma) {
                    (Some(v), _) => PanelVariance::Known(v),
                    (None, Some(sigma)) => PanelVariance::Known(sigma.diagonal().iter().copied().collect()),
                    (None, None) => bail!("known variance needs --variances or --sigma"),
                },
            };
            let mode = match a.statistic {
                StatisticArg::Max => PanelMode::Max,
                StatisticArg::Int => PanelMode::Int,
                other => bail!("statistic {other:?} applies to the projection method only"),
            };
            Ok(PanelDetector::new(variances).with_mode(mode).into())
        }
    }
}

fn null_distribution(det: &Detector, a: &NullArgs) -> Result<NullDistribution> {
    let settings = SimSettings::new(a.grid, a.reps, a.seed)?.with_resolution(a.resolution);
    Ok(NullDistribution::simulate(det.null_law(), settings)?)
}

pub fn test(a: &TestArgs) -> Result<u8> {
    check_level("alpha", a.alpha)?;
    let det = build_detector(&a.detector)?;
    let x = read_panel(&a.input.input, a.input.transpose)?;
    // Evaluate before the null simulation so input errors surface first.
    det.evaluate(&x)?;
    let null = null_distribution(&det, &a.null)?;
    let r = det.test(&x, &null, a.alpha)?;
    let mut out = std::io::stdout().lock();
    writeln!(out, "statistic={}", r.statistic)?;
    writeln!(out, "critical_value={}", r.critical_value)?;
    writeln!(out, "p_value={}", r.p_value)?;
    writeln!(out, "reject={}", r.reject)?;
    match r.estimated_changepoint {
        Some(c) => {
            writeln!(out, "changepoint={c}")?;
            writeln!(out, "changepoint_index={}", (c * x.len() as f64).round() as usize)?;
        }
        None => {
            writeln!(out, "changepoint=NA")?;
            writeln!(out, "changepoint_index=NA")?;
        }
    }
    Ok(if r.reject { EXIT_REJECT } else { EXIT_ACCEPT })
}

pub fn segment(a: &SegmentArgs) -> Result<u8> {
    check_level("alpha", a.alpha)?;
    let config = SegmentationConfig::new(a.alpha, a.min_segment)?;
    let det = build_detector(&a.detector)?;
    let mut x: PanelSeries = read_panel(&a.input.input, a.input.transpose)?;
    if a.fuller {
        x = fuller_transform_panel(&x, a.fuller_tau)?;
    }
    let null = null_distribution(&det, &a.null)?;
    let result = binary_segmentation(&x, &det, &null, config)?;
    let mut w = csv::Writer::from_writer(std::io::stdout().lock());
    w.write_record(["location", "statistic", "p_value", "depth", "order"])?;
    for c in &result.changes {
        w.write_record([
            c.location.to_string(),
            c.statistic.to_string(),
            c.p_value.to_string(),
            c.depth.to_string(),
            c.order.to_string(),
        ])?;
    }
    w.flush()?;
    Ok(EXIT_ACCEPT)
}

fn table_destination(a: &CritvalArgs, file_name: &str) -> Option<PathBuf> {
    if let Some(p) = &a.output {
        return Some(p.clone());
    }
    let dir = a.table_dir.clone().or_else(|| std::env::var_os(TABLE_DIR_ENV).filter(|d| !d.is_empty()).map(PathBuf::from))?;
    Some(dir.join(file_name))
}

pub fn critval(a: &CritvalArgs) -> Result<u8> {
    for &alpha in &a.alpha {
        check_level("alpha", alpha)?;
    }
    a.law.validate()?;
    let settings = SimSettings::new(a.grid, a.reps, a.seed)?.with_resolution(a.resolution);
    let mut alphas: Vec<f64> = DEFAULT_ALPHAS.iter().chain(&a.alpha).copied().collect();
    alphas.sort_by(f64::total_cmp);
    alphas.dedup();
    let table = NullDistribution::simulate(a.law, settings)?.table(&alphas)?;
    if let Some(path) = table_destination(a, &QuantileTable::file_name(&a.law, &settings)) {
        if let Some(parent) = path.parent().filter(|p| !p.as_os_str().is_empty()) {
            std::fs::create_dir_all(parent)?;
        }
        table.write(&path)?;
        eprintln!("wrote {}", path.display());
    }
    print!("{}", table.to_text());
    Ok(EXIT_ACCEPT)
}

pub fn efficiency(a: &EfficiencyArgs) -> Result<u8> {
    let inputs = Inputs::read(&a.direction)?;
    let delta = inputs.delta.clone().context("efficiency needs --delta")?;
    let d = delta.len();
    let structure = match (&a.s, &a.phi) {
        (Some(s), Some(phi)) => Some(ErrorStructure::mixed(read_vector(s)?, read_vector(phi)?)?),
        (Some(s), None) => Some(ErrorStructure::independent(read_vector(s)?)?),
        (None, Some(phi)) => Some(ErrorStructure::fully_dependent(read_vector(phi)?)?),
        (None, None) if a.identity => Some(ErrorStructure::independent(vec![1.0; d])?),
        (None, None) => None,
    };
    let mut inputs = inputs;
    let sigma = match (&structure, inputs.sigma.take()) {
        (Some(st), _) => st.covariance(),
        (None, Some(sigma)) => sigma,
        (None, None) => bail!("efficiency needs --sigma, --identity, --s or --phi"),
    };
    if inputs.variances.is_none() {
        inputs.variances = Some(sigma.diagonal().iter().copied().collect());
    }
    inputs.sigma = Some(sigma.clone());
    let p = inputs.direction(&a.direction)?;
    let report = match &structure {
        Some(st) => efficiency::report_for(&delta, st, p.as_ref())?,
        None => efficiency::report(&delta, &sigma, p.as_ref(), None)?,
    };
    print!("{}", report.to_key_values());
    Ok(EXIT_ACCEPT)
}

pub fn figures(a: &FiguresArgs) -> Result<u8> {
    let mut cfg = ExperimentConfig::figure(a.figure)?;
    cfg.seed = a.seed;
    if let Some(d) = a.d {
        cfg.d = d;
    }
    if let Some(t) = a.t {
        cfg.t = t;
    }
    if let Some(r) = a.reps {
        cfg.reps = r;
    }
    if let Some(r) = a.null_reps {
        cfg.null_reps = r;
    }
    if let Some(l) = a.level {
        cfg.level = l;
    }
    if let Some(s) = &a.sweep {
        cfg.sweep = s.clone();
    }
    if let Some(n) = a.change_norm {
        ensure!(n >= 0.0 && n.is_finite(), "change norm {n} must be non-negative");
        cfg.change_norm = ChangeNorm::Fixed(n);
    }
    if let Some(v) = a.variance {
        cfg.variance = match v {
            ProjectionVarianceArg::Known => VarianceMode::Known,
            ProjectionVarianceArg::Naive => VarianceMode::Naive,
            ProjectionVarianceArg::Split => VarianceMode::Split,
        };
    }
    if let Some(g) = a.calibration_grid {
        cfg.calibration_grid = g;
    }
    if let Some(r) = a.calibration_reps {
        cfg.calibration_reps = r;
    }
    if let Some(r) = a.calibration_resolution {
        cfg.calibration_resolution = r;
    }
    cfg.validate()?;
    let curves = match a.figure {
        4 => harness::power_vs_phi(&cfg, a.angles.as_deref().unwrap_or(&FIGURE4_ANGLES))?,
        5 => harness::power_vs_changesize(&cfg, a.phis.as_deref().unwrap_or(&FIGURE5_PHIS))?,
        id => harness::run_figure(id, &cfg)?,
    };
    for c in &curves {
        println!("{}", c.write(&a.out_dir)?.display());
    }
    Ok(EXIT_ACCEPT)
}
