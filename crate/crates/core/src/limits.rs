// SPDX-License-Identifier: MIT OR Apache-2.0

//! Monte-Carlo simulation of the null limit laws and their quantile tables.
//!
//! Paths live on the grid `x_j = j / N`, `j = 0..=N`. A Brownian bridge is a
//! cumulative Gaussian sum pinned at both ends, and the panel limit
//! `sqrt(2) (1 - x)^2 W(x^2 / (1 - x)^2)` is built from Wiener increments on
//! the time-changed grid with the `x = 1` endpoint set to zero.
//!
//! Sup-type bridge functionals can be evaluated either on the grid points
//! ([`Resolution::Grid`]) or with an exact draw of the conditional bridge
//! maximum between neighbouring grid points ([`Resolution::Continuous`]).
//! The grid version is the exact finite-sample law of a statistic computed on
//! `T = N` Gaussian observations. The continuous version removes the `O(N^{-1/2})`
//! discretisation bias of the supremum and is the right choice for asymptotic
//! critical values.

use std::collections::HashMap;
use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use rand::Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;

use crate::rng::{self, domain, SimRng};
use crate::stats::{pairwise_abs_diff_sum, WeightFunction};
use crate::{Error, Result};

/// Environment variable naming the directory used by [`TableCache::from_env`].
pub const TABLE_DIR_ENV: &str = "HDCP_TABLE_DIR";

pub const MIN_GRID: usize = 100;
pub const MIN_REPS: usize = 1000;
pub const DEFAULT_GRID: usize = 1000;
pub const DEFAULT_REPS: usize = 100_000;
pub const DEFAULT_ALPHAS: [f64; 4] = [0.01, 0.025, 0.05, 0.10];

const PATHS_PER_BATCH: usize = 1000;
/// Bridge excursions above the grid maximum by more than this many grid
/// standard deviations have probability below `exp(-72)` and are skipped.
const REFINE_MARGIN_SDS: f64 = 6.0;

/// A limiting functional of a Brownian bridge, Wiener process or panel process.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum LimitLaw {
    /// `sup_t w(t) |B(t)|`.
    BridgeSup { beta: f64 },
    /// `int w^2(t) B^2(t) dt`.
    BridgeInt { beta: f64 },
    /// `int w(t) |B(t)| dt`.
    BridgeAbsInt { beta: f64 },
    /// `sup_{s<t} |B(t) - B(s)|`.
    EpidemicSup,
    /// `int int_{s<t} |B(t) - B(s)| ds dt`.
    EpidemicInt,
    /// `sup_x sqrt(2) (1 - x)^2 W(x^2 / (1 - x)^2)`.
    PanelSup,
    /// `int sqrt(2) (1 - x)^2 W(x^2 / (1 - x)^2) dx`.
    PanelInt,
    /// Sup of the panel process plus `xi (B^2(x) - x (1 - x))` with an
    /// independent bridge `B`. Only an approximation to the coupled law.
    MixturePanel { xi: f64 },
    /// `sup_x (B^2(x) - x (1 - x))`.
    BridgeSquaredSup,
    /// Degenerate law at a constant, used as a test double.
    Constant(f64),
}

impl LimitLaw {
    pub fn validate(&self) -> Result<()> {
        match *self {
            LimitLaw::BridgeSup { beta } | LimitLaw::BridgeInt { beta } | LimitLaw::BridgeAbsInt { beta } => {
                WeightFunction::new(beta).map(|_| ())
            }
            LimitLaw::MixturePanel { xi } if !(xi >= 0.0) || !xi.is_finite() => {
                Err(Error::InvalidParameter(format!("mixture weight {xi} must be finite and >= 0")))
            }
            LimitLaw::Constant(c) if !c.is_finite() => Err(Error::NonFinite("constant law")),
            _ => Ok(()),
        }
    }

    /// Whether [`Resolution::Continuous`] changes the functional.
    pub fn supports_continuous(&self) -> bool {
        matches!(self, LimitLaw::BridgeSup { .. } | LimitLaw::EpidemicSup)
    }
}

impl fmt::Display for LimitLaw {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let with_beta = |f: &mut fmt::Formatter<'_>, name: &str, beta: f64| {
            if beta == 0.0 {
                write!(f, "{name}")
            } else {
                write!(f, "{name}:{beta}")
            }
        };
        match *self {
            LimitLaw::BridgeSup { beta } => with_beta(f, "bridge-sup", beta),
            LimitLaw::BridgeInt { beta } => with_beta(f, "bridge-int", beta),
            LimitLaw::BridgeAbsInt { beta } => with_beta(f, "bridge-abs-int", beta),
            LimitLaw::EpidemicSup => write!(f, "epidemic-sup"),
            LimitLaw::EpidemicInt => write!(f, "epidemic-int"),
            LimitLaw::PanelSup => write!(f, "panel-sup"),
            LimitLaw::PanelInt => write!(f, "panel-int"),
            LimitLaw::MixturePanel { xi } => write!(f, "mixture-panel:{xi}"),
            LimitLaw::BridgeSquaredSup => write!(f, "bridge-squared-sup"),
            LimitLaw::Constant(c) => write!(f, "constant:{c}"),
        }
    }
}

impl FromStr for LimitLaw {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let (name, param) = match s.split_once(':') {
            Some((n, p)) => (n, Some(p)),
            None => (s, None),
        };
        let number = |required: bool| -> Result<f64> {
            match param {
                Some(p) => p.trim().parse::<f64>().map_err(|_| Error::Parse(format!("bad parameter in law `{s}`"))),
                None if required => Err(Error::Parse(format!("law `{s}` needs a parameter"))),
                None => Ok(0.0),
            }
        };
        let no_param = |law: LimitLaw| -> Result<LimitLaw> {
            match param {
                None => Ok(law),
                Some(_) => Err(Error::Parse(format!("law `{name}` takes no parameter"))),
            }
        };
        let law = match name {
            "bridge-sup" => LimitLaw::BridgeSup { beta: number(false)? },
            "bridge-int" => LimitLaw::BridgeInt { beta: number(false)? },
            "bridge-abs-int" => LimitLaw::BridgeAbsInt { beta: number(false)? },
            "epidemic-sup" => no_param(LimitLaw::EpidemicSup)?,
            "epidemic-int" => no_param(LimitLaw::EpidemicInt)?,
            "panel-sup" => no_param(LimitLaw::PanelSup)?,
            "panel-int" => no_param(LimitLaw::PanelInt)?,
            "mixture-panel" => LimitLaw::MixturePanel { xi: number(true)? },
            "bridge-squared-sup" => no_param(LimitLaw::BridgeSquaredSup)?,
            "constant" => LimitLaw::Constant(number(true)?),
            _ => return Err(Error::Parse(format!("unknown limit law `{s}`"))),
        };
        law.validate()?;
        Ok(law)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub enum Resolution {
    /// Functional on the interior grid points only.
    Grid,
    /// Sup-type bridge functionals include the exact conditional maximum
    /// between grid points.
    #[default]
    Continuous,
}

impl fmt::Display for Resolution {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Resolution::Grid => "grid",
            Resolution::Continuous => "continuous",
        })
    }
}

impl FromStr for Resolution {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "grid" => Ok(Resolution::Grid),
            "continuous" => Ok(Resolution::Continuous),
            other => Err(Error::Parse(format!("unknown resolution `{other}`"))),
        }
    }
}

/// Path resolution, path count, master seed and resolution of a simulation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct SimSettings {
    pub grid: usize,
    pub reps: usize,
    pub seed: u64,
    pub resolution: Resolution,
}

impl Default for SimSettings {
    fn default() -> Self {
        SimSettings { grid: DEFAULT_GRID, reps: DEFAULT_REPS, seed: 0, resolution: Resolution::Continuous }
    }
}

impl SimSettings {
    pub fn new(grid: usize, reps: usize, seed: u64) -> Result<Self> {
        let s = SimSettings { grid, reps, seed, resolution: Resolution::Continuous };
        s.validate()?;
        Ok(s)
    }

    pub fn with_resolution(mut self, resolution: Resolution) -> Self {
        self.resolution = resolution;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.grid < MIN_GRID {
            return Err(Error::InvalidParameter(format!("grid {} below minimum {MIN_GRID}", self.grid)));
        }
        if self.reps < MIN_REPS {
            return Err(Error::InvalidParameter(format!("reps {} below minimum {MIN_REPS}", self.reps)));
        }
        Ok(())
    }
}

/// Brownian bridge on `j / N`, `j = 0..=N`, pinned at both ends.
pub fn bridge_path<R: Rng + ?Sized>(grid: usize, rng: &mut R) -> Vec<f64> {
    let mut out = vec![0.0; grid + 1];
    fill_bridge(&mut out, rng);
    out
}

fn fill_bridge<R: Rng + ?Sized>(out: &mut [f64], rng: &mut R) {
    let n = out.len() - 1;
    let sd = (1.0 / n as f64).sqrt();
    out[0] = 0.0;
    let mut w = 0.0;
    for slot in out.iter_mut().skip(1) {
        let z: f64 = rng.sample(StandardNormal);
        w += sd * z;
        *slot = w;
    }
    let end = out[n];
    for (j, slot) in out.iter_mut().enumerate() {
        *slot -= j as f64 / n as f64 * end;
    }
    out[n] = 0.0;
}

/// Panel limit process `sqrt(2) (1 - x)^2 W(x^2 / (1 - x)^2)` on `j / N`, `j = 0..=N`.
pub fn panel_process<R: Rng + ?Sized>(grid: usize, rng: &mut R) -> Vec<f64> {
    let mut out = vec![0.0; grid + 1];
    fill_panel(&mut out, rng);
    out
}

fn fill_panel<R: Rng + ?Sized>(out: &mut [f64], rng: &mut R) {
    let n = out.len() - 1;
    let nf = n as f64;
    out[0] = 0.0;
    let mut w = 0.0;
    let mut prev_time = 0.0;
    for (j, slot) in out.iter_mut().enumerate().take(n).skip(1) {
        let x = j as f64 / nf;
        let time = (x / (1.0 - x)).powi(2);
        let z: f64 = rng.sample(StandardNormal);
        w += (time - prev_time).sqrt() * z;
        prev_time = time;
        *slot = std::f64::consts::SQRT_2 * (1.0 - x).powi(2) * w;
    }
    out[n] = 0.0;
}

/// Exact draw of the maximum of a Brownian bridge over an interval of length
/// `h` with endpoint values `a` and `b`, given `u` uniform on `(0, 1]`.
fn interval_max(a: f64, b: f64, h: f64, u: f64) -> f64 {
    0.5 * (a + b + ((a - b) * (a - b) - 2.0 * h * u.ln()).sqrt())
}

fn open_uniform<R: Rng + ?Sized>(rng: &mut R) -> f64 {
    1.0 - rng.random::<f64>()
}

struct Scratch {
    bridge: Vec<f64>,
    panel: Vec<f64>,
    weights: Vec<f64>,
    mid_weights: Vec<f64>,
}

impl Scratch {
    fn new(grid: usize, law: &LimitLaw) -> Self {
        let beta = match *law {
            LimitLaw::BridgeSup { beta } | LimitLaw::BridgeInt { beta } | LimitLaw::BridgeAbsInt { beta } => beta,
            _ => 0.0,
        };
        let w = WeightFunction::new(beta).unwrap_or_default();
        let nf = grid as f64;
        Scratch {
            bridge: vec![0.0; grid + 1],
            panel: vec![0.0; grid + 1],
            weights: (0..=grid)
                .map(|j| if j == 0 || j == grid { 0.0 } else { w.eval(j as f64 / nf) })
                .collect(),
            mid_weights: (0..grid).map(|j| w.eval((j as f64 + 0.5) / nf)).collect(),
        }
    }
}

fn bridge_sup(s: &Scratch, beta: f64, resolution: Resolution, rng: &mut SimRng) -> f64 {
    let b = &s.bridge;
    let n = b.len() - 1;
    let grid_max = (1..n).map(|j| s.weights[j] * b[j].abs()).fold(0.0, f64::max);
    if resolution == Resolution::Grid {
        return grid_max;
    }
    let h = 1.0 / n as f64;
    let margin = REFINE_MARGIN_SDS * h.sqrt();
    // With beta > 0 only intervals between interior points are refined and the
    // weight is frozen at the interval midpoint.
    let (first, last, weighted) = if beta == 0.0 { (0, n, false) } else { (1, n - 1, true) };
    let mut best = grid_max;
    for j in first..last {
        let (a, c) = (b[j], b[j + 1]);
        let wm = if weighted { s.mid_weights[j] } else { 1.0 };
        if wm * (a.max(c) + margin) > grid_max {
            best = best.max(wm * interval_max(a, c, h, open_uniform(rng)));
        }
        if wm * ((-a).max(-c) + margin) > grid_max {
            best = best.max(wm * interval_max(-a, -c, h, open_uniform(rng)));
        }
    }
    best
}

fn epidemic_sup(b: &[f64], resolution: Resolution, rng: &mut SimRng) -> f64 {
    let n = b.len() - 1;
    let (lo, hi) = b[1..].iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &v| (lo.min(v), hi.max(v)));
    if resolution == Resolution::Grid {
        return hi - lo;
    }
    let h = 1.0 / n as f64;
    let margin = REFINE_MARGIN_SDS * h.sqrt();
    let (mut top, mut bottom) = (hi, lo);
    for j in 0..n {
        let (a, c) = (b[j], b[j + 1]);
        if a.max(c) + margin > hi {
            top = top.max(interval_max(a, c, h, open_uniform(rng)));
        }
        if a.min(c) - margin < lo {
            bottom = bottom.min(-interval_max(-a, -c, h, open_uniform(rng)));
        }
    }
    top - bottom
}

fn draw(law: &LimitLaw, resolution: Resolution, s: &mut Scratch, rng: &mut SimRng) -> f64 {
    let n = s.bridge.len() - 1;
    let nf = n as f64;
    match *law {
        LimitLaw::Constant(c) => c,
        LimitLaw::BridgeSup { beta } => {
            fill_bridge(&mut s.bridge, rng);
            bridge_sup(s, beta, resolution, rng)
        }
        LimitLaw::BridgeInt { .. } => {
            fill_bridge(&mut s.bridge, rng);
            (1..n).map(|j| (s.weights[j] * s.bridge[j]).powi(2)).sum::<f64>() / nf
        }
        LimitLaw::BridgeAbsInt { .. } => {
            fill_bridge(&mut s.bridge, rng);
            (1..n).map(|j| s.weights[j] * s.bridge[j].abs()).sum::<f64>() / nf
        }
        LimitLaw::EpidemicSup => {
            fill_bridge(&mut s.bridge, rng);
            epidemic_sup(&s.bridge, resolution, rng)
        }
        LimitLaw::EpidemicInt => {
            fill_bridge(&mut s.bridge, rng);
            pairwise_abs_diff_sum(&s.bridge[1..]) / (nf * nf)
        }
        LimitLaw::PanelSup => {
            fill_panel(&mut s.panel, rng);
            s.panel[1..n].iter().copied().fold(f64::NEG_INFINITY, f64::max)
        }
        LimitLaw::PanelInt => {
            fill_panel(&mut s.panel, rng);
            s.panel[1..n].iter().sum::<f64>() / nf
        }
        LimitLaw::MixturePanel { xi } => {
            fill_panel(&mut s.panel, rng);
            fill_bridge(&mut s.bridge, rng);
            (1..n)
                .map(|j| {
                    let x = j as f64 / nf;
                    s.panel[j] + xi * (s.bridge[j].powi(2) - x * (1.0 - x))
                })
                .fold(f64::NEG_INFINITY, f64::max)
        }
        LimitLaw::BridgeSquaredSup => {
            fill_bridge(&mut s.bridge, rng);
            (1..n)
                .map(|j| {
                    let x = j as f64 / nf;
                    s.bridge[j].powi(2) - x * (1.0 - x)
                })
                .fold(f64::NEG_INFINITY, f64::max)
        }
    }
}

/// One draw of the limiting functional.
pub fn simulate_path(law: &LimitLaw, grid: usize, resolution: Resolution, rng: &mut SimRng) -> Result<f64> {
    law.validate()?;
    if grid < 2 {
        return Err(Error::InvalidParameter(format!("grid {grid} too small")));
    }
    let mut scratch = Scratch::new(grid, law);
    Ok(draw(law, resolution, &mut scratch, rng))
}

/// Sorted Monte-Carlo sample of a limit law.
#[derive(Debug, Clone, PartialEq)]
pub struct NullDistribution {
    law: LimitLaw,
    settings: SimSettings,
    draws: Vec<f64>,
}

impl NullDistribution {
    /// Simulates `settings.reps` draws in parallel batches. Batch `b` uses its
    /// own counter-based stream, so the sample does not depend on the thread count.
    pub fn simulate(law: LimitLaw, settings: SimSettings) -> Result<Self> {
        law.validate()?;
        settings.validate()?;
        let batches = settings.reps.div_ceil(PATHS_PER_BATCH);
        let chunks: Vec<Vec<f64>> = (0..batches)
            .into_par_iter()
            .map(|b| {
                let count = PATHS_PER_BATCH.min(settings.reps - b * PATHS_PER_BATCH);
                let mut rng = rng::stream(settings.seed, domain::LIMIT_PATHS, b as u64);
                let mut scratch = Scratch::new(settings.grid, &law);
                (0..count).map(|_| draw(&law, settings.resolution, &mut scratch, &mut rng)).collect()
            })
            .collect();
        let mut draws: Vec<f64> = chunks.into_iter().flatten().collect();
        draws.sort_by(f64::total_cmp);
        Ok(NullDistribution { law, settings, draws })
    }

    /// Builds a distribution from externally simulated draws, e.g. empirical
    /// null statistics.
    pub fn from_draws(law: LimitLaw, settings: SimSettings, mut draws: Vec<f64>) -> Result<Self> {
        if draws.is_empty() {
            return Err(Error::InvalidParameter("no draws".into()));
        }
        if draws.iter().any(|v| v.is_nan()) {
            return Err(Error::NonFinite("draws"));
        }
        draws.sort_by(f64::total_cmp);
        Ok(NullDistribution { law, settings, draws })
    }

    pub fn law(&self) -> LimitLaw {
        self.law
    }

    pub fn settings(&self) -> SimSettings {
        self.settings
    }

    /// Draws in increasing order.
    pub fn draws(&self) -> &[f64] {
        &self.draws
    }

    /// Empirical `(1 - alpha)` quantile, the `ceil((1 - alpha) n)`-th order statistic.
    pub fn quantile(&self, alpha: f64) -> Result<f64> {
        Ok(self.draws[order_index(alpha, self.draws.len())?])
    }

    /// `(#{draws >= statistic} + 1) / (n + 1)`.
    pub fn p_value(&self, statistic: f64) -> f64 {
        if statistic.is_nan() {
            return f64::NAN;
        }
        let below = self.draws.partition_point(|&v| v < statistic);
        (self.draws.len() - below + 1) as f64 / (self.draws.len() + 1) as f64
    }

    pub fn table(&self, alphas: &[f64]) -> Result<QuantileTable> {
        let mut levels = alphas
            .iter()
            .map(|&a| Ok((a, self.quantile(a)?)))
            .collect::<Result<Vec<_>>>()?;
        levels.sort_by(|x, y| x.0.total_cmp(&y.0));
        levels.dedup_by(|x, y| x.0 == y.0);
        Ok(QuantileTable { law: self.law, settings: self.settings, levels })
    }
}

pub(crate) fn order_index(alpha: f64, n: usize) -> Result<usize> {
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(Error::InvalidParameter(format!("level {alpha} not in (0, 1)")));
    }
    let rank = ((1.0 - alpha) * n as f64 - 1e-9).ceil().max(1.0) as usize;
    Ok(rank.min(n) - 1)
}

/// Empirical `(1 - alpha)` quantile of a freshly simulated law.
pub fn quantile(law: LimitLaw, alpha: f64, settings: SimSettings) -> Result<f64> {
    NullDistribution::simulate(law, settings)?.quantile(alpha)
}

/// Monte-Carlo p-value of `statistic` under a freshly simulated law.
pub fn mc_pvalue(statistic: f64, law: LimitLaw, settings: SimSettings) -> Result<f64> {
    Ok(NullDistribution::simulate(law, settings)?.p_value(statistic))
}

/// Quantiles of a law at a list of levels, with the simulation settings that produced them.
#[derive(Debug, Clone, PartialEq)]
pub struct QuantileTable {
    pub law: LimitLaw,
    pub settings: SimSettings,
    /// `(alpha, quantile)` pairs, increasing in `alpha`.
    pub levels: Vec<(f64, f64)>,
}

impl QuantileTable {
    pub fn lookup(&self, alpha: f64) -> Option<f64> {
        self.levels.iter().find(|(a, _)| (a - alpha).abs() < 1e-12).map(|&(_, q)| q)
    }

    pub fn to_text(&self) -> String {
        let s = &self.settings;
        let mut out = format!(
            "# law={}\n# grid={}\n# reps={}\n# seed={}\n# resolution={}\nalpha,quantile\n",
            self.law, s.grid, s.reps, s.seed, s.resolution
        );
        for (a, q) in &self.levels {
            out.push_str(&format!("{a},{q:.17e}\n"));
        }
        out
    }

    pub fn write(&self, path: &Path) -> Result<()> {
        std::fs::write(path, self.to_text())?;
        Ok(())
    }

    pub fn read(path: &Path) -> Result<Self> {
        std::fs::read_to_string(path)?.parse()
    }

    /// File name under which [`TableCache`] persists a table.
    pub fn file_name(law: &LimitLaw, settings: &SimSettings) -> String {
        let law = law.to_string().replace(':', "_");
        format!("{law}_n{}_r{}_s{}_{}.csv", settings.grid, settings.reps, settings.seed, settings.resolution)
    }
}

impl FromStr for QuantileTable {
    type Err = Error;

    fn from_str(text: &str) -> Result<Self> {
        let mut fields: HashMap<&str, &str> = HashMap::new();
        let mut levels = Vec::new();
        let mut seen_header = false;
        for line in text.lines().map(str::trim).filter(|l| !l.is_empty()) {
            if let Some(rest) = line.strip_prefix('#') {
                let (k, v) = rest
                    .trim()
                    .split_once('=')
                    .ok_or_else(|| Error::Parse(format!("bad header line `{line}`")))?;
                fields.insert(k.trim(), v.trim());
            } else if line == "alpha,quantile" {
                seen_header = true;
            } else {
                let (a, q) = line.split_once(',').ok_or_else(|| Error::Parse(format!("bad row `{line}`")))?;
                let parse = |v: &str| v.trim().parse::<f64>().map_err(|_| Error::Parse(format!("bad number in `{line}`")));
                levels.push((parse(a)?, parse(q)?));
            }
        }
        if !seen_header {
            return Err(Error::Parse("missing `alpha,quantile` header".into()));
        }
        let get = |k: &str| fields.get(k).copied().ok_or_else(|| Error::Parse(format!("missing `{k}` header")));
        let num = |k: &str| -> Result<u64> { get(k)?.parse().map_err(|_| Error::Parse(format!("bad `{k}` header"))) };
        let resolution = match fields.get("resolution") {
            Some(r) => r.parse()?,
            None => Resolution::Grid,
        };
        let settings = SimSettings { grid: num("grid")? as usize, reps: num("reps")? as usize, seed: num("seed")?, resolution };
        if levels.windows(2).any(|w| w[0].0 < w[1].0 && w[0].1 < w[1].1) {
            return Err(Error::Parse("quantiles must be non-increasing in alpha".into()));
        }
        Ok(QuantileTable { law: get("law")?.parse()?, settings, levels })
    }
}

/// Quantile tables keyed by law and simulation settings, held in memory and
/// optionally persisted to a directory.
#[derive(Debug, Default)]
pub struct TableCache {
    dir: Option<PathBuf>,
    tables: HashMap<String, QuantileTable>,
}

impl TableCache {
    pub fn in_memory() -> Self {
        TableCache::default()
    }

    pub fn with_dir(dir: impl Into<PathBuf>) -> Self {
        TableCache { dir: Some(dir.into()), tables: HashMap::new() }
    }

    /// Persists to `$HDCP_TABLE_DIR` when set.
    pub fn from_env() -> Self {
        match std::env::var_os(TABLE_DIR_ENV) {
            Some(dir) if !dir.is_empty() => TableCache::with_dir(PathBuf::from(dir)),
            _ => TableCache::in_memory(),
        }
    }

    pub fn dir(&self) -> Option<&Path> {
        self.dir.as_deref()
    }

    /// Table covering `alpha`, loading or simulating it as needed.
    pub fn table(&mut self, law: LimitLaw, alpha: f64, settings: SimSettings) -> Result<&QuantileTable> {
        let name = QuantileTable::file_name(&law, &settings);
        let cached = self.tables.get(&name).is_some_and(|t| t.lookup(alpha).is_some());
        if !cached {
            let from_disk = self
                .dir
                .as_ref()
                .map(|d| d.join(&name))
                .filter(|p| p.exists())
                .and_then(|p| QuantileTable::read(&p).ok())
                .filter(|t| t.law == law && t.settings == settings && t.lookup(alpha).is_some());
            let table = match from_disk {
                Some(t) => t,
                None => {
                    let mut alphas = DEFAULT_ALPHAS.to_vec();
                    alphas.push(alpha);
                    let table = NullDistribution::simulate(law, settings)?.table(&alphas)?;
                    if let Some(dir) = &self.dir {
                        std::fs::create_dir_all(dir)?;
                        table.write(&dir.join(&name))?;
                    }
                    table
                }
            };
            self.tables.insert(name.clone(), table);
        }
        Ok(&self.tables[&name])
    }

    pub fn critical_value(&mut self, law: LimitLaw, alpha: f64, settings: SimSettings) -> Result<f64> {
        let table = self.table(law, alpha, settings)?;
        table.lookup(alpha).ok_or_else(|| Error::InvalidParameter(format!("level {alpha} missing")))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn settings(reps: usize, seed: u64) -> SimSettings {
        SimSettings::new(200, reps, seed).unwrap()
    }

    #[test]
    fn constant_law_quantiles() {
        let dist = NullDistribution::simulate(LimitLaw::Constant(2.5), settings(1000, 1)).unwrap();
        for a in [0.01, 0.05, 0.5, 0.9] {
            assert_eq!(dist.quantile(a).unwrap(), 2.5);
        }
    }

    #[test]
    fn p_value_extremes() {
        let dist = NullDistribution::simulate(LimitLaw::BridgeSup { beta: 0.0 }, settings(2000, 3)).unwrap();
        assert_eq!(dist.p_value(f64::NEG_INFINITY), 1.0);
        assert_eq!(dist.p_value(f64::INFINITY), 1.0 / 2001.0);
        let q = dist.quantile(0.05).unwrap();
        assert!((dist.p_value(q) - 0.05).abs() < 0.002);
    }

    #[test]
    fn bridge_paths_are_pinned() {
        let mut r = rng::seeded(5);
        let b = bridge_path(100, &mut r);
        assert_eq!(b.len(), 101);
        assert_eq!(b[0], 0.0);
        assert_eq!(b[100], 0.0);
        let p = panel_process(100, &mut r);
        assert_eq!(p[0], 0.0);
        assert_eq!(p[100], 0.0);
    }

    #[test]
    fn draws_nonnegative_and_deterministic() {
        let law = LimitLaw::BridgeSup { beta: 0.0 };
        let a = NullDistribution::simulate(law, settings(2500, 9)).unwrap();
        let b = NullDistribution::simulate(law, settings(2500, 9)).unwrap();
        assert_eq!(a, b);
        assert!(a.draws()[0] >= 0.0);
        let c = NullDistribution::simulate(law, settings(2500, 10)).unwrap();
        assert_ne!(a.draws(), c.draws());
    }

    #[test]
    fn continuous_sup_dominates_grid_sup() {
        let law = LimitLaw::BridgeSup { beta: 0.0 };
        let grid = quantile(law, 0.05, settings(4000, 2).with_resolution(Resolution::Grid)).unwrap();
        let cont = quantile(law, 0.05, settings(4000, 2)).unwrap();
        assert!(cont > grid);
    }

    #[test]
    fn quantiles_monotone_in_level() {
        for law in [
            LimitLaw::BridgeSup { beta: 0.25 },
            LimitLaw::BridgeInt { beta: 0.0 },
            LimitLaw::EpidemicSup,
            LimitLaw::EpidemicInt,
            LimitLaw::PanelSup,
            LimitLaw::PanelInt,
            LimitLaw::BridgeSquaredSup,
        ] {
            let t = NullDistribution::simulate(law, settings(1000, 4)).unwrap().table(&[0.01, 0.05, 0.1, 0.5]).unwrap();
            assert!(t.levels.windows(2).all(|w| w[0].1 >= w[1].1), "{law}");
        }
    }

    #[test]
    fn mixture_with_zero_weight_is_panel_sup() {
        let mut r1 = rng::seeded(11);
        let mut r2 = rng::seeded(11);
        let a = simulate_path(&LimitLaw::MixturePanel { xi: 0.0 }, 200, Resolution::Grid, &mut r1).unwrap();
        let b = simulate_path(&LimitLaw::PanelSup, 200, Resolution::Grid, &mut r2).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn epidemic_functionals_match_brute_force_on_a_path() {
        let mut r = rng::seeded(21);
        let b = bridge_path(150, &mut r);
        let mut brute = 0.0;
        for i in 1..b.len() {
            for j in (i + 1)..b.len() {
                brute += (b[j] - b[i]).abs();
            }
        }
        assert!((pairwise_abs_diff_sum(&b[1..]) - brute).abs() < 1e-9);
    }

    #[test]
    fn law_descriptors_round_trip() {
        for law in [
            LimitLaw::BridgeSup { beta: 0.0 },
            LimitLaw::BridgeSup { beta: 0.25 },
            LimitLaw::BridgeInt { beta: 0.1 },
            LimitLaw::BridgeAbsInt { beta: 0.0 },
            LimitLaw::EpidemicSup,
            LimitLaw::EpidemicInt,
            LimitLaw::PanelSup,
            LimitLaw::PanelInt,
            LimitLaw::MixturePanel { xi: 0.5 },
            LimitLaw::BridgeSquaredSup,
            LimitLaw::Constant(1.5),
        ] {
            assert_eq!(law.to_string().parse::<LimitLaw>().unwrap(), law);
        }
        assert!("bridge-sup:0.5".parse::<LimitLaw>().is_err());
        assert!("mixture-panel".parse::<LimitLaw>().is_err());
        assert!("panel-sup:1".parse::<LimitLaw>().is_err());
        assert!("nonsense".parse::<LimitLaw>().is_err());
    }

    #[test]
    fn settings_invariants() {
        assert!(SimSettings::new(99, 1000, 0).is_err());
        assert!(SimSettings::new(100, 999, 0).is_err());
        assert!(SimSettings::new(100, 1000, 0).is_ok());
    }

    #[test]
    fn table_text_round_trip_and_cache() {
        let law = LimitLaw::BridgeInt { beta: 0.0 };
        let table = NullDistribution::simulate(law, settings(1000, 8)).unwrap().table(&DEFAULT_ALPHAS).unwrap();
        let parsed: QuantileTable = table.to_text().parse().unwrap();
        assert_eq!(parsed, table);

        let dir = tempfile::tempdir().unwrap();
        let mut cache = TableCache::with_dir(dir.path());
        let q = cache.critical_value(law, 0.05, settings(1000, 8)).unwrap();
        assert_eq!(Some(q), table.lookup(0.05));
        let file = dir.path().join(QuantileTable::file_name(&law, &settings(1000, 8)));
        assert!(file.exists());
        let mut fresh = TableCache::with_dir(dir.path());
        assert_eq!(fresh.critical_value(law, 0.05, settings(1000, 8)).unwrap(), q);
    }

    #[test]
    fn order_statistic_convention() {
        assert_eq!(order_index(0.05, 100).unwrap(), 94);
        assert_eq!(order_index(0.05, 1_000_000).unwrap(), 949_999);
        assert_eq!(order_index(0.999, 10).unwrap(), 0);
        assert!(order_index(0.0, 10).is_err());
    }
}
