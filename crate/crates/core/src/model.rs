// SPDX-License-Identifier: MIT OR Apache-2.0

//! Data-generating model: `X[i, t] = mu[i] + delta[i] * g(t / T) + e[i, t]`.
//!
//! Errors are i.i.d. over time and follow a finite factor model across
//! components, `e_t = sum_j a_j eta[j, t]` with independent zero-mean,
//! unit-variance innovations `eta`.

use nalgebra::{DMatrix, DVector};
use rand::Rng;
use rand_distr::{Distribution, StandardNormal, StudentT};

use crate::rng::{self, SimRng};
use crate::{Error, Result};

/// Shape `g: [0, 1] -> R` of the mean change in rescaled time.
#[derive(Debug, Clone, PartialEq)]
pub enum SignalShape {
    /// At most one change: `g(u) = 1` for `u > theta`, else `0`.
    Amoc { theta: f64 },
    /// Epidemic change: `g(u) = 1` on the open interval `(theta1, theta2)`.
    Epidemic { theta1: f64, theta2: f64 },
    /// Arbitrary shape given by its values `g(t / T)`, `t = 1..=T`.
    Tabulated(Vec<f64>),
}

impl SignalShape {
    pub fn amoc(theta: f64) -> Result<Self> {
        if !(theta > 0.0 && theta < 1.0) {
            return Err(Error::InvalidParameter(format!("AMOC theta {theta} not in (0,1)")));
        }
        Ok(SignalShape::Amoc { theta })
    }

    pub fn epidemic(theta1: f64, theta2: f64) -> Result<Self> {
        if !(theta1 >= 0.0 && theta1 < theta2 && theta2 <= 1.0) {
            return Err(Error::InvalidParameter(format!(
                "epidemic interval ({theta1}, {theta2}) must satisfy 0 <= theta1 < theta2 <= 1"
            )));
        }
        Ok(SignalShape::Epidemic { theta1, theta2 })
    }

    pub fn tabulated(values: Vec<f64>) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::InvalidParameter("tabulated shape is empty".into()));
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite("tabulated shape"));
        }
        Ok(SignalShape::Tabulated(values))
    }

    pub fn eval(&self, u: f64) -> f64 {
        match *self {
            SignalShape::Amoc { theta } => {
                if u > theta {
                    1.0
                } else {
                    0.0
                }
            }
            SignalShape::Epidemic { theta1, theta2 } => {
                if u > theta1 && u < theta2 {
                    1.0
                } else {
                    0.0
                }
            }
            SignalShape::Tabulated(ref values) => {
                let n = values.len();
                let idx = ((u * n as f64).ceil() as isize - 1).clamp(0, n as isize - 1);
                values[idx as usize]
            }
        }
    }
}

/// Law of the innovations `eta`. All variants have mean zero and unit variance.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub enum InnovationLaw {
    #[default]
    StandardNormal,
    /// Uniform on `[-sqrt(3), sqrt(3)]`.
    Uniform,
    /// Student-t with `dof > 2`, rescaled to unit variance. Moments exist
    /// only below order `dof`.
    StudentT { dof: f64 },
}

impl InnovationLaw {
    fn validate(&self) -> Result<()> {
        if let InnovationLaw::StudentT { dof } = *self {
            if !(dof > 2.0) {
                return Err(Error::InvalidParameter(format!(
                    "Student-t innovations need dof > 2 for a finite variance (got {dof})"
                )));
            }
        }
        Ok(())
    }

    fn sample(&self, rng: &mut SimRng) -> f64 {
        match *self {
            InnovationLaw::StandardNormal => rng.sample(StandardNormal),
            InnovationLaw::Uniform => (rng.random::<f64>() * 2.0 - 1.0) * 3f64.sqrt(),
            InnovationLaw::StudentT { dof } => {
                // validated on construction
                let t = StudentT::new(dof).expect("dof > 2");
                t.sample(rng) * ((dof - 2.0) / dof).sqrt()
            }
        }
    }
}

/// Factor loadings of the error vector.
#[derive(Debug, Clone, PartialEq)]
pub enum Loadings {
    /// `a_j = s_j e_j`: independent components, `Sigma = diag(s^2)`.
    IndependentComponents { s: Vec<f64> },
    /// One common factor: `Sigma = phi phi^T` (rank one).
    FullyDependent { phi: Vec<f64> },
    /// Independent part plus one common factor: `Sigma = diag(s^2) + phi phi^T`.
    Mixed { s: Vec<f64>, phi: Vec<f64> },
    /// Finitely many arbitrary loading vectors `a_j`.
    GeneralLinear { loadings: Vec<Vec<f64>> },
}

#[derive(Debug, Clone, PartialEq)]
pub struct ErrorStructure {
    loadings: Loadings,
    innovations: InnovationLaw,
    dim: usize,
}

fn check_finite(v: &[f64], what: &'static str) -> Result<()> {
    if v.iter().all(|x| x.is_finite()) {
        Ok(())
    } else {
        Err(Error::NonFinite(what))
    }
}

fn check_positive(s: &[f64]) -> Result<()> {
    check_finite(s, "loadings")?;
    match s.iter().position(|&x| x <= 0.0) {
        Some(index) => Err(Error::NonPositiveLoading { index, value: s[index] }),
        None => Ok(()),
    }
}

impl ErrorStructure {
    pub fn independent(s: Vec<f64>) -> Result<Self> {
        check_positive(&s)?;
        Self::build(Loadings::IndependentComponents { s })
    }

    pub fn fully_dependent(phi: Vec<f64>) -> Result<Self> {
        check_finite(&phi, "loadings")?;
        Self::build(Loadings::FullyDependent { phi })
    }

    pub fn mixed(s: Vec<f64>, phi: Vec<f64>) -> Result<Self> {
        check_positive(&s)?;
        check_finite(&phi, "loadings")?;
        if s.len() != phi.len() {
            return Err(Error::DimensionMismatch { expected: s.len(), found: phi.len() });
        }
        Self::build(Loadings::Mixed { s, phi })
    }

    pub fn general(loadings: Vec<Vec<f64>>) -> Result<Self> {
        let Some(first) = loadings.first() else {
            return Err(Error::InvalidParameter("general structure needs at least one factor".into()));
        };
        let d = first.len();
        for a in &loadings {
            if a.len() != d {
                return Err(Error::DimensionMismatch { expected: d, found: a.len() });
            }
            check_finite(a, "loadings")?;
        }
        Self::build(Loadings::GeneralLinear { loadings })
    }

    fn build(loadings: Loadings) -> Result<Self> {
        let dim = match &loadings {
            Loadings::IndependentComponents { s } => s.len(),
            Loadings::FullyDependent { phi } => phi.len(),
            Loadings::Mixed { s, .. } => s.len(),
            Loadings::GeneralLinear { loadings } => loadings[0].len(),
        };
        if dim == 0 {
            return Err(Error::InvalidParameter("dimension must be at least 1".into()));
        }
        Ok(ErrorStructure { loadings, innovations: InnovationLaw::StandardNormal, dim })
    }

    pub fn with_innovations(mut self, law: InnovationLaw) -> Result<Self> {
        law.validate()?;
        self.innovations = law;
        Ok(self)
    }

    pub fn loadings(&self) -> &Loadings {
        &self.loadings
    }

    pub fn innovations(&self) -> InnovationLaw {
        self.innovations
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// `Sigma = sum_j a_j a_j^T`.
    pub fn covariance(&self) -> DMatrix<f64> {
        let d = self.dim;
        match &self.loadings {
            Loadings::IndependentComponents { s } => {
                DMatrix::from_diagonal(&DVector::from_iterator(d, s.iter().map(|x| x * x)))
            }
            Loadings::FullyDependent { phi } => {
                let p = DVector::from_column_slice(phi);
                &p * p.transpose()
            }
            Loadings::Mixed { s, phi } => {
                let p = DVector::from_column_slice(phi);
                DMatrix::from_diagonal(&DVector::from_iterator(d, s.iter().map(|x| x * x)))
                    + &p * p.transpose()
            }
            Loadings::GeneralLinear { loadings } => {
                let mut sigma = DMatrix::zeros(d, d);
                for a in loadings {
                    let a = DVector::from_column_slice(a);
                    sigma += &a * a.transpose();
                }
                sigma
            }
        }
    }

    /// Component variances `sigma_j^2`, the diagonal of the covariance.
    pub fn variances(&self) -> Vec<f64> {
        match &self.loadings {
            Loadings::IndependentComponents { s } => s.iter().map(|x| x * x).collect(),
            Loadings::FullyDependent { phi } => phi.iter().map(|x| x * x).collect(),
            Loadings::Mixed { s, phi } => s.iter().zip(phi).map(|(s, f)| s * s + f * f).collect(),
            Loadings::GeneralLinear { loadings } => (0..self.dim)
                .map(|i| loadings.iter().map(|a| a[i] * a[i]).sum())
                .collect(),
        }
    }

    /// Draws one error vector `e_t` into `out`.
    pub fn sample_into(&self, rng: &mut SimRng, out: &mut [f64]) {
        let law = self.innovations;
        match &self.loadings {
            Loadings::IndependentComponents { s } => {
                for (o, s) in out.iter_mut().zip(s) {
                    *o = s * law.sample(rng);
                }
            }
            Loadings::FullyDependent { phi } => {
                let eta = law.sample(rng);
                for (o, f) in out.iter_mut().zip(phi) {
                    *o = f * eta;
                }
            }
            Loadings::Mixed { s, phi } => {
                for (o, s) in out.iter_mut().zip(s) {
                    *o = s * law.sample(rng);
                }
                let eta = law.sample(rng);
                for (o, f) in out.iter_mut().zip(phi) {
                    *o += f * eta;
                }
            }
            Loadings::GeneralLinear { loadings } => {
                out.iter_mut().for_each(|o| *o = 0.0);
                for a in loadings {
                    let eta = law.sample(rng);
                    for (o, a) in out.iter_mut().zip(a) {
                        *o += a * eta;
                    }
                }
            }
        }
    }
}

/// Mean change of the model: baseline `mu`, change `delta`, shape `g`.
#[derive(Debug, Clone, PartialEq)]
pub struct ChangeSpec {
    pub mu: Vec<f64>,
    pub delta: Vec<f64>,
    pub shape: SignalShape,
}

impl ChangeSpec {
    pub fn new(mu: Vec<f64>, delta: Vec<f64>, shape: SignalShape) -> Result<Self> {
        if mu.len() != delta.len() {
            return Err(Error::DimensionMismatch { expected: mu.len(), found: delta.len() });
        }
        check_finite(&mu, "mu")?;
        check_finite(&delta, "delta")?;
        Ok(ChangeSpec { mu, delta, shape })
    }

    /// No change, zero baseline.
    pub fn null(d: usize) -> Self {
        ChangeSpec {
            mu: vec![0.0; d],
            delta: vec![0.0; d],
            shape: SignalShape::Amoc { theta: 0.5 },
        }
    }

    pub fn dim(&self) -> usize {
        self.delta.len()
    }

    pub fn is_null(&self) -> bool {
        self.delta.iter().all(|&x| x == 0.0)
    }
}

/// A `d x T` panel of observations; column `t` is the observation vector `X_t`.
#[derive(Debug, Clone, PartialEq)]
pub struct PanelSeries {
    data: DMatrix<f64>,
}

impl PanelSeries {
    pub fn new(data: DMatrix<f64>) -> Result<Self> {
        if data.nrows() < 1 {
            return Err(Error::InvalidParameter("panel needs at least one component".into()));
        }
        if data.ncols() < 2 {
            return Err(Error::TooShort { needed: 2, found: data.ncols() });
        }
        if data.iter().any(|x| !x.is_finite()) {
            return Err(Error::NonFinite("panel data"));
        }
        Ok(PanelSeries { data })
    }

    /// Builds a panel from one vector per component.
    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let d = rows.len();
        let t = rows.first().map_or(0, Vec::len);
        if let Some(bad) = rows.iter().find(|r| r.len() != t) {
            return Err(Error::DimensionMismatch { expected: t, found: bad.len() });
        }
        Self::new(DMatrix::from_fn(d, t, |i, j| rows[i][j]))
    }

    /// A single-component panel.
    pub fn univariate(values: &[f64]) -> Result<Self> {
        Self::new(DMatrix::from_row_slice(1, values.len(), values))
    }

    pub fn dim(&self) -> usize {
        self.data.nrows()
    }

    pub fn len(&self) -> usize {
        self.data.ncols()
    }

    pub fn is_empty(&self) -> bool {
        self.data.ncols() == 0
    }

    pub fn data(&self) -> &DMatrix<f64> {
        &self.data
    }

    pub fn row(&self, i: usize) -> Vec<f64> {
        self.data.row(i).iter().copied().collect()
    }

    /// Columns `start..end` as a new panel.
    pub fn slice(&self, start: usize, end: usize) -> Result<Self> {
        if end > self.len() || start >= end {
            return Err(Error::InvalidParameter(format!(
                "bad slice {start}..{end} of length {}",
                self.len()
            )));
        }
        Self::new(self.data.columns(start, end - start).into_owned())
    }

    /// Applies `f` to each component series.
    pub fn map_rows<F>(&self, f: F) -> Result<Self>
    where
        F: Fn(&[f64]) -> Result<Vec<f64>>,
    {
        let rows = (0..self.dim())
            .map(|i| f(&self.row(i)))
            .collect::<Result<Vec<_>>>()?;
        Self::from_rows(&rows)
    }
}

/// Draws a panel from the model with a fresh generator seeded by `seed`.
pub fn generate(
    spec: &ChangeSpec,
    structure: &ErrorStructure,
    t: usize,
    seed: u64,
) -> Result<PanelSeries> {
    let mut rng = rng::stream(seed, rng::domain::GENERATE, 0);
    generate_with(spec, structure, t, &mut rng)
}

/// Like [`generate`] but consumes a caller-provided generator.
pub fn generate_with(
    spec: &ChangeSpec,
    structure: &ErrorStructure,
    t: usize,
    rng: &mut SimRng,
) -> Result<PanelSeries> {
    let d = spec.dim();
    if structure.dim() != d {
        return Err(Error::DimensionMismatch { expected: d, found: structure.dim() });
    }
    if t < 2 {
        return Err(Error::TooShort { needed: 2, found: t });
    }
    let mut data = DMatrix::zeros(d, t);
    let mut e = vec![0.0; d];
    for col in 0..t {
        structure.sample_into(rng, &mut e);
        let g = spec.shape.eval((col + 1) as f64 / t as f64);
        for i in 0..d {
            data[(i, col)] = spec.mu[i] + spec.delta[i] * g + e[i];
        }
    }
    PanelSeries::new(data)
}

/// Centered drift `H(x) = int_0^x g - x int_0^1 g` on `x_j = j / grid`,
/// `j = 0..=grid`, using the same discrete sums as the CUSUM statistics.
pub fn drift_curve(shape: &SignalShape, grid: usize) -> Result<Vec<f64>> {
    if grid < 2 {
        return Err(Error::InvalidParameter(format!("grid {grid} < 2")));
    }
    let n = grid as f64;
    let mut partial = Vec::with_capacity(grid + 1);
    let mut acc = 0.0;
    partial.push(0.0);
    for i in 1..=grid {
        acc += shape.eval(i as f64 / n) / n;
        partial.push(acc);
    }
    let total = acc;
    Ok(partial
        .iter()
        .enumerate()
        .map(|(j, p)| p - (j as f64 / n) * total)
        .collect())
}
