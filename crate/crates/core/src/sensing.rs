//! Delay schedules, the cosine sensing matrix and measurement synthesis.

use std::f64::consts::TAU;

use nalgebra::{DMatrix, DVector};
use rand::Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rng::{self, Purpose};

/// Nonnegative modal weights `x_n = |c_n|²`, `n = 1..N`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModalSpectrum {
    weights: Vec<f64>,
}

impl ModalSpectrum {
    pub fn new(weights: Vec<f64>) -> Result<Self> {
        if weights.is_empty() {
            return Err(Error::InvalidArgument("spectrum must have at least one mode".into()));
        }
        if let Some((k, w)) = weights.iter().enumerate().find(|(_, w)| !(w.is_finite() && **w >= 0.0)) {
            return Err(Error::InvalidArgument(format!(
                "weight at n={} is {w}; weights must be finite and >= 0",
                k + 1
            )));
        }
        Ok(Self { weights })
    }

    pub fn zeros(n: usize) -> Result<Self> {
        Self::new(vec![0.0; n])
    }

    /// Length-`n` spectrum from `(harmonic index, weight)` pairs, indices 1-based.
    pub fn from_support(n: usize, entries: &[(usize, f64)]) -> Result<Self> {
        let mut weights = vec![0.0; n];
        for &(k, w) in entries {
            if k == 0 || k > n {
                return Err(Error::IndexOutOfRange { index: k, max: n });
            }
            weights[k - 1] = w;
        }
        Self::new(weights)
    }

    /// The unit spectrum `e_k` of length `n`.
    pub fn unit(n: usize, k: usize) -> Result<Self> {
        Self::from_support(n, &[(k, 1.0)])
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    pub fn sparsity(&self) -> usize {
        self.weights.iter().filter(|w| **w > 0.0).count()
    }

    /// 1-based indices of the nonzero weights.
    pub fn support(&self) -> Vec<usize> {
        self.weights.iter().enumerate().filter(|(_, w)| **w > 0.0).map(|(k, _)| k + 1).collect()
    }

    pub fn is_normalized(&self) -> bool {
        (self.weights.iter().sum::<f64>() - 1.0).abs() <= 1e-9
    }
}

/// How a schedule's delays were produced.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ScheduleKind {
    EvenGrid,
    UniformRandom,
    External,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DelaySchedule {
    alphas: Vec<f64>,
    kind: ScheduleKind,
    seed: Option<u64>,
}

impl DelaySchedule {
    /// Wraps externally supplied delays in radians.
    ///
    /// A sequence that matches the half-open even grid `2πj/M` to within
    /// 1e-12 rad is tagged [`ScheduleKind::EvenGrid`] so that harmonic
    /// inversion accepts it; anything else is [`ScheduleKind::External`].
    pub fn from_alphas(alphas: Vec<f64>) -> Result<Self> {
        if alphas.is_empty() {
            return Err(Error::InvalidArgument("schedule must contain at least one delay".into()));
        }
        if let Some((j, a)) = alphas.iter().enumerate().find(|(_, a)| !(0.0..=TAU).contains(*a)) {
            return Err(Error::InvalidArgument(format!("delay {j} is {a}, outside [0, 2π]")));
        }
        let m = alphas.len();
        let even = alphas.iter().enumerate().all(|(j, a)| (a - TAU * j as f64 / m as f64).abs() <= 1e-12);
        let kind = if even { ScheduleKind::EvenGrid } else { ScheduleKind::External };
        Ok(Self { alphas, kind, seed: None })
    }

    pub fn alphas(&self) -> &[f64] {
        &self.alphas
    }

    pub fn kind(&self) -> ScheduleKind {
        self.kind
    }

    pub fn seed(&self) -> Option<u64> {
        self.seed
    }

    pub fn len(&self) -> usize {
        self.alphas.len()
    }

    pub fn is_empty(&self) -> bool {
        self.alphas.is_empty()
    }
}

/// Evenly spaced delays `α_j = 2πj/M`, `j = 0..M-1`.
pub fn nyquist_schedule(m: usize) -> Result<DelaySchedule> {
    if m == 0 {
        return Err(Error::InvalidArgument("Nyquist schedule needs M >= 1".into()));
    }
    let alphas = (0..m).map(|j| TAU * j as f64 / m as f64).collect();
    Ok(DelaySchedule { alphas, kind: ScheduleKind::EvenGrid, seed: None })
}

/// `M` independent delays drawn uniformly from `[0, 2π)`.
pub fn random_schedule(m: usize, seed: u64) -> Result<DelaySchedule> {
    if m == 0 {
        return Err(Error::InvalidArgument("random schedule needs M >= 1".into()));
    }
    let mut rng = rng::stream(seed, Purpose::Schedule, 0);
    let alphas = (0..m).map(|_| rng.random::<f64>() * TAU).collect();
    Ok(DelaySchedule { alphas, kind: ScheduleKind::UniformRandom, seed: Some(seed) })
}

/// `Φ[j, n-1] = cos(n α_j)` together with the schedule it came from.
#[derive(Debug, Clone, PartialEq)]
pub struct SensingMatrix {
    entries: DMatrix<f64>,
    schedule: DelaySchedule,
}

impl SensingMatrix {
    pub fn entries(&self) -> &DMatrix<f64> {
        &self.entries
    }

    pub fn schedule(&self) -> &DelaySchedule {
        &self.schedule
    }

    /// Number of measurements `M`.
    pub fn rows(&self) -> usize {
        self.entries.nrows()
    }

    /// Number of modes `N`.
    pub fn cols(&self) -> usize {
        self.entries.ncols()
    }

    /// `Φ x` for any real vector of length `N`.
    pub fn apply(&self, x: &[f64]) -> Result<Vec<f64>> {
        if x.len() != self.cols() {
            return Err(Error::DimensionMismatch { expected: self.cols(), found: x.len() });
        }
        Ok((&self.entries * DVector::from_column_slice(x)).iter().copied().collect())
    }
}

pub fn sensing_matrix(schedule: &DelaySchedule, n: usize) -> Result<SensingMatrix> {
    if n == 0 {
        return Err(Error::InvalidArgument("sensing matrix needs N >= 1".into()));
    }
    let entries = DMatrix::from_fn(schedule.len(), n, |j, k| ((k + 1) as f64 * schedule.alphas[j]).cos());
    Ok(SensingMatrix { entries, schedule: schedule.clone() })
}

/// `P(α) = 1 + Σ_n x_n cos(n α)`.
pub fn analytic_interferogram(x: &ModalSpectrum, alpha: f64) -> f64 {
    1.0 + x
        .weights
        .iter()
        .enumerate()
        .filter(|(_, w)| **w != 0.0)
        .map(|(k, w)| w * ((k + 1) as f64 * alpha).cos())
        .sum::<f64>()
}

/// Baseline-subtracted interferogram samples `y_j = P(α_j) - 1`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MeasurementVector {
    values: Vec<f64>,
    noise_sigma: f64,
}

impl MeasurementVector {
    pub fn new(values: Vec<f64>, noise_sigma: f64) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::InvalidArgument("measurement vector is empty".into()));
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidArgument("measurements must be finite".into()));
        }
        if !(noise_sigma.is_finite() && noise_sigma >= 0.0) {
            return Err(Error::InvalidArgument(format!("noise_sigma must be >= 0, got {noise_sigma}")));
        }
        Ok(Self { values, noise_sigma })
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn noise_sigma(&self) -> f64 {
        self.noise_sigma
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// The same measurements multiplied by `c`.
    pub fn scaled(&self, c: f64) -> Self {
        Self { values: self.values.iter().map(|v| v * c).collect(), noise_sigma: self.noise_sigma * c.abs() }
    }
}

/// Samples `P(α_j) - 1` over a schedule, adding i.i.d. Gaussian noise of
/// standard deviation `noise_sigma`.
pub fn sample_interferogram(
    x: &ModalSpectrum,
    schedule: &DelaySchedule,
    noise_sigma: f64,
    seed: u64,
) -> Result<MeasurementVector> {
    if !(noise_sigma.is_finite() && noise_sigma >= 0.0) {
        return Err(Error::InvalidArgument(format!("noise_sigma must be >= 0, got {noise_sigma}")));
    }
    let mut values: Vec<f64> = schedule.alphas.iter().map(|&a| analytic_interferogram(x, a) - 1.0).collect();
    if noise_sigma > 0.0 {
        let normal = Normal::new(0.0, noise_sigma).map_err(|e| Error::InvalidArgument(e.to_string()))?;
        let mut rng = rng::stream(seed, Purpose::Noise, 0);
        values.iter_mut().for_each(|v| *v += normal.sample(&mut rng));
    }
    MeasurementVector::new(values, noise_sigma)
}
