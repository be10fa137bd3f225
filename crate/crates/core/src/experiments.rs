//! Preset beam scenarios (FT versus basis pursuit side by side) and the
//! reconstruction-error-versus-M sweep.

use num_complex::Complex64;
use rand::seq::index;
use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::modal::{ComplexModalField, ModeBasis, ModeKind};
use crate::recovery::{basis_pursuit, ft_recover, reconstruction_error, BpOptions, RecoveryResult};
use crate::rng::{self, Purpose};
use crate::sensing::{nyquist_schedule, random_schedule, sample_interferogram, sensing_matrix, ModalSpectrum};

pub const DEFAULT_N: usize = 64;
pub const DEFAULT_NYQUIST_M: usize = 128;
pub const DEFAULT_CS_M: usize = 30;

/// Names of the built-in scenarios, in presentation order.
pub const PRESET_NAMES: [&str; 6] = ["hg0", "hg1", "lg0", "lg1", "hg0+hg1", "hg1+ihg2"];

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScenarioSpec {
    pub name: String,
    pub field: ComplexModalField,
    pub nyquist_m: usize,
    pub cs_m: usize,
    pub noise_sigma: f64,
    pub seed: u64,
    pub bp: BpOptions,
}

impl ScenarioSpec {
    /// One of [`PRESET_NAMES`] over `n` modes with default sampling.
    ///
    /// Mode labels map to harmonic indices as `HG_k -> k + 1`,
    /// `LG_p -> p + 1`.
    pub fn preset(name: &str, n: usize) -> Result<Self> {
        let h = std::f64::consts::FRAC_1_SQRT_2;
        let (kind, entries): (ModeKind, Vec<(usize, Complex64)>) = match name {
            "hg0" => (ModeKind::HermiteGauss1D, vec![(1, Complex64::new(1.0, 0.0))]),
            "hg1" => (ModeKind::HermiteGauss1D, vec![(2, Complex64::new(1.0, 0.0))]),
            "lg0" => (ModeKind::LaguerreGaussRadial, vec![(1, Complex64::new(1.0, 0.0))]),
            "lg1" => (ModeKind::LaguerreGaussRadial, vec![(2, Complex64::new(1.0, 0.0))]),
            "hg0+hg1" => (ModeKind::HermiteGauss1D, vec![(1, Complex64::new(h, 0.0)), (2, Complex64::new(h, 0.0))]),
            "hg1+ihg2" => (ModeKind::HermiteGauss1D, vec![(2, Complex64::new(h, 0.0)), (3, Complex64::new(0.0, h))]),
            other => {
                return Err(Error::InvalidArgument(format!(
                    "unknown scenario '{other}'; expected one of {}",
                    PRESET_NAMES.join(", ")
                )))
            }
        };
        let basis = ModeBasis::new(kind, n, 1.0)?;
        let mut coeffs = vec![Complex64::new(0.0, 0.0); n];
        for (k, c) in entries {
            if k > n {
                return Err(Error::IndexOutOfRange { index: k, max: n });
            }
            coeffs[k - 1] = c;
        }
        Ok(Self {
            name: name.to_string(),
            field: ComplexModalField::normalized(basis, coeffs)?,
            nyquist_m: DEFAULT_NYQUIST_M,
            cs_m: DEFAULT_CS_M,
            noise_sigma: 0.0,
            seed: 0,
            bp: BpOptions::default(),
        })
    }

    pub fn n(&self) -> usize {
        self.field.basis().max_order()
    }

    pub fn spectrum(&self) -> ModalSpectrum {
        self.field.spectrum()
    }

    pub fn validate(&self) -> Result<()> {
        if self.cs_m == 0 {
            return Err(Error::InvalidArgument("cs_m must be >= 1".into()));
        }
        if self.cs_m > self.nyquist_m {
            return Err(Error::InvalidArgument(format!(
                "cs_m ({}) must not exceed nyquist_m ({})",
                self.cs_m, self.nyquist_m
            )));
        }
        if !(self.noise_sigma.is_finite() && self.noise_sigma >= 0.0) {
            return Err(Error::InvalidArgument("noise_sigma must be >= 0".into()));
        }
        self.bp.validate()
    }
}

/// The six presets at `N = 64`, `M = 128` (Nyquist) and `M = 30` (random).
pub fn builtin_scenarios() -> Vec<ScenarioSpec> {
    PRESET_NAMES.iter().map(|name| ScenarioSpec::preset(name, DEFAULT_N).expect("presets fit in 64 modes")).collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScenarioOutcome {
    pub name: String,
    pub truth: Vec<f64>,
    pub ft: RecoveryResult,
    pub bp: RecoveryResult,
    pub cs_alphas: Vec<f64>,
    /// `‖x_FT - x̃_BP‖² / ‖x_FT‖²`.
    pub scaled_error: f64,
    pub ft_truth_error: f64,
    pub bp_truth_error: f64,
}

/// FT recovery from the Nyquist interferogram and basis pursuit from a
/// random sub-Nyquist schedule, for the same beam.
pub fn run_scenario(spec: &ScenarioSpec) -> Result<ScenarioOutcome> {
    spec.validate()?;
    let n = spec.n();
    let truth = spec.spectrum();

    let even = nyquist_schedule(spec.nyquist_m)?;
    let y_even = sample_interferogram(&truth, &even, spec.noise_sigma, rng::derive_seed(spec.seed, Purpose::Noise, 0))?;
    let ft = ft_recover(&y_even, &even, n)?;

    let random = random_schedule(spec.cs_m, rng::derive_seed(spec.seed, Purpose::Scenario, 0))?;
    let y_random =
        sample_interferogram(&truth, &random, spec.noise_sigma, rng::derive_seed(spec.seed, Purpose::Noise, 1))?;
    let bp = basis_pursuit(&sensing_matrix(&random, n)?, &y_random, &spec.bp)?;

    Ok(ScenarioOutcome {
        name: spec.name.clone(),
        truth: truth.weights().to_vec(),
        scaled_error: reconstruction_error(&ft.weights, &bp.weights)?,
        ft_truth_error: reconstruction_error(truth.weights(), &ft.weights)?,
        bp_truth_error: reconstruction_error(truth.weights(), &bp.weights)?,
        cs_alphas: random.alphas().to_vec(),
        ft,
        bp,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepOptions {
    pub n: usize,
    pub s_max: usize,
    pub m_values: Vec<usize>,
    /// Schedule draws per M.
    pub runs: usize,
    /// Size of the sparse-vector pool; run `r` uses vector `r mod vectors`
    /// at every M.
    pub vectors: usize,
    pub seed: u64,
    /// Mean-error level that defines `m_star`.
    pub threshold: f64,
    pub bp: BpOptions,
}

impl SweepOptions {
    pub fn new(n: usize, s_max: usize, m_values: Vec<usize>, runs: usize, vectors: usize, seed: u64) -> Self {
        Self { n, s_max, m_values, runs, vectors, seed, threshold: 0.01, bp: BpOptions::default() }
    }

    pub fn validate(&self) -> Result<()> {
        if self.n == 0 {
            return Err(Error::InvalidArgument("N must be >= 1".into()));
        }
        if self.s_max == 0 || self.s_max > self.n {
            return Err(Error::InvalidArgument(format!("s_max must lie in 1..={}", self.n)));
        }
        if self.m_values.is_empty() || self.m_values.contains(&0) {
            return Err(Error::InvalidArgument("m_values must be nonempty and all >= 1".into()));
        }
        if self.runs == 0 || self.vectors == 0 {
            return Err(Error::InvalidArgument("runs and vectors must be >= 1".into()));
        }
        if !(self.threshold.is_finite() && self.threshold > 0.0) {
            return Err(Error::InvalidArgument("threshold must be positive".into()));
        }
        self.bp.validate()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepResult {
    pub m_values: Vec<usize>,
    pub mean_error: Vec<f64>,
    /// Sample standard deviation of the per-run errors.
    pub std_error: Vec<f64>,
    pub converged_fraction: Vec<f64>,
    pub runs_per_point: usize,
    pub threshold: f64,
    /// Smallest M whose mean error is below `threshold`.
    pub m_star: Option<usize>,
    /// Mean and spread over pool vectors of the first M at which that
    /// vector's own mean error falls below `threshold`.
    pub required_m_mean: Option<f64>,
    pub required_m_std: Option<f64>,
    /// Pool vectors that never reach `threshold` inside the sweep.
    pub unresolved_vectors: usize,
}

/// Random sparse spectrum: support size uniform in `1..=s_max`, weights
/// uniform in `(0, 1]` normalized to sum 1.
pub fn random_sparse_spectrum(n: usize, s_max: usize, seed: u64, index: u64) -> Result<ModalSpectrum> {
    let mut rng = rng::stream(seed, Purpose::SparseVector, index);
    let s = rng.random_range(1..=s_max);
    let support = index::sample(&mut rng, n, s).into_vec();
    let raw: Vec<f64> = (0..s).map(|_| 1.0 - rng.random::<f64>()).collect();
    let total: f64 = raw.iter().sum();
    let mut weights = vec![0.0; n];
    for (k, w) in support.into_iter().zip(raw) {
        weights[k] = w / total;
    }
    ModalSpectrum::new(weights)
}

fn mean_std(values: &[f64]) -> (f64, f64) {
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    if values.len() < 2 {
        return (mean, 0.0);
    }
    let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0);
    (mean, var.sqrt())
}

/// Noiseless basis-pursuit error against ground truth as a function of M.
pub fn error_vs_m_sweep(opts: &SweepOptions) -> Result<SweepResult> {
    opts.validate()?;
    let pool: Vec<ModalSpectrum> = (0..opts.vectors)
        .map(|v| random_sparse_spectrum(opts.n, opts.s_max, opts.seed, v as u64))
        .collect::<Result<_>>()?;

    let tasks: Vec<(usize, usize)> =
        (0..opts.m_values.len()).flat_map(|i| (0..opts.runs).map(move |r| (i, r))).collect();
    let outcomes: Vec<(f64, bool)> = tasks
        .par_iter()
        .map(|&(i, r)| {
            let m = opts.m_values[i];
            let truth = &pool[r % opts.vectors];
            let seed = rng::derive_seed(
                rng::derive_seed(opts.seed, Purpose::SweepSchedule, m as u64),
                Purpose::SweepSchedule,
                r as u64,
            );
            let schedule = random_schedule(m, seed)?;
            let y = sample_interferogram(truth, &schedule, 0.0, 0)?;
            let result = basis_pursuit(&sensing_matrix(&schedule, opts.n)?, &y, &opts.bp)?;
            Ok((reconstruction_error(truth.weights(), &result.weights)?, result.converged))
        })
        .collect::<Result<_>>()?;

    let mut mean_error = Vec::with_capacity(opts.m_values.len());
    let mut std_error = Vec::with_capacity(opts.m_values.len());
    let mut converged_fraction = Vec::with_capacity(opts.m_values.len());
    for point in outcomes.chunks(opts.runs) {
        let errors: Vec<f64> = point.iter().map(|(e, _)| *e).collect();
        let (mean, std) = mean_std(&errors);
        mean_error.push(mean);
        std_error.push(std);
        converged_fraction.push(point.iter().filter(|(_, c)| *c).count() as f64 / opts.runs as f64);
    }
    let m_star = opts.m_values.iter().zip(&mean_error).find(|(_, e)| **e < opts.threshold).map(|(m, _)| *m);

    let mut required = Vec::new();
    for v in 0..opts.vectors.min(opts.runs) {
        let first = opts.m_values.iter().enumerate().find_map(|(i, &m)| {
            let point = &outcomes[i * opts.runs..(i + 1) * opts.runs];
            let own: Vec<f64> =
                point.iter().enumerate().filter(|(r, _)| r % opts.vectors == v).map(|(_, (e, _))| *e).collect();
            (mean_std(&own).0 < opts.threshold).then_some(m as f64)
        });
        required.push(first);
    }
    let resolved: Vec<f64> = required.iter().flatten().copied().collect();
    let (required_m_mean, required_m_std) = if resolved.is_empty() {
        (None, None)
    } else {
        let (mean, std) = mean_std(&resolved);
        (Some(mean), Some(std))
    };

    Ok(SweepResult {
        m_values: opts.m_values.clone(),
        mean_error,
        std_error,
        converged_fraction,
        runs_per_point: opts.runs,
        threshold: opts.threshold,
        m_star,
        required_m_mean,
        required_m_std,
        unresolved_vectors: required.len() - resolved.len(),
    })
}
