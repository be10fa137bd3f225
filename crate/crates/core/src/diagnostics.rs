//! Empirical checks on the random cosine ensemble: the isometry defect
//! `η(x)`, the incoherence bound and isotropy of the rows.
//!
//! Monte-Carlo loops run on rayon but draw every sample from its own
//! indexed stream and reduce in index order, so reports depend only on
//! their parameters and seed.

use std::f64::consts::TAU;

use nalgebra::DMatrix;
use rand::seq::index;
use rand::Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rng::{self, Purpose};
use crate::sensing::{random_schedule, sensing_matrix, SensingMatrix};

/// `η(x) = (2/M) ‖Φx‖² / ‖x‖² - 1`.
pub fn eta(phi: &SensingMatrix, x: &[f64]) -> Result<f64> {
    let norm2: f64 = x.iter().map(|v| v * v).sum();
    if norm2 == 0.0 {
        return Err(Error::Domain("η is undefined for the zero vector".into()));
    }
    let y = phi.apply(x)?;
    let m = phi.rows() as f64;
    Ok(2.0 / m * y.iter().map(|v| v * v).sum::<f64>() / norm2 - 1.0)
}

/// `η` of a sparse vector given as `(column, value)` pairs, columns 0-based.
fn sparse_eta(phi: &DMatrix<f64>, entries: &[(usize, f64)]) -> f64 {
    let m = phi.nrows();
    let norm2: f64 = entries.iter().map(|(_, v)| v * v).sum();
    let energy: f64 = (0..m).map(|j| entries.iter().map(|&(k, v)| phi[(j, k)] * v).sum::<f64>().powi(2)).sum();
    2.0 / m as f64 * energy / norm2 - 1.0
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Histogram {
    /// `bins + 1` ascending edges.
    pub edges: Vec<f64>,
    pub counts: Vec<u64>,
    /// Values below the first edge, already included in `counts[0]`.
    pub clamped_low: u64,
    /// Values above the last edge, already included in the last count.
    pub clamped_high: u64,
}

impl Histogram {
    pub fn uniform(lo: f64, hi: f64, bins: usize, values: &[f64]) -> Self {
        let width = (hi - lo) / bins as f64;
        let edges = (0..=bins).map(|i| lo + width * i as f64).collect();
        let mut counts = vec![0u64; bins];
        let (mut clamped_low, mut clamped_high) = (0, 0);
        for &v in values {
            let bin = if v < lo {
                clamped_low += 1;
                0
            } else if v > hi {
                clamped_high += 1;
                bins - 1
            } else {
                (((v - lo) / width) as usize).min(bins - 1)
            };
            counts[bin] += 1;
        }
        Self { edges, counts, clamped_low, clamped_high }
    }
}

/// Parameters of an `η` ensemble.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EtaEnsembleOptions {
    pub m: usize,
    pub n: usize,
    pub s: usize,
    pub samples: usize,
    pub seed: u64,
    /// Draw a fresh `Φ` for every sample instead of one per report.
    pub redraw_phi: bool,
    /// How many leading `η` values to keep verbatim in the report.
    pub keep_first: usize,
}

impl EtaEnsembleOptions {
    pub fn new(m: usize, n: usize, s: usize, samples: usize, seed: u64) -> Self {
        Self { m, n, s, samples, seed, redraw_phi: false, keep_first: 1000 }
    }
}

pub const ETA_BINS: usize = 101;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EtaEnsembleReport {
    pub histogram: Histogram,
    pub max_abs_eta: f64,
    pub mean_eta: f64,
    pub sample_count: usize,
    pub s: usize,
    pub m: usize,
    pub n: usize,
    /// `η` of the first samples in index order.
    pub first_etas: Vec<f64>,
}

fn phi_for(m: usize, n: usize, seed: u64, index: u64) -> Result<SensingMatrix> {
    sensing_matrix(&random_schedule(m, rng::derive_seed(seed, Purpose::Schedule, index))?, n)
}

/// `η` over `samples` random `s`-sparse vectors (uniform supports, standard
/// Gaussian values) against one random `Φ`.
pub fn eta_ensemble(m: usize, n: usize, s: usize, samples: usize, seed: u64) -> Result<EtaEnsembleReport> {
    eta_ensemble_with(&EtaEnsembleOptions::new(m, n, s, samples, seed))
}

pub fn eta_ensemble_with(opts: &EtaEnsembleOptions) -> Result<EtaEnsembleReport> {
    let EtaEnsembleOptions { m, n, s, samples, seed, redraw_phi, keep_first } = *opts;
    if m == 0 || n == 0 {
        return Err(Error::InvalidArgument("M and N must be >= 1".into()));
    }
    if s == 0 || s > n {
        return Err(Error::InvalidArgument(format!("sparsity s={s} must lie in 1..={n}")));
    }
    if samples == 0 {
        return Err(Error::InvalidArgument("samples must be >= 1".into()));
    }
    let shared = phi_for(m, n, seed, 0)?;
    let etas: Vec<f64> = (0..samples)
        .into_par_iter()
        .map(|i| {
            let mut rng = rng::stream(seed, Purpose::EtaSample, i as u64);
            let entries: Vec<(usize, f64)> =
                index::sample(&mut rng, n, s).into_iter().map(|k| (k, rng.sample::<f64, _>(StandardNormal))).collect();
            if redraw_phi {
                let phi = phi_for(m, n, seed, i as u64 + 1)?;
                Ok(sparse_eta(phi.entries(), &entries))
            } else {
                Ok(sparse_eta(shared.entries(), &entries))
            }
        })
        .collect::<Result<_>>()?;

    let mean_eta = etas.iter().sum::<f64>() / samples as f64;
    let max_abs_eta = etas.iter().fold(0.0f64, |acc, v| acc.max(v.abs()));
    Ok(EtaEnsembleReport {
        histogram: Histogram::uniform(-1.0, 1.0, ETA_BINS, &etas),
        max_abs_eta,
        mean_eta,
        sample_count: samples,
        s,
        m,
        n,
        first_etas: etas[..keep_first.min(samples)].to_vec(),
    })
}

/// Largest squared entry of `Φ`.
pub fn incoherence(phi: &SensingMatrix) -> f64 {
    phi.entries().iter().fold(0.0, |acc, v| acc.max(v * v))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IncoherenceReport {
    pub m: usize,
    pub n: usize,
    pub values: Vec<f64>,
    pub max: f64,
    pub min: f64,
}

/// [`incoherence`] of `count` independent random `M × N` matrices.
pub fn incoherence_survey(m: usize, n: usize, count: usize, seed: u64) -> Result<IncoherenceReport> {
    if count == 0 {
        return Err(Error::InvalidArgument("schedule count must be >= 1".into()));
    }
    let values: Vec<f64> = (0..count)
        .into_par_iter()
        .map(|i| {
            let schedule = random_schedule(m, rng::derive_seed(seed, Purpose::Incoherence, i as u64))?;
            Ok(incoherence(&sensing_matrix(&schedule, n)?))
        })
        .collect::<Result<_>>()?;
    let max = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let min = values.iter().copied().fold(f64::INFINITY, f64::min);
    Ok(IncoherenceReport { m, n, values, max, min })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IsotropyReport {
    /// Monte-Carlo mean of `φᵀφ`, row-major.
    pub estimate: Vec<Vec<f64>>,
    pub max_offdiag_abs: f64,
    /// Largest `|estimate[n][n] - 0.5|`.
    pub max_diag_dev: f64,
    pub rows_sampled: usize,
}

impl IsotropyReport {
    fn from_second_moment(moment: &DMatrix<f64>, rows: usize) -> Self {
        let n = moment.nrows();
        let mut max_offdiag_abs = 0.0f64;
        let mut max_diag_dev = 0.0f64;
        for i in 0..n {
            for j in 0..n {
                if i == j {
                    max_diag_dev = max_diag_dev.max((moment[(i, i)] - 0.5).abs());
                } else {
                    max_offdiag_abs = max_offdiag_abs.max(moment[(i, j)].abs());
                }
            }
        }
        let estimate = (0..n).map(|i| moment.row(i).iter().copied().collect()).collect();
        Self { estimate, max_offdiag_abs, max_diag_dev, rows_sampled: rows }
    }
}

const ISOTROPY_CHUNK: usize = 2048;

/// Averages `φᵀφ` over `rows` random rows `φ = (cos α, .., cos Nα)`.
pub fn isotropy_estimate(n: usize, rows: usize, seed: u64) -> Result<IsotropyReport> {
    isotropy_from_alphas(n, rows, |chunk, count| {
        let mut rng = rng::stream(seed, Purpose::Isotropy, chunk as u64);
        (0..count).map(|_| rng.random::<f64>() * TAU).collect()
    })
}

/// Isotropy estimate over caller-supplied delays.
pub fn isotropy_of_alphas(n: usize, alphas: &[f64]) -> Result<IsotropyReport> {
    isotropy_from_alphas(n, alphas.len(), |chunk, count| {
        alphas[chunk * ISOTROPY_CHUNK..chunk * ISOTROPY_CHUNK + count].to_vec()
    })
}

fn isotropy_from_alphas<F>(n: usize, rows: usize, draw: F) -> Result<IsotropyReport>
where
    F: Fn(usize, usize) -> Vec<f64> + Sync,
{
    if n == 0 || rows == 0 {
        return Err(Error::InvalidArgument("isotropy needs N >= 1 and rows >= 1".into()));
    }
    let chunks = rows.div_ceil(ISOTROPY_CHUNK);
    let partials: Vec<DMatrix<f64>> = (0..chunks)
        .into_par_iter()
        .map(|c| {
            let count = ISOTROPY_CHUNK.min(rows - c * ISOTROPY_CHUNK);
            let alphas = draw(c, count);
            let block = DMatrix::from_fn(count, n, |j, k| ((k + 1) as f64 * alphas[j]).cos());
            block.tr_mul(&block)
        })
        .collect();
    let mut moment = DMatrix::zeros(n, n);
    for p in &partials {
        moment += p;
    }
    moment /= rows as f64;
    // Symmetrize away rounding differences between the two triangles.
    let moment = (&moment + moment.transpose()) * 0.5;
    Ok(IsotropyReport::from_second_moment(&moment, rows))
}
