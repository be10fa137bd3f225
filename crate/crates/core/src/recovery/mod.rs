//! Recovering the modal spectrum from interferogram samples.
//!
//! [`ft_recover`] inverts the cosine series exactly on an even grid with at
//! least `2N` samples. [`basis_pursuit`] handles arbitrary (typically random
//! sub-Nyquist) schedules by minimizing `‖x‖₁` subject to
//! `‖Φx - y‖₂ ≤ ε`.
//!
//! Recovered weights are returned as plain signed vectors: unconstrained
//! basis pursuit and noisy harmonic inversion can both produce negative
//! entries, which a [`crate::ModalSpectrum`] cannot hold.

mod bp;
mod ft;

pub use bp::{basis_pursuit, BpOptions};
pub use ft::ft_recover;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    Ft,
    Bp,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RecoveryResult {
    /// Recovered weights `x̃_1..x̃_N` after zero-snapping.
    pub weights: Vec<f64>,
    /// Solver output before snapping.
    pub raw: Vec<f64>,
    pub iterations: usize,
    /// `‖Φ raw - y‖₂`.
    pub final_residual: f64,
    pub converged: bool,
    pub method: Method,
    /// Whether basis pursuit replaced its iterate with the least-squares
    /// fit on the detected support.
    pub polished: bool,
}

impl RecoveryResult {
    pub fn l1_norm(&self) -> f64 {
        self.weights.iter().map(|v| v.abs()).sum()
    }

    /// 1-based indices of the nonzero recovered weights.
    pub fn support(&self) -> Vec<usize> {
        self.weights.iter().enumerate().filter(|(_, w)| **w != 0.0).map(|(k, _)| k + 1).collect()
    }
}

/// Scaled error `‖reference - estimate‖² / ‖reference‖²`.
pub fn reconstruction_error(reference: &[f64], estimate: &[f64]) -> Result<f64> {
    if reference.len() != estimate.len() {
        return Err(Error::DimensionMismatch { expected: reference.len(), found: estimate.len() });
    }
    let norm: f64 = reference.iter().map(|r| r * r).sum();
    if norm == 0.0 {
        return Err(Error::Domain("reference spectrum is zero".into()));
    }
    let dist: f64 = reference.iter().zip(estimate).map(|(r, e)| (r - e).powi(2)).sum();
    Ok(dist / norm)
}

fn residual_norm(entries: &nalgebra::DMatrix<f64>, x: &[f64], y: &[f64]) -> f64 {
    let fit = entries * nalgebra::DVector::from_column_slice(x);
    fit.iter().zip(y).map(|(f, v)| (f - v).powi(2)).sum::<f64>().sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn error_metric_cases() {
        let x = [0.2, 0.0, 0.8];
        assert_eq!(reconstruction_error(&x, &x).unwrap(), 0.0);
        assert_eq!(reconstruction_error(&[1.0, 0.0], &[0.0, 0.0]).unwrap(), 1.0);
        assert_eq!(reconstruction_error(&[1.0, 0.0], &[0.0, 1.0]).unwrap(), 2.0);
    }

    #[test]
    fn error_metric_rejects_bad_input() {
        assert!(matches!(reconstruction_error(&[0.0, 0.0], &[1.0, 0.0]), Err(Error::Domain(_))));
        assert!(matches!(
            reconstruction_error(&[1.0], &[1.0, 0.0]),
            Err(Error::DimensionMismatch { expected: 1, found: 2 })
        ));
    }
}
