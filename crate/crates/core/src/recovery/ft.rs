use crate::error::{Error, Result};
use crate::sensing::{sensing_matrix, DelaySchedule, MeasurementVector, ScheduleKind};

use super::{residual_norm, Method, RecoveryResult};

/// Harmonic inversion of an even-grid interferogram.
///
/// `x̃_n = w_n Σ_j y_j cos(n α_j)` with `w_n = 2/M`, except that the edge
/// harmonic `n = M/2` has `Σ_j cos²(n α_j) = M` and takes `w_n = 1/M`.
pub fn ft_recover(y: &MeasurementVector, schedule: &DelaySchedule, n: usize) -> Result<RecoveryResult> {
    if schedule.kind() != ScheduleKind::EvenGrid {
        return Err(Error::InvalidArgument(format!(
            "harmonic inversion needs an even-grid schedule, got {:?}",
            schedule.kind()
        )));
    }
    if n == 0 {
        return Err(Error::InvalidArgument("N must be >= 1".into()));
    }
    let m = schedule.len();
    if y.len() != m {
        return Err(Error::DimensionMismatch { expected: m, found: y.len() });
    }
    if m < 2 * n {
        return Err(Error::InsufficientSampling { m, n });
    }
    let mf = m as f64;
    let weights: Vec<f64> = (1..=n)
        .map(|k| {
            let w = if 2 * k == m { 1.0 / mf } else { 2.0 / mf };
            w * y.values().iter().zip(schedule.alphas()).map(|(v, a)| v * (k as f64 * a).cos()).sum::<f64>()
        })
        .collect();
    let phi = sensing_matrix(schedule, n)?;
    let final_residual = residual_norm(phi.entries(), &weights, y.values());
    Ok(RecoveryResult {
        raw: weights.clone(),
        weights,
        iterations: 0,
        final_residual,
        converged: true,
        method: Method::Ft,
        polished: false,
    })
}
