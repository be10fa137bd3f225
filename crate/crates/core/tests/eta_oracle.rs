//! For Gaussian values on a uniform support, `E[x_a x_b / ‖x‖²] = δ_ab / s`,
//! so the mean of η over the sparse-vector ensemble at a fixed Φ is
//! `(2/(MN)) Σ_n ‖φ_n‖² - 1`: zero only on average over Φ.

use cinterf::diagnostics::{eta_ensemble, eta_ensemble_with, EtaEnsembleOptions};
use cinterf::rng::{derive_seed, Purpose};
use cinterf::sensing::{random_schedule, sensing_matrix};

fn conditional_mean(m: usize, n: usize, seed: u64) -> f64 {
    let phi = sensing_matrix(&random_schedule(m, derive_seed(seed, Purpose::Schedule, 0)).unwrap(), n).unwrap();
    2.0 * phi.entries().iter().map(|v| v * v).sum::<f64>() / (m * n) as f64 - 1.0
}

#[test]
fn fixed_phi_mean_matches_column_norm_formula() {
    for seed in [1, 3, 17] {
        let r = eta_ensemble(30, 64, 4, 100_000, seed).unwrap();
        let want = conditional_mean(30, 64, seed);
        assert!((r.mean_eta - want).abs() <= 0.005, "seed {seed}: {} vs {want}", r.mean_eta);
    }
}

#[test]
fn redrawn_phi_mean_vanishes() {
    let opts = EtaEnsembleOptions { redraw_phi: true, ..EtaEnsembleOptions::new(30, 64, 4, 100_000, 3) };
    let r = eta_ensemble_with(&opts).unwrap();
    assert!(r.mean_eta.abs() <= 0.005, "{}", r.mean_eta);
}

#[test]
fn report_invariants() {
    let r = eta_ensemble(12, 20, 3, 5000, 2).unwrap();
    let total: u64 = r.histogram.counts.iter().sum();
    assert_eq!(total as usize, r.sample_count);
    assert!(r.max_abs_eta >= r.mean_eta.abs());
    assert_eq!(r.histogram.counts.len(), 101);
    assert_eq!(r.first_etas.len(), 1000);
    assert!(r.first_etas.iter().all(|e| *e >= -1.0));
}
