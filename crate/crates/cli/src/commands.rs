//! Dispatch from a validated [`RunConfig`] to the library operations.

use cinterf::diagnostics::{eta_ensemble_with, incoherence_survey, isotropy_estimate, EtaEnsembleOptions};
use cinterf::experiments::{error_vs_m_sweep, random_sparse_spectrum, run_scenario, ScenarioSpec, SweepOptions};
use cinterf::recovery::{basis_pursuit, ft_recover};
use cinterf::rng::{derive_seed, Purpose};
use cinterf::sensing::{nyquist_schedule, random_schedule, sample_interferogram, sensing_matrix};
use cinterf::{ModalSpectrum, RecoveryResult};
use serde::Serialize;
use serde_json::json;

use crate::config::{
    Check, DiagnoseParams, MethodChoice, Params, RecoverParams, RunConfig, ScenarioParams, ScheduleChoice,
    SimulateParams, SweepParams,
};
use crate::error::CliResult;
use crate::ingest::ingest_interferogram;
use crate::output::{Cell, Report, Table};

pub fn execute(config: &RunConfig) -> CliResult<Report> {
    let seed = config.seed;
    match &config.params {
        Params::Simulate(p) => simulate(p, seed),
        Params::Recover(p) => recover(p),
        Params::Diagnose(p) => diagnose(p, seed),
        Params::Sweep(p) => sweep(p, seed),
        Params::Scenario(p) => scenario(p, seed),
    }
}

fn simulate(p: &SimulateParams, seed: u64) -> CliResult<Report> {
    let spectrum = match &p.spectrum {
        Some(pairs) => ModalSpectrum::from_support(p.n, pairs)?,
        None => random_sparse_spectrum(p.n, p.s_max, derive_seed(seed, Purpose::SparseVector, 0), 0)?,
    };
    let schedule = match p.schedule {
        ScheduleChoice::Nyquist => nyquist_schedule(p.m)?,
        ScheduleChoice::Random => random_schedule(p.m, derive_seed(seed, Purpose::Schedule, 0))?,
    };
    let y = sample_interferogram(&spectrum, &schedule, p.noise_sigma, derive_seed(seed, Purpose::Noise, 0))?;
    let power: Vec<f64> = y.values().iter().map(|v| v + 1.0).collect();

    let mut table = Table::new(&["alpha", "power"]);
    for (a, v) in schedule.alphas().iter().zip(&power) {
        table.push(vec![(*a).into(), (*v).into()]);
    }
    let data = json!({
        "spectrum": spectrum.weights(),
        "schedule_kind": schedule.kind(),
        "alpha": schedule.alphas(),
        "power": power,
    });
    Report::new(data, table)
}

fn spectrum_table(weights: &[f64]) -> Table {
    let mut table = Table::new(&["n", "weight"]);
    for (k, w) in weights.iter().enumerate() {
        table.push(vec![(k + 1).into(), (*w).into()]);
    }
    table
}

#[derive(Serialize)]
struct RecoveryPayload<'a> {
    spectrum: &'a [f64],
    raw: &'a [f64],
    support: Vec<usize>,
    l1_norm: f64,
    iterations: usize,
    final_residual: f64,
    converged: bool,
    polished: bool,
    method: cinterf::Method,
    samples: usize,
    schedule_kind: cinterf::ScheduleKind,
}

impl<'a> RecoveryPayload<'a> {
    fn new(r: &'a RecoveryResult, samples: usize, schedule_kind: cinterf::ScheduleKind) -> Self {
        Self {
            spectrum: &r.weights,
            raw: &r.raw,
            support: r.support(),
            l1_norm: r.l1_norm(),
            iterations: r.iterations,
            final_residual: r.final_residual,
            converged: r.converged,
            polished: r.polished,
            method: r.method,
            samples,
            schedule_kind,
        }
    }
}

fn recover(p: &RecoverParams) -> CliResult<Report> {
    let (schedule, y) = ingest_interferogram(&p.input, p.baseline, p.wrap)?;
    let result = match p.method {
        MethodChoice::Ft => ft_recover(&y, &schedule, p.n)?,
        MethodChoice::Bp => basis_pursuit(&sensing_matrix(&schedule, p.n)?, &y, &p.bp)?,
    };
    let mut report =
        Report::new(RecoveryPayload::new(&result, schedule.len(), schedule.kind()), spectrum_table(&result.weights))?;
    report.nonconverged = usize::from(!result.converged);
    Ok(report)
}

fn diagnose(p: &DiagnoseParams, seed: u64) -> CliResult<Report> {
    match p.check {
        Check::Eta => {
            let opts = EtaEnsembleOptions {
                redraw_phi: p.redraw_phi,
                keep_first: p.keep_first,
                ..EtaEnsembleOptions::new(p.m, p.n, p.s, p.samples, seed)
            };
            let r = eta_ensemble_with(&opts)?;
            let h = &r.histogram;
            let mut table = Table::new(&["bin_lo", "bin_hi", "count"]);
            for (k, c) in h.counts.iter().enumerate() {
                table.push(vec![h.edges[k].into(), h.edges[k + 1].into(), Cell::Int(*c)]);
            }
            Report::new(r, table)
        }
        Check::Incoherence => {
            let r = incoherence_survey(p.m, p.n, p.schedules, seed)?;
            let mut table = Table::new(&["schedule", "incoherence"]);
            for (i, v) in r.values.iter().enumerate() {
                table.push(vec![i.into(), (*v).into()]);
            }
            Report::new(r, table)
        }
        Check::Isotropy => {
            let r = isotropy_estimate(p.n, p.rows, seed)?;
            let mut table = Table::new(&["row", "col", "value"]);
            for (i, row) in r.estimate.iter().enumerate() {
                for (j, v) in row.iter().enumerate() {
                    table.push(vec![(i + 1).into(), (j + 1).into(), (*v).into()]);
                }
            }
            Report::new(r, table)
        }
    }
}

fn sweep(p: &SweepParams, seed: u64) -> CliResult<Report> {
    let opts = SweepOptions {
        threshold: p.threshold,
        bp: p.bp,
        ..SweepOptions::new(p.n, p.s_max, p.m_values.clone(), p.runs, p.vectors, seed)
    };
    let r = error_vs_m_sweep(&opts)?;
    let mut table = Table::new(&["M", "mean_error", "std_error"]);
    for ((m, mean), std) in r.m_values.iter().zip(&r.mean_error).zip(&r.std_error) {
        table.push(vec![(*m).into(), (*mean).into(), (*std).into()]);
    }
    let nonconverged =
        r.converged_fraction.iter().map(|f| ((1.0 - f) * r.runs_per_point as f64).round() as usize).sum();
    let mut report = Report::new(r, table)?;
    report.nonconverged = nonconverged;
    Ok(report)
}

#[derive(Serialize)]
struct ScenarioPayload {
    name: String,
    truth: Vec<f64>,
    ft_spectrum: Vec<f64>,
    bp_spectrum: Vec<f64>,
    scaled_error: f64,
    ft_truth_error: f64,
    bp_truth_error: f64,
    bp_converged: bool,
    bp_iterations: usize,
    bp_residual: f64,
    cs_alphas: Vec<f64>,
}

fn scenario(p: &ScenarioParams, seed: u64) -> CliResult<Report> {
    let mut payloads = Vec::with_capacity(p.names.len());
    let mut table = Table::new(&["scenario", "n", "truth", "ft_weight", "bp_weight"]);
    let mut nonconverged = 0;
    for name in &p.names {
        let spec = ScenarioSpec {
            nyquist_m: p.nyquist_m,
            cs_m: p.cs_m,
            noise_sigma: p.noise_sigma,
            seed,
            bp: p.bp,
            ..ScenarioSpec::preset(name, p.n)?
        };
        let o = run_scenario(&spec)?;
        for k in 0..o.truth.len() {
            table.push(vec![
                name.as_str().into(),
                (k + 1).into(),
                o.truth[k].into(),
                o.ft.weights[k].into(),
                o.bp.weights[k].into(),
            ]);
        }
        nonconverged += usize::from(!o.bp.converged);
        payloads.push(ScenarioPayload {
            name: o.name,
            truth: o.truth,
            ft_spectrum: o.ft.weights,
            bp_spectrum: o.bp.weights,
            scaled_error: o.scaled_error,
            ft_truth_error: o.ft_truth_error,
            bp_truth_error: o.bp_truth_error,
            bp_converged: o.bp.converged,
            bp_iterations: o.bp.iterations,
            bp_residual: o.bp.final_residual,
            cs_alphas: o.cs_alphas,
        });
    }
    let mut report = Report::new(json!({ "scenarios": payloads }), table)?;
    report.nonconverged = nonconverged;
    Ok(report)
}
