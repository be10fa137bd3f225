//! Flag and config-file parsing.
//!
//! Every command-specific option can come from a flag or from the matching
//! table of a TOML file given with `--config`; flags win. Unknown keys,
//! duplicate keys and type mismatches in the file are rejected, and every
//! value is checked against the target operation's preconditions before
//! anything runs.

use std::path::{Path, PathBuf};

use cinterf::experiments::{DEFAULT_CS_M, DEFAULT_N, DEFAULT_NYQUIST_M, PRESET_NAMES};
use cinterf::BpOptions;
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};

use crate::error::{CliError, CliResult};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    #[default]
    Json,
    Csv,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ScheduleChoice {
    Nyquist,
    Random,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum MethodChoice {
    Ft,
    Bp,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Check {
    Eta,
    Incoherence,
    Isotropy,
}

#[derive(Debug, Parser)]
#[command(name = "cinterf", version, about = "Compressive interferometry: simulate, recover, diagnose, sweep")]
pub struct Cli {
    /// TOML file with global keys and one table per command.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Output file; standard output when omitted.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    #[arg(long, global = true, value_enum)]
    pub format: Option<Format>,
    /// Exit with status 5 when any basis-pursuit solve fails to converge.
    #[arg(long, global = true)]
    pub strict: bool,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Subcommand)]
pub enum Command {
    /// Synthesize interferogram samples from a modal spectrum.
    Simulate(SimulateArgs),
    /// Recover a spectrum from an `alpha,power` CSV file.
    Recover(RecoverArgs),
    /// Eta ensemble, incoherence or isotropy of the random cosine ensemble.
    Diagnose(DiagnoseArgs),
    /// Basis-pursuit reconstruction error versus number of samples M.
    Sweep(SweepArgs),
    /// FT versus basis pursuit on the preset beams.
    Scenario(ScenarioArgs),
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::Simulate(_) => "simulate",
            Command::Recover(_) => "recover",
            Command::Diagnose(_) => "diagnose",
            Command::Sweep(_) => "sweep",
            Command::Scenario(_) => "scenario",
        }
    }
}

/// Fields from `overlay` win over `base`.
trait Overlay {
    fn overlay(self, base: Self) -> Self;
}

macro_rules! overlay_fields {
    ($ty:ident { $($field:ident),* $(,)? }) => {
        impl Overlay for $ty {
            fn overlay(self, base: Self) -> Self {
                Self { $($field: self.$field.or(base.$field)),* }
            }
        }
    };
}

#[derive(Debug, Clone, Default, Args, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BpArgs {
    /// Residual bound ε of the basis-pursuit constraint.
    #[arg(long = "epsilon")]
    pub residual_epsilon: Option<f64>,
    #[arg(long = "rho")]
    pub penalty_rho: Option<f64>,
    #[arg(long)]
    pub abs_tol: Option<f64>,
    #[arg(long)]
    pub rel_tol: Option<f64>,
    #[arg(long)]
    pub max_iters: Option<usize>,
    #[arg(long, num_args = 0..=1, default_missing_value = "true")]
    pub nonnegative: Option<bool>,
    #[arg(long)]
    pub zero_threshold: Option<f64>,
}
overlay_fields!(BpArgs { residual_epsilon, penalty_rho, abs_tol, rel_tol, max_iters, nonnegative, zero_threshold });

impl BpArgs {
    fn resolve(&self) -> CliResult<BpOptions> {
        let d = BpOptions::default();
        let opts = BpOptions {
            residual_epsilon: self.residual_epsilon.unwrap_or(d.residual_epsilon),
            penalty_rho: self.penalty_rho.unwrap_or(d.penalty_rho),
            abs_tol: self.abs_tol.unwrap_or(d.abs_tol),
            rel_tol: self.rel_tol.unwrap_or(d.rel_tol),
            max_iters: self.max_iters.unwrap_or(d.max_iters),
            nonnegative: self.nonnegative.unwrap_or(d.nonnegative),
            zero_threshold: self.zero_threshold.unwrap_or(d.zero_threshold),
        };
        nonnegative("bp.residual_epsilon", opts.residual_epsilon)?;
        positive("bp.penalty_rho", opts.penalty_rho)?;
        positive("bp.abs_tol", opts.abs_tol)?;
        positive("bp.rel_tol", opts.rel_tol)?;
        at_least("bp.max_iters", opts.max_iters, 1)?;
        nonnegative("bp.zero_threshold", opts.zero_threshold)?;
        Ok(opts)
    }
}

#[derive(Debug, Clone, Default, Args, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SimulateArgs {
    /// Modal weights as `n:w` pairs, e.g. `1:0.5,2:0.5`; a random sparse
    /// spectrum is drawn from the seed when omitted.
    #[arg(long)]
    pub spectrum: Option<String>,
    /// Largest support size of the random spectrum.
    #[arg(long)]
    pub s_max: Option<usize>,
    #[arg(long)]
    pub n: Option<usize>,
    #[arg(long)]
    pub m: Option<usize>,
    #[arg(long, value_enum)]
    pub schedule: Option<ScheduleChoice>,
    #[arg(long)]
    pub noise_sigma: Option<f64>,
}
overlay_fields!(SimulateArgs { spectrum, s_max, n, m, schedule, noise_sigma });

#[derive(Debug, Clone, Default, Args, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RecoverArgs {
    /// Interferogram CSV with header `alpha,power`.
    #[arg(long)]
    pub input: Option<PathBuf>,
    /// Value subtracted from `power` at ingestion.
    #[arg(long)]
    pub baseline: Option<f64>,
    /// Reduce delays modulo 2π instead of rejecting them.
    #[arg(long, num_args = 0..=1, default_missing_value = "true")]
    pub wrap: Option<bool>,
    #[arg(long, value_enum)]
    pub method: Option<MethodChoice>,
    #[arg(long)]
    pub n: Option<usize>,
    #[command(flatten)]
    #[serde(default)]
    pub bp: BpArgs,
}

impl Overlay for RecoverArgs {
    fn overlay(self, base: Self) -> Self {
        Self {
            input: self.input.or(base.input),
            baseline: self.baseline.or(base.baseline),
            wrap: self.wrap.or(base.wrap),
            method: self.method.or(base.method),
            n: self.n.or(base.n),
            bp: self.bp.overlay(base.bp),
        }
    }
}

#[derive(Debug, Clone, Default, Args, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DiagnoseArgs {
    #[arg(long, value_enum)]
    pub check: Option<Check>,
    #[arg(long)]
    pub m: Option<usize>,
    #[arg(long)]
    pub n: Option<usize>,
    #[arg(long)]
    pub s: Option<usize>,
    /// Sparse vectors in the eta ensemble.
    #[arg(long)]
    pub samples: Option<usize>,
    /// Use 10⁶ eta samples unless `samples` is given.
    #[arg(long, num_args = 0..=1, default_missing_value = "true")]
    pub full: Option<bool>,
    #[arg(long, num_args = 0..=1, default_missing_value = "true")]
    pub redraw_phi: Option<bool>,
    /// Leading eta values kept verbatim.
    #[arg(long)]
    pub keep_first: Option<usize>,
    /// Rows averaged by the isotropy check.
    #[arg(long)]
    pub rows: Option<usize>,
    /// Random schedules surveyed by the incoherence check.
    #[arg(long)]
    pub schedules: Option<usize>,
}
overlay_fields!(DiagnoseArgs { check, m, n, s, samples, full, redraw_phi, keep_first, rows, schedules });

#[derive(Debug, Clone, Default, Args, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepArgs {
    #[arg(long)]
    pub n: Option<usize>,
    #[arg(long)]
    pub s_max: Option<usize>,
    /// Comma-separated sample counts.
    #[arg(long, value_delimiter = ',')]
    pub m_values: Option<Vec<usize>>,
    #[arg(long)]
    pub runs: Option<usize>,
    #[arg(long)]
    pub vectors: Option<usize>,
    #[arg(long)]
    pub threshold: Option<f64>,
    #[command(flatten)]
    #[serde(default)]
    pub bp: BpArgs,
}

impl Overlay for SweepArgs {
    fn overlay(self, base: Self) -> Self {
        Self {
            n: self.n.or(base.n),
            s_max: self.s_max.or(base.s_max),
            m_values: self.m_values.or(base.m_values),
            runs: self.runs.or(base.runs),
            vectors: self.vectors.or(base.vectors),
            threshold: self.threshold.or(base.threshold),
            bp: self.bp.overlay(base.bp),
        }
    }
}

#[derive(Debug, Clone, Default, Args, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioArgs {
    /// Preset name; every preset when omitted.
    #[arg(long)]
    pub name: Option<String>,
    #[arg(long)]
    pub n: Option<usize>,
    #[arg(long)]
    pub nyquist_m: Option<usize>,
    #[arg(long)]
    pub cs_m: Option<usize>,
    #[arg(long)]
    pub noise_sigma: Option<f64>,
    #[command(flatten)]
    #[serde(default)]
    pub bp: BpArgs,
}

impl Overlay for ScenarioArgs {
    fn overlay(self, base: Self) -> Self {
        Self {
            name: self.name.or(base.name),
            n: self.n.or(base.n),
            nyquist_m: self.nyquist_m.or(base.nyquist_m),
            cs_m: self.cs_m.or(base.cs_m),
            noise_sigma: self.noise_sigma.or(base.noise_sigma),
            bp: self.bp.overlay(base.bp),
        }
    }
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct FileConfig {
    seed: Option<u64>,
    out: Option<PathBuf>,
    format: Option<Format>,
    strict: Option<bool>,
    simulate: Option<SimulateArgs>,
    recover: Option<RecoverArgs>,
    diagnose: Option<DiagnoseArgs>,
    sweep: Option<SweepArgs>,
    scenario: Option<ScenarioArgs>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SimulateParams {
    /// Explicit `(n, weight)` pairs; `None` draws a random spectrum.
    pub spectrum: Option<Vec<(usize, f64)>>,
    pub s_max: usize,
    pub n: usize,
    pub m: usize,
    pub schedule: ScheduleChoice,
    pub noise_sigma: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RecoverParams {
    pub input: PathBuf,
    pub baseline: f64,
    pub wrap: bool,
    pub method: MethodChoice,
    pub n: usize,
    pub bp: BpOptions,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DiagnoseParams {
    pub check: Check,
    pub m: usize,
    pub n: usize,
    pub s: usize,
    pub samples: usize,
    pub redraw_phi: bool,
    pub keep_first: usize,
    pub rows: usize,
    pub schedules: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepParams {
    pub n: usize,
    pub s_max: usize,
    pub m_values: Vec<usize>,
    pub runs: usize,
    pub vectors: usize,
    pub threshold: f64,
    pub bp: BpOptions,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ScenarioParams {
    /// Presets to run, in order.
    pub names: Vec<String>,
    pub n: usize,
    pub nyquist_m: usize,
    pub cs_m: usize,
    pub noise_sigma: f64,
    pub bp: BpOptions,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(untagged)]
pub enum Params {
    Simulate(SimulateParams),
    Recover(RecoverParams),
    Diagnose(DiagnoseParams),
    Sweep(SweepParams),
    Scenario(ScenarioParams),
}

/// A validated invocation.
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub command: &'static str,
    pub params: Params,
    pub seed: u64,
    pub output_path: Option<PathBuf>,
    pub output_format: Format,
    pub strict: bool,
}

fn positive(key: &str, v: f64) -> CliResult<()> {
    if v.is_finite() && v > 0.0 {
        Ok(())
    } else {
        Err(CliError::config(key, format!("must be a positive number (got {v})")))
    }
}

fn nonnegative(key: &str, v: f64) -> CliResult<()> {
    if v.is_finite() && v >= 0.0 {
        Ok(())
    } else {
        Err(CliError::config(key, format!("must be >= 0 (got {v})")))
    }
}

fn at_least(key: &str, v: usize, min: usize) -> CliResult<()> {
    if v >= min {
        Ok(())
    } else {
        Err(CliError::config(key, format!("must be >= {min} (got {v})")))
    }
}

fn parse_spectrum(text: &str, n: usize) -> CliResult<Vec<(usize, f64)>> {
    let mut pairs = Vec::new();
    for item in text.split(',').map(str::trim).filter(|s| !s.is_empty()) {
        let bad = || CliError::config("spectrum", format!("entry '{item}' is not of the form n:weight"));
        let (k, w) = item.split_once(':').ok_or_else(bad)?;
        let k: usize = k.trim().parse().map_err(|_| bad())?;
        let w: f64 = w.trim().parse().map_err(|_| bad())?;
        if k == 0 || k > n {
            return Err(CliError::config("spectrum", format!("mode index {k} must lie in 1..={n}")));
        }
        if !(w.is_finite() && w >= 0.0) {
            return Err(CliError::config("spectrum", format!("weight {w} at n={k} must be >= 0")));
        }
        if pairs.iter().any(|(j, _)| *j == k) {
            return Err(CliError::config("spectrum", format!("mode {k} listed twice")));
        }
        pairs.push((k, w));
    }
    if pairs.is_empty() {
        return Err(CliError::config("spectrum", "must list at least one n:weight pair"));
    }
    Ok(pairs)
}

impl SimulateArgs {
    fn resolve(&self) -> CliResult<SimulateParams> {
        let n = self.n.unwrap_or(DEFAULT_N);
        at_least("n", n, 1)?;
        let schedule = self.schedule.unwrap_or(ScheduleChoice::Nyquist);
        let m = self.m.unwrap_or(match schedule {
            ScheduleChoice::Nyquist => DEFAULT_NYQUIST_M,
            ScheduleChoice::Random => DEFAULT_CS_M,
        });
        at_least("m", m, 1)?;
        let s_max = self.s_max.unwrap_or(4);
        at_least("s_max", s_max, 1)?;
        if s_max > n {
            return Err(CliError::config("s_max", format!("must not exceed n={n} (got {s_max})")));
        }
        let noise_sigma = self.noise_sigma.unwrap_or(0.0);
        nonnegative("noise_sigma", noise_sigma)?;
        let spectrum = self.spectrum.as_deref().map(|s| parse_spectrum(s, n)).transpose()?;
        Ok(SimulateParams { spectrum, s_max, n, m, schedule, noise_sigma })
    }
}

impl RecoverArgs {
    fn resolve(&self) -> CliResult<RecoverParams> {
        let input = self.input.clone().ok_or_else(|| CliError::config("input", "is required"))?;
        let baseline = self.baseline.unwrap_or(1.0);
        if !baseline.is_finite() {
            return Err(CliError::config("baseline", "must be finite"));
        }
        let n = self.n.unwrap_or(DEFAULT_N);
        at_least("n", n, 1)?;
        Ok(RecoverParams {
            input,
            baseline,
            wrap: self.wrap.unwrap_or(false),
            method: self.method.unwrap_or(MethodChoice::Bp),
            n,
            bp: self.bp.resolve()?,
        })
    }
}

impl DiagnoseArgs {
    fn resolve(&self) -> CliResult<DiagnoseParams> {
        let m = self.m.unwrap_or(DEFAULT_CS_M);
        let n = self.n.unwrap_or(DEFAULT_N);
        let s = self.s.unwrap_or(4);
        at_least("m", m, 1)?;
        at_least("n", n, 1)?;
        at_least("s", s, 1)?;
        if s > n {
            return Err(CliError::config("s", format!("must not exceed n={n} (got {s})")));
        }
        let default_samples = if self.full.unwrap_or(false) { 1_000_000 } else { 100_000 };
        let samples = self.samples.unwrap_or(default_samples);
        at_least("samples", samples, 1)?;
        let rows = self.rows.unwrap_or(100_000);
        at_least("rows", rows, 1)?;
        let schedules = self.schedules.unwrap_or(1000);
        at_least("schedules", schedules, 1)?;
        Ok(DiagnoseParams {
            check: self.check.unwrap_or(Check::Eta),
            m,
            n,
            s,
            samples,
            redraw_phi: self.redraw_phi.unwrap_or(false),
            keep_first: self.keep_first.unwrap_or(1000),
            rows,
            schedules,
        })
    }
}

impl SweepArgs {
    fn resolve(&self) -> CliResult<SweepParams> {
        let n = self.n.unwrap_or(DEFAULT_N);
        at_least("n", n, 1)?;
        let s_max = self.s_max.unwrap_or(4);
        at_least("s_max", s_max, 1)?;
        if s_max > n {
            return Err(CliError::config("s_max", format!("must not exceed n={n} (got {s_max})")));
        }
        let m_values = self.m_values.clone().unwrap_or_else(|| (1..=10).map(|i| 5 * i).collect());
        if m_values.is_empty() {
            return Err(CliError::config("m_values", "must list at least one M"));
        }
        if let Some(m) = m_values.iter().find(|m| **m == 0) {
            return Err(CliError::config("m_values", format!("entries must be >= 1 (got {m})")));
        }
        let runs = self.runs.unwrap_or(100);
        at_least("runs", runs, 1)?;
        let vectors = self.vectors.unwrap_or(runs);
        at_least("vectors", vectors, 1)?;
        let threshold = self.threshold.unwrap_or(0.01);
        positive("threshold", threshold)?;
        Ok(SweepParams { n, s_max, m_values, runs, vectors, threshold, bp: self.bp.resolve()? })
    }
}

impl ScenarioArgs {
    fn resolve(&self) -> CliResult<ScenarioParams> {
        let names = match &self.name {
            None => PRESET_NAMES.iter().map(|s| s.to_string()).collect(),
            Some(name) if PRESET_NAMES.contains(&name.as_str()) => vec![name.clone()],
            Some(name) => {
                return Err(CliError::config(
                    "name",
                    format!("'{name}' is not a preset (expected one of {})", PRESET_NAMES.join(", ")),
                ))
            }
        };
        let n = self.n.unwrap_or(DEFAULT_N);
        at_least("n", n, 3)?;
        let nyquist_m = self.nyquist_m.unwrap_or(DEFAULT_NYQUIST_M);
        if nyquist_m < 2 * n {
            return Err(CliError::config("nyquist_m", format!("must be >= 2n = {} (got {nyquist_m})", 2 * n)));
        }
        let cs_m = self.cs_m.unwrap_or(DEFAULT_CS_M);
        at_least("cs_m", cs_m, 1)?;
        if cs_m > nyquist_m {
            return Err(CliError::config("cs_m", format!("must not exceed nyquist_m={nyquist_m} (got {cs_m})")));
        }
        let noise_sigma = self.noise_sigma.unwrap_or(0.0);
        nonnegative("noise_sigma", noise_sigma)?;
        Ok(ScenarioParams { names, n, nyquist_m, cs_m, noise_sigma, bp: self.bp.resolve()? })
    }
}

fn read_file_config(path: &Path) -> CliResult<FileConfig> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Config(format!("cannot read config {}: {e}", path.display())))?;
    parse_file_config(&text)
}

fn parse_file_config(text: &str) -> CliResult<FileConfig> {
    toml::from_str(text).map_err(|e| CliError::Config(e.to_string()))
}

/// Merges flags over the optional config file and validates the result.
pub fn resolve(cli: &Cli) -> CliResult<RunConfig> {
    let file = match &cli.config {
        Some(path) => read_file_config(path)?,
        None => FileConfig::default(),
    };
    resolve_with(cli, file)
}

/// [`resolve`] with the config file given as TOML text.
pub fn resolve_from_str(cli: &Cli, toml_text: &str) -> CliResult<RunConfig> {
    resolve_with(cli, parse_file_config(toml_text)?)
}

fn resolve_with(cli: &Cli, file: FileConfig) -> CliResult<RunConfig> {
    let params = match &cli.command {
        Command::Simulate(a) => Params::Simulate(a.clone().overlay(file.simulate.unwrap_or_default()).resolve()?),
        Command::Recover(a) => Params::Recover(a.clone().overlay(file.recover.unwrap_or_default()).resolve()?),
        Command::Diagnose(a) => Params::Diagnose(a.clone().overlay(file.diagnose.unwrap_or_default()).resolve()?),
        Command::Sweep(a) => Params::Sweep(a.clone().overlay(file.sweep.unwrap_or_default()).resolve()?),
        Command::Scenario(a) => Params::Scenario(a.clone().overlay(file.scenario.unwrap_or_default()).resolve()?),
    };
    Ok(RunConfig {
        command: cli.command.name(),
        params,
        seed: cli.seed.or(file.seed).unwrap_or(0),
        output_path: cli.out.clone().or(file.out),
        output_format: cli.format.or(file.format).unwrap_or_default(),
        strict: cli.strict || file.strict.unwrap_or(false),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cli(args: &[&str]) -> Cli {
        Cli::try_parse_from(std::iter::once("cinterf").chain(args.iter().copied())).unwrap()
    }

    fn config_error(result: CliResult<RunConfig>) -> String {
        match result {
            Err(CliError::Config(msg)) => msg,
            other => panic!("expected config error, got {other:?}"),
        }
    }

    #[test]
    fn scenario_defaults() {
        let cfg = resolve_from_str(&cli(&["scenario"]), "").unwrap();
        let Params::Scenario(p) = cfg.params else { panic!() };
        assert_eq!((p.n, p.nyquist_m, p.cs_m), (64, 128, 30));
        assert_eq!(p.names.len(), 6);
        assert_eq!(cfg.seed, 0);
        assert_eq!(cfg.output_format, Format::Json);
    }

    #[test]
    fn zero_cs_m_names_the_key() {
        let msg = config_error(resolve_from_str(&cli(&["scenario", "--cs-m", "0"]), ""));
        assert!(msg.contains("cs_m"), "{msg}");
        let msg = config_error(resolve_from_str(&cli(&["scenario"]), "[scenario]\ncs_m = 0\n"));
        assert!(msg.contains("cs_m"), "{msg}");
    }

    #[test]
    fn duplicate_and_unknown_keys_are_rejected() {
        config_error(resolve_from_str(&cli(&["scenario"]), "seed = 1\nseed = 2\n"));
        let msg = config_error(resolve_from_str(&cli(&["scenario"]), "[scenario]\nbogus = 1\n"));
        assert!(msg.contains("bogus"), "{msg}");
        let msg = config_error(resolve_from_str(&cli(&["scenario"]), "[scenario]\ncs_m = \"thirty\"\n"));
        assert!(msg.contains("cs_m"), "{msg}");
    }

    #[test]
    fn flags_override_file() {
        let text = "seed = 9\nformat = \"csv\"\n[sweep]\nruns = 7\nm_values = [10, 20]\n[sweep.bp]\nmax_iters = 500\n";
        let cfg = resolve_from_str(&cli(&["sweep", "--runs", "3", "--seed", "4"]), text).unwrap();
        assert_eq!(cfg.seed, 4);
        assert_eq!(cfg.output_format, Format::Csv);
        let Params::Sweep(p) = cfg.params else { panic!() };
        assert_eq!(p.runs, 3);
        assert_eq!(p.vectors, 3);
        assert_eq!(p.m_values, vec![10, 20]);
        assert_eq!(p.bp.max_iters, 500);
    }

    #[test]
    fn global_flags_after_subcommand() {
        let cfg = resolve_from_str(&cli(&["diagnose", "--check", "isotropy", "--seed", "5", "--strict"]), "").unwrap();
        assert_eq!(cfg.seed, 5);
        assert!(cfg.strict);
        let Params::Diagnose(p) = cfg.params else { panic!() };
        assert_eq!(p.check, Check::Isotropy);
    }

    #[test]
    fn spectrum_parsing() {
        assert_eq!(parse_spectrum("1:0.5, 3:0.5", 4).unwrap(), vec![(1, 0.5), (3, 0.5)]);
        assert!(parse_spectrum("0:1", 4).is_err());
        assert!(parse_spectrum("5:1", 4).is_err());
        assert!(parse_spectrum("1:-1", 4).is_err());
        assert!(parse_spectrum("1:0.5,1:0.5", 4).is_err());
        assert!(parse_spectrum("abc", 4).is_err());
    }

    #[test]
    fn recover_requires_input() {
        let msg = config_error(resolve_from_str(&cli(&["recover"]), ""));
        assert!(msg.contains("input"));
    }

    #[test]
    fn full_flag_selects_million_samples() {
        let cfg = resolve_from_str(&cli(&["diagnose", "--full"]), "").unwrap();
        let Params::Diagnose(p) = cfg.params else { panic!() };
        assert_eq!(p.samples, 1_000_000);
    }

    #[test]
    fn bp_options_validated() {
        let msg = config_error(resolve_from_str(&cli(&["scenario", "--rho", "0"]), ""));
        assert!(msg.contains("bp.penalty_rho"), "{msg}");
    }
}
