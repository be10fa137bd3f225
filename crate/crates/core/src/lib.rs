//! Compressive optical interferometry.
//!
//! A two-path interferometer whose delay arm applies a *generalized delay*
//! (a fractional transform with eigenphases `e^{i n α}` on a chosen modal
//! basis) traces the interferogram
//!
//! ```text
//! P(α) = 1 + Σ_{n=1..N} x_n cos(n α),      x_n = |c_n|²
//! ```
//!
//! Sampling `α` at `M` points gives the linear model `y = Φ x` with
//! `Φ[j, n-1] = cos(n α_j)`. This crate builds that model end to end:
//!
//! - [`modal`]: Hermite-Gauss and radial Laguerre-Gauss fields, the
//!   generalized delay and a field-level interferogram oracle.
//! - [`sensing`]: delay schedules, the cosine sensing matrix and
//!   measurement synthesis.
//! - [`recovery`]: harmonic (FT) inversion at Nyquist rate and basis
//!   pursuit for random sub-Nyquist schedules.
//! - [`diagnostics`]: the isometry defect `η(x)`, incoherence and
//!   isotropy estimates for the random cosine ensemble.
//! - [`experiments`]: preset beam scenarios and the error-versus-M sweep.
//!
//! All randomness is drawn from [`rng`] streams keyed by an explicit seed,
//! so every result is a pure function of its parameters.

pub mod diagnostics;
pub mod error;
pub mod experiments;
pub mod modal;
pub mod recovery;
pub mod rng;
pub mod sensing;

pub use error::{Error, Result};
pub use modal::{ComplexModalField, ModeBasis, ModeKind, SampledGrid};
pub use recovery::{BpOptions, Method, RecoveryResult};
pub use sensing::{DelaySchedule, MeasurementVector, ModalSpectrum, ScheduleKind, SensingMatrix};
