//! Modal fields and the generalized delay.
//!
//! A beam is `E(x) = Σ_n c_n ψ_n(x)` over an orthonormal family `ψ_n`. The
//! generalized delay of order `α` multiplies `c_n` by `e^{i n α}`; for
//! Hermite-Gauss modes it is a fractional Fourier transform and for radial
//! Laguerre-Gauss modes a fractional Hankel transform.
//!
//! Harmonic index `n` runs `1..=N`. The physical label maps as
//! `HG_k -> n = k + 1` and `LG_p -> n = p + 1`, so `HG_0` carries eigenphase
//! `e^{iα}`.

// `!(a > b)` is used on purpose below: it also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

use std::f64::consts::{PI, TAU};

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::sensing::ModalSpectrum;

/// Mode family.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ModeKind {
    HermiteGauss1D,
    LaguerreGaussRadial,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ModeBasis {
    kind: ModeKind,
    max_order: usize,
    waist: f64,
}

impl ModeBasis {
    pub fn new(kind: ModeKind, max_order: usize, waist: f64) -> Result<Self> {
        if max_order == 0 {
            return Err(Error::InvalidArgument("max_order must be >= 1".into()));
        }
        if !(waist.is_finite() && waist > 0.0) {
            return Err(Error::InvalidArgument(format!("waist must be positive, got {waist}")));
        }
        Ok(Self { kind, max_order, waist })
    }

    /// Unit-waist Hermite-Gauss basis with `max_order` modes.
    pub fn hermite_gauss(max_order: usize) -> Result<Self> {
        Self::new(ModeKind::HermiteGauss1D, max_order, 1.0)
    }

    /// Unit-waist radial Laguerre-Gauss basis with `max_order` modes.
    pub fn laguerre_gauss(max_order: usize) -> Result<Self> {
        Self::new(ModeKind::LaguerreGaussRadial, max_order, 1.0)
    }

    pub fn kind(&self) -> ModeKind {
        self.kind
    }

    pub fn max_order(&self) -> usize {
        self.max_order
    }

    pub fn waist(&self) -> f64 {
        self.waist
    }

    /// Grid half-width (or radius) in waist units that contains every mode
    /// up to `max_order`: the classical turning point `sqrt(2N - 1)` plus a
    /// tail margin, never below 10.
    fn support_extent(&self) -> f64 {
        (((2 * self.max_order - 1) as f64).sqrt() + 5.0).max(10.0)
    }
}

/// Sample points with quadrature weights for `∫ dx` (line) or `∫ r dr` (radial).
#[derive(Debug, Clone, PartialEq)]
pub struct SampledGrid {
    points: Vec<f64>,
    weights: Vec<f64>,
}

// Gregory end corrections of sixth order; all positive.
const GREGORY_START: [f64; 6] =
    [19087.0 / 60480.0, 84199.0 / 60480.0, 18869.0 / 30240.0, 37621.0 / 30240.0, 55031.0 / 60480.0, 61343.0 / 60480.0];

impl SampledGrid {
    pub fn new(points: Vec<f64>, weights: Vec<f64>) -> Result<Self> {
        if points.is_empty() {
            return Err(Error::InvalidArgument("grid must contain at least one point".into()));
        }
        if points.len() != weights.len() {
            return Err(Error::DimensionMismatch { expected: points.len(), found: weights.len() });
        }
        if points.iter().any(|p| !p.is_finite()) || points.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::InvalidArgument("grid points must be finite and strictly increasing".into()));
        }
        if weights.iter().any(|w| !(w.is_finite() && *w > 0.0)) {
            return Err(Error::InvalidArgument("quadrature weights must be positive".into()));
        }
        Ok(Self { points, weights })
    }

    /// `count` uniform points on `[lo, hi]` with trapezoid weights.
    pub fn uniform_line(lo: f64, hi: f64, count: usize) -> Result<Self> {
        if count < 2 || !(hi > lo) {
            return Err(Error::InvalidArgument("uniform_line needs count >= 2 and hi > lo".into()));
        }
        let h = (hi - lo) / (count - 1) as f64;
        let points = (0..count).map(|i| lo + h * i as f64).collect();
        let mut weights = vec![h; count];
        weights[0] *= 0.5;
        weights[count - 1] *= 0.5;
        Self::new(points, weights)
    }

    /// `count` uniform radii `h, 2h, .., radius` with weights for the
    /// measure `r dr`.
    ///
    /// The origin carries zero weight under `r dr` and is left out. Near the
    /// origin the trapezoid rule is only second order for this measure, so
    /// the first weights carry Gregory corrections.
    pub fn radial(radius: f64, count: usize) -> Result<Self> {
        if count < GREGORY_START.len() + 1 || !(radius > 0.0) {
            return Err(Error::InvalidArgument(format!(
                "radial grid needs radius > 0 and count >= {}",
                GREGORY_START.len() + 1
            )));
        }
        let h = radius / count as f64;
        let points: Vec<f64> = (1..=count).map(|i| h * i as f64).collect();
        let weights = points
            .iter()
            .enumerate()
            .map(|(k, &r)| {
                let i = k + 1;
                let c = if i < GREGORY_START.len() {
                    GREGORY_START[i]
                } else if i == count {
                    0.5
                } else {
                    1.0
                };
                h * r * c
            })
            .collect();
        Self::new(points, weights)
    }

    /// Default grid for a basis: 1024 trapezoid points on `[-L, L]` for
    /// Hermite-Gauss, 2048 corrected radial points on `(0, L]` for
    /// Laguerre-Gauss, with `L` scaled by the waist.
    pub fn default_for(basis: &ModeBasis) -> Self {
        let extent = basis.support_extent() * basis.waist;
        match basis.kind {
            ModeKind::HermiteGauss1D => Self::uniform_line(-extent, extent, 1024),
            ModeKind::LaguerreGaussRadial => Self::radial(extent, 2048),
        }
        .expect("default grid parameters are valid")
    }

    pub fn points(&self) -> &[f64] {
        &self.points
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    fn inner(&self, a: &[f64], b: &[f64]) -> f64 {
        self.weights.iter().zip(a).zip(b).map(|((w, x), y)| w * x * y).sum()
    }
}

/// Unit-waist Hermite-Gauss functions `ψ_1..ψ_count` at `x` via the
/// normalized three-term recurrence.
fn hermite_gauss_column(x: f64, count: usize, out: &mut [f64]) {
    out[0] = PI.powf(-0.25) * (-0.5 * x * x).exp();
    if count > 1 {
        out[1] = std::f64::consts::SQRT_2 * x * out[0];
    }
    for k in 1..count.saturating_sub(1) {
        let kf = k as f64;
        out[k + 1] = (2.0 / (kf + 1.0)).sqrt() * x * out[k] - (kf / (kf + 1.0)).sqrt() * out[k - 1];
    }
}

/// Unit-waist radial modes `R_p(r) = 2 L_p(2r²) e^{-r²}`, orthonormal under
/// `r dr`.
fn laguerre_gauss_column(r: f64, count: usize, out: &mut [f64]) {
    let u = 2.0 * r * r;
    out[0] = 1.0;
    if count > 1 {
        out[1] = 1.0 - u;
    }
    for p in 1..count.saturating_sub(1) {
        let pf = p as f64;
        out[p + 1] = ((2.0 * pf + 1.0 - u) * out[p] - pf * out[p - 1]) / (pf + 1.0);
    }
    let envelope = 2.0 * (-r * r).exp();
    out[..count].iter_mut().for_each(|v| *v *= envelope);
}

/// All modes of a basis sampled on a grid, row `n - 1` holding `ψ_n`.
#[derive(Debug, Clone)]
pub struct ModeTable {
    basis: ModeBasis,
    grid: SampledGrid,
    values: DMatrix<f64>,
}

impl ModeTable {
    pub fn new(basis: &ModeBasis, grid: &SampledGrid) -> Self {
        Self::with_count(basis, grid, basis.max_order)
    }

    fn with_count(basis: &ModeBasis, grid: &SampledGrid, count: usize) -> Self {
        let w = basis.waist;
        let mut values = DMatrix::zeros(count, grid.len());
        let mut column = vec![0.0; count];
        for (i, &x) in grid.points.iter().enumerate() {
            let scale = match basis.kind {
                ModeKind::HermiteGauss1D => {
                    hermite_gauss_column(x / w, count, &mut column);
                    w.sqrt().recip()
                }
                ModeKind::LaguerreGaussRadial => {
                    laguerre_gauss_column(x / w, count, &mut column);
                    w.recip()
                }
            };
            for (n, v) in column.iter().enumerate() {
                values[(n, i)] = v * scale;
            }
        }
        Self { basis: *basis, grid: grid.clone(), values }
    }

    pub fn basis(&self) -> &ModeBasis {
        &self.basis
    }

    pub fn grid(&self) -> &SampledGrid {
        &self.grid
    }

    /// Samples of `ψ_n`, `n` in `1..=max_order`.
    pub fn mode(&self, n: usize) -> Result<Vec<f64>> {
        if n == 0 || n > self.values.nrows() {
            return Err(Error::IndexOutOfRange { index: n, max: self.values.nrows() });
        }
        Ok(self.values.row(n - 1).iter().copied().collect())
    }

    /// Discrete Gram matrix `<ψ_n, ψ_m>` under the grid weights.
    pub fn gram(&self) -> DMatrix<f64> {
        let weighted = DMatrix::from_fn(self.values.nrows(), self.values.ncols(), |n, i| {
            self.values[(n, i)] * self.grid.weights[i]
        });
        &weighted * self.values.transpose()
    }

    /// `E(x) = Σ_n c_n ψ_n(x)` on the grid.
    pub fn synthesize(&self, coeffs: &[Complex64]) -> Result<Vec<Complex64>> {
        self.check_len(coeffs.len())?;
        let mut field = vec![Complex64::new(0.0, 0.0); self.grid.len()];
        for (n, c) in coeffs.iter().enumerate() {
            if *c == Complex64::new(0.0, 0.0) {
                continue;
            }
            for (e, psi) in field.iter_mut().zip(self.values.row(n).iter()) {
                *e += c * psi;
            }
        }
        Ok(field)
    }

    /// Coefficients `c_n = ∫ E ψ_n` of sampled field values.
    pub fn project(&self, samples: &[Complex64]) -> Result<Vec<Complex64>> {
        if samples.len() != self.grid.len() {
            return Err(Error::DimensionMismatch { expected: self.grid.len(), found: samples.len() });
        }
        Ok((0..self.values.nrows())
            .map(|n| {
                self.values.row(n).iter().zip(samples).zip(&self.grid.weights).map(|((psi, e), w)| e * (psi * w)).sum()
            })
            .collect())
    }

    /// Field-level interferogram: quadrature of `|E(x;α) + E(x;0)|²`,
    /// scaled so that the value at `α = 0` is exactly 2.
    pub fn field_interferogram(&self, field: &ComplexModalField, alpha: f64) -> Result<f64> {
        self.check_len(field.coeffs.len())?;
        let reference = self.synthesize(&field.coeffs)?;
        let delayed = self.synthesize(&generalized_delay(field, alpha).coeffs)?;
        let mut at_alpha = 0.0;
        let mut at_zero = 0.0;
        for ((d, r), w) in delayed.iter().zip(&reference).zip(&self.grid.weights) {
            at_alpha += w * (d + r).norm_sqr();
            at_zero += w * 4.0 * r.norm_sqr();
        }
        if !(at_zero > 0.0) {
            return Err(Error::Domain("field has zero norm on the grid".into()));
        }
        Ok(2.0 * at_alpha / at_zero)
    }

    fn check_len(&self, len: usize) -> Result<()> {
        if len != self.values.nrows() {
            return Err(Error::DimensionMismatch { expected: self.values.nrows(), found: len });
        }
        Ok(())
    }
}

/// A beam as complex modal coefficients `c_1..c_N`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ComplexModalField {
    basis: ModeBasis,
    coeffs: Vec<Complex64>,
}

impl ComplexModalField {
    pub fn new(basis: ModeBasis, coeffs: Vec<Complex64>) -> Result<Self> {
        if coeffs.len() != basis.max_order {
            return Err(Error::DimensionMismatch { expected: basis.max_order, found: coeffs.len() });
        }
        if coeffs.iter().any(|c| !(c.re.is_finite() && c.im.is_finite())) {
            return Err(Error::InvalidArgument("coefficients must be finite".into()));
        }
        Ok(Self { basis, coeffs })
    }

    /// Builds the field and rescales it to unit power.
    pub fn normalized(basis: ModeBasis, coeffs: Vec<Complex64>) -> Result<Self> {
        let mut field = Self::new(basis, coeffs)?;
        let power = field.power();
        if !(power > 0.0) {
            return Err(Error::Domain("cannot normalize a zero field".into()));
        }
        let scale = power.sqrt().recip();
        field.coeffs.iter_mut().for_each(|c| *c *= scale);
        Ok(field)
    }

    pub fn basis(&self) -> &ModeBasis {
        &self.basis
    }

    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }

    /// `Σ |c_n|²`.
    pub fn power(&self) -> f64 {
        self.coeffs.iter().map(|c| c.norm_sqr()).sum()
    }

    pub fn is_normalized(&self) -> bool {
        (self.power() - 1.0).abs() <= 1e-9
    }

    /// The modal weights `|c_n|²` seen by the interferogram.
    pub fn spectrum(&self) -> ModalSpectrum {
        ModalSpectrum::new(self.coeffs.iter().map(|c| c.norm_sqr()).collect())
            .expect("squared magnitudes are valid weights")
    }
}

fn reduce_phase(n: usize, alpha: f64) -> f64 {
    ((n as f64) * alpha.rem_euclid(TAU)).rem_euclid(TAU)
}

/// Applies the eigenphases `c_n -> c_n e^{i n α}`.
pub fn generalized_delay(field: &ComplexModalField, alpha: f64) -> ComplexModalField {
    let coeffs = field
        .coeffs
        .iter()
        .enumerate()
        .map(|(k, c)| c * Complex64::from_polar(1.0, reduce_phase(k + 1, alpha)))
        .collect();
    ComplexModalField { basis: field.basis, coeffs }
}

/// Samples of `ψ_n` on `grid`.
///
/// Logs a warning when the discrete norm of `ψ_n` is off by more than 1e-3,
/// which means the grid does not resolve the mode.
pub fn mode_function(basis: &ModeBasis, n: usize, grid: &SampledGrid) -> Result<Vec<f64>> {
    if n == 0 || n > basis.max_order {
        return Err(Error::IndexOutOfRange { index: n, max: basis.max_order });
    }
    let samples = ModeTable::with_count(basis, grid, n).mode(n)?;
    if grid.len() > 1 {
        let norm = grid.inner(&samples, &samples);
        if (norm - 1.0).abs() > 1e-3 {
            log::warn!("grid under-resolves mode {n}: discrete norm {norm:.6}");
        }
    }
    Ok(samples)
}

/// The truncated delay kernel `Λ(x, x'; α) = Σ_n e^{inα} ψ_n(x) ψ_n(x')` on
/// `grid × grid`.
pub fn delay_kernel(basis: &ModeBasis, alpha: f64, grid: &SampledGrid) -> DMatrix<Complex64> {
    let table = ModeTable::new(basis, grid);
    let g = grid.len();
    let phased = DMatrix::from_fn(g, basis.max_order, |i, n| {
        Complex64::from_polar(table.values[(n, i)], reduce_phase(n + 1, alpha))
    });
    let plain = table.values.map(|v| Complex64::new(v, 0.0));
    phased * plain
}

/// `∫ Λ(x, x') f(x') dx'` under the grid quadrature.
pub fn apply_kernel(kernel: &DMatrix<Complex64>, samples: &[Complex64], grid: &SampledGrid) -> Result<Vec<Complex64>> {
    if kernel.ncols() != samples.len() || grid.len() != samples.len() {
        return Err(Error::DimensionMismatch { expected: kernel.ncols(), found: samples.len() });
    }
    Ok((0..kernel.nrows())
        .map(|i| samples.iter().zip(&grid.weights).enumerate().map(|(k, (f, w))| kernel[(i, k)] * f * *w).sum())
        .collect())
}

/// Field-level interferogram on `grid`; see [`ModeTable::field_interferogram`].
pub fn field_interferogram(field: &ComplexModalField, alpha: f64, grid: &SampledGrid) -> Result<f64> {
    ModeTable::new(&field.basis, grid).field_interferogram(field, alpha)
}
