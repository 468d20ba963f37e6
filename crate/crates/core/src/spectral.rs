//! Exact frequency-domain propagation.
//!
//! Each Fourier component obeys dW/dz = iM(η)W with a z-independent 2×2
//! generator, so propagation is a per-frequency matrix exponential. The
//! time-domain envelopes are recovered by a direct quadrature of the inverse
//! transform. Fourier convention: W(η) = (2π)^{-1/2} ∫ Ω(t) e^{+iηt} dt.

use std::f64::consts::{FRAC_1_SQRT_2, PI};

use num_complex::Complex64;
use rayon::prelude::*;
use rustfft::FftPlanner;

use crate::error::{Error, Result};
use crate::model::{alpha3_pathways, spectral_response, MediumParams, ProbePulse, PulseShape, SpectralResponse};
use crate::trace::{EfficiencyTrace, EnvelopeTrace};

/// Largest spacing that still resolves the e^{−η²/4} probe spectrum.
pub const MAX_PROBE_SPACING: f64 = 0.5;
/// Largest spacing accepted by the inverse transform.
pub const MAX_INVERSE_SPACING: f64 = 0.25;
/// Largest per-sample phase step of a propagated mode.
pub const MAX_PHASE_STEP: f64 = PI / 4.0;
/// Half-width of the frequency band checked for phase aliasing.
pub const ALIASING_BAND: f64 = 8.0;
/// Modes weaker than this (relative to the strongest input sample) are
/// ignored by the aliasing check.
const ALIASING_WEIGHT_FLOOR: f64 = 1e-10;
/// exp(700) is close to the largest finite double.
const MAX_EXPONENT: f64 = 700.0;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);
const I: Complex64 = Complex64::new(0.0, 1.0);

/// Computes the response of a medium at one frequency. Swappable so that
/// validation can run against deliberately broken models.
pub type ResponseFn = fn(&MediumParams, f64) -> Result<SpectralResponse>;

/// Uniform frequency grid over η = ωτ.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpectralGrid {
    eta_min: f64,
    eta_max: f64,
    n_points: usize,
}

impl Default for SpectralGrid {
    /// η ∈ [−16, 16] with 4096 points.
    fn default() -> Self {
        Self { eta_min: -16.0, eta_max: 16.0, n_points: 4096 }
    }
}

impl SpectralGrid {
    pub fn new(eta_min: f64, eta_max: f64, n_points: usize) -> Result<Self> {
        if !(eta_min.is_finite() && eta_max.is_finite() && eta_min < eta_max) {
            return Err(Error::InvalidParameter {
                field: "spectral_grid",
                reason: format!("need finite eta_min < eta_max, got [{eta_min}, {eta_max}]"),
            });
        }
        if n_points < 16 {
            return Err(Error::InvalidParameter {
                field: "spectral_grid",
                reason: format!("need at least 16 points, got {n_points}"),
            });
        }
        Ok(Self { eta_min, eta_max, n_points })
    }

    pub fn eta_min(&self) -> f64 {
        self.eta_min
    }

    pub fn eta_max(&self) -> f64 {
        self.eta_max
    }

    pub fn n_points(&self) -> usize {
        self.n_points
    }

    pub fn spacing(&self) -> f64 {
        (self.eta_max - self.eta_min) / (self.n_points - 1) as f64
    }

    pub fn eta(&self, j: usize) -> f64 {
        self.eta_min + self.spacing() * j as f64
    }

    pub fn etas(&self) -> impl Iterator<Item = f64> + '_ {
        (0..self.n_points).map(|j| self.eta(j))
    }

    /// Same range, twice the sampling density.
    pub fn refined(&self) -> Self {
        Self { n_points: 2 * self.n_points - 1, ..*self }
    }
}

/// Probe and generated-field spectra W₂₀(η), W₃₀(η) on a grid.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectralField {
    pub grid: SpectralGrid,
    pub w20: Vec<Complex64>,
    pub w30: Vec<Complex64>,
    /// Largest per-sample phase step of any non-negligible propagated mode,
    /// and where it occurs. Zero for unpropagated fields.
    pub max_phase_step: f64,
    pub max_phase_step_eta: f64,
}

impl SpectralField {
    pub fn new(grid: SpectralGrid, w20: Vec<Complex64>, w30: Vec<Complex64>) -> Result<Self> {
        if w20.len() != grid.n_points() || w30.len() != grid.n_points() {
            return Err(Error::InvalidParameter {
                field: "spectral_field",
                reason: "array lengths must equal the grid size".into(),
            });
        }
        if w20.iter().chain(&w30).any(|w| !(w.re.is_finite() && w.im.is_finite())) {
            return Err(Error::InvalidParameter { field: "spectral_field", reason: "entries must be finite".into() });
        }
        Ok(Self { grid, w20, w30, max_phase_step: 0.0, max_phase_step_eta: 0.0 })
    }
}

/// exp(izM) at one (η, z), row-major.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TransferMatrix {
    pub t11: Complex64,
    pub t12: Complex64,
    pub t21: Complex64,
    pub t22: Complex64,
}

impl TransferMatrix {
    pub fn identity() -> Self {
        Self { t11: ONE, t12: ZERO, t21: ZERO, t22: ONE }
    }

    pub fn apply(&self, w20: Complex64, w30: Complex64) -> (Complex64, Complex64) {
        (self.t11 * w20 + self.t12 * w30, self.t21 * w20 + self.t22 * w30)
    }

    /// Matrix product `self · rhs`.
    pub fn compose(&self, rhs: &Self) -> Self {
        Self {
            t11: self.t11 * rhs.t11 + self.t12 * rhs.t21,
            t12: self.t11 * rhs.t12 + self.t12 * rhs.t22,
            t21: self.t21 * rhs.t11 + self.t22 * rhs.t21,
            t22: self.t21 * rhs.t12 + self.t22 * rhs.t22,
        }
    }

    pub fn entries(&self) -> [Complex64; 4] {
        [self.t11, self.t12, self.t21, self.t22]
    }

    /// Largest entry modulus.
    pub fn max_abs(&self) -> f64 {
        self.entries().iter().map(|e| e.norm()).fold(0.0, f64::max)
    }
}

/// Input probe spectrum; W₃₀ is identically zero at the entrance.
pub fn probe_spectrum(pulse: &ProbePulse, grid: SpectralGrid) -> Result<SpectralField> {
    pulse.validate()?;
    if grid.spacing() > MAX_PROBE_SPACING {
        return Err(Error::GridTooCoarse { spacing: grid.spacing(), limit: MAX_PROBE_SPACING });
    }
    let w20 = match &pulse.shape {
        PulseShape::Gaussian => {
            grid.etas().map(|eta| pulse.amplitude * FRAC_1_SQRT_2 * (-eta * eta / 4.0).exp()).collect()
        }
        PulseShape::Tabulated(tab) => {
            let norm = tab.dt() / (2.0 * PI).sqrt();
            let last = tab.samples().len() - 1;
            let etas: Vec<f64> = grid.etas().collect();
            etas.par_iter()
                .map(|&eta| {
                    let sum: Complex64 = tab
                        .samples()
                        .iter()
                        .enumerate()
                        .map(|(k, s)| {
                            let t = tab.t0() + tab.dt() * k as f64;
                            let weight = if k == 0 || k == last { 0.5 } else { 1.0 };
                            s * Complex64::cis(eta * t) * weight
                        })
                        .sum();
                    pulse.amplitude * sum * norm
                })
                .collect()
        }
    };
    SpectralField::new(grid, w20, vec![ZERO; grid.n_points()])
}

/// Propagation matrix at (η, z) from an already computed response.
///
/// Evaluated through e^{i(D̄±Λ)z} so that complex Λz cannot overflow the
/// trigonometric functions; small |Λz| uses cos and sin directly. Both
/// paths are even in Λ.
pub fn transfer_matrix_from(resp: &SpectralResponse, z: f64) -> Result<TransferMatrix> {
    if z == 0.0 {
        return Ok(TransferMatrix::identity());
    }
    for mode in [resp.d_bar + resp.lambda, resp.d_bar - resp.lambda] {
        let exponent = -mode.im * z;
        if exponent > MAX_EXPONENT || !exponent.is_finite() {
            return Err(Error::GainOverflow { eta: resp.eta, exponent });
        }
    }
    let lz = resp.lambda * z;
    // c = e^{iD̄z} cos Λz,  s = e^{iD̄z} i sin(Λz)/Λ
    let (c, s) = if lz.norm() < 1.0 {
        let phase = (I * resp.d_bar * z).exp();
        let sinc = if resp.lambda == ZERO { Complex64::new(z, 0.0) } else { lz.sin() / resp.lambda };
        (phase * lz.cos(), phase * I * sinc)
    } else {
        let plus = (I * (resp.d_bar + resp.lambda) * z).exp();
        let minus = (I * (resp.d_bar - resp.lambda) * z).exp();
        ((plus + minus) / 2.0, (plus - minus) / (2.0 * resp.lambda))
    };
    let half = (resp.k2 - resp.k3) / 2.0;
    Ok(TransferMatrix { t11: c + half * s, t12: resp.s2 * s, t21: resp.s3 * s, t22: c - half * s })
}

pub fn transfer_matrix(params: &MediumParams, eta: f64, z: f64) -> Result<TransferMatrix> {
    transfer_matrix_from(&spectral_response(params, eta)?, z)
}

/// Applies the transfer matrix pointwise. Accepts a nonzero generated field
/// at the entrance.
pub fn propagate(params: &MediumParams, field0: &SpectralField, z: f64) -> Result<SpectralField> {
    propagate_with(spectral_response, params, field0, z)
}

pub fn propagate_with(
    response: ResponseFn,
    params: &MediumParams,
    field0: &SpectralField,
    z: f64,
) -> Result<SpectralField> {
    params.validate()?;
    if !(z.is_finite() && z >= 0.0) {
        return Err(Error::InvalidParameter { field: "z", reason: format!("must be finite and >= 0, got {z}") });
    }
    let grid = field0.grid;
    let input_scale = field0.w20.iter().zip(&field0.w30).map(|(a, b)| a.norm() + b.norm()).fold(0.0, f64::max);

    struct Sample {
        w20: Complex64,
        w30: Complex64,
        modes: [Complex64; 2],
        weights: [f64; 2],
    }

    let samples: Vec<Result<Sample>> = (0..grid.n_points())
        .into_par_iter()
        .map(|j| {
            let eta = grid.eta(j);
            let resp = response(params, eta)?;
            let (w20, w30) = transfer_matrix_from(&resp, z)?.apply(field0.w20[j], field0.w30[j]);
            let modes = [resp.d_bar + resp.lambda, resp.d_bar - resp.lambda];
            let input = field0.w20[j].norm() + field0.w30[j].norm();
            let weights = modes.map(|m| if input_scale > 0.0 { (-m.im * z).exp() * input / input_scale } else { 0.0 });
            Ok(Sample { w20, w30, modes, weights })
        })
        .collect();

    let mut w20 = Vec::with_capacity(grid.n_points());
    let mut w30 = Vec::with_capacity(grid.n_points());
    let mut modes = Vec::with_capacity(grid.n_points());
    for sample in samples {
        let s = sample?;
        w20.push(s.w20);
        w30.push(s.w30);
        modes.push((s.modes, s.weights));
    }

    let mut field = SpectralField::new(grid, w20, w30)?;
    let (step, at) = max_phase_step(&grid, &modes, z);
    field.max_phase_step = step.max(field0.max_phase_step);
    field.max_phase_step_eta = if step >= field0.max_phase_step { at } else { field0.max_phase_step_eta };
    Ok(field)
}

/// Largest phase increment between neighbouring samples of the two
/// propagation modes within the aliasing band. Modes are paired between
/// samples by proximity because the square-root branch may switch.
fn max_phase_step(grid: &SpectralGrid, modes: &[([Complex64; 2], [f64; 2])], z: f64) -> (f64, f64) {
    let mut worst = (0.0, 0.0);
    for j in 1..modes.len() {
        let (eta_a, eta_b) = (grid.eta(j - 1), grid.eta(j));
        if eta_a.abs() > ALIASING_BAND || eta_b.abs() > ALIASING_BAND {
            continue;
        }
        let (prev, prev_w) = modes[j - 1];
        let (cur, cur_w) = modes[j];
        let straight = (prev[0] - cur[0]).norm() + (prev[1] - cur[1]).norm();
        let crossed = (prev[0] - cur[1]).norm() + (prev[1] - cur[0]).norm();
        let pairs = if straight <= crossed { [(0, 0), (1, 1)] } else { [(0, 1), (1, 0)] };
        for (a, b) in pairs {
            if prev_w[a].min(cur_w[b]) < ALIASING_WEIGHT_FLOOR {
                continue;
            }
            let step = ((cur[b] - prev[a]).re * z).abs();
            if step > worst.0 {
                worst = (step, eta_b);
            }
        }
    }
    worst
}

fn check_inverse_grid(field: &SpectralField) -> Result<()> {
    if field.grid.spacing() > MAX_INVERSE_SPACING {
        return Err(Error::GridTooCoarse { spacing: field.grid.spacing(), limit: MAX_INVERSE_SPACING });
    }
    if field.max_phase_step > MAX_PHASE_STEP {
        return Err(Error::PhaseAliasing { step: field.max_phase_step, eta: field.max_phase_step_eta });
    }
    Ok(())
}

/// Time-domain envelopes Ω(t) = (2π)^{-1/2} Σ W(η) e^{−iηt} Δη.
///
/// `pulse_amplitude` is the entrance probe amplitude the field was built
/// from; the returned envelopes are normalized by it. Uses the FFT when the
/// times form the uniform grid conjugate to η, otherwise a direct sum.
pub fn inverse_transform(field: &SpectralField, times: &[f64], pulse_amplitude: Complex64) -> Result<EnvelopeTrace> {
    check_inverse_grid(field)?;
    let (e20, e30) = match conjugate_fft_size(field, times) {
        Some(n) => fft_sum(field, times[0], n),
        None => direct_sum(field, times),
    };
    Ok(normalized_trace(times, e20, e30, pulse_amplitude))
}

/// Direct quadrature only, regardless of the time grid.
pub fn inverse_transform_direct(
    field: &SpectralField,
    times: &[f64],
    pulse_amplitude: Complex64,
) -> Result<EnvelopeTrace> {
    check_inverse_grid(field)?;
    let (e20, e30) = direct_sum(field, times);
    Ok(normalized_trace(times, e20, e30, pulse_amplitude))
}

/// The time grid on which the FFT path applies: `n` ≥ grid size samples
/// starting at `t0`, spaced 2π/(nΔη).
pub fn conjugate_times(grid: &SpectralGrid, t0: f64, n: usize) -> Vec<f64> {
    let dt = 2.0 * PI / (n as f64 * grid.spacing());
    (0..n).map(|k| t0 + dt * k as f64).collect()
}

fn normalized_trace(
    times: &[f64],
    e20: Vec<Complex64>,
    e30: Vec<Complex64>,
    pulse_amplitude: Complex64,
) -> EnvelopeTrace {
    let scale = |v: Vec<Complex64>| -> Vec<Complex64> {
        if pulse_amplitude == ONE {
            v
        } else {
            v.into_iter().map(|x| x / pulse_amplitude).collect()
        }
    };
    EnvelopeTrace {
        times: times.to_vec(),
        z: 0.0,
        probe_amplitude: pulse_amplitude,
        envelope20: scale(e20),
        envelope30: scale(e30),
    }
}

const REANCHOR: usize = 64;

fn direct_sum(field: &SpectralField, times: &[f64]) -> (Vec<Complex64>, Vec<Complex64>) {
    let grid = field.grid;
    let d_eta = grid.spacing();
    let norm = d_eta / (2.0 * PI).sqrt();
    let sums: Vec<(Complex64, Complex64)> = times
        .par_iter()
        .map(|&t| {
            let step = Complex64::cis(-d_eta * t);
            let mut phasor = ONE;
            let (mut s20, mut s30) = (ZERO, ZERO);
            for j in 0..grid.n_points() {
                if j % REANCHOR == 0 {
                    phasor = Complex64::cis(-grid.eta(j) * t);
                } else {
                    phasor *= step;
                }
                s20 += field.w20[j] * phasor;
                s30 += field.w30[j] * phasor;
            }
            (s20 * norm, s30 * norm)
        })
        .collect();
    sums.into_iter().unzip()
}

fn conjugate_fft_size(field: &SpectralField, times: &[f64]) -> Option<usize> {
    let n = times.len();
    if n < field.grid.n_points() || n < 2 {
        return None;
    }
    let dt = times[1] - times[0];
    let expected = 2.0 * PI / (n as f64 * field.grid.spacing());
    let uniform = times.windows(2).all(|w| ((w[1] - w[0]) - expected).abs() <= 1e-9 * expected);
    ((dt - expected).abs() <= 1e-12 * expected && uniform).then_some(n)
}

fn fft_sum(field: &SpectralField, t0: f64, n: usize) -> (Vec<Complex64>, Vec<Complex64>) {
    let grid = field.grid;
    let d_eta = grid.spacing();
    let dt = 2.0 * PI / (n as f64 * d_eta);
    let eta0 = grid.eta_min();
    let fft = FftPlanner::new().plan_fft_forward(n);
    let run = |w: &[Complex64]| -> Vec<Complex64> {
        let mut buf = vec![ZERO; n];
        for (j, (slot, wj)) in buf.iter_mut().zip(w).enumerate() {
            *slot = wj * Complex64::cis(-(j as f64) * d_eta * t0);
        }
        fft.process(&mut buf);
        let norm = d_eta / (2.0 * PI).sqrt();
        buf.iter().enumerate().map(|(k, x)| x * Complex64::cis(-eta0 * (t0 + dt * k as f64)) * norm).collect()
    };
    (run(&field.w20), run(&field.w30))
}

/// F_m/F_p(t) = (κ₀₂/κ₀₃)|Ω₃₀(z,t)|² / |Ω₂₀(0,0)|².
///
/// A medium with κ₀₃ = 0 generates no field and reports zero efficiency.
pub fn efficiency_trace(trace: &EnvelopeTrace, params: &MediumParams, pulse: &ProbePulse) -> Result<EfficiencyTrace> {
    if pulse.amplitude == ZERO {
        return Err(Error::ZeroProbe);
    }
    let efficiency = if params.kappa03 == 0.0 {
        vec![0.0; trace.len()]
    } else {
        let weight = params.kappa02 / params.kappa03;
        if trace.probe_amplitude == pulse.amplitude {
            trace.envelope30.iter().map(|e| weight * e.norm_sqr()).collect()
        } else {
            let ratio = trace.probe_amplitude / pulse.amplitude;
            trace.envelope30.iter().map(|e| weight * (e * ratio).norm_sqr()).collect()
        }
    };
    Ok(EfficiencyTrace::from_samples(trace.times.clone(), efficiency))
}

/// Three-photon interference diagnostic.
///
/// Ratio of the largest residual of the two α₃ excitation pathways (probe
/// and generated field) to the largest single pathway, over the grid. One
/// at the entrance; tends to zero once the generated field reaches the
/// dark ratio W₃₀/W₂₀ = Ω₃₁/Ω₂₁. Zero for an empty field.
pub fn alpha3_quench(params: &MediumParams, field: &SpectralField) -> Result<f64> {
    let mut residual: f64 = 0.0;
    let mut pathway: f64 = 0.0;
    for (j, eta) in field.grid.etas().enumerate() {
        let p = alpha3_pathways(params, eta, field.w20[j], field.w30[j])?;
        residual = residual.max(p.interference().norm());
        pathway = pathway.max(p.probe.norm()).max(p.generated.norm());
    }
    Ok(if pathway == 0.0 { 0.0 } else { residual / pathway })
}

/// Frequency-domain solver with automatic grid refinement on aliasing.
#[derive(Debug, Clone, Copy)]
pub struct SpectralSolver {
    pub grid: SpectralGrid,
    pub max_refinements: usize,
    response: ResponseFn,
}

impl Default for SpectralSolver {
    fn default() -> Self {
        Self::new(SpectralGrid::default())
    }
}

impl SpectralSolver {
    pub fn new(grid: SpectralGrid) -> Self {
        Self { grid, max_refinements: 5, response: spectral_response }
    }

    pub fn with_response(mut self, response: ResponseFn) -> Self {
        self.response = response;
        self
    }

    /// Propagated unit-amplitude field, refining the grid until the phase
    /// aliasing check passes.
    pub fn field(&self, params: &MediumParams, pulse: &ProbePulse, z: f64) -> Result<SpectralField> {
        let mut grid = self.grid;
        let mut attempt = 0;
        loop {
            let field0 = probe_spectrum(&pulse.unit(), grid)?;
            let field = propagate_with(self.response, params, &field0, z)?;
            if field.max_phase_step <= MAX_PHASE_STEP || attempt == self.max_refinements {
                return Ok(field);
            }
            log::debug!(
                "phase step {:.3} at eta = {:.3}; refining grid to {} points",
                field.max_phase_step,
                field.max_phase_step_eta,
                grid.refined().n_points()
            );
            grid = grid.refined();
            attempt += 1;
        }
    }

    /// Envelopes at distance `z` on the given times.
    pub fn solve(&self, params: &MediumParams, pulse: &ProbePulse, z: f64, times: &[f64]) -> Result<EnvelopeTrace> {
        params.validate()?;
        params.check_weak_probe(pulse);
        let field = self.field(params, pulse, z)?;
        let mut trace = inverse_transform(&field, times, ONE)?.with_amplitude(pulse.amplitude);
        trace.z = z;
        Ok(trace)
    }
}
