//! Invariant suite over a fixed set of media.
//!
//! The individual checks are public so that randomized test harnesses can
//! apply them to their own parameter draws. Each takes the spectral
//! response function, which lets the suite be run against a faulty model.

use lambda_fwm_core::analytic::{default_time_grid, optimal_distance};
use lambda_fwm_core::model::{amplitude_residuals, atomic_amplitudes};
use lambda_fwm_core::oracle::{compare_solvers, Oracle};
use lambda_fwm_core::presets;
use lambda_fwm_core::spectral::{
    conjugate_times, efficiency_trace, inverse_transform, transfer_matrix_from, ResponseFn,
};
use lambda_fwm_core::{MediumParams, ProbePulse, Result, SpectralGrid, SpectralSolver, TransferMatrix};
use num_complex::Complex64;
use serde::Serialize;

const ONE: Complex64 = Complex64::new(1.0, 0.0);
const PROBE: Complex64 = Complex64::new(1e-3, 0.0);

pub const BRANCH_TOLERANCE: f64 = 1e-13;
pub const SEMIGROUP_TOLERANCE: f64 = 1e-10;
pub const FLUX_TOLERANCE: f64 = 1e-10;
pub const PARSEVAL_TOLERANCE: f64 = 1e-8;
pub const LINEARITY_TOLERANCE: f64 = 1e-14;
pub const BACK_SUBSTITUTION_TOLERANCE: f64 = 1e-10;
pub const RATIO_LOCK_TOLERANCE: f64 = 1e-6;
pub const FIG2A_PEAK_MIN: f64 = 0.95;
pub const ORACLE_TOLERANCE: f64 = 1e-2;

fn max_diff(a: &TransferMatrix, b: &TransferMatrix) -> f64 {
    a.entries().iter().zip(b.entries()).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max)
}

fn transfer(response: ResponseFn, params: &MediumParams, eta: f64, z: f64) -> Result<TransferMatrix> {
    transfer_matrix_from(&response(params, eta)?, z)
}

/// Relative change of T(η, z) when the other branch of Λ is taken.
pub fn branch_error(response: ResponseFn, params: &MediumParams, eta: f64, z: f64) -> Result<f64> {
    let r = response(params, eta)?;
    let a = transfer_matrix_from(&r, z)?;
    let b = transfer_matrix_from(&r.flipped_branch(), z)?;
    Ok(max_diff(&a, &b) / a.max_abs())
}

/// Relative difference between T(z₁+z₂) and T(z₂)T(z₁).
pub fn semigroup_error(response: ResponseFn, params: &MediumParams, eta: f64, z1: f64, z2: f64) -> Result<f64> {
    let whole = transfer(response, params, eta, z1 + z2)?;
    let parts = transfer(response, params, eta, z2)?.compose(&transfer(response, params, eta, z1)?);
    Ok(max_diff(&whole, &parts) / whole.max_abs())
}

pub fn zero_distance_is_identity(response: ResponseFn, params: &MediumParams, eta: f64) -> Result<bool> {
    Ok(transfer(response, params, eta, 0.0)? == TransferMatrix::identity())
}

/// Relative change of |W₂₀|²/κ₀₂ + |W₃₀|²/κ₀₃ over a distance z. Only
/// meaningful for a lossless medium with real Rabi frequencies.
pub fn flux_error(
    response: ResponseFn,
    params: &MediumParams,
    eta: f64,
    z: f64,
    w20: Complex64,
    w30: Complex64,
) -> Result<f64> {
    let t = transfer(response, params, eta, z)?;
    let flux = |a: Complex64, b: Complex64| a.norm_sqr() / params.kappa02 + b.norm_sqr() / params.kappa03;
    let (u20, u30) = t.apply(w20, w30);
    let before = flux(w20, w30);
    Ok((flux(u20, u30) - before).abs() / before)
}

/// Largest relative energy mismatch between the propagated spectrum and
/// its transform on the conjugate time grid, over both channels.
pub fn parseval_error(response: ResponseFn, params: &MediumParams, z: f64, grid: SpectralGrid) -> Result<f64> {
    let solver = SpectralSolver::new(grid).with_response(response);
    let field = solver.field(params, &ProbePulse::gaussian(PROBE), z)?;
    let times = conjugate_times(&field.grid, -40.0, field.grid.n_points());
    let trace = inverse_transform(&field, &times, ONE)?;
    let dt = times[1] - times[0];
    let mut worst: f64 = 0.0;
    for (time, freq) in [(&trace.envelope20, &field.w20), (&trace.envelope30, &field.w30)] {
        let e_t: f64 = time.iter().map(|x| x.norm_sqr()).sum::<f64>() * dt;
        let e_w: f64 = freq.iter().map(|x| x.norm_sqr()).sum::<f64>() * field.grid.spacing();
        if e_w > 0.0 {
            worst = worst.max((e_t - e_w).abs() / e_w);
        }
    }
    Ok(worst)
}

/// Scaling the probe by `c`: returns the largest relative deviation of the
/// fields from exact proportionality, and whether the efficiency traces
/// are bit-identical.
pub fn linearity(
    response: ResponseFn,
    params: &MediumParams,
    z: f64,
    amplitude: Complex64,
    c: Complex64,
) -> Result<(f64, bool)> {
    let solver = SpectralSolver::new(SpectralGrid::new(-16.0, 16.0, 1024)?).with_response(response);
    let times: Vec<f64> = (0..64).map(|k| -5.0 + z + 0.25 * k as f64).collect();
    let base = ProbePulse::gaussian(amplitude);
    let scaled = ProbePulse::gaussian(amplitude * c);
    let one = solver.solve(params, &base, z, &times)?;
    let two = solver.solve(params, &scaled, z, &times)?;
    let mut worst: f64 = 0.0;
    for (a, b) in [(one.omega20(), two.omega20()), (one.omega30(), two.omega30())] {
        for (x, y) in a.iter().zip(&b) {
            if y.norm() > 0.0 {
                worst = worst.max((x * c - y).norm() / y.norm());
            }
        }
    }
    let same = efficiency_trace(&one, params, &base)? == efficiency_trace(&two, params, &scaled)?;
    Ok((worst, same))
}

/// Largest residual of the amplitude equations after solving for α,
/// relative to the larger of |W₂₀|, |W₃₀|.
pub fn back_substitution_error(params: &MediumParams, eta: f64, w20: Complex64, w30: Complex64) -> Result<f64> {
    let alpha = atomic_amplitudes(params, eta, w20, w30)?;
    let scale = w20.norm().max(w30.norm());
    Ok(amplitude_residuals(params, eta, alpha, w20, w30).iter().map(|r| r.norm()).fold(0.0, f64::max) / scale)
}

/// Ω₂₀/Ω₃₀ over the samples where both fields exceed `floor` of their
/// peaks.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RatioLock {
    pub mean: Complex64,
    /// max |r − mean| / |mean|.
    pub spread: f64,
    pub samples: usize,
}

pub fn ratio_lock(omega20: &[Complex64], omega30: &[Complex64], floor: f64) -> RatioLock {
    let peak = |v: &[Complex64]| v.iter().map(|x| x.norm()).fold(0.0, f64::max);
    let (p20, p30) = (peak(omega20), peak(omega30));
    let ratios: Vec<Complex64> = omega20
        .iter()
        .zip(omega30)
        .filter(|(a, b)| a.norm() > floor * p20 && b.norm() > floor * p30)
        .map(|(a, b)| a / b)
        .collect();
    if ratios.is_empty() {
        return RatioLock { mean: Complex64::new(f64::NAN, f64::NAN), spread: f64::INFINITY, samples: 0 };
    }
    let mean = ratios.iter().sum::<Complex64>() / ratios.len() as f64;
    let spread = ratios.iter().map(|r| (r - mean).norm()).fold(0.0, f64::max) / mean.norm();
    RatioLock { mean, spread, samples: ratios.len() }
}

/// Spectral ratio lock for a medium at distance z on its default time grid.
pub fn spectral_ratio_lock(response: ResponseFn, params: &MediumParams, z: f64) -> Result<RatioLock> {
    let times = default_time_grid(params, z);
    let trace =
        SpectralSolver::default().with_response(response).solve(params, &ProbePulse::gaussian(PROBE), z, &times)?;
    Ok(ratio_lock(&trace.omega20(), &trace.omega30(), 1e-4))
}

/// Peak spectral efficiency of a medium at its optimal distance.
pub fn spectral_peak_at_optimum(response: ResponseFn, params: &MediumParams) -> Result<f64> {
    let z = optimal_distance(params)?;
    let times = default_time_grid(params, z);
    let pulse = ProbePulse::gaussian(PROBE);
    let trace = SpectralSolver::default().with_response(response).solve(params, &pulse, z, &times)?;
    Ok(efficiency_trace(&trace, params, &pulse)?.peak)
}

/// Largest per-channel relative L2 difference between the spectral solver
/// and the time-domain oracle.
pub fn oracle_error(response: ResponseFn, params: &MediumParams, z: f64) -> Result<f64> {
    let spectral = SpectralSolver::default().with_response(response);
    let cmp = compare_solvers(params, &ProbePulse::gaussian(PROBE), z, &Oracle::default(), &spectral)?;
    Ok(cmp.omega20.relative_l2.max(cmp.omega30.relative_l2))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CheckResult {
    pub name: &'static str,
    pub passed: bool,
    /// Worst observed value of the checked quantity.
    pub metric: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub lower: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub upper: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ValidateOptions {
    pub oracle: bool,
}

impl Default for ValidateOptions {
    fn default() -> Self {
        Self { oracle: true }
    }
}

/// Media with complex Rabi frequencies and unequal widths, on top of the presets.
pub fn sample_media() -> Vec<MediumParams> {
    vec![
        presets::fig2a(),
        presets::fig2b(),
        presets::resonant_dark_state(),
        presets::resonant_matched(),
        MediumParams {
            omega12: Complex64::from_polar(60.0, 0.7),
            omega13: Complex64::from_polar(35.0, -1.2),
            delta1: 1.5,
            delta2: -3.0,
            delta3: 4.0,
            gamma1: 0.5,
            gamma2: 1.0,
            gamma3: 2.0,
            kappa02: 8.0,
            kappa03: 3.0,
        },
    ]
}

pub fn lossless_media() -> Vec<MediumParams> {
    let lossless = |p: MediumParams| MediumParams { gamma1: 0.0, gamma2: 0.0, gamma3: 0.0, ..p };
    vec![
        lossless(presets::fig2a()),
        MediumParams {
            omega12: Complex64::new(50.0, 0.0),
            omega13: Complex64::new(30.0, 0.0),
            delta1: 0.5,
            delta2: 2.0,
            delta3: -3.0,
            gamma1: 0.0,
            gamma2: 0.0,
            gamma3: 0.0,
            kappa02: 5.0,
            kappa03: 2.0,
        },
    ]
}

const ETAS: [f64; 5] = [-6.0, -1.3, 0.0, 0.7, 4.2];
const DISTANCES: [(f64, f64); 3] = [(0.4, 1.1), (2.0, 1.5), (0.05, 3.0)];

/// Tracks the worst metric of a check and whether any evaluation failed.
struct Worst {
    name: &'static str,
    lower: Option<f64>,
    upper: Option<f64>,
    metric: f64,
    error: Option<String>,
    exact: bool,
}

impl Worst {
    fn new(name: &'static str, tolerance: f64) -> Self {
        Self { name, lower: None, upper: Some(tolerance), metric: 0.0, error: None, exact: true }
    }

    /// A single value required to lie in `[lower, upper]`.
    fn within(name: &'static str, lower: f64, upper: f64) -> Self {
        Self { lower: Some(lower), upper: Some(upper), metric: f64::NAN, ..Self::new(name, upper) }
    }

    fn record(&mut self, value: Result<f64>) {
        match value {
            Ok(v) if v.is_nan() || self.lower.is_some() => self.metric = v,
            Ok(v) => self.metric = self.metric.max(v),
            Err(e) => {
                self.error.get_or_insert(e.to_string());
            }
        }
    }

    fn finish(self) -> CheckResult {
        let above = self.lower.is_none_or(|lo| self.metric >= lo);
        let below = self.upper.is_none_or(|hi| self.metric <= hi);
        CheckResult {
            name: self.name,
            passed: self.error.is_none() && self.exact && above && below,
            metric: self.metric,
            lower: self.lower,
            upper: self.upper,
            error: self.error,
        }
    }
}

/// Runs every invariant check. Check names are stable identifiers.
pub fn run_suite(response: ResponseFn, options: ValidateOptions) -> Vec<CheckResult> {
    let media = sample_media();
    let mut results = Vec::new();

    let mut branch = Worst::new("branch_invariance", BRANCH_TOLERANCE);
    let mut semigroup = Worst::new("semigroup", SEMIGROUP_TOLERANCE);
    let mut identity = Worst::new("zero_distance_identity", 0.0);
    let mut residual = Worst::new("back_substitution", BACK_SUBSTITUTION_TOLERANCE);
    let w = (Complex64::new(0.3, -0.8), Complex64::new(-0.5, 0.2));
    for p in &media {
        for &eta in &ETAS {
            for &(z1, z2) in &DISTANCES {
                branch.record(branch_error(response, p, eta, z1 + z2));
                semigroup.record(semigroup_error(response, p, eta, z1, z2));
            }
            match zero_distance_is_identity(response, p, eta) {
                Ok(same) => identity.exact &= same,
                Err(e) => identity.record(Err(e)),
            }
            residual.record(back_substitution_error(p, eta, w.0, w.1));
        }
    }
    results.extend([branch.finish(), semigroup.finish(), identity.finish()]);

    let mut flux = Worst::new("lossless_flux_conservation", FLUX_TOLERANCE);
    for p in &lossless_media() {
        for &eta in &ETAS {
            for &(z1, z2) in &DISTANCES {
                flux.record(flux_error(response, p, eta, z1 + z2, w.0, w.1));
            }
        }
    }
    results.push(flux.finish());

    let mut parseval = Worst::new("parseval", PARSEVAL_TOLERANCE);
    let mut linear = Worst::new("probe_linearity", LINEARITY_TOLERANCE);
    let grid = SpectralGrid::new(-16.0, 16.0, 1024).expect("valid grid");
    for p in &media {
        parseval.record(parseval_error(response, p, 1.3, grid));
        match linearity(response, p, 1.3, Complex64::new(1e-3, 2e-4), Complex64::new(-3.7, 11.0)) {
            Ok((err, same)) => {
                linear.record(Ok(err));
                linear.exact &= same;
            }
            Err(e) => linear.record(Err(e)),
        }
    }
    results.extend([parseval.finish(), linear.finish(), residual.finish()]);

    let mut lock = Worst::new("ratio_lock", RATIO_LOCK_TOLERANCE);
    let dark = presets::resonant_dark_state();
    let expected = dark.omega12 / dark.omega13;
    match spectral_ratio_lock(response, &dark, 10.0) {
        Ok(r) => {
            let offset = (r.mean - expected).norm() / expected.norm();
            lock.record(Ok(if r.samples < 2 { f64::INFINITY } else { r.spread.max(offset) }));
        }
        Err(e) => lock.record(Err(e)),
    }
    results.push(lock.finish());

    // A passive medium cannot convert more photons than it receives.
    let mut peak = Worst::within("fig2a_peak", FIG2A_PEAK_MIN, 1.0);
    peak.record(spectral_peak_at_optimum(response, &presets::fig2a()));
    results.push(peak.finish());

    if options.oracle {
        let mut oracle = Worst::new("oracle_cross_check", ORACLE_TOLERANCE);
        oracle.record(oracle_error(response, &presets::resonant_dark_state(), 3.0));
        oracle.record(oracle_error(response, &presets::fig2b(), 1.0));
        results.push(oracle.finish());
    }
    results
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ratio_lock_of_proportional_fields() {
        let a: Vec<Complex64> = (0..50).map(|k| Complex64::new((k as f64 * 0.1).sin(), 1.0)).collect();
        let b: Vec<Complex64> = a.iter().map(|x| x * 4.0).collect();
        let r = ratio_lock(&a, &b, 1e-4);
        assert_eq!(r.samples, 50);
        assert!(r.spread < 1e-15);
        assert!((r.mean.re - 0.25).abs() < 1e-15);
    }

    #[test]
    fn ratio_lock_without_overlap() {
        let a = vec![Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0)];
        let b = vec![Complex64::new(0.0, 0.0), Complex64::new(1.0, 0.0)];
        assert_eq!(ratio_lock(&a, &b, 1e-4).samples, 0);
    }
}
