//! Closed-form limits of the propagation problem.
//!
//! Two regimes have simple solutions: every laser on resonance (a single
//! mode at velocity V_g1 survives) and large detunings with strong coupling
//! (two modes at V_g1 and V_g beating with phase Pz).

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{Condition, Error, Result};
use crate::model::{spectral_response, MediumParams, ProbePulse};
use crate::trace::{linspace, EfficiencyTrace, EnvelopeTrace};

/// "≫" is read as a factor of ten.
pub const STRONG_RATIO: f64 = 10.0;
/// On resonance the absorbed mode must have decayed below this factor.
pub const MAX_ATTENUATION: f64 = 1e-3;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RegimeKind {
    OnResonance,
    DetunedStrong,
}

/// A limit regime together with the evaluated validity conditions.
#[derive(Debug, Clone, PartialEq)]
pub struct LimitRegime {
    pub kind: RegimeKind,
    pub validity: Vec<Condition>,
}

fn exactly_zero(name: &'static str, value: f64) -> Condition {
    Condition { name, satisfied: value == 0.0, margin: 1.0 / value.abs() }
}

fn at_least(name: &'static str, value: f64, threshold: f64) -> Condition {
    let margin = value / threshold;
    Condition { name, satisfied: margin >= 1.0, margin }
}

fn at_most(name: &'static str, value: f64, threshold: f64) -> Condition {
    let margin = if value == 0.0 { f64::INFINITY } else { threshold / value };
    Condition { name, satisfied: margin >= 1.0, margin }
}

impl LimitRegime {
    /// All lasers on resonance with a long-lived ground coherence.
    pub fn on_resonance(params: &MediumParams) -> Self {
        let d1d2 = params.gamma1 * params.gamma2 / 4.0;
        let validity = vec![
            exactly_zero("delta1 = 0", params.delta1),
            exactly_zero("delta2 = 0", params.delta2),
            exactly_zero("delta3 = 0", params.delta3),
            at_most("gamma1 << 1", params.gamma1, 1.0 / STRONG_RATIO),
            at_least("|Omega12|^2 >> |D1 D2|", params.rabi12_sq(), STRONG_RATIO * d1d2),
        ];
        Self { kind: RegimeKind::OnResonance, validity }
    }

    /// Large detunings, still small against both coupling strengths.
    pub fn detuned_strong(params: &MediumParams) -> Self {
        let ratio = |delta: f64, rabi_sq: f64| delta * delta / rabi_sq;
        let (r12, r13) = (params.rabi12_sq(), params.rabi13_sq());
        let validity = vec![
            exactly_zero("delta1 = 0", params.delta1),
            at_most("gamma1 << 1", params.gamma1, 1.0 / STRONG_RATIO),
            at_least("|delta3| >> 1", params.delta3.abs(), STRONG_RATIO),
            at_most("|delta2/Omega12|^2 <= 1", ratio(params.delta2, r12), 1.0),
            at_most("|delta3/Omega12|^2 <= 1", ratio(params.delta3, r12), 1.0),
            at_most("|delta2/Omega13|^2 <= 1", ratio(params.delta2, r13), 1.0),
            at_most("|delta3/Omega13|^2 <= 1", ratio(params.delta3, r13), 1.0),
        ];
        Self { kind: RegimeKind::DetunedStrong, validity }
    }

    /// The first regime whose conditions all hold.
    pub fn classify(params: &MediumParams) -> Option<Self> {
        [Self::on_resonance(params), Self::detuned_strong(params)].into_iter().find(Self::is_satisfied)
    }

    pub fn is_satisfied(&self) -> bool {
        self.validity.iter().all(|c| c.satisfied)
    }

    pub fn require(self) -> Result<Self> {
        if self.is_satisfied() {
            Ok(self)
        } else {
            Err(Error::RegimeViolation(self.validity))
        }
    }
}

/// Inverse group velocities (units 1/c) and the beat and loss rates of the
/// detuned two-mode solution (units 1/(cτ)).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PropagationConstants {
    pub inv_vg1: f64,
    pub inv_vg: f64,
    pub p_factor: f64,
    pub q_factor: f64,
}

/// κ₀₂|Ω₁₃|² + κ₀₃|Ω₁₂|², the common denominator of the limit formulas.
fn weighted_coupling(params: &MediumParams) -> f64 {
    params.kappa02 * params.rabi13_sq() + params.kappa03 * params.rabi12_sq()
}

/// 1/V_g1 in units of 1/c.
pub fn vg1_inverse(params: &MediumParams) -> Result<f64> {
    let (r12, r13) = (params.rabi12_sq(), params.rabi13_sq());
    if r12 == 0.0 && r13 == 0.0 {
        return Err(Error::ZeroCoupling);
    }
    let (k2, k3) = (params.kappa02, params.kappa03);
    let extra = if k2 == 0.0 || k3 == 0.0 {
        0.0
    } else if r13 == 0.0 {
        k2 / r12
    } else if r12 == 0.0 {
        k3 / r13
    } else {
        k2 * k3 / weighted_coupling(params)
    };
    Ok(1.0 + extra)
}

pub fn propagation_constants(params: &MediumParams) -> Result<PropagationConstants> {
    let (r12, r13) = (params.rabi12_sq(), params.rabi13_sq());
    let inv_vg1 = vg1_inverse(params)?;
    if r12 == 0.0 {
        return Err(Error::ZeroCoupling);
    }
    let denominator = r12 * params.delta3 + r13 * params.delta2;
    if denominator == 0.0 {
        return Err(Error::DegenerateDetuning);
    }
    let p_factor = weighted_coupling(params) / denominator;
    let r = r13 / r12;
    let inv_vg = 1.0 + (1.0 + r) * (params.kappa02 * r + params.kappa03) / (params.delta3 + r * params.delta2).powi(2);
    let q_factor = p_factor * (r12 * params.gamma3 / 2.0 + r13 * params.gamma2 / 2.0) / denominator;
    Ok(PropagationConstants { inv_vg1, inv_vg, p_factor, q_factor })
}

/// Distance π/|P| at which the two detuned modes first add constructively.
pub fn optimal_distance(params: &MediumParams) -> Result<f64> {
    let p = propagation_constants(params)?.p_factor;
    if p == 0.0 {
        return Err(Error::DegenerateDetuning);
    }
    Ok(PI / p.abs())
}

/// κ₀₂κ₀₃|Ω₁₂|²|Ω₁₃|² / (κ₀₂|Ω₁₃|² + κ₀₃|Ω₁₂|²)².
///
/// The peak efficiency of the on-resonance limit, and the envelope of the
/// detuned one. At most 1/4, reached when κ₀₂|Ω₁₃|² = κ₀₃|Ω₁₂|².
pub fn efficiency_prefactor(params: &MediumParams) -> Result<f64> {
    let w = weighted_coupling(params);
    if w == 0.0 {
        return Err(Error::ZeroCoupling);
    }
    let a = params.kappa02 * params.rabi13_sq();
    let b = params.kappa03 * params.rabi12_sq();
    Ok(a * b / (w * w))
}

/// Field coefficients of the limit solutions: Ω₃₀ and Ω₂₀ carry `c30` and
/// `c20` on the V_g1 mode; the V_g mode of Ω₂₀ carries `c20_slow`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LimitCoefficients {
    pub c30: Complex64,
    pub c20: f64,
    pub c20_slow: f64,
}

pub fn limit_coefficients(params: &MediumParams) -> Result<LimitCoefficients> {
    let w = weighted_coupling(params);
    if w == 0.0 {
        return Err(Error::ZeroCoupling);
    }
    Ok(LimitCoefficients {
        c30: params.kappa03 * params.omega31() * params.omega12 / w,
        c20: params.kappa03 * params.rabi12_sq() / w,
        c20_slow: params.kappa02 * params.rabi13_sq() / w,
    })
}

/// |exp(i(κ₀₂|Ω₁₃|² + κ₀₃|Ω₁₂|²)z/Δ(0))|: the surviving fraction of the
/// absorbed mode on resonance.
pub fn resonant_attenuation(params: &MediumParams, z: f64) -> Result<f64> {
    let delta = spectral_response(params, 0.0)?.delta_det;
    let exponent = Complex64::i() * weighted_coupling(params) * z / delta;
    Ok(exponent.exp().norm())
}

fn require_on_resonance(params: &MediumParams, z: f64) -> Result<()> {
    let mut regime = LimitRegime::on_resonance(params);
    let attenuation = resonant_attenuation(params, z)?;
    regime.validity.push(at_most("absorbed mode decayed", attenuation, MAX_ATTENUATION));
    regime.require().map(|_| ())
}

fn trace_from(
    pulse: &ProbePulse,
    z: f64,
    times: &[f64],
    fields: impl Fn(f64) -> (Complex64, Complex64),
) -> EnvelopeTrace {
    let (envelope20, envelope30) = times.iter().map(|&t| fields(t)).unzip();
    EnvelopeTrace { times: times.to_vec(), z, probe_amplitude: pulse.amplitude, envelope20, envelope30 }
}

/// Single-mode fields after the absorbed mode has decayed: both channels
/// are the entrance probe delayed by z/V_g1, locked to the ratio Ω₂₁/Ω₃₁.
pub fn on_resonance_fields(params: &MediumParams, pulse: &ProbePulse, z: f64, times: &[f64]) -> Result<EnvelopeTrace> {
    params.validate()?;
    require_on_resonance(params, z)?;
    let c = limit_coefficients(params)?;
    let delay = z * vg1_inverse(params)?;
    Ok(trace_from(pulse, z, times, |t| {
        let g = pulse.shape_at(t - delay);
        (c.c20 * g, c.c30 * g)
    }))
}

/// Two-mode fields in the detuned limit. The V_g mode carries the phase
/// e^{iPz} and the loss e^{−Qz}.
pub fn detuned_fields(params: &MediumParams, pulse: &ProbePulse, z: f64, times: &[f64]) -> Result<EnvelopeTrace> {
    params.validate()?;
    LimitRegime::detuned_strong(params).require()?;
    let k = propagation_constants(params)?;
    let c = limit_coefficients(params)?;
    let beat = Complex64::new(-k.q_factor * z, k.p_factor * z).exp();
    Ok(trace_from(pulse, z, times, |t| {
        let fast = pulse.shape_at(t - z * k.inv_vg1);
        let slow = pulse.shape_at(t - z * k.inv_vg) * beat;
        (c.c20 * fast + c.c20_slow * slow, c.c30 * (fast - slow))
    }))
}

/// Delay of the first Gaussian in the detuned efficiency formula.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum FirstModeDelay {
    /// z/c, as in the closed form.
    #[default]
    Vacuum,
    /// z/V_g1.
    GroupVelocity,
}

/// Conversion efficiency of a unit Gaussian probe in whichever limit
/// regime applies.
pub fn efficiency_analytic(params: &MediumParams, z: f64, times: &[f64]) -> Result<EfficiencyTrace> {
    efficiency_analytic_with(params, z, times, FirstModeDelay::Vacuum)
}

pub fn efficiency_analytic_with(
    params: &MediumParams,
    z: f64,
    times: &[f64],
    first: FirstModeDelay,
) -> Result<EfficiencyTrace> {
    params.validate()?;
    let prefactor = efficiency_prefactor(params)?;
    let resonant = LimitRegime::on_resonance(params);
    let efficiency: Vec<f64> = if resonant.is_satisfied() {
        require_on_resonance(params, z)?;
        let delay = z * vg1_inverse(params)?;
        times.iter().map(|t| prefactor * (-2.0 * (t - delay).powi(2)).exp()).collect()
    } else {
        let detuned = LimitRegime::detuned_strong(params);
        if !detuned.is_satisfied() {
            let mut failed = resonant.validity;
            failed.extend(detuned.validity);
            return Err(Error::RegimeViolation(failed));
        }
        let k = propagation_constants(params)?;
        let first_delay = match first {
            FirstModeDelay::Vacuum => z,
            FirstModeDelay::GroupVelocity => z * k.inv_vg1,
        };
        let slow_delay = z * k.inv_vg;
        times
            .iter()
            .map(|t| {
                let fast = Complex64::new(-(t - first_delay).powi(2), 0.0).exp();
                let slow = Complex64::new(-k.q_factor * z - (t - slow_delay).powi(2), k.p_factor * z).exp();
                prefactor * (fast - slow).norm_sqr()
            })
            .collect()
    };
    Ok(EfficiencyTrace::from_samples(times.to_vec(), efficiency))
}

/// Relative error of the small-D₁ estimate of the slow propagation
/// eigenvalue, D₁κ₀₂κ₀₃/(κ₀₂|Ω₁₃|² + κ₀₃|Ω₁₂|²), against the exact value.
///
/// The exact slow eigenvalue of M − η is det(M − η)/λ_fast with
/// det(M − η) = κ₀₂κ₀₃D₁/Δ, which avoids cancellation in D̄ − Λ. Returns 0
/// when both sides vanish.
pub fn dispersion_approx_error(params: &MediumParams, eta: f64) -> Result<f64> {
    let r = spectral_response(params, eta)?;
    let det = params.kappa02 * params.kappa03 * r.d1 / r.delta_det;
    let plus = r.d_bar - eta + r.lambda;
    let minus = r.d_bar - eta - r.lambda;
    let fast = if plus.norm() >= minus.norm() { plus } else { minus };
    let exact = if fast == Complex64::new(0.0, 0.0) { fast } else { det / fast };
    let w = weighted_coupling(params);
    if w == 0.0 {
        return Err(Error::ZeroCoupling);
    }
    let approx = r.d1 * params.kappa02 * params.kappa03 / w;
    let diff = (exact - approx).norm();
    Ok(match (diff, exact.norm()) {
        (0.0, _) => 0.0,
        (_, 0.0) => f64::INFINITY,
        (d, e) => d / e,
    })
}

/// Time samples covering the probe from its vacuum arrival to its slowest
/// limit-regime arrival, ±5τ, with 2001 points.
pub fn default_time_grid(params: &MediumParams, z: f64) -> Vec<f64> {
    let mut slowest: f64 = 1.0;
    if let Ok(v) = vg1_inverse(params) {
        slowest = slowest.max(v);
    }
    if let Ok(k) = propagation_constants(params) {
        slowest = slowest.max(k.inv_vg);
    }
    linspace(z - 5.0, z * slowest + 5.0, 2001)
}
