//! Parameter sets used throughout the tests, the figure datasets and the
//! validation suite.

use num_complex::Complex64;

use crate::model::MediumParams;

/// Detuned, phase-matched medium: |Ω₁₂|τ=200, |Ω₁₃|τ=100, κ₀₂cτ²=40,
/// κ₀₃cτ²=10, γτ=0.1, δ₂τ=δ₃τ=20.
pub fn fig2a() -> MediumParams {
    MediumParams {
        omega12: Complex64::new(200.0, 0.0),
        omega13: Complex64::new(100.0, 0.0),
        delta1: 0.0,
        delta2: 20.0,
        delta3: 20.0,
        gamma1: 0.1,
        gamma2: 0.1,
        gamma3: 0.1,
        kappa02: 40.0,
        kappa03: 10.0,
    }
}

/// As [`fig2a`] with δ₂τ=δ₃τ=10.
pub fn fig2b() -> MediumParams {
    MediumParams { delta2: 10.0, delta3: 10.0, ..fig2a() }
}

/// All lasers on resonance: κcτ²=200 for both fields, |Ω₁₂|τ=5, |Ω₁₃|τ=20,
/// γ₁τ=0.02, γ₂τ=γ₃τ=2. The dark-state field ratio is Ω₁₂/Ω₁₃ = 0.25.
pub fn resonant_dark_state() -> MediumParams {
    MediumParams {
        omega12: Complex64::new(5.0, 0.0),
        omega13: Complex64::new(20.0, 0.0),
        delta1: 0.0,
        delta2: 0.0,
        delta3: 0.0,
        gamma1: 0.02,
        gamma2: 2.0,
        gamma3: 2.0,
        kappa02: 200.0,
        kappa03: 200.0,
    }
}

/// On resonance with κ₀₂|Ω₁₃|² = κ₀₃|Ω₁₂|² (|Ω₁₂|τ=|Ω₁₃|τ=20).
pub fn resonant_matched() -> MediumParams {
    MediumParams { omega12: Complex64::new(20.0, 0.0), ..resonant_dark_state() }
}
