//! Dimensionless medium parameters and the per-frequency algebraic response
//! of the four-level double-Λ system.
//!
//! Units: time in τ (probe duration), length in cτ, frequencies in 1/τ.
//! With these units the vacuum wavenumber ω/c becomes the dimensionless
//! frequency η = ωτ itself.

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Threshold on |Δτ³| below which the response is treated as a pole.
pub const SINGULARITY_EPS: f64 = 1e-12;

/// Physical constants of the medium and the two long-pulse coupling lasers.
///
/// Rabi frequencies are half-Rabi frequencies Ω₁₂τ and Ω₁₃τ; the reverse
/// couplings are their complex conjugates. Propagation constants are κ·cτ².
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MediumParams {
    pub omega12: Complex64,
    pub omega13: Complex64,
    pub delta1: f64,
    pub delta2: f64,
    pub delta3: f64,
    pub gamma1: f64,
    pub gamma2: f64,
    pub gamma3: f64,
    pub kappa02: f64,
    pub kappa03: f64,
}

impl MediumParams {
    /// Checks the invariants and returns `self` unchanged.
    pub fn validated(self) -> Result<Self> {
        self.validate()?;
        Ok(self)
    }

    pub fn validate(&self) -> Result<()> {
        let complex = [("omega12", self.omega12), ("omega13", self.omega13)];
        for (field, v) in complex {
            if !(v.re.is_finite() && v.im.is_finite()) {
                return Err(invalid(field, "must be finite"));
            }
        }
        let real = [("delta1", self.delta1), ("delta2", self.delta2), ("delta3", self.delta3)];
        for (field, v) in real {
            if !v.is_finite() {
                return Err(invalid(field, "must be finite"));
            }
        }
        let non_negative = [
            ("gamma1", self.gamma1),
            ("gamma2", self.gamma2),
            ("gamma3", self.gamma3),
            ("kappa02", self.kappa02),
            ("kappa03", self.kappa03),
        ];
        for (field, v) in non_negative {
            if !(v.is_finite() && v >= 0.0) {
                return Err(invalid(field, &format!("must be finite and >= 0, got {v}")));
            }
        }
        Ok(())
    }

    pub fn omega21(&self) -> Complex64 {
        self.omega12.conj()
    }

    pub fn omega31(&self) -> Complex64 {
        self.omega13.conj()
    }

    /// |Ω₁₂|²
    pub fn rabi12_sq(&self) -> f64 {
        self.omega12.norm_sqr()
    }

    /// |Ω₁₃|²
    pub fn rabi13_sq(&self) -> f64 {
        self.omega13.norm_sqr()
    }

    /// Checks the non-depleted ground state assumption |Ω₂₀| ≪ |Ω₁₂| for a
    /// given probe and logs a warning when it does not hold. Never fails.
    pub fn check_weak_probe(&self, pulse: &ProbePulse) -> bool {
        let probe = pulse.amplitude.norm() * pulse.peak_shape();
        let ok = probe * 10.0 <= self.omega12.norm();
        if !ok {
            log::warn!(
                "probe |Omega20 tau| = {probe:.3e} is not much smaller than |Omega12 tau| = {:.3e}; \
                 the weak-probe approximation may not hold",
                self.omega12.norm()
            );
        }
        ok
    }
}

fn invalid(field: &'static str, reason: &str) -> Error {
    Error::InvalidParameter { field, reason: reason.to_string() }
}

/// Uniformly sampled complex envelope over t/τ.
#[derive(Debug, Clone, PartialEq)]
pub struct TabulatedShape {
    t0: f64,
    dt: f64,
    samples: Vec<Complex64>,
}

impl TabulatedShape {
    pub fn new(t0: f64, dt: f64, samples: Vec<Complex64>) -> Result<Self> {
        if !(t0.is_finite() && dt.is_finite() && dt > 0.0) {
            return Err(invalid("shape", "tabulated start and spacing must be finite, spacing > 0"));
        }
        if samples.len() < 2 {
            return Err(invalid("shape", "tabulated shape needs at least two samples"));
        }
        if samples.iter().any(|s| !(s.re.is_finite() && s.im.is_finite())) {
            return Err(invalid("shape", "tabulated samples must be finite"));
        }
        Ok(Self { t0, dt, samples })
    }

    pub fn t0(&self) -> f64 {
        self.t0
    }

    pub fn dt(&self) -> f64 {
        self.dt
    }

    pub fn samples(&self) -> &[Complex64] {
        &self.samples
    }

    pub fn t_end(&self) -> f64 {
        self.t0 + self.dt * (self.samples.len() - 1) as f64
    }

    /// Linear interpolation, zero outside the table.
    pub fn at(&self, t: f64) -> Complex64 {
        let x = (t - self.t0) / self.dt;
        let last = (self.samples.len() - 1) as f64;
        if !(0.0..=last).contains(&x) {
            return Complex64::new(0.0, 0.0);
        }
        let k = (x.floor() as usize).min(self.samples.len() - 2);
        let frac = x - k as f64;
        self.samples[k] * (1.0 - frac) + self.samples[k + 1] * frac
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum PulseShape {
    /// exp(−(t/τ)²)
    Gaussian,
    Tabulated(TabulatedShape),
}

/// Probe envelope at the medium entrance: Ω₂₀(0,t)τ = amplitude · shape(t/τ).
#[derive(Debug, Clone, PartialEq)]
pub struct ProbePulse {
    pub amplitude: Complex64,
    pub shape: PulseShape,
}

impl ProbePulse {
    pub fn gaussian(amplitude: Complex64) -> Self {
        Self { amplitude, shape: PulseShape::Gaussian }
    }

    pub fn tabulated(amplitude: Complex64, shape: TabulatedShape) -> Self {
        Self { amplitude, shape: PulseShape::Tabulated(shape) }
    }

    /// Same shape with unit amplitude.
    pub fn unit(&self) -> Self {
        Self { amplitude: Complex64::new(1.0, 0.0), shape: self.shape.clone() }
    }

    /// Dimensionless shape at t/τ (amplitude not applied).
    pub fn shape_at(&self, t: f64) -> Complex64 {
        match &self.shape {
            PulseShape::Gaussian => Complex64::new((-t * t).exp(), 0.0),
            PulseShape::Tabulated(tab) => tab.at(t),
        }
    }

    /// Ω₂₀(0,t)τ.
    pub fn envelope(&self, t: f64) -> Complex64 {
        self.amplitude * self.shape_at(t)
    }

    pub fn peak_shape(&self) -> f64 {
        match &self.shape {
            PulseShape::Gaussian => 1.0,
            PulseShape::Tabulated(tab) => tab.samples.iter().map(|s| s.norm()).fold(0.0, f64::max),
        }
    }

    /// Time window (t/τ) outside which the shape is negligible.
    pub fn support(&self) -> (f64, f64) {
        match &self.shape {
            PulseShape::Gaussian => (-5.0, 5.0),
            PulseShape::Tabulated(tab) => (tab.t0, tab.t_end()),
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.amplitude.re.is_finite() && self.amplitude.im.is_finite()) {
            return Err(invalid("amplitude", "must be finite"));
        }
        Ok(())
    }
}

/// Derived quantities of the spectral response at one frequency η.
///
/// `d_bar` is the mean propagation constant (K₂+K₃)/2 and `lambda` the
/// half-splitting of the two propagation eigenvalues d_bar ± lambda.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpectralResponse {
    pub eta: f64,
    pub d1: Complex64,
    pub d2: Complex64,
    pub d3: Complex64,
    pub delta_det: Complex64,
    pub k2: Complex64,
    pub k3: Complex64,
    pub s2: Complex64,
    pub s3: Complex64,
    pub lambda: Complex64,
    pub d_bar: Complex64,
}

impl SpectralResponse {
    /// The same response with the other square-root branch for Λ.
    pub fn flipped_branch(&self) -> Self {
        Self { lambda: -self.lambda, ..*self }
    }

    /// The 2×2 generator M of dW/dz = iMW, row-major.
    pub fn generator(&self) -> [[Complex64; 2]; 2] {
        [[self.k2, self.s2], [self.s3, self.k3]]
    }
}

/// (D₁, D₂, D₃) = δᵢ + η + iγᵢ/2.
pub fn detuning_factors(params: &MediumParams, eta: f64) -> (Complex64, Complex64, Complex64) {
    (
        Complex64::new(params.delta1 + eta, params.gamma1 / 2.0),
        Complex64::new(params.delta2 + eta, params.gamma2 / 2.0),
        Complex64::new(params.delta3 + eta, params.gamma3 / 2.0),
    )
}

fn determinant(params: &MediumParams, eta: f64) -> Result<(Complex64, Complex64, Complex64, Complex64)> {
    let (d1, d2, d3) = detuning_factors(params, eta);
    let delta = d1 * d2 * d3 - d3 * params.rabi12_sq() - d2 * params.rabi13_sq();
    let magnitude = delta.norm();
    if magnitude <= SINGULARITY_EPS || !magnitude.is_finite() {
        return Err(Error::SingularResponse { eta, magnitude });
    }
    Ok((d1, d2, d3, delta))
}

/// Full spectral response at η. Pure: identical inputs give identical bits.
pub fn spectral_response(params: &MediumParams, eta: f64) -> Result<SpectralResponse> {
    let (d1, d2, d3, delta) = determinant(params, eta)?;
    let vacuum = Complex64::new(eta, 0.0);
    let k2 = vacuum + params.kappa02 * (params.rabi13_sq() - d1 * d3) / delta;
    let k3 = vacuum + params.kappa03 * (params.rabi12_sq() - d1 * d2) / delta;
    let s2 = -params.kappa02 * params.omega21() * params.omega13 / delta;
    let s3 = -params.kappa03 * params.omega31() * params.omega12 / delta;
    let half_diff = (k2 - k3) / 2.0;
    let lambda = (half_diff * half_diff + s2 * s3).sqrt();
    let d_bar = (k2 + k3) / 2.0;
    Ok(SpectralResponse { eta, d1, d2, d3, delta_det: delta, k2, k3, s2, s3, lambda, d_bar })
}

/// Fourier-domain atomic amplitudes (α₁, α₂, α₃) driven by the probe and
/// generated-field spectra.
pub fn atomic_amplitudes(
    params: &MediumParams,
    eta: f64,
    w20: Complex64,
    w30: Complex64,
) -> Result<(Complex64, Complex64, Complex64)> {
    let (d1, d2, d3, delta) = determinant(params, eta)?;
    let (o12, o13) = (params.omega12, params.omega13);
    let alpha1 = (d3 * o12 * w20 + d2 * o13 * w30) / delta;
    let alpha2 = (-params.omega21() * o13 * w30 + (params.rabi13_sq() - d1 * d3) * w20) / delta;
    let alpha3 = (-params.omega31() * o12 * w20 + (params.rabi12_sq() - d1 * d2) * w30) / delta;
    Ok((alpha1, alpha2, alpha3))
}

/// The three additive contributions to α₃.
///
/// `probe` and `generated` are the two excitation pathways into |3⟩ (via the
/// probe and via the generated field); `detuning` is the −D₁D₂W₃₀/Δ term,
/// negligible when |Ω₁₂|² ≫ |D₁D₂|.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Alpha3Pathways {
    pub probe: Complex64,
    pub generated: Complex64,
    pub detuning: Complex64,
}

impl Alpha3Pathways {
    pub fn total(&self) -> Complex64 {
        self.probe + self.generated + self.detuning
    }

    /// Residual of the two-pathway interference.
    pub fn interference(&self) -> Complex64 {
        self.probe + self.generated
    }
}

pub fn alpha3_pathways(params: &MediumParams, eta: f64, w20: Complex64, w30: Complex64) -> Result<Alpha3Pathways> {
    let (d1, d2, _, delta) = determinant(params, eta)?;
    Ok(Alpha3Pathways {
        probe: -params.omega31() * params.omega12 * w20 / delta,
        generated: params.rabi12_sq() * w30 / delta,
        detuning: -d1 * d2 * w30 / delta,
    })
}

/// Residuals of the Fourier-domain amplitude equations for given α and W.
pub fn amplitude_residuals(
    params: &MediumParams,
    eta: f64,
    alpha: (Complex64, Complex64, Complex64),
    w20: Complex64,
    w30: Complex64,
) -> [Complex64; 3] {
    let (d1, d2, d3) = detuning_factors(params, eta);
    let (a1, a2, a3) = alpha;
    [
        params.omega21() * a1 + d2 * a2 + w20,
        d1 * a1 + params.omega12 * a2 + params.omega13 * a3,
        params.omega31() * a1 + d3 * a3 + w30,
    ]
}
