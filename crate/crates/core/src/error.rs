use std::fmt;

use thiserror::Error;

/// A single regime condition that was evaluated, with its margin.
///
/// `margin` is the ratio by which the condition is met: values `>= 1.0`
/// mean satisfied.
#[derive(Debug, Clone, PartialEq)]
pub struct Condition {
    pub name: &'static str,
    pub satisfied: bool,
    pub margin: f64,
}

impl fmt::Display for Condition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mark = if self.satisfied { "ok" } else { "FAILED" };
        write!(f, "{} ({mark}, margin {:.3})", self.name, self.margin)
    }
}

fn list(conditions: &[Condition]) -> String {
    conditions.iter().filter(|c| !c.satisfied).map(ToString::to_string).collect::<Vec<_>>().join(", ")
}

#[derive(Debug, Clone, Error, PartialEq)]
pub enum Error {
    #[error("invalid parameter `{field}`: {reason}")]
    InvalidParameter { field: &'static str, reason: String },

    #[error("spectral response is singular at eta = {eta} (|Delta| = {magnitude:e})")]
    SingularResponse { eta: f64, magnitude: f64 },

    #[error("spectral grid too coarse: spacing {spacing} exceeds {limit}")]
    GridTooCoarse { spacing: f64, limit: f64 },

    #[error("phase aliasing: per-sample phase step {step:.3} rad exceeds pi/4 near eta = {eta}")]
    PhaseAliasing { step: f64, eta: f64 },

    #[error("mode gain overflow at eta = {eta}: exponent {exponent:.1}")]
    GainOverflow { eta: f64, exponent: f64 },

    #[error("probe amplitude is zero")]
    ZeroProbe,

    #[error("both coupling Rabi frequencies are zero")]
    ZeroCoupling,

    #[error("degenerate detuning: |Omega12|^2 delta3 + |Omega13|^2 delta2 = 0")]
    DegenerateDetuning,

    #[error("limit regime violated: {}", list(.0))]
    RegimeViolation(Vec<Condition>),

    #[error("oracle step too large: weighted field energy grew by {growth:.3e} at z = {z}")]
    StepTooLarge { z: f64, growth: f64 },

    #[error("oracle not converged: Richardson error {error:.3e} exceeds {tolerance:e}")]
    NotConverged { error: f64, tolerance: f64 },
}

pub type Result<T> = std::result::Result<T, Error>;
