//! Propagation of a weak probe and the field it generates through a
//! four-level double-Λ medium driven by two strong coupling fields.
//!
//! Units are dimensionless: time in τ (the probe duration), distance in cτ,
//! frequency in 1/τ.

pub mod analytic;
pub mod error;
pub mod model;
pub mod oracle;
pub mod presets;
pub mod spectral;
pub mod trace;

pub use error::{Condition, Error, Result};
pub use model::{MediumParams, ProbePulse, PulseShape, SpectralResponse, TabulatedShape};
pub use spectral::{SpectralField, SpectralGrid, SpectralSolver, TransferMatrix};
pub use trace::{EfficiencyTrace, EnvelopeTrace};

/// Crate version, recorded in emitted datasets.
pub const VERSION: &str = env!("CARGO_PKG_VERSION");
