//! JSON run configuration.
//!
//! Every quantity is dimensionless and the field name carries its unit:
//! `_tau` means a value of X·τ (or t/τ), `_c_tau2` a value of κ·cτ², and
//! `z_over_c_tau` a distance in units of cτ.

use std::path::{Path, PathBuf};

use lambda_fwm_core::analytic::{default_time_grid, optimal_distance};
use lambda_fwm_core::trace::linspace;
use lambda_fwm_core::{Error as CoreError, MediumParams, ProbePulse, SpectralGrid, TabulatedShape};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{CliError, CliResult};

/// A real number, or `[re, im]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ComplexValue {
    Real(f64),
    Pair([f64; 2]),
}

impl From<ComplexValue> for Complex64 {
    fn from(v: ComplexValue) -> Self {
        match v {
            ComplexValue::Real(re) => Complex64::new(re, 0.0),
            ComplexValue::Pair([re, im]) => Complex64::new(re, im),
        }
    }
}

impl From<Complex64> for ComplexValue {
    fn from(v: Complex64) -> Self {
        if v.im == 0.0 {
            Self::Real(v.re)
        } else {
            Self::Pair([v.re, v.im])
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MediumConfig {
    pub omega12_tau: ComplexValue,
    pub omega13_tau: ComplexValue,
    pub delta1_tau: f64,
    pub delta2_tau: f64,
    pub delta3_tau: f64,
    pub gamma1_tau: f64,
    pub gamma2_tau: f64,
    pub gamma3_tau: f64,
    pub kappa02_c_tau2: f64,
    pub kappa03_c_tau2: f64,
}

impl From<&MediumParams> for MediumConfig {
    fn from(p: &MediumParams) -> Self {
        Self {
            omega12_tau: p.omega12.into(),
            omega13_tau: p.omega13.into(),
            delta1_tau: p.delta1,
            delta2_tau: p.delta2,
            delta3_tau: p.delta3,
            gamma1_tau: p.gamma1,
            gamma2_tau: p.gamma2,
            gamma3_tau: p.gamma3,
            kappa02_c_tau2: p.kappa02,
            kappa03_c_tau2: p.kappa03,
        }
    }
}

impl MediumConfig {
    pub fn params(&self) -> CliResult<MediumParams> {
        let params = MediumParams {
            omega12: self.omega12_tau.into(),
            omega13: self.omega13_tau.into(),
            delta1: self.delta1_tau,
            delta2: self.delta2_tau,
            delta3: self.delta3_tau,
            gamma1: self.gamma1_tau,
            gamma2: self.gamma2_tau,
            gamma3: self.gamma3_tau,
            kappa02: self.kappa02_c_tau2,
            kappa03: self.kappa03_c_tau2,
        };
        params.validated().map_err(|e| match e {
            CoreError::InvalidParameter { field, reason } => {
                CliError::config(format!("medium.{}", config_name(field)), reason)
            }
            other => CliError::Solver(other),
        })
    }
}

fn config_name(field: &str) -> String {
    match field {
        "kappa02" | "kappa03" => format!("{field}_c_tau2"),
        other => format!("{other}_tau"),
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum ShapeConfig {
    /// exp(−(t/τ)²)
    Gaussian,
    Tabulated {
        t0_tau: f64,
        dt_tau: f64,
        samples: Vec<ComplexValue>,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PulseConfig {
    /// Ω₂₀(0,0)τ.
    pub amplitude_tau: ComplexValue,
    #[serde(default = "gaussian")]
    pub shape: ShapeConfig,
}

fn gaussian() -> ShapeConfig {
    ShapeConfig::Gaussian
}

impl Default for PulseConfig {
    fn default() -> Self {
        Self { amplitude_tau: ComplexValue::Real(1e-3), shape: ShapeConfig::Gaussian }
    }
}

impl PulseConfig {
    pub fn pulse(&self) -> CliResult<ProbePulse> {
        let amplitude: Complex64 = self.amplitude_tau.into();
        let pulse = match &self.shape {
            ShapeConfig::Gaussian => ProbePulse::gaussian(amplitude),
            ShapeConfig::Tabulated { t0_tau, dt_tau, samples } => {
                let samples = samples.iter().map(|&s| s.into()).collect();
                let shape = TabulatedShape::new(*t0_tau, *dt_tau, samples)
                    .map_err(|e| CliError::config("pulse.shape.tabulated", e.to_string()))?;
                ProbePulse::tabulated(amplitude, shape)
            }
        };
        pulse.validate().map_err(|e| CliError::config("pulse.amplitude_tau", e.to_string()))?;
        Ok(pulse)
    }
}

/// A distance in cτ, or `"auto"` for the first constructive-beat distance.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum DistanceConfig {
    Value(f64),
    Keyword(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TimeGridConfig {
    pub t_min_tau: f64,
    pub t_max_tau: f64,
    pub n: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SpectralGridConfig {
    pub eta_min: f64,
    pub eta_max: f64,
    pub n_points: usize,
}

impl Default for SpectralGridConfig {
    fn default() -> Self {
        let g = SpectralGrid::default();
        Self { eta_min: g.eta_min(), eta_max: g.eta_max(), n_points: g.n_points() }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Solver {
    Spectral,
    Analytic,
    Oracle,
}

impl Solver {
    pub fn name(self) -> &'static str {
        match self {
            Self::Spectral => "spectral",
            Self::Analytic => "analytic",
            Self::Oracle => "oracle",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    #[default]
    Csv,
    Json,
}

impl Format {
    pub fn extension(self) -> &'static str {
        match self {
            Self::Csv => "csv",
            Self::Json => "json",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputConfig {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub path: Option<PathBuf>,
    #[serde(default)]
    pub format: Format,
}

fn default_solvers() -> Vec<Solver> {
    vec![Solver::Spectral]
}

fn default_c_tau_cm() -> f64 {
    1.0
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub medium: MediumConfig,
    #[serde(default)]
    pub pulse: PulseConfig,
    pub z_over_c_tau: DistanceConfig,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub time_grid: Option<TimeGridConfig>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub spectral_grid: Option<SpectralGridConfig>,
    #[serde(default = "default_solvers")]
    pub solvers: Vec<Solver>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output: Option<OutputConfig>,
    #[serde(default = "default_c_tau_cm")]
    pub c_tau_cm: f64,
}

/// A configuration with every quantity resolved to solver inputs.
#[derive(Debug, Clone)]
pub struct ResolvedRun {
    pub config: RunConfig,
    pub params: MediumParams,
    pub pulse: ProbePulse,
    pub z: f64,
    pub times: Vec<f64>,
    pub spectral_grid: SpectralGrid,
}

impl RunConfig {
    pub fn from_medium(params: &MediumParams, z: DistanceConfig, solvers: Vec<Solver>) -> Self {
        Self {
            medium: params.into(),
            pulse: PulseConfig::default(),
            z_over_c_tau: z,
            time_grid: None,
            spectral_grid: None,
            solvers,
            output: None,
            c_tau_cm: 1.0,
        }
    }

    pub fn resolve_distance(&self, params: &MediumParams) -> CliResult<f64> {
        match &self.z_over_c_tau {
            DistanceConfig::Value(z) if z.is_finite() && *z >= 0.0 => Ok(*z),
            DistanceConfig::Value(z) => {
                Err(CliError::config("z_over_c_tau", format!("must be finite and >= 0, got {z}")))
            }
            DistanceConfig::Keyword(k) if k == "auto" => Ok(optimal_distance(params)?),
            DistanceConfig::Keyword(k) => {
                Err(CliError::config("z_over_c_tau", format!("expected a number or \"auto\", got \"{k}\"")))
            }
        }
    }

    /// Validates and fills in every default, so that the returned config
    /// reproduces the same run when written out and read back.
    pub fn resolve(&self) -> CliResult<ResolvedRun> {
        if self.solvers.is_empty() {
            return Err(CliError::config("solvers", "at least one solver must be selected"));
        }
        if !(self.c_tau_cm.is_finite() && self.c_tau_cm > 0.0) {
            return Err(CliError::config("c_tau_cm", "must be finite and > 0"));
        }
        let params = self.medium.params()?;
        let pulse = self.pulse.pulse()?;
        let z = self.resolve_distance(&params)?;

        let time_grid = match self.time_grid {
            Some(g) => {
                if !(g.t_min_tau.is_finite() && g.t_max_tau.is_finite() && g.t_min_tau < g.t_max_tau) {
                    return Err(CliError::config("time_grid", "need finite t_min_tau < t_max_tau"));
                }
                if g.n < 2 {
                    return Err(CliError::config("time_grid.n", "need at least 2 samples"));
                }
                g
            }
            None => {
                let times = default_time_grid(&params, z);
                TimeGridConfig { t_min_tau: times[0], t_max_tau: times[times.len() - 1], n: times.len() }
            }
        };
        let spectral = self.spectral_grid.unwrap_or_default();
        let spectral_grid = SpectralGrid::new(spectral.eta_min, spectral.eta_max, spectral.n_points)
            .map_err(|e| CliError::config("spectral_grid", e.to_string()))?;

        let mut solvers = self.solvers.clone();
        solvers.sort();
        solvers.dedup();
        let config = Self { time_grid: Some(time_grid), spectral_grid: Some(spectral), solvers, ..self.clone() };
        Ok(ResolvedRun {
            config,
            params,
            pulse,
            z,
            times: linspace(time_grid.t_min_tau, time_grid.t_max_tau, time_grid.n),
            spectral_grid,
        })
    }
}

/// Deserializes `T` from JSON text, reporting the path of the offending
/// field on failure.
pub fn parse_json<T: serde::de::DeserializeOwned>(text: &str) -> CliResult<T> {
    let de = &mut serde_json::Deserializer::from_str(text);
    serde_path_to_error::deserialize(de).map_err(|e| {
        let path = e.path().to_string();
        CliError::config(if path == "." { String::from("(root)") } else { path }, e.into_inner().to_string())
    })
}

/// Extracts the run configuration embedded in a previously written
/// dataset, if `text` is one.
fn embedded_config(text: &str) -> Option<String> {
    let trimmed = text.trim_start();
    if trimmed.starts_with('#') {
        return trimmed
            .lines()
            .take_while(|l| l.starts_with('#'))
            .find_map(|l| l.strip_prefix("# config = "))
            .map(str::to_string);
    }
    let value: serde_json::Value = serde_json::from_str(trimmed).ok()?;
    let config = value.get("metadata")?.get("config")?;
    Some(config.to_string())
}

/// Loads a run configuration, or the configuration recorded in a dataset
/// written by `run`.
pub fn load_run_config(path: &Path) -> CliResult<RunConfig> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
    match embedded_config(&text) {
        Some(inner) => parse_json(&inner),
        None => parse_json(&text),
    }
}
