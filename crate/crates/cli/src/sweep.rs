//! Parameter sweeps: one dataset per value, written concurrently, and an
//! index written once every point has finished.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::config::{parse_json, Format, RunConfig};
use crate::error::{CliError, CliResult};
use crate::output::{render, write_atomic};
use crate::run::{execute, Peak};

pub const THREADS_VAR: &str = "LAMBDA_FWM_THREADS";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SweepParameter {
    Delta2,
    Delta3,
    /// |Ω₁₃/Ω₁₂|², varied through |Ω₁₃| at fixed Ω₁₂ and phase of Ω₁₃.
    RabiRatioSq,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepSpec {
    pub parameter: SweepParameter,
    pub values: Vec<f64>,
    pub base: RunConfig,
}

impl SweepSpec {
    pub fn validate(&self) -> CliResult<()> {
        if self.values.is_empty() {
            return Err(CliError::config("values", "at least one value is required"));
        }
        for (i, v) in self.values.iter().enumerate() {
            if !v.is_finite() {
                return Err(CliError::config(format!("values[{i}]"), format!("must be finite, got {v}")));
            }
            if self.parameter == SweepParameter::RabiRatioSq && *v < 0.0 {
                return Err(CliError::config(format!("values[{i}]"), format!("a squared ratio must be >= 0, got {v}")));
            }
        }
        Ok(())
    }

    /// The base configuration with the swept parameter set to `value`.
    pub fn point(&self, value: f64) -> RunConfig {
        let mut config = self.base.clone();
        let medium = &mut config.medium;
        match self.parameter {
            SweepParameter::Delta2 => medium.delta2_tau = value,
            SweepParameter::Delta3 => medium.delta3_tau = value,
            SweepParameter::RabiRatioSq => {
                let o12: Complex64 = medium.omega12_tau.into();
                let o13: Complex64 = medium.omega13_tau.into();
                let phase = if o13.norm() > 0.0 { o13.arg() } else { 0.0 };
                medium.omega13_tau = Complex64::from_polar(o12.norm() * value.sqrt(), phase).into();
            }
        }
        config.output = None;
        config
    }
}

pub fn load_sweep_spec(path: &Path) -> CliResult<SweepSpec> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
    let spec: SweepSpec = parse_json(&text)?;
    spec.validate()?;
    Ok(spec)
}

#[derive(Debug, Clone, Serialize)]
pub struct IndexEntry {
    pub index: usize,
    pub value: f64,
    pub file: String,
    pub z_over_c_tau: f64,
    pub z_cm: f64,
    pub peaks: BTreeMap<String, Peak>,
}

#[derive(Debug, Clone, Serialize)]
pub struct SweepIndex {
    pub parameter: SweepParameter,
    pub points: Vec<IndexEntry>,
}

/// Thread cap from the environment; `None` leaves the pool default.
pub fn thread_limit() -> CliResult<Option<usize>> {
    match std::env::var(THREADS_VAR) {
        Err(_) => Ok(None),
        Ok(v) => match v.trim().parse::<usize>() {
            Ok(n) if n > 0 => Ok(Some(n)),
            _ => Err(CliError::config(THREADS_VAR, format!("expected a positive integer, got \"{v}\""))),
        },
    }
}

fn run_point(spec: &SweepSpec, index: usize, dir: &Path, format: Format, stamp: bool) -> CliResult<IndexEntry> {
    let value = spec.values[index];
    let run = spec.point(value).resolve()?;
    let dataset = execute(&run, stamp)?;
    let file = format!("point_{index:03}.{}", format.extension());
    write_atomic(&dir.join(&file), &render(&dataset, format)?)?;
    log::info!("sweep point {index} ({value}) written to {file}");
    let meta = dataset.metadata;
    Ok(IndexEntry { index, value, file, z_over_c_tau: meta.z_over_c_tau, z_cm: meta.z_cm, peaks: meta.peaks })
}

/// Runs every point and writes `index.json` last. Returns its path. On
/// failure the first failing point's error is returned and no index is
/// written.
pub fn run_sweep(
    spec: &SweepSpec,
    dir: &Path,
    format: Format,
    stamp: bool,
    threads: Option<usize>,
) -> CliResult<PathBuf> {
    spec.validate()?;
    std::fs::create_dir_all(dir).map_err(|e| CliError::io(dir, e))?;
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(n) = threads {
        builder = builder.num_threads(n);
    }
    let pool = builder.build().map_err(|e| CliError::config(THREADS_VAR, e.to_string()))?;
    let results: Vec<CliResult<IndexEntry>> = pool
        .install(|| (0..spec.values.len()).into_par_iter().map(|i| run_point(spec, i, dir, format, stamp)).collect());
    let points = results.into_iter().collect::<CliResult<Vec<_>>>()?;
    let index = SweepIndex { parameter: spec.parameter, points };
    let path = dir.join("index.json");
    let mut text = serde_json::to_string_pretty(&index).expect("plain data always serializes");
    text.push('\n');
    write_atomic(&path, &text)?;
    Ok(path)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::ComplexValue;

    fn spec(parameter: SweepParameter, values: Vec<f64>) -> SweepSpec {
        let base = RunConfig::from_medium(
            &lambda_fwm_core::presets::fig2a(),
            crate::config::DistanceConfig::Keyword("auto".into()),
            vec![crate::config::Solver::Analytic],
        );
        SweepSpec { parameter, values, base }
    }

    #[test]
    fn ratio_point_scales_omega13() {
        let s = spec(SweepParameter::RabiRatioSq, vec![0.5]);
        let cfg = s.point(0.25);
        assert_eq!(cfg.medium.omega13_tau, ComplexValue::Real(100.0));
        let o13: Complex64 = s.point(0.5).medium.omega13_tau.into();
        assert!((o13.norm_sqr() / 200.0f64.powi(2) - 0.5).abs() < 1e-12);
    }

    #[test]
    fn detuning_points() {
        let s = spec(SweepParameter::Delta3, vec![1.0]);
        assert_eq!(s.point(60.0).medium.delta3_tau, 60.0);
        assert_eq!(s.point(60.0).medium.delta2_tau, 20.0);
    }

    #[test]
    fn empty_and_non_finite_values_rejected() {
        let err = spec(SweepParameter::Delta2, vec![]).validate().unwrap_err();
        assert!(matches!(err, CliError::Config { path, .. } if path == "values"));
        let err = spec(SweepParameter::Delta2, vec![1.0, f64::NAN]).validate().unwrap_err();
        assert!(matches!(err, CliError::Config { path, .. } if path == "values[1]"));
    }
}
