//! Executes a resolved configuration with each selected solver.

use std::collections::BTreeMap;

use lambda_fwm_core::analytic::{detuned_fields, efficiency_analytic, on_resonance_fields, LimitRegime, RegimeKind};
use lambda_fwm_core::oracle::{auto_grid, Oracle, OracleOptions, SpaceTimeGrid};
use lambda_fwm_core::spectral::efficiency_trace;
use lambda_fwm_core::{EfficiencyTrace, EnvelopeTrace, Error as CoreError, SpectralSolver};
use num_complex::Complex64;
use serde::Serialize;

use crate::config::{ResolvedRun, RunConfig, Solver};
use crate::error::CliResult;

/// One solver's fields and efficiency on the run's time grid.
#[derive(Debug, Clone)]
pub struct SolverOutput {
    pub solver: Solver,
    pub omega20: Vec<Complex64>,
    pub omega30: Vec<Complex64>,
    pub efficiency: EfficiencyTrace,
}

#[derive(Debug, Clone, Serialize)]
pub struct Peak {
    pub efficiency: f64,
    pub t_over_tau: f64,
    pub t_minus_z_over_tau: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct Metadata {
    pub tool: String,
    pub version: String,
    pub solver_versions: BTreeMap<String, String>,
    pub config: RunConfig,
    pub z_over_c_tau: f64,
    pub z_cm: f64,
    pub regime: Option<String>,
    pub peaks: BTreeMap<String, Peak>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub oracle_richardson_error: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub generated_unix_s: Option<u64>,
}

#[derive(Debug, Clone)]
pub struct Dataset {
    pub metadata: Metadata,
    pub times: Vec<f64>,
    pub outputs: Vec<SolverOutput>,
}

impl Dataset {
    pub fn output(&self, solver: Solver) -> Option<&SolverOutput> {
        self.outputs.iter().find(|o| o.solver == solver)
    }

    pub fn retarded_times(&self) -> Vec<f64> {
        self.times.iter().map(|t| t - self.metadata.z_over_c_tau).collect()
    }
}

fn from_trace(solver: Solver, run: &ResolvedRun, trace: &EnvelopeTrace) -> CliResult<SolverOutput> {
    let efficiency = efficiency_trace(trace, &run.params, &run.pulse)?;
    Ok(SolverOutput { solver, omega20: trace.omega20(), omega30: trace.omega30(), efficiency })
}

fn spectral(run: &ResolvedRun) -> CliResult<SolverOutput> {
    let trace = SpectralSolver::new(run.spectral_grid).solve(&run.params, &run.pulse, run.z, &run.times)?;
    from_trace(Solver::Spectral, run, &trace)
}

fn analytic(run: &ResolvedRun) -> CliResult<SolverOutput> {
    let trace = match LimitRegime::classify(&run.params).map(|r| r.kind) {
        Some(RegimeKind::OnResonance) => on_resonance_fields(&run.params, &run.pulse, run.z, &run.times)?,
        Some(RegimeKind::DetunedStrong) => detuned_fields(&run.params, &run.pulse, run.z, &run.times)?,
        None => {
            let mut failed = LimitRegime::on_resonance(&run.params).validity;
            failed.extend(LimitRegime::detuned_strong(&run.params).validity);
            return Err(CoreError::RegimeViolation(failed).into());
        }
    };
    let efficiency = efficiency_analytic(&run.params, run.z, &run.times)?;
    Ok(SolverOutput { solver: Solver::Analytic, omega20: trace.omega20(), omega30: trace.omega30(), efficiency })
}

/// Linear interpolation of samples on a uniform grid; `xs` must cover `x`.
fn interpolate(x0: f64, dx: f64, ys: &[Complex64], x: f64) -> Complex64 {
    let pos = ((x - x0) / dx).clamp(0.0, (ys.len() - 1) as f64);
    let k = (pos.floor() as usize).min(ys.len() - 2);
    let frac = pos - k as f64;
    ys[k] * (1.0 - frac) + ys[k + 1] * frac
}

fn oracle(run: &ResolvedRun) -> CliResult<(SolverOutput, Option<f64>)> {
    let auto = auto_grid(&run.params, &run.pulse, run.z);
    let ds = auto.ds();
    let s_min = auto.s_min.min(run.times[0] - run.z);
    let s_max = auto.s_max.max(run.times[run.times.len() - 1] - run.z);
    let grid = SpaceTimeGrid { s_min, s_max, s_steps: ((s_max - s_min) / ds).ceil() as usize, ..auto };
    let options = OracleOptions { grid: Some(grid), ..OracleOptions::default() };
    let report = Oracle::new(options).solve(&run.params, &run.pulse, run.z)?;
    let tr = &report.trace;
    let (t0, dt) = (tr.times[0], tr.times[1] - tr.times[0]);
    let resample =
        |v: &[Complex64]| -> Vec<Complex64> { run.times.iter().map(|&t| interpolate(t0, dt, v, t)).collect() };
    let trace = EnvelopeTrace {
        times: run.times.clone(),
        z: run.z,
        probe_amplitude: tr.probe_amplitude,
        envelope20: resample(&tr.envelope20),
        envelope30: resample(&tr.envelope30),
    };
    Ok((from_trace(Solver::Oracle, run, &trace)?, report.richardson_error))
}

fn regime_name(run: &ResolvedRun) -> Option<String> {
    LimitRegime::classify(&run.params).map(|r| match r.kind {
        RegimeKind::OnResonance => "on_resonance".to_string(),
        RegimeKind::DetunedStrong => "detuned_strong".to_string(),
    })
}

/// Runs every selected solver. `stamp` adds the wall-clock time to the
/// metadata; without it the dataset depends only on the configuration.
pub fn execute(run: &ResolvedRun, stamp: bool) -> CliResult<Dataset> {
    let mut outputs = Vec::new();
    let mut richardson = None;
    for &solver in &run.config.solvers {
        log::info!("running {} solver", solver.name());
        let output = match solver {
            Solver::Spectral => spectral(run)?,
            Solver::Analytic => analytic(run)?,
            Solver::Oracle => {
                let (output, error) = oracle(run)?;
                richardson = error;
                output
            }
        };
        outputs.push(output);
    }
    let peaks = outputs
        .iter()
        .map(|o| {
            let peak = Peak {
                efficiency: o.efficiency.peak,
                t_over_tau: o.efficiency.peak_time,
                t_minus_z_over_tau: o.efficiency.peak_time - run.z,
            };
            (o.solver.name().to_string(), peak)
        })
        .collect();
    let version = lambda_fwm_core::VERSION.to_string();
    let solver_versions =
        run.config.solvers.iter().map(|s| (s.name().to_string(), format!("lambda-fwm-core {version}"))).collect();
    let metadata = Metadata {
        tool: "lambda-fwm".to_string(),
        version: env!("CARGO_PKG_VERSION").to_string(),
        solver_versions,
        config: run.config.clone(),
        z_over_c_tau: run.z,
        z_cm: run.z * run.config.c_tau_cm,
        regime: regime_name(run),
        peaks,
        oracle_richardson_error: richardson,
        generated_unix_s: stamp.then(unix_now),
    };
    Ok(Dataset { metadata, times: run.times.clone(), outputs })
}

pub fn unix_now() -> u64 {
    std::time::SystemTime::now().duration_since(std::time::UNIX_EPOCH).map(|d| d.as_secs()).unwrap_or(0)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn interpolation_is_exact_for_lines() {
        let ys: Vec<Complex64> = (0..11).map(|k| Complex64::new(2.0 * k as f64, -(k as f64))).collect();
        let v = interpolate(0.0, 0.5, &ys, 1.25);
        assert!((v - Complex64::new(5.0, -2.5)).norm() < 1e-14);
        assert_eq!(interpolate(0.0, 0.5, &ys, 5.0), ys[10]);
    }
}
