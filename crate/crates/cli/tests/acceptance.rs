//! Acceptance gate. Prints one PASS/FAIL line per criterion and exits
//! nonzero if any criterion fails.

use std::process::ExitCode;

use lambda_fwm::config::{DistanceConfig, RunConfig, Solver};
use lambda_fwm::figures::{figure_data, Figure};
use lambda_fwm::run::{execute, Dataset};
use lambda_fwm::validate::{
    back_substitution_error, branch_error, flux_error, linearity, parseval_error, semigroup_error, spectral_ratio_lock,
    zero_distance_is_identity, BACK_SUBSTITUTION_TOLERANCE, BRANCH_TOLERANCE, FLUX_TOLERANCE, LINEARITY_TOLERANCE,
    PARSEVAL_TOLERANCE, SEMIGROUP_TOLERANCE,
};
use lambda_fwm_core::analytic::{default_time_grid, optimal_distance};
use lambda_fwm_core::model::spectral_response;
use lambda_fwm_core::oracle::{compare_solvers, Oracle};
use lambda_fwm_core::spectral::{alpha3_quench, efficiency_trace};
use lambda_fwm_core::{presets, MediumParams, ProbePulse, SpectralGrid, SpectralSolver};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

const PROBE: Complex64 = Complex64::new(1e-3, 0.0);

fn ensure(ok: bool, detail: String) -> Outcome {
    if ok {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn run(params: &MediumParams, z: f64) -> Result<Dataset, String> {
    let config = RunConfig::from_medium(params, DistanceConfig::Value(z), vec![Solver::Analytic, Solver::Spectral]);
    let run = config.resolve().map_err(|e| e.to_string())?;
    execute(&run, false).map_err(|e| e.to_string())
}

/// Peaks of both solvers and their largest difference within 2τ of the
/// spectral peak.
fn solver_agreement(params: &MediumParams, z: f64) -> Result<(f64, f64, f64), String> {
    let data = run(params, z)?;
    let analytic = &data.output(Solver::Analytic).ok_or("no analytic output")?.efficiency;
    let spectral = &data.output(Solver::Spectral).ok_or("no spectral output")?.efficiency;
    let peak_time = spectral.peak_time;
    let diff = data
        .times
        .iter()
        .enumerate()
        .filter(|(_, t)| (*t - peak_time).abs() <= 2.0)
        .map(|(k, _)| (analytic.efficiency[k] - spectral.efficiency[k]).abs())
        .fold(0.0, f64::max);
    Ok((analytic.peak, spectral.peak, diff))
}

fn fig2a_reproduction() -> Outcome {
    let (a, s, diff) = solver_agreement(&presets::fig2a(), 3.927)?;
    ensure(
        a >= 0.95 && s >= 0.95 && diff < 0.02,
        format!("peaks analytic {a:.4}, spectral {s:.4} (need >= 0.95); max diff near peak {diff:.2e} (need < 0.02)"),
    )
}

fn fig2b_reproduction() -> Outcome {
    let (a, s, diff) = solver_agreement(&presets::fig2b(), 1.963)?;
    ensure(diff < 0.02, format!("max diff near peak {diff:.2e} (need < 0.02); peaks analytic {a:.4}, spectral {s:.4}"))
}

fn resonant_ceiling() -> Outcome {
    let params = presets::resonant_matched();
    let pulse = ProbePulse::gaussian(PROBE);
    let solver = SpectralSolver::default();
    let mut z = 0.5;
    loop {
        let quench = alpha3_quench(&params, &solver.field(&params, &pulse, z).map_err(|e| e.to_string())?)
            .map_err(|e| e.to_string())?;
        if quench < 1e-3 {
            let times = default_time_grid(&params, z);
            let trace = solver.solve(&params, &pulse, z, &times).map_err(|e| e.to_string())?;
            let peak = efficiency_trace(&trace, &params, &pulse).map_err(|e| e.to_string())?.peak;
            return ensure(
                (peak - 0.25).abs() <= 0.01,
                format!("at z = {z} (quench {quench:.1e}) peak efficiency {peak:.5} (need 0.25 +- 0.01)"),
            );
        }
        z *= 2.0;
        if z > 1e3 {
            return Err(format!("quench still {quench:.1e} at z = {z}"));
        }
    }
}

fn ratio_lock() -> Outcome {
    let params = presets::resonant_dark_state();
    let lock = spectral_ratio_lock(spectral_response, &params, 10.0).map_err(|e| e.to_string())?;
    let expected = params.omega12 / params.omega13;
    let offset = (lock.mean - expected).norm() / expected.norm();
    ensure(
        lock.samples > 1 && lock.spread < 1e-6 && offset < 1e-6,
        format!(
            "ratio {:.9} over {} samples, spread {:.1e}, offset from 0.25 {:.1e} (need < 1e-6)",
            lock.mean.re, lock.samples, lock.spread, offset
        ),
    )
}

fn optimal_distances() -> Outcome {
    let a = optimal_distance(&presets::fig2a()).map_err(|e| e.to_string())?;
    let b = optimal_distance(&presets::fig2b()).map_err(|e| e.to_string())?;
    let close = |x: f64, target: f64| ((x - target) / target).abs() < 5e-3;
    ensure(
        close(a, 3.927) && close(b, 1.963) && close(a, 3.93) && close(b, 1.96),
        format!("{a:.4} and {b:.4} c tau, i.e. {a:.2} cm and {b:.2} cm at 1 cm per c tau"),
    )
}

fn peaks_of(figure: Figure) -> Result<Vec<(f64, f64, f64)>, String> {
    let data = figure_data(figure, &[Solver::Spectral, Solver::Analytic], false).map_err(|e| e.to_string())?;
    data.curves
        .iter()
        .map(|c| {
            let s = data.peak(c.value, Solver::Spectral).ok_or("missing spectral peak")?;
            let a = data.peak(c.value, Solver::Analytic).ok_or("missing analytic peak")?;
            Ok((c.value, s, a))
        })
        .collect()
}

fn phase_matching_argmax() -> Outcome {
    let peaks = peaks_of(Figure::Fig4)?;
    let argmax = |pick: fn(&(f64, f64, f64)) -> f64| {
        peaks.iter().max_by(|x, y| pick(x).total_cmp(&pick(y))).map(|p| p.0).unwrap_or(f64::NAN)
    };
    let (s, a) = (argmax(|p| p.1), argmax(|p| p.2));
    let listed: Vec<String> = peaks.iter().map(|(r, s, _)| format!("{r}: {s:.4}")).collect();
    ensure(s == 0.25 && a == 0.25, format!("argmax spectral {s}, analytic {a}; spectral peaks {}", listed.join(", ")))
}

fn detuning_trend() -> Outcome {
    let mut details = Vec::new();
    let mut ok = true;
    for figure in [Figure::Fig3a, Figure::Fig3b] {
        let peaks = peaks_of(figure)?;
        let at = |v: f64| peaks.iter().find(|p| p.0 == v).copied().ok_or(format!("no curve at {v}"));
        let (low, high) = (at(10.0)?, at(60.0)?);
        ok &= high.1 > low.1 && high.2 > low.2;
        details.push(format!(
            "{}: spectral {:.4} -> {:.4}, analytic {:.4} -> {:.4}",
            figure.name(),
            low.1,
            high.1,
            low.2,
            high.2
        ));
    }
    ensure(ok, details.join("; "))
}

fn oracle_equivalence() -> Outcome {
    let cases = [
        ("fig2a", presets::fig2a(), optimal_distance(&presets::fig2a()).map_err(|e| e.to_string())?),
        ("fig2b", presets::fig2b(), optimal_distance(&presets::fig2b()).map_err(|e| e.to_string())?),
        ("resonant", presets::resonant_dark_state(), 3.0),
    ];
    let mut details = Vec::new();
    let mut ok = true;
    for (name, params, z) in cases {
        let cmp =
            compare_solvers(&params, &ProbePulse::gaussian(PROBE), z, &Oracle::default(), &SpectralSolver::default())
                .map_err(|e| format!("{name}: {e}"))?;
        ok &= cmp.omega20.relative_l2 <= 1e-2 && cmp.omega30.relative_l2 <= 1e-2;
        details.push(format!("{name} {:.1e}/{:.1e}", cmp.omega20.relative_l2, cmp.omega30.relative_l2));
    }
    ensure(ok, format!("relative L2 probe/generated (need <= 1e-2): {}", details.join(", ")))
}

fn polar(rng: &mut ChaCha8Rng, lo: f64, hi: f64) -> Complex64 {
    Complex64::from_polar(rng.gen_range(lo..hi), rng.gen_range(0.0..std::f64::consts::TAU))
}

fn random_medium(rng: &mut ChaCha8Rng) -> MediumParams {
    MediumParams {
        omega12: polar(rng, 20.0, 200.0),
        omega13: polar(rng, 20.0, 200.0),
        delta1: rng.gen_range(-10.0..10.0),
        delta2: rng.gen_range(-10.0..10.0),
        delta3: rng.gen_range(-10.0..10.0),
        gamma1: rng.gen_range(0.5..5.0),
        gamma2: rng.gen_range(0.5..5.0),
        gamma3: rng.gen_range(0.5..5.0),
        kappa02: rng.gen_range(0.5..20.0),
        kappa03: rng.gen_range(0.5..20.0),
    }
}

fn lossless(p: &MediumParams) -> MediumParams {
    MediumParams {
        omega12: Complex64::new(p.omega12.norm(), 0.0),
        omega13: Complex64::new(p.omega13.norm(), 0.0),
        gamma1: 0.0,
        gamma2: 0.0,
        gamma3: 0.0,
        ..*p
    }
}

fn invariant_suite() -> Outcome {
    const DRAWS: usize = 100;
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed_2024);
    let grid = SpectralGrid::new(-16.0, 16.0, 1024).map_err(|e| e.to_string())?;
    let r = spectral_response;
    let mut worst = [0.0f64; 6];
    let mut failures = Vec::new();
    let mut singular = 0;
    for draw in 0..DRAWS {
        let p = random_medium(&mut rng);
        let eta = rng.gen_range(-8.0..8.0);
        let (z1, z2) = (rng.gen_range(0.1..3.0), rng.gen_range(0.1..3.0));
        let w20 = Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
        let w30 = Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
        let c = polar(&mut rng, 0.1, 10.0);
        let e = |x: lambda_fwm_core::Error| format!("draw {draw}: {x}");
        let metrics = [
            branch_error(r, &p, eta, z1).map_err(e)?,
            semigroup_error(r, &p, eta, z1, z2).map_err(e)?,
            match flux_error(r, &lossless(&p), eta, z1, w20, w30) {
                Ok(v) => v,
                Err(_) => {
                    singular += 1;
                    0.0
                }
            },
            parseval_error(r, &p, z1, grid).map_err(e)?,
            back_substitution_error(&p, eta, w20, w30).map_err(e)?,
            {
                let (field_err, same) = linearity(r, &p, z1, PROBE, c).map_err(e)?;
                if !same {
                    failures.push(format!("draw {draw}: efficiency changed with probe amplitude"));
                }
                field_err
            },
        ];
        if !zero_distance_is_identity(r, &p, eta).map_err(e)? {
            failures.push(format!("draw {draw}: T(0) is not the identity"));
        }
        for (w, m) in worst.iter_mut().zip(metrics) {
            *w = w.max(m);
        }
    }
    let limits = [
        ("branch", BRANCH_TOLERANCE),
        ("semigroup", SEMIGROUP_TOLERANCE),
        ("lossless flux", FLUX_TOLERANCE),
        ("parseval", PARSEVAL_TOLERANCE),
        ("back-substitution", BACK_SUBSTITUTION_TOLERANCE),
        ("linearity", LINEARITY_TOLERANCE),
    ];
    for ((name, limit), w) in limits.iter().zip(worst) {
        if w.is_nan() || w > *limit {
            failures.push(format!("{name} {w:.1e} > {limit:.0e}"));
        }
    }
    let summary: Vec<String> = limits.iter().zip(worst).map(|((n, _), w)| format!("{n} {w:.1e}")).collect();
    let detail = format!(
        "{DRAWS} draws, {singular} singular lossless draws skipped; worst {}{}",
        summary.join(", "),
        if failures.is_empty() { String::new() } else { format!("; failures: {}", failures.join("; ")) }
    );
    ensure(failures.is_empty(), detail)
}

fn three_photon_quench() -> Outcome {
    let params = presets::resonant_dark_state();
    let pulse = ProbePulse::gaussian(PROBE);
    let solver = SpectralSolver::default();
    let mut values = Vec::new();
    for z in [1.0, 3.0, 10.0] {
        let field = solver.field(&params, &pulse, z).map_err(|e| e.to_string())?;
        values.push(alpha3_quench(&params, &field).map_err(|e| e.to_string())?);
    }
    ensure(
        values[0] > values[1] && values[1] > values[2] && values[2] < 1e-3,
        format!("quench at z = 1, 3, 10: {:.1e}, {:.1e}, {:.1e}", values[0], values[1], values[2]),
    )
}

fn main() -> ExitCode {
    let criteria: [Criterion; 10] = [
        ("fig2a reproduction", fig2a_reproduction),
        ("fig2b solver agreement", fig2b_reproduction),
        ("on-resonance 25% ceiling", resonant_ceiling),
        ("ratio lock", ratio_lock),
        ("optimal distance", optimal_distances),
        ("phase-matching argmax", phase_matching_argmax),
        ("detuning trend", detuning_trend),
        ("oracle equivalence", oracle_equivalence),
        ("invariant suite", invariant_suite),
        ("three-photon quench", three_photon_quench),
    ];
    let mut failed = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        let started = std::time::Instant::now();
        let outcome = std::panic::catch_unwind(check).unwrap_or_else(|_| Err("panicked".to_string()));
        let secs = started.elapsed().as_secs_f64();
        match outcome {
            Ok(detail) => println!("criterion {:>2} PASS {name}: {detail} [{secs:.1}s]", i + 1),
            Err(detail) => {
                failed += 1;
                println!("criterion {:>2} FAIL {name}: {detail} [{secs:.1}s]", i + 1);
            }
        }
    }
    println!("acceptance: {} passed, {failed} failed", criteria.len() - failed);
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
